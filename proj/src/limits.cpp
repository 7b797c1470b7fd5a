#include "bergkern/limits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "bergkern/errors.hpp"
#include "bergkern/parallel.hpp"

namespace bergkern {

std::string mode_name(ScalingMode mode) {
  switch (mode) {
    case ScalingMode::ErfcNormal: return "erfc_normal";
    case ScalingMode::MverfcUnitary: return "mverfc_unitary";
    case ScalingMode::BulkGinibre: return "bulk_ginibre";
  }
  return "unknown";
}

ScalingMode parse_mode(const std::string& name) {
  if (name == "erfc_normal") return ScalingMode::ErfcNormal;
  if (name == "mverfc_unitary") return ScalingMode::MverfcUnitary;
  if (name == "bulk_ginibre") return ScalingMode::BulkGinibre;
  raise(ErrorKind::Validation, "unknown scaling mode '" + name + "'");
}

std::string normalization_name(Normalization norm) {
  return norm == Normalization::ScalarDet ? "scalar_det" : "matrix";
}

Normalization parse_normalization(const std::string& name) {
  if (name == "scalar_det") return Normalization::ScalarDet;
  if (name == "matrix") return Normalization::Matrix;
  raise(ErrorKind::Validation, "unknown normalization '" + name + "'");
}

EdgeFrame bulk_frame(const PotentialModel& model, const CVector& z) {
  if (z.size() != model.dim()) raise(ErrorKind::Validation, "point dimension mismatch");
  Containment c = droplet_contains(model, z);
  if (!c.inside || c.margin <= 0.0) raise(ErrorKind::Validation, "bulk point must lie inside the droplet");
  EdgeFrame f;
  f.z0 = z;
  f.normal = CVector::Zero(z.size());
  f.planar_normals = CVector::Ones(z.size());
  f.hessian = complex_hessian(model, z);
  f.ma_det = ma_determinant(model, z);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(f.hessian);
  Eigen::VectorXd lam = eig.eigenvalues();
  if (!(lam.minCoeff() > 0.0)) raise(ErrorKind::Numeric, "complex Hessian is not positive definite");
  Eigen::VectorXd inv = lam.cwiseSqrt().cwiseInverse();
  f.hessian_inv_sqrt = eig.eigenvectors() * inv.cast<std::complex<double>>().asDiagonal() *
                       eig.eigenvectors().adjoint();
  f.U = CMatrix::Identity(z.size(), z.size());
  f.active = 0;
  return f;
}

bool GridPoint::diagonal() const { return xi.size() == eta.size() && (xi - eta).norm() == 0.0; }

std::vector<GridPoint> make_grid(const GridSpec& spec, int dim) {
  if (!(spec.step > 0.0) || spec.re_max < spec.re_min) raise(ErrorKind::Validation, "invalid grid spec");
  if (dim < 1) raise(ErrorKind::Validation, "grid dimension must be >= 1");
  std::vector<double> axis;
  int count = static_cast<int>(std::floor((spec.re_max - spec.re_min) / spec.step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) axis.push_back(spec.re_min + i * spec.step);
  const std::size_t per = axis.size();
  std::vector<CVector> points;
  std::size_t total = 1;
  for (int k = 0; k < 2 * dim; ++k) total *= per;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    CVector p(dim);
    for (int k = 0; k < dim; ++k) {
      double re = axis[r % per];
      r /= per;
      double im = axis[r % per];
      r /= per;
      p(k) = {re, im};
    }
    if (p.norm() <= spec.cap + 1e-12) points.push_back(p);
  }
  std::vector<GridPoint> grid;
  if (spec.diagonal_only) {
    for (const auto& p : points) grid.push_back({p, p});
  } else {
    for (const auto& p : points)
      for (const auto& q : points) grid.push_back({p, q});
  }
  if (spec.max_pairs > 0 && grid.size() > spec.max_pairs) {
    std::vector<GridPoint> thin;
    double stride = static_cast<double>(grid.size()) / static_cast<double>(spec.max_pairs);
    for (std::size_t i = 0; i < spec.max_pairs; ++i)
      thin.push_back(grid[static_cast<std::size_t>(std::floor(i * stride))]);
    grid = std::move(thin);
  }
  return grid;
}

CVector scaled_point(const EdgeFrame& frame, ScalingMode mode, int n, const CVector& xi,
                     const ScalingOptions& opts) {
  const int d = static_cast<int>(frame.z0.size());
  const double sn = std::sqrt(static_cast<double>(n));
  switch (mode) {
    case ScalingMode::ErfcNormal:
      if (xi.size() != 1) raise(ErrorKind::Validation, "erfc_normal takes scalar xi");
      if (frame.normal.norm() == 0.0) raise(ErrorKind::Validation, "erfc_normal needs an edge frame");
      return frame.z0 + frame.hessian_inv_sqrt * frame.normal * xi(0) / sn;
    case ScalingMode::MverfcUnitary:
      if (xi.size() != d) raise(ErrorKind::Validation, "mverfc_unitary takes xi in C^d");
      if (frame.normal.norm() == 0.0) raise(ErrorKind::Validation, "mverfc_unitary needs an edge frame");
      if (opts.norm == Normalization::ScalarDet) return frame.z0 + frame.U * xi / std::sqrt(n * frame.ma_det);
      return frame.z0 + frame.hessian_inv_sqrt * (frame.U * xi) / sn;
    case ScalingMode::BulkGinibre:
      if (xi.size() != d) raise(ErrorKind::Validation, "bulk_ginibre takes xi in C^d");
      return frame.z0 + frame.hessian_inv_sqrt * xi / sn;
  }
  raise(ErrorKind::Validation, "unknown scaling mode");
}

LogComplex rescaled_kernel(const KernelJob& job, const EdgeFrame& frame, ScalingMode mode,
                           const CVector& xi, const CVector& eta, const ScalingOptions& opts) {
  if (frame.z0.size() != job.model.dim()) raise(ErrorKind::Validation, "frame does not match the model");
  CVector z = scaled_point(frame, mode, job.n, xi, opts);
  CVector w = scaled_point(frame, mode, job.n, eta, opts);
  const double d = static_cast<double>(job.model.dim());
  double log_norm = d * std::log(static_cast<double>(job.n)) + std::log(frame.ma_det);
  return kernel(job, z, w) * LogComplex::polar(-log_norm, 0.0);
}

LogComplex limit_kernel(ScalingMode mode, const CVector& xi, const CVector& eta) {
  switch (mode) {
    case ScalingMode::ErfcNormal: return limit_erfc(xi(0), eta(0));
    case ScalingMode::MverfcUnitary: return limit_mverfc(xi, eta);
    case ScalingMode::BulkGinibre: return limit_ginibre(xi, eta);
  }
  raise(ErrorKind::Validation, "unknown scaling mode");
}

Comparison compare_to_limit(const KernelJob& job, const EdgeFrame& frame, ScalingMode mode,
                            const std::vector<GridPoint>& grid, const ScalingOptions& opts) {
  Comparison out;
  out.n = job.n;
  out.rows.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const GridPoint& g = grid[i];
    ComparisonRow row;
    row.n = job.n;
    row.xi = g.xi;
    row.eta = g.eta;
    row.diagonal = g.diagonal();
    LogComplex fin = rescaled_kernel(job, frame, mode, g.xi, g.eta, opts);
    LogComplex lim = limit_kernel(mode, g.xi, g.eta);
    if (row.diagonal) {
      row.finite_value = fin.value().real();
      row.limit_value = lim.value().real();
    } else {
      row.finite_value = fin.modulus();
      row.limit_value = lim.modulus();
    }
    row.abs_err = std::fabs(row.finite_value - row.limit_value);
    row.rel_err = row.limit_value > 0.0 ? row.abs_err / row.limit_value : row.abs_err;
    row.error = (row.diagonal && row.limit_value >= opts.relative_floor) ? row.rel_err : row.abs_err;
    out.rows[i] = std::move(row);
  });
  for (const auto& r : out.rows) out.sup_error = std::max(out.sup_error, r.error);
  return out;
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) raise(ErrorKind::Validation, "slope fit needs >= 2 points");
  double mx = 0, my = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) raise(ErrorKind::Numeric, "slope fit needs positive values");
    mx += std::log(x[i]) / m;
    my += std::log(y[i]) / m;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ScalingReport convergence_study(const PotentialModel& model, const EdgeFrame& frame, ScalingMode mode,
                                const std::vector<GridPoint>& grid, const std::vector<int>& n_list,
                                const ScalingOptions& opts) {
  if (n_list.size() < 2) raise(ErrorKind::Validation, "n_list needs at least two values");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) raise(ErrorKind::Validation, "n_list must be strictly increasing");
  ScalingReport rep;
  rep.model_id = model.canonical();
  rep.frame_summary = frame.summary();
  rep.mode = mode;
  rep.norm = opts.norm;
  rep.n_list = n_list;
  rep.grid = grid;
  std::vector<double> xs;
  for (int n : n_list) {
    KernelJob job = KernelJob::make(model, n);
    Comparison c = compare_to_limit(job, frame, mode, grid, opts);
    rep.sup_error.push_back(c.sup_error);
    xs.push_back(n);
    for (auto& r : c.rows) rep.rows.push_back(std::move(r));
  }
  rep.fitted_rate = fit_log_slope(xs, rep.sup_error);
  return rep;
}

Eigen::VectorXd to_real(const CVector& z) {
  Eigen::VectorXd x(2 * z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    x(2 * k) = z(k).real();
    x(2 * k + 1) = z(k).imag();
  }
  return x;
}

CVector to_complex(const Eigen::VectorXd& x) {
  CVector z(x.size() / 2);
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = {x(2 * k), x(2 * k + 1)};
  return z;
}

double real_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

namespace {

// Pattern search on the sphere; sign = +1 minimizes, -1 maximizes.
Eigen::VectorXd refine(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd u,
                       double sign, double& best) {
  best = sign * f(u);
  for (double step = 0.25; step > 1e-4; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (Eigen::Index i = 0; i < u.size(); ++i)
        for (double s : {step, -step}) {
          Eigen::VectorXd v = u;
          v(i) += s;
          v.normalize();
          double val = sign * f(v);
          if (val < best) {
            best = val;
            u = v;
            improved = true;
          }
        }
    }
  }
  best *= sign;
  return u;
}

}  // namespace

DecayResult steepest_decay_direction(const KernelJob& job, const EdgeFrame& frame, double radius,
                                     int samples, unsigned long long seed) {
  if (!(radius > 0.0)) raise(ErrorKind::Validation, "radius must be positive");
  if (samples < 1) raise(ErrorKind::Validation, "samples must be positive");
  const int d = job.model.dim();
  if (frame.z0.size() != d) raise(ErrorKind::Validation, "frame does not match the model");
  auto density = [&](const Eigen::VectorXd& u) {
    CVector z = frame.z0 + radius * to_complex(u);
    return kernel(job, z, z).log_modulus;
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::VectorXd> dirs(samples, Eigen::VectorXd(2 * d));
  for (auto& u : dirs) {
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = g(rng);
    u.normalize();
  }
  std::vector<double> vals(samples);
  parallel_for(samples, [&](std::size_t i) { vals[i] = density(dirs[i]); });
  std::size_t imin = std::min_element(vals.begin(), vals.end()) - vals.begin();
  std::size_t imax = std::max_element(vals.begin(), vals.end()) - vals.begin();
  DecayResult out;
  out.direction = refine(density, dirs[imin], 1.0, out.min_value);
  out.maximizer = refine(density, dirs[imax], -1.0, out.max_value);
  Eigen::VectorXd nrm = to_real(frame.normal);
  if (nrm.norm() > 0.0) {
    out.angle_to_normal = real_angle(out.direction, nrm);
    out.max_angle_to_inward = real_angle(out.maximizer, -nrm);
  }
  return out;
}

Comparison bulk_degenerate_check(const KernelJob& job, const EdgeFrame& frame,
                                 const std::vector<GridPoint>& grid) {
  if (!frame.tau) raise(ErrorKind::Validation, "bulk degeneracy needs a tensor frame");
  for (const auto& g : grid)
    if (!g.diagonal()) raise(ErrorKind::Validation, "bulk degeneracy check is diagonal only");
  ScalingOptions opts;
  opts.norm = Normalization::Matrix;
  return compare_to_limit(job, frame, ScalingMode::MverfcUnitary, grid, opts);
}

}  // namespace bergkern
