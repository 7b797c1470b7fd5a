#include "bergkern/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bergkern/errors.hpp"
#include "bergkern/integrate.hpp"
#include "bergkern/specfun.hpp"

namespace bergkern {

namespace {

constexpr double kLogHalf = -0.69314718055994530942;

std::vector<double> series_coefficients(const NormTable& t) {
  std::vector<double> c(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) c[j] = log_gamma(j + 1.0) + t.log_h(static_cast<int>(j));
  return c;
}

std::complex<double> dot(const CVector& z, const CVector& w) { return w.adjoint() * z; }

// sum_{j<=last} a^j / (j! h_j) given ln(j! h_j) in coef.
LogComplex power_series(const std::vector<double>& coef, int last, std::complex<double> a) {
  if (a == std::complex<double>(0.0, 0.0)) return LogComplex::polar(-coef[0], 0.0);
  const double la = std::log(std::abs(a));
  const double phi = std::arg(a);
  double best = kNegInf;
  for (int j = 0; j <= last; ++j) best = std::max(best, j * la - coef[j]);
  PhaseSum acc(best);
  for (int j = 0; j <= last; ++j) acc.add(j * la - coef[j], j * phi);
  return acc.result();
}

void require_radial(const KernelJob& job) {
  if (job.model.variant() != PotentialModel::Variant::Radial)
    raise(ErrorKind::Validation, "radial kernel needs a radial model");
}

}  // namespace

KernelJob KernelJob::make(const PotentialModel& model, int n) {
  if (n < 1) raise(ErrorKind::Domain, "n must be >= 1");
  KernelJob job{model, n, nullptr, {}, {}};
  if (model.variant() == PotentialModel::Variant::Radial) {
    job.table = norm_table(model.profile(), n, model.dim());
    job.coef.push_back(series_coefficients(*job.table));
  } else {
    for (int k = 0; k < model.dim(); ++k) {
      job.factor_tables.push_back(norm_table(model.factor(k), n, 1));
      job.coef.push_back(series_coefficients(*job.factor_tables.back()));
    }
  }
  return job;
}

LogComplex partial_radial_kernel(const KernelJob& job, int m, const CVector& z, const CVector& w) {
  require_radial(job);
  const int d = job.model.dim();
  if (m < 0 || m >= job.n + d) raise(ErrorKind::Domain, "partial kernel needs 0 <= m < n + d");
  if (z.size() != d || w.size() != d) raise(ErrorKind::Validation, "point dimension mismatch");
  const RadialProfile& p = job.model.profile();
  double log_weight = -0.5 * job.n * (p.V(z.norm()) + p.V(w.norm()));
  LogComplex s = power_series(job.coef[0], m, dot(z, w));
  return s * LogComplex::polar(log_weight, 0.0);
}

LogComplex radial_kernel(const KernelJob& job, const CVector& z, const CVector& w) {
  return partial_radial_kernel(job, job.n - 1, z, w);
}

LogComplex tensor_kernel(const KernelJob& job, const CVector& z, const CVector& w) {
  if (job.model.variant() != PotentialModel::Variant::Tensor)
    raise(ErrorKind::Validation, "tensor kernel needs a tensor model");
  const int d = job.model.dim();
  const int n = job.n;
  if (z.size() != d || w.size() != d) raise(ErrorKind::Validation, "point dimension mismatch");
  // Per-factor terms as extended-precision mantissas times e^{anchor}. The
  // sums cancel strongly off the diagonal, so double rounding of exponents
  // near 30 would cost about ten digits.
  using Cx = std::complex<long double>;
  std::vector<std::vector<Cx>> t(d, std::vector<Cx>(n, Cx(0.0L, 0.0L)));
  long double anchor = 0.0L;
  for (int k = 0; k < d; ++k) {
    std::complex<double> a = z(k) * std::conj(w(k));
    const auto& coef = job.coef[k];
    if (a == std::complex<double>(0.0, 0.0)) {
      anchor -= coef[0];
      t[k][0] = Cx(1.0L, 0.0L);
      continue;
    }
    const long double la = std::log(std::abs(Cx(a.real(), a.imag())));
    const long double phi = std::atan2(static_cast<long double>(a.imag()), static_cast<long double>(a.real()));
    long double top = -std::numeric_limits<long double>::infinity();
    for (int j = 0; j < n; ++j) top = std::max(top, j * la - static_cast<long double>(coef[j]));
    anchor += top;
    for (int j = 0; j < n; ++j) t[k][j] = std::polar(std::exp(j * la - static_cast<long double>(coef[j]) - top), j * phi);
  }

  // c(s) = sum over j_0 + ... + j_{d-2} = s of the product of the first d-1 arrays.
  std::vector<Cx> c(n, Cx(0.0L, 0.0L));
  if (d == 1) {
    c[0] = Cx(1.0L, 0.0L);
  } else {
    c = t[0];
    for (int k = 1; k + 1 < d; ++k) {
      std::vector<Cx> next(n, Cx(0.0L, 0.0L));
      for (int s = 0; s < n; ++s)
        for (int j = 0; j <= s; ++j) next[s] += c[s - j] * t[k][j];
      c = std::move(next);
    }
  }
  // Prefix sums of the last factor close the total-degree constraint s + j < n.
  const std::vector<Cx>& last = t[d - 1];
  std::vector<Cx> prefix(n);
  Cx run(0.0L, 0.0L);
  for (int j = 0; j < n; ++j) prefix[j] = run += last[j];
  Cx total(0.0L, 0.0L);
  for (int s = 0; s < n; ++s) total += c[s] * prefix[n - 1 - s];
  if (total == Cx(0.0L, 0.0L)) return LogComplex::zero();
  const long double log_weight = -0.5L * n * (static_cast<long double>(job.model.Q(z)) + job.model.Q(w));
  return LogComplex::polar(static_cast<double>(anchor + log_weight + std::log(std::abs(total))),
                           static_cast<double>(std::arg(total)));
}

LogComplex kernel(const KernelJob& job, const CVector& z, const CVector& w) {
  if (job.model.variant() == PotentialModel::Variant::Radial) return radial_kernel(job, z, w);
  return tensor_kernel(job, z, w);
}

std::complex<double> tensor_kernel_bruteforce(const KernelJob& job, const CVector& z, const CVector& w) {
  if (job.model.variant() != PotentialModel::Variant::Tensor)
    raise(ErrorKind::Validation, "brute force needs a tensor model");
  const int d = job.model.dim();
  const int n = job.n;
  if (n > 64 || d > 3) raise(ErrorKind::Domain, "brute force is limited to n <= 64 and d <= 3");
  using Cx = std::complex<long double>;
  const long double log_weight = -0.5L * n * (static_cast<long double>(job.model.Q(z)) + job.model.Q(w));
  std::vector<Cx> a(d);
  for (int k = 0; k < d; ++k) {
    std::complex<double> v = z(k) * std::conj(w(k));
    a[k] = Cx(v.real(), v.imag());
  }
  std::vector<int> j(d, 0);
  Cx total(0.0L, 0.0L);
  // Odometer over the box [0, n)^d, keeping |j| < n; every term is formed
  // directly from its own exponents.
  while (true) {
    int s = 0;
    for (int v : j) s += v;
    if (s < n) {
      long double lm = log_weight;
      Cx mono(1.0L, 0.0L);
      for (int k = 0; k < d; ++k) {
        for (int i = 0; i < j[k]; ++i) mono *= a[k];
        lm -= static_cast<long double>(job.coef[k][j[k]]);
      }
      total += mono * std::exp(lm);
    }
    int k = 0;
    while (k < d && ++j[k] == n) j[k++] = 0;
    if (k == d) break;
  }
  return {static_cast<double>(total.real()), static_cast<double>(total.imag())};
}

LogReal extremal_partial_kernel(const MomentTable& moments, std::complex<double> z) {
  double lz = std::log(std::abs(z));
  double l0 = moments.diag(0).log_modulus;
  if (z == std::complex<double>(0.0, 0.0)) return LogReal::from_log(0.0);
  PhaseSum acc;
  for (int j = 0; j <= moments.m; ++j) acc.add(l0 - moments.diag(j).log_modulus + 2.0 * j * lz, 0.0);
  LogComplex r = acc.result();
  return LogReal::from_log(r.log_modulus);
}

LogReal extremal_partial_kernel(const PlanarPotential& Q, int n, int m, std::complex<double> z,
                                const MomentOptions& opts) {
  return extremal_partial_kernel(*moment_table(Q, n, m, true, opts), z);
}

GramFactor gram_factor(const MomentTable& moments) {
  if (moments.diagonal_only) raise(ErrorKind::Validation, "Gram factor needs the full moment matrix");
  const int m = moments.m;
  const int size = m + 1;
  GramFactor g;
  g.m = m;
  g.n = moments.n;
  g.Q = moments.Q;
  g.log_scale.resize(size);
  for (int j = 0; j < size; ++j) g.log_scale[j] = 0.5 * moments.diag(j).log_modulus;
  Eigen::MatrixXcd G(size, size);
  for (int j = 0; j < size; ++j)
    for (int k = 0; k < size; ++k) {
      const LogComplex& v = moments.at(j, k);
      G(j, k) = v.is_zero() ? std::complex<double>(0.0, 0.0)
                            : std::polar(std::exp(v.log_modulus - g.log_scale[j] - g.log_scale[k]), v.phase);
    }
  g.L = Eigen::MatrixXcd::Zero(size, size);
  for (int i = 0; i < size; ++i) {
    std::complex<double> piv = G(i, i);
    for (int k = 0; k < i; ++k) piv -= g.L(i, k) * std::conj(g.L(i, k));
    double ratio = piv.real() / G(i, i).real();
    g.min_pivot_ratio = std::min(g.min_pivot_ratio, ratio);
    if (!(ratio > 1e-13))
      raise(ErrorKind::Numeric, "Gram factorization lost positivity at degree " + std::to_string(i) +
                                    "; usable degree cap is " + std::to_string(i - 1));
    double lii = std::sqrt(piv.real());
    g.L(i, i) = lii;
    for (int r = i + 1; r < size; ++r) {
      std::complex<double> s = G(r, i);
      for (int k = 0; k < i; ++k) s -= g.L(r, k) * std::conj(g.L(i, k));
      g.L(r, i) = s / lii;
    }
  }
  return g;
}

namespace {

// Scaled monomial vector e_j(z)/sqrt(J_jj) = exp(shift) * u_j.
Eigen::VectorXcd scaled_monomials(const GramFactor& g, std::complex<double> z, double& shift) {
  const int size = g.m + 1;
  Eigen::VectorXcd u(size);
  if (z == std::complex<double>(0.0, 0.0)) {
    shift = -g.log_scale[0];
    u.setZero();
    u(0) = 1.0;
    return u;
  }
  double lz = std::log(std::abs(z)), ph = std::arg(z);
  shift = kNegInf;
  for (int j = 0; j < size; ++j) shift = std::max(shift, j * lz - g.log_scale[j]);
  for (int j = 0; j < size; ++j) u(j) = std::polar(std::exp(j * lz - g.log_scale[j] - shift), j * ph);
  return u;
}

}  // namespace

LogComplex gram_partial_kernel(const GramFactor& g, std::complex<double> z, std::complex<double> w,
                               bool weighted) {
  double sz, sw;
  Eigen::VectorXcd uz = scaled_monomials(g, z, sz);
  Eigen::VectorXcd uw = scaled_monomials(g, w, sw);
  auto L = g.L.triangularView<Eigen::Lower>();
  Eigen::VectorXcd pz = L.solve(uz);
  Eigen::VectorXcd pw = L.solve(uw);
  std::complex<double> s = pw.adjoint() * pz;
  LogComplex out = LogComplex::from_value(s);
  double extra = sz + sw;
  if (weighted) extra -= 0.5 * g.n * (g.Q.value(z.real(), z.imag()) + g.Q.value(w.real(), w.imag()));
  return out * LogComplex::polar(extra, 0.0);
}

LogComplex gram_partial_kernel(const PlanarPotential& Q, int n, int m, std::complex<double> z,
                               std::complex<double> w, bool weighted, const MomentOptions& opts) {
  auto moments = moment_table(Q, n, m, false, opts);
  return gram_partial_kernel(gram_factor(*moments), z, w, weighted);
}

double gram_residual(const GramFactor& g, const MomentTable& moments) {
  const int size = g.m + 1;
  Eigen::MatrixXcd G(size, size);
  for (int j = 0; j < size; ++j)
    for (int k = 0; k < size; ++k) {
      const LogComplex& v = moments.at(j, k);
      G(j, k) = v.is_zero() ? std::complex<double>(0.0, 0.0)
                            : std::polar(std::exp(v.log_modulus - g.log_scale[j] - g.log_scale[k]), v.phase);
    }
  auto L = g.L.triangularView<Eigen::Lower>();
  Eigen::MatrixXcd X = L.solve(G);                               // L^{-1} G
  Eigen::MatrixXcd Y = L.solve(X.adjoint()).adjoint();           // L^{-1} G L^{-H}
  return (Y - Eigen::MatrixXcd::Identity(size, size)).cwiseAbs().maxCoeff();
}

LogComplex limit_ginibre(const CVector& xi, const CVector& eta) {
  if (xi.size() != eta.size()) raise(ErrorKind::Validation, "dimension mismatch");
  std::complex<double> s = dot(xi, eta);
  return LogComplex::polar(s.real() - 0.5 * (xi.squaredNorm() + eta.squaredNorm()), s.imag());
}

LogComplex limit_erfc(std::complex<double> xi, std::complex<double> eta) {
  std::complex<double> s = xi * std::conj(eta);
  LogComplex gauss = LogComplex::polar(kLogHalf + s.real() - 0.5 * (std::norm(xi) + std::norm(eta)), s.imag());
  return gauss * log_erfc_complex(ComplexValue((xi + std::conj(eta)) / std::sqrt(2.0)));
}

LogComplex limit_mverfc(const CVector& xi, const CVector& eta) {
  if (xi.size() != eta.size()) raise(ErrorKind::Validation, "dimension mismatch");
  const double d = static_cast<double>(xi.size());
  std::complex<double> arg = (xi.sum() + std::conj(eta.sum())) / std::sqrt(2.0 * d);
  std::complex<double> s = dot(xi, eta);
  LogComplex gauss =
      LogComplex::polar(kLogHalf + s.real() - 0.5 * (xi.squaredNorm() + eta.squaredNorm()), s.imag());
  return gauss * log_erfc_complex(ComplexValue(arg));
}

LogComplex halfspace_fock_kernel(const CVector& xi, const CVector& eta, const CVector& v) {
  std::complex<double> s = dot(xi, eta);
  std::complex<double> arg = (dot(xi, v) + dot(v, eta)) / std::sqrt(2.0);
  return LogComplex::polar(kLogHalf + s.real(), s.imag()) * log_erfc_complex(ComplexValue(arg));
}

LogReal hw_predicted_density(const RadialProfile& profile, double tau, int n, int j,
                             std::complex<double> z) {
  if (!(tau > 0.0 && tau <= 1.0)) raise(ErrorKind::Domain, "tau must lie in (0, 1]");
  if (n < 2) raise(ErrorKind::Domain, "n must be >= 2");
  double rt = droplet_radius(profile, tau);
  double lap = profile.laplacian(rt);
  double scale = std::sqrt(n * lap);
  double dist = std::abs(z) - rt;
  if (std::fabs(dist) > 5.0 * std::sqrt(std::log(double(n)) / n))
    raise(ErrorKind::Domain, "point is outside the boundary collar");
  double xi = scale * dist;
  double e = 2.0 * xi + (tau * n - j) / (rt * scale);
  return LogReal::from_log(-0.5 * std::log(std::numbers::pi) + std::log(scale / rt) - 0.5 * e * e);
}

namespace {

struct Axis {
  std::vector<double> x, w;
};

Axis composite_axis(double lo, double hi, int nodes) {
  const int order = 20;
  int panels = std::max(1, nodes / order);
  const GaussRule& gl = gauss_legendre(order);
  Axis ax;
  double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < order; ++i) {
      ax.x.push_back(lo + p * h + 0.5 * h * (gl.nodes[i] + 1.0));
      ax.w.push_back(0.5 * h * gl.weights[i]);
    }
  return ax;
}

// Tangent map t = c + T tan(u) over the whole line.
Axis tangent_axis(double c, double T, int nodes) {
  Axis u = composite_axis(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi, nodes);
  Axis ax;
  for (std::size_t i = 0; i < u.x.size(); ++i) {
    double sec = 1.0 / std::cos(u.x[i]);
    ax.x.push_back(c + T * std::tan(u.x[i]));
    ax.w.push_back(u.w[i] * T * sec * sec);
  }
  return ax;
}

// One complex coordinate of the pairing, dA = dx dy / pi.
std::complex<double> pairing_1d(std::complex<double> xi, std::complex<double> eta, bool with_erfc,
                                int nodes_re, int nodes_im) {
  double cx = 0.5 * (xi.real() + eta.real());
  double cy = 0.5 * (xi.imag() + eta.imag());
  Axis ax = composite_axis(cx - 12.0, cx + 12.0, nodes_re);
  Axis ay = with_erfc ? tangent_axis(cy, 4.0, nodes_im) : composite_axis(cy - 12.0, cy + 12.0, nodes_re);
  std::complex<double> total = 0.0;
  for (std::size_t i = 0; i < ax.x.size(); ++i) {
    for (std::size_t k = 0; k < ay.x.size(); ++k) {
      std::complex<double> zeta(ax.x[i], ay.x[k]);
      std::complex<double> a = zeta * std::conj(eta);
      std::complex<double> b = zeta * std::conj(xi);
      LogComplex ke = LogComplex::polar(a.real(), a.imag());
      LogComplex kx = LogComplex::polar(b.real(), b.imag());
      if (with_erfc) {
        ke = ke * LogComplex::polar(kLogHalf, 0.0) *
             log_erfc_unbounded((zeta + std::conj(eta)) / std::sqrt(2.0));
        kx = kx * LogComplex::polar(kLogHalf, 0.0) *
             log_erfc_unbounded((zeta + std::conj(xi)) / std::sqrt(2.0));
      }
      LogComplex term = ke * kx.conj() * LogComplex::polar(-std::norm(zeta), 0.0);
      total += ax.w[i] * ay.w[k] * term.value();
    }
  }
  return total / std::numbers::pi;
}

}  // namespace

PairingResult reproducing_pairing(const CVector& xi, const CVector& eta, const CVector& v,
                                  int nodes_re, int nodes_im) {
  const int d = static_cast<int>(v.size());
  if (xi.size() != d || eta.size() != d) raise(ErrorKind::Validation, "dimension mismatch");
  double nv = v.norm();
  if (std::fabs(nv - 1.0) > 1e-12) raise(ErrorKind::Validation, "v must be a unit vector");
  // Unitary B with first column v; zeta = B zeta' separates the erfc direction.
  Eigen::MatrixXcd A(d, d + 1);
  A.col(0) = v;
  A.rightCols(d) = Eigen::MatrixXcd::Identity(d, d);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
  Eigen::MatrixXcd B = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
  std::complex<double> align = (B.col(0).adjoint() * v)(0);
  B.col(0) *= align / std::abs(align);
  CVector xp = B.adjoint() * xi;
  CVector ep = B.adjoint() * eta;
  std::complex<double> integral = pairing_1d(xp(0), ep(0), true, nodes_re, nodes_im);
  for (int k = 1; k < d; ++k) integral *= pairing_1d(xp(k), ep(k), false, nodes_re, nodes_im);
  PairingResult out;
  out.integral = integral;
  out.kernel = halfspace_fock_kernel(xi, eta, v).value();
  out.rel_error = std::abs(out.integral - out.kernel) / std::abs(out.kernel);
  return out;
}

}  // namespace bergkern
