#include "bergkern/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "bergkern/errors.hpp"

namespace bergkern {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void require_tensor(const PotentialModel& model) {
  if (model.variant() != PotentialModel::Variant::Tensor)
    raise(ErrorKind::Validation, "operation needs a tensor model");
}

}  // namespace

SimplexWeights SimplexWeights::make(std::vector<double> tau) {
  if (tau.empty()) raise(ErrorKind::Validation, "simplex weights are empty");
  double s = 0.0;
  for (double t : tau) {
    if (!std::isfinite(t) || t < 0.0) raise(ErrorKind::Validation, "simplex weight must be >= 0");
    s += t;
  }
  if (std::fabs(s - 1.0) > 1e-12)
    raise(ErrorKind::Validation, "simplex weights sum to " + fmt17(s) + ", not 1");
  return SimplexWeights{std::move(tau)};
}

int SimplexWeights::active() const {
  return static_cast<int>(std::count_if(tau.begin(), tau.end(), [](double t) { return t > 0.0; }));
}

std::string EdgeFrame::summary() const {
  std::string out = "z0=(";
  for (int k = 0; k < z0.size(); ++k) {
    if (k) out += ";";
    out += fmt17(z0(k).real()) + "," + fmt17(z0(k).imag());
  }
  out += ")";
  if (tau) {
    out += " tau=(";
    for (int k = 0; k < tau->size(); ++k) {
      if (k) out += ";";
      out += fmt17(tau->tau[k]);
    }
    out += ")";
  }
  out += " det=" + fmt17(ma_det);
  return out;
}

double planar_obstacle(const RadialProfile& profile, double tau, std::complex<double> z) {
  if (!(tau >= 0.0 && tau <= 1.0)) raise(ErrorKind::Domain, "tau must lie in [0, 1]");
  double r = std::abs(z);
  if (tau == 0.0) return profile.V(0.0);
  double rt = droplet_radius(profile, tau);
  if (r <= rt) return profile.V(r);
  return profile.V(rt) + 2.0 * tau * std::log(r / rt);
}

double simplex_objective(const PotentialModel& model, const SimplexWeights& tau, const CVector& z) {
  require_tensor(model);
  if (tau.size() != model.dim() || z.size() != model.dim())
    raise(ErrorKind::Validation, "dimension mismatch");
  double s = 0.0;
  for (int k = 0; k < model.dim(); ++k) s += planar_obstacle(model.factor(k), tau.tau[k], z(k));
  return s;
}

ObstacleResult pluri_obstacle(const PotentialModel& model, const CVector& z) {
  require_tensor(model);
  const int d = model.dim();
  if (z.size() != d) raise(ErrorKind::Validation, "dimension mismatch");
  std::vector<double> r(d), sat(d);
  double sat_sum = 0.0;
  for (int k = 0; k < d; ++k) {
    r[k] = std::abs(z(k));
    sat[k] = 0.5 * model.factor(k).rdV(r[k]);
    sat_sum += sat[k];
  }
  ObstacleResult out;
  if (sat_sum <= 1.0) {
    // Inside the droplet: every coordinate can be saturated, derivative level 0.
    std::vector<double> tau(d);
    double spare = (1.0 - sat_sum) / d;
    for (int k = 0; k < d; ++k) tau[k] = sat[k] + spare;
    double s = std::accumulate(tau.begin(), tau.end(), 0.0);
    for (auto& t : tau) t /= s;
    out.value = model.Q(z);
    out.argmax = SimplexWeights{tau};
    out.inside = true;
    out.level = 0.0;
    return out;
  }
  // tau_k(lambda) = r V'(r)/2 at r = |z_k| e^{-lambda/2}; decreasing in lambda.
  auto tau_at = [&](int k, double lambda) {
    if (r[k] == 0.0) return 0.0;
    return 0.5 * model.factor(k).rdV(r[k] * std::exp(-0.5 * lambda));
  };
  auto total = [&](double lambda) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += tau_at(k, lambda);
    return s;
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; total(hi) > 1.0; ++i) {
    if (i > 200) raise(ErrorKind::Numeric, "water-filling bracket failed");
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 300; ++i) {
    double mid = 0.5 * (lo + hi);
    if (total(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  double lambda = 0.5 * (lo + hi);
  std::vector<double> tau(d);
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    tau[k] = tau_at(k, lambda);
    s += tau[k];
  }
  if (std::fabs(s - 1.0) > 1e-12) raise(ErrorKind::Numeric, "water-filling did not reach the simplex");
  for (auto& t : tau) t /= s;
  // Qcheck_{k,tau_k}(z_k) = V_k(r_tau) + 2 tau_k log(|z_k| / r_tau), log ratio = lambda/2.
  double value = 0.0;
  for (int k = 0; k < d; ++k) {
    if (r[k] == 0.0) {
      value += model.factor(k).V(0.0);
      continue;
    }
    double rt = r[k] * std::exp(-0.5 * lambda);
    value += model.factor(k).V(rt) + tau[k] * lambda;
  }
  out.value = value;
  out.argmax = SimplexWeights{tau};
  out.inside = false;
  out.level = lambda;
  return out;
}

Containment droplet_contains(const PotentialModel& model, const CVector& z) {
  double m = droplet_margin(model, z);
  return {m >= 0.0, m};
}

Eigen::MatrixXd canonical_rotation(const std::vector<bool>& flagged) {
  const int d = static_cast<int>(flagged.size());
  int l = static_cast<int>(std::count(flagged.begin(), flagged.end(), true));
  if (l == 0) raise(ErrorKind::Validation, "rotation needs at least one flagged coordinate");
  Eigen::VectorXd from(d), to = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(double(d)));
  for (int k = 0; k < d; ++k) from(k) = flagged[k] ? 1.0 / std::sqrt(double(l)) : 0.0;
  Eigen::VectorXd w = from - to;
  double nw = w.squaredNorm();
  if (nw < 1e-30) return Eigen::MatrixXd::Identity(d, d);
  return Eigen::MatrixXd::Identity(d, d) - 2.0 * w * w.transpose() / nw;
}

namespace {

// Real Householder exchanging the unit vector a with (1,...,1)/sqrt(d).
Eigen::MatrixXd householder_to_diagonal(const Eigen::VectorXd& a) {
  const int d = static_cast<int>(a.size());
  Eigen::VectorXd to = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(double(d)));
  Eigen::VectorXd w = a - to;
  double nw = w.squaredNorm();
  if (nw < 1e-30) return Eigen::MatrixXd::Identity(d, d);
  return Eigen::MatrixXd::Identity(d, d) - 2.0 * w * w.transpose() / nw;
}

void fill_hessian(const PotentialModel& model, EdgeFrame& f) {
  f.hessian = complex_hessian(model, f.z0);
  f.ma_det = ma_determinant(model, f.z0);
  f.hessian_inv_sqrt = hessian_inv_sqrt(model, f.z0);
}

}  // namespace

EdgeFrame edge_frame_tensor(const PotentialModel& model, const SimplexWeights& tau,
                            const std::vector<double>& angles) {
  require_tensor(model);
  const int d = model.dim();
  if (tau.size() != d) raise(ErrorKind::Validation, "tau has the wrong dimension");
  SimplexWeights checked = SimplexWeights::make(tau.tau);
  if (static_cast<int>(angles.size()) != d) raise(ErrorKind::Validation, "angles have the wrong dimension");
  EdgeFrame f;
  f.tau = checked;
  f.z0 = CVector::Zero(d);
  f.normal = CVector::Zero(d);
  f.planar_normals = CVector::Ones(d);
  std::vector<bool> flagged(d, false);
  for (int k = 0; k < d; ++k) {
    if (checked.tau[k] <= 0.0) continue;
    double rk = droplet_radius(model.factor(k), checked.tau[k]);
    std::complex<double> ph = std::polar(1.0, angles[k]);
    f.z0(k) = rk * ph;
    f.planar_normals(k) = ph;
    // Gradient of the margin: d/dr (r V'(r)/2) = 2 r Laplacian(r).
    f.normal(k) = 2.0 * rk * model.factor(k).laplacian(rk) * ph;
    flagged[k] = true;
  }
  double nn = f.normal.norm();
  if (!(nn > 0.0)) raise(ErrorKind::Numeric, "degenerate edge normal");
  f.normal /= nn;
  f.active = checked.active();
  Eigen::MatrixXd R = canonical_rotation(flagged);
  f.U = f.planar_normals.asDiagonal() * R.cast<std::complex<double>>();
  fill_hessian(model, f);
  return f;
}

EdgeFrame edge_frame_radial(const PotentialModel& model, const CVector& direction) {
  if (model.variant() != PotentialModel::Variant::Radial)
    raise(ErrorKind::Validation, "operation needs a radial model");
  const int d = model.dim();
  if (direction.size() != d) raise(ErrorKind::Validation, "direction has the wrong dimension");
  double nd = direction.norm();
  if (!(nd > 0.0)) raise(ErrorKind::Validation, "direction must be nonzero");
  EdgeFrame f;
  f.z0 = direction / nd;  // droplet radius is 1 after normalization
  f.normal = f.z0;
  f.active = d;
  f.planar_normals = CVector::Ones(d);
  Eigen::VectorXd a(d);
  for (int k = 0; k < d; ++k) {
    a(k) = std::abs(f.z0(k));
    if (a(k) > 0.0) f.planar_normals(k) = f.z0(k) / a(k);
  }
  Eigen::MatrixXd H = householder_to_diagonal(a);
  f.U = f.planar_normals.asDiagonal() * H.cast<std::complex<double>>();
  fill_hessian(model, f);
  return f;
}

}  // namespace bergkern
