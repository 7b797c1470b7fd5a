#include "bergkern/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "bergkern/errors.hpp"

namespace bergkern {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RadialProfile RadialProfile::polynomial(std::vector<Monomial> terms) {
  if (terms.empty()) raise(ErrorKind::Validation, "polynomial profile needs at least one term");
  std::map<int, double> merged;
  for (const auto& t : terms) {
    if (t.exponent <= 0 || t.exponent % 2 != 0)
      raise(ErrorKind::Validation,
            "profile exponent " + std::to_string(t.exponent) + " is not a positive even integer");
    if (!std::isfinite(t.coefficient) || t.coefficient < 0.0)
      raise(ErrorKind::Validation, "profile coefficient " + fmt17(t.coefficient) +
                                       " for exponent " + std::to_string(t.exponent) +
                                       " must be finite and nonnegative");
    merged[t.exponent] += t.coefficient;
  }
  RadialProfile p;
  p.kind_ = Kind::Polynomial;
  bool positive = false;
  for (const auto& [e, c] : merged) {
    if (c > 0.0) {
      p.terms_.push_back({e, c});
      positive = true;
    }
  }
  if (!positive) raise(ErrorKind::Validation, "profile needs at least one positive coefficient");
  return p;
}

RadialProfile RadialProfile::power(double b) {
  if (!std::isfinite(b) || !(b > 0.0))
    raise(ErrorKind::Validation, "power profile needs b > 0, got " + fmt17(b));
  RadialProfile p;
  p.kind_ = Kind::Power;
  p.b_ = b;
  return p;
}

RadialProfile RadialProfile::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    raise(ErrorKind::Validation, "profile scale must be positive");
  RadialProfile p = *this;
  p.scale_ *= factor;
  return p;
}

double RadialProfile::V(double r) const {
  if (kind_ == Kind::Power) return scale_ * std::pow(r, 2.0 * b_) / b_;
  double s = 0.0;
  for (const auto& t : terms_) s += t.coefficient * std::pow(r, t.exponent);
  return scale_ * s;
}

double RadialProfile::dV(double r) const {
  if (kind_ == Kind::Power) return scale_ * 2.0 * std::pow(r, 2.0 * b_ - 1.0);
  double s = 0.0;
  for (const auto& t : terms_) s += t.coefficient * t.exponent * std::pow(r, t.exponent - 1);
  return scale_ * s;
}

double RadialProfile::d2V(double r) const {
  if (kind_ == Kind::Power) return scale_ * 2.0 * (2.0 * b_ - 1.0) * std::pow(r, 2.0 * b_ - 2.0);
  double s = 0.0;
  for (const auto& t : terms_)
    s += t.coefficient * t.exponent * (t.exponent - 1) * std::pow(r, t.exponent - 2);
  return scale_ * s;
}

double RadialProfile::rdV(double r) const {
  if (kind_ == Kind::Power) return scale_ * 2.0 * std::pow(r, 2.0 * b_);
  double s = 0.0;
  for (const auto& t : terms_) s += t.coefficient * t.exponent * std::pow(r, t.exponent);
  return scale_ * s;
}

double RadialProfile::half_dV_over_r(double r) const {
  if (kind_ == Kind::Power) return scale_ * std::pow(r, 2.0 * b_ - 2.0);
  double s = 0.0;
  for (const auto& t : terms_) s += t.coefficient * t.exponent * std::pow(r, t.exponent - 2);
  return 0.5 * scale_ * s;
}

double RadialProfile::rank_one_coefficient(double r) const {
  if (kind_ == Kind::Power) {
    if (b_ == 1.0) return 0.0;
    return scale_ * (b_ - 1.0) * std::pow(r, 2.0 * b_ - 2.0);
  }
  double s = 0.0;
  for (const auto& t : terms_)
    if (t.exponent > 2) s += t.coefficient * t.exponent * (t.exponent - 2) * std::pow(r, t.exponent - 2);
  return 0.25 * scale_ * s;
}

double RadialProfile::laplacian(double r) const {
  if (kind_ == Kind::Power) return scale_ * b_ * std::pow(r, 2.0 * b_ - 2.0);
  double s = 0.0;
  for (const auto& t : terms_)
    s += t.coefficient * t.exponent * t.exponent * std::pow(r, t.exponent - 2);
  return 0.25 * scale_ * s;
}

std::string RadialProfile::canonical() const {
  std::string out;
  if (kind_ == Kind::Power) {
    out = "power[" + fmt17(b_) + "]";
  } else {
    out = "poly[";
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(terms_[i].exponent) + ":" + fmt17(terms_[i].coefficient);
    }
    out += "]";
  }
  return out + "*" + fmt17(scale_);
}

bool RadialProfile::is_gaussian() const {
  return kind_ == Kind::Polynomial ? (terms_.size() == 1 && terms_[0].exponent == 2)
                                   : b_ == 1.0;
}

PotentialModel PotentialModel::radial(const RadialProfile& profile, int d) {
  if (d < 1) raise(ErrorKind::Validation, "dimension d must be >= 1");
  PotentialModel m;
  m.variant_ = Variant::Radial;
  m.d_ = d;
  double slope = profile.dV(1.0);
  if (!(slope > 0.0)) raise(ErrorKind::Validation, "profile has V'(1) <= 0");
  m.scale_ = 2.0 / slope;
  RadialProfile normalized = profile.scaled(m.scale_);
  m.factors_.push_back(normalized);
  return m;
}

PotentialModel PotentialModel::tensor(std::vector<RadialProfile> factors) {
  if (factors.empty()) raise(ErrorKind::Validation, "tensor model needs at least one factor");
  PotentialModel m;
  m.variant_ = Variant::Tensor;
  m.d_ = static_cast<int>(factors.size());
  m.factors_ = std::move(factors);
  m.scale_ = 1.0;
  return m;
}

const RadialProfile& PotentialModel::profile() const {
  if (variant_ != Variant::Radial) raise(ErrorKind::Validation, "model is not radial");
  return factors_.front();
}

const RadialProfile& PotentialModel::factor(int k) const {
  if (variant_ == Variant::Radial) return factors_.front();
  return factors_.at(static_cast<std::size_t>(k));
}

double PotentialModel::Q(const CVector& z) const {
  if (z.size() != d_) raise(ErrorKind::Validation, "point dimension does not match the model");
  if (variant_ == Variant::Radial) return factors_.front().V(z.norm());
  double s = 0.0;
  for (int k = 0; k < d_; ++k) s += factors_[k].V(std::abs(z(k)));
  return s;
}

std::string PotentialModel::canonical() const {
  if (variant_ == Variant::Radial)
    return "radial(d=" + std::to_string(d_) + "," + factors_.front().canonical() + ")";
  std::string out = "tensor(";
  for (int k = 0; k < d_; ++k) {
    if (k) out += ";";
    out += factors_[k].canonical();
  }
  return out + ")";
}

bool ValidationReport::ok() const {
  return std::all_of(items.begin(), items.end(), [](const ValidationItem& i) { return i.passed; });
}

ValidationReport validate_profile(const RadialProfile& profile, const std::string& label) {
  ValidationReport rep;
  rep.items.push_back({label + "positive_coefficient", true, 0.0, "constructive"});
  double r_max = std::max(2.0, 2.0 * droplet_radius(profile, 1.0));
  ValidationItem mono{label + "rV_strictly_increasing", true, 0.0, "10000-point grid on (0, " + fmt17(r_max) + "]"};
  double prev = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    double r = r_max * i / 10000.0;
    double v = profile.rdV(r);
    if (!(v > prev) || !std::isfinite(v)) {
      mono.passed = false;
      mono.offending_radius = r;
      break;
    }
    prev = v;
  }
  rep.items.push_back(mono);
  rep.items.push_back({label + "rV_vanishes_at_origin", true, 0.0, "all exponents positive"});
  rep.items.push_back({label + "logarithmic_growth", true, 0.0, "polynomial growth"});
  bool c2 = profile.kind() == RadialProfile::Kind::Polynomial || profile.b() >= 1.0;
  rep.items.push_back({label + "c2_at_origin", c2, 0.0, c2 ? "" : "r^{2b} with b < 1 is not C^2 at 0"});
  return rep;
}

ValidationReport validate(const PotentialModel& model) {
  ValidationReport rep;
  if (model.variant() == PotentialModel::Variant::Radial) {
    rep = validate_profile(model.profile(), "");
    double slope = model.profile().dV(1.0);
    rep.items.push_back({"normalized_slope", std::fabs(slope - 2.0) <= 1e-12, 1.0,
                         "V'(1) = " + fmt17(slope)});
  } else {
    for (int k = 0; k < model.dim(); ++k) {
      ValidationReport f = validate_profile(model.factor(k), "factor" + std::to_string(k) + ".");
      rep.items.insert(rep.items.end(), f.items.begin(), f.items.end());
    }
  }
  return rep;
}

double droplet_radius(const RadialProfile& profile, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) raise(ErrorKind::Domain, "tau must lie in [0, 1]");
  if (tau == 0.0) return 0.0;
  const double target = 2.0 * tau;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; profile.rdV(hi) <= target; ++i) {
    if (i > 200) raise(ErrorKind::Numeric, "droplet radius bracket failed");
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (profile.rdV(mid) <= target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

void check_dim(const PotentialModel& model, const CVector& z) {
  if (z.size() != model.dim()) raise(ErrorKind::Validation, "point dimension does not match the model");
}

struct RadialHessianParts {
  double a;  // V'/(2r): eigenvalue on the tangential directions
  double c;  // rank-one coefficient along z/|z|
};

RadialHessianParts radial_parts(const RadialProfile& p, double r) {
  double a = p.half_dV_over_r(r);
  double c = p.rank_one_coefficient(r);
  if (!std::isfinite(a) || !std::isfinite(c))
    raise(ErrorKind::Domain, "complex Hessian is singular at the origin for this profile");
  return {a, c};
}

}  // namespace

CMatrix complex_hessian(const PotentialModel& model, const CVector& z) {
  check_dim(model, z);
  const int d = model.dim();
  if (model.variant() == PotentialModel::Variant::Tensor) {
    CMatrix H = CMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
      double lap = model.factor(k).laplacian(std::abs(z(k)));
      if (!std::isfinite(lap))
        raise(ErrorKind::Domain, "planar Laplacian of factor " + std::to_string(k) + " is singular at 0");
      H(k, k) = lap;
    }
    return H;
  }
  double r = z.norm();
  RadialHessianParts parts = radial_parts(model.profile(), r);
  CMatrix H = parts.a * CMatrix::Identity(d, d);
  if (r > 0.0) {
    CVector u = z / r;
    H += parts.c * (u * u.adjoint());
  } else if (parts.c != 0.0) {
    raise(ErrorKind::Domain, "complex Hessian is direction-dependent at the origin");
  }
  return H;
}

double ma_determinant(const PotentialModel& model, const CVector& z) {
  check_dim(model, z);
  const int d = model.dim();
  if (model.variant() == PotentialModel::Variant::Tensor) {
    double det = 1.0;
    for (int k = 0; k < d; ++k) {
      double lap = model.factor(k).laplacian(std::abs(z(k)));
      if (!std::isfinite(lap))
        raise(ErrorKind::Domain, "planar Laplacian of factor " + std::to_string(k) + " is singular at 0");
      det *= lap;
    }
    return det;
  }
  double r = z.norm();
  RadialHessianParts parts = radial_parts(model.profile(), r);
  if (r == 0.0 && parts.c != 0.0)
    raise(ErrorKind::Domain, "complex Hessian is direction-dependent at the origin");
  return std::pow(parts.a, d - 1) * (parts.a + parts.c);
}

double droplet_margin(const PotentialModel& model, const CVector& z) {
  check_dim(model, z);
  if (model.variant() == PotentialModel::Variant::Radial)
    return 2.0 - model.profile().rdV(z.norm());
  double s = 0.0;
  for (int k = 0; k < model.dim(); ++k) s += 0.5 * model.factor(k).rdV(std::abs(z(k)));
  return 1.0 - s;
}

CMatrix hessian_inv_sqrt(const PotentialModel& model, const CVector& z0) {
  double margin = droplet_margin(model, z0);
  if (std::fabs(margin) > 1e-8)
    raise(ErrorKind::Validation, "point is off the droplet boundary (margin " + fmt17(margin) + ")");
  const int d = model.dim();
  if (model.variant() == PotentialModel::Variant::Tensor) {
    CMatrix M = CMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
      double lap = model.factor(k).laplacian(std::abs(z0(k)));
      if (!(lap > 0.0) || !std::isfinite(lap))
        raise(ErrorKind::Numeric, "planar Laplacian of factor " + std::to_string(k) +
                                      " is not positive at the edge point");
      M(k, k) = 1.0 / std::sqrt(lap);
    }
    return M;
  }
  double r = z0.norm();
  RadialHessianParts parts = radial_parts(model.profile(), r);
  double normal_eig = parts.a + parts.c;
  if (!(parts.a > 0.0) || !(normal_eig > 0.0))
    raise(ErrorKind::Numeric, "complex Hessian is not positive definite at the edge point");
  CVector u = z0 / r;
  CMatrix P = u * u.adjoint();
  CMatrix I = CMatrix::Identity(d, d);
  return (I - P) / std::sqrt(parts.a) + P / std::sqrt(normal_eig);
}

}  // namespace bergkern
