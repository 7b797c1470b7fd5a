#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bergkern {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct Monomial {
  int exponent = 2;  // power of r, positive and even
  double coefficient = 0.0;
};

// V(r) = scale * sum c_k r^{e_k}  (polynomial)  or  scale * r^{2b}/b  (power).
class RadialProfile {
 public:
  enum class Kind { Polynomial, Power };

  static RadialProfile polynomial(std::vector<Monomial> terms);
  static RadialProfile power(double b);

  Kind kind() const { return kind_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  double b() const { return b_; }
  double scale() const { return scale_; }
  RadialProfile scaled(double factor) const;

  double V(double r) const;
  double dV(double r) const;
  double d2V(double r) const;
  // r V'(r), increasing from 0 to infinity.
  double rdV(double r) const;
  // V'(r) / (2r), finite at r = 0 whenever the model allows it.
  double half_dV_over_r(double r) const;
  // (r V'' - V') / (4r): coefficient of the rank-one term of the Hessian.
  double rank_one_coefficient(double r) const;
  // Planar Laplacian (V'' + V'/r)/4.
  double laplacian(double r) const;

  std::string canonical() const;
  bool is_gaussian() const;  // V = c r^2

 private:
  Kind kind_ = Kind::Polynomial;
  std::vector<Monomial> terms_;
  double b_ = 1.0;
  double scale_ = 1.0;
};

class PotentialModel {
 public:
  enum class Variant { Radial, Tensor };

  // Radial profiles are rescaled so that V'(1) = 2; the factor is recorded.
  static PotentialModel radial(const RadialProfile& profile, int d);
  static PotentialModel tensor(std::vector<RadialProfile> factors);

  Variant variant() const { return variant_; }
  int dim() const { return d_; }
  const RadialProfile& profile() const;
  const std::vector<RadialProfile>& factors() const { return factors_; }
  const RadialProfile& factor(int k) const;
  double normalization_scale() const { return scale_; }

  double Q(const CVector& z) const;
  std::string canonical() const;

 private:
  Variant variant_ = Variant::Radial;
  int d_ = 1;
  std::vector<RadialProfile> factors_;  // one entry for Radial
  double scale_ = 1.0;
};

struct ValidationItem {
  std::string name;
  bool passed = true;
  double offending_radius = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool ok() const;
};

ValidationReport validate(const PotentialModel& model);
ValidationReport validate_profile(const RadialProfile& profile, const std::string& label);

double droplet_radius(const RadialProfile& profile, double tau);

CMatrix complex_hessian(const PotentialModel& model, const CVector& z);
double ma_determinant(const PotentialModel& model, const CVector& z);
// M with M H M = I at a boundary point.
CMatrix hessian_inv_sqrt(const PotentialModel& model, const CVector& z0);
// Signed boundary residual: 2 - |z|V'(|z|) (Radial) or 1 - sum |z_k|V_k'(|z_k|)/2 (Tensor).
double droplet_margin(const PotentialModel& model, const CVector& z);

}  // namespace bergkern
