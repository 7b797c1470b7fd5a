#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bergkern/lognum.hpp"
#include "bergkern/potentials.hpp"

namespace bergkern {

// h_j = (2 / Gamma(j+d)) int_0^inf r^{2d-1+2j} exp(-n V(r)) dr.
LogReal radial_norm(const RadialProfile& profile, int n, int d, int j);
// Same integrand restricted to [0, a] and [a, inf).
LogReal ball_integral(const RadialProfile& profile, int n, int d, int j, double a);
LogReal outer_integral(const RadialProfile& profile, int n, int d, int j, double a);
// ln h_j in closed form for single-monomial profiles c r^e; empty otherwise.
std::optional<double> closed_form_log_norm(const RadialProfile& profile, int n, int d, int j);

struct NormTable {
  int n = 0;
  int d = 0;
  RadialProfile profile;
  std::vector<LogReal> values;  // h_0 .. h_{n+d-1}

  double log_h(int j) const { return values.at(static_cast<std::size_t>(j)).log_value; }
  std::size_t size() const { return values.size(); }
};

NormTable build_norm_table(const RadialProfile& profile, int n, int d, int threads = 0);
// Cached by (canonical profile, n, d); tables are immutable once built.
std::shared_ptr<const NormTable> norm_table(const RadialProfile& profile, int n, int d);
void clear_norm_table_cache();

// Planar potential as a polynomial sum c * x^px * y^py in (Re z, Im z).
struct PlanarTerm {
  double coefficient = 0.0;
  int px = 0;
  int py = 0;
};

class PlanarPotential {
 public:
  static PlanarPotential from_terms(std::vector<PlanarTerm> terms);
  static PlanarPotential gaussian();                   // |z|^2
  static PlanarPotential elliptic(double t);           // |z|^2 - t Re(z^2)
  static PlanarPotential quartic_perturbation(double eps);  // |z|^2 + eps |z|^4

  const std::vector<PlanarTerm>& terms() const { return terms_; }
  double value(double x, double y) const;
  double value_polar(double r, double theta) const;
  double laplacian_at_origin() const;
  int degree() const;
  std::string canonical() const;

 private:
  std::vector<PlanarTerm> terms_;
};

// Throws a validation error unless 0 is the unique minimum with positive
// Laplacian and the top-degree part grows in every direction.
void validate_planar(const PlanarPotential& Q);

struct MomentOptions {
  int max_degree = 64;       // conditioning cap on j, k
  int angular_points = 256;  // initial trapezoid points, doubled on demand
};

// <e_j, e_k> = int z^j conj(z)^k exp(-n Q) dA, dA = dx dy / pi.
LogComplex planar_moment(const PlanarPotential& Q, int n, int j, int k,
                         const MomentOptions& opts = {});

struct MomentTable {
  PlanarPotential Q;
  int n = 0;
  int m = 0;
  bool diagonal_only = false;
  std::vector<LogComplex> entries;  // (m+1)^2 row-major, or m+1 when diagonal_only

  const LogComplex& at(int j, int k) const;
  const LogComplex& diag(int j) const;
};

MomentTable planar_moment_table(const PlanarPotential& Q, int n, int m, bool diagonal_only,
                                const MomentOptions& opts = {});
std::shared_ptr<const MomentTable> moment_table(const PlanarPotential& Q, int n, int m,
                                                bool diagonal_only, const MomentOptions& opts = {});

}  // namespace bergkern
