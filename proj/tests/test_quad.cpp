#include <doctest.h>

#include <cmath>
#include <random>

#include "bergkern/errors.hpp"
#include "bergkern/quad.hpp"
#include "bergkern/specfun.hpp"

using namespace bergkern;

namespace {
RadialProfile gauss() { return RadialProfile::polynomial({{2, 1.0}}); }
}  // namespace

TEST_CASE("radial norms: Ginibre closed form") {
  for (int n : {16, 256}) {
    for (int d : {1, 2, 3}) {
      for (int j : {0, 1, 7, n, 2 * n}) {
        double expect = -(j + d) * std::log(double(n));
        CHECK(std::fabs(std::expm1(radial_norm(gauss(), n, d, j).log_value - expect)) < 1e-11);
      }
    }
  }
}

TEST_CASE("radial norms: power family closed form") {
  for (double b : {0.75, 1.0, 3.0}) {
    // V = r^{2b}/b has V'(1) = 2 already.
    RadialProfile p = RadialProfile::power(b);
    for (int n : {16, 256})
      for (int d : {1, 3})
        for (int j : {0, 5, n}) {
          auto c = closed_form_log_norm(p, n, d, j);
          REQUIRE(c.has_value());
          // h_j = (2/Gamma(j+d)) (1/(2b)) (n/b)^{-(j+d)/b} Gamma((j+d)/b)
          double s = (j + d) / b;
          double manual = std::log(2.0) - log_gamma(j + d) - std::log(2.0 * b) - s * std::log(n / b) + log_gamma(s);
          CHECK(std::fabs(*c - manual) < 1e-12 * std::max(1.0, std::fabs(manual)));
          CHECK(std::fabs(std::expm1(radial_norm(p, n, d, j).log_value - *c)) < 1e-10);
        }
  }
  CHECK_FALSE(closed_form_log_norm(RadialProfile::polynomial({{2, 1.0}, {4, 1.0}}), 16, 1, 0).has_value());
}

TEST_CASE("ball and outer integrals") {
  const int n = 64;
  for (int j : {0, 10, 63}) {
    CHECK(ball_integral(gauss(), n, 1, j, 0.0).is_zero());
    for (double a : {0.5, 0.9, 1.0, 1.2}) {
      double ratio = std::exp(ball_integral(gauss(), n, 1, j, a).log_value - radial_norm(gauss(), n, 1, j).log_value);
      CHECK(std::fabs(ratio - reg_inc_gamma_lower(j + 1.0, n * a * a)) < 1e-12);
      double outer = std::exp(outer_integral(gauss(), n, 1, j, a).log_value - radial_norm(gauss(), n, 1, j).log_value);
      CHECK(std::fabs(ratio + outer - 1.0) < 1e-12);
    }
    double big = ball_integral(gauss(), n, 1, j, 5.0).log_value;
    CHECK(std::fabs(std::expm1(big - radial_norm(gauss(), n, 1, j).log_value)) < 1e-12);
  }
}

TEST_CASE("norm table cache") {
  auto a = norm_table(gauss(), 32, 2);
  auto b = norm_table(gauss(), 32, 2);
  CHECK(a.get() == b.get());
  CHECK(a->size() == 34u);  // h_0 .. h_{n+d-1}
  CHECK(a->log_h(3) == doctest::Approx(-5.0 * std::log(32.0)).epsilon(1e-11));
}

TEST_CASE("planar moments: Gaussian") {
  PlanarPotential Q = PlanarPotential::gaussian();
  const int n = 50;
  for (int j = 0; j <= 6; ++j) {
    double expect = std::lgamma(j + 1.0) - (j + 1) * std::log(double(n));
    CHECK(std::fabs(std::expm1(planar_moment(Q, n, j, j).log_modulus - expect)) < 1e-11);
  }
  MomentTable t = planar_moment_table(Q, n, 6, false);
  for (int j = 0; j <= 6; ++j)
    for (int k = 0; k <= 6; ++k)
      if (j != k) CHECK(t.at(j, k).modulus() <= 1e-12 * std::sqrt(t.diag(j).modulus() * t.diag(k).modulus()));
}

TEST_CASE("planar moments: elliptic potential") {
  PlanarPotential Q = PlanarPotential::elliptic(0.2);
  const int n = 200;
  MomentTable t = planar_moment_table(Q, n, 6, false);
  // scipy dblquad of z^j conj(z)^k exp(-n(0.8x^2 + 1.2y^2)) / pi.
  CHECK(std::fabs(t.at(0, 0).modulus() / (1.0 / (n * std::sqrt(0.96))) - 1.0) < 1e-10);
  CHECK(std::fabs(t.at(0, 2).modulus() / 5.315732948748215e-06 - 1.0) < 1e-9);
  CHECK(std::fabs(t.at(1, 1).modulus() / 2.657866474374108e-05 - 1.0) < 1e-9);
  for (int j = 0; j <= 6; ++j)
    for (int k = 0; k <= 6; ++k) {
      if ((j + k) % 2) CHECK(t.at(j, k).is_zero());
      std::complex<double> a = t.at(j, k).value(), b = std::conj(t.at(k, j).value());
      CHECK(std::abs(a - b) <= 1e-10 * std::abs(a) + 1e-300);
    }
}

TEST_CASE("planar moments: degree cap and validation") {
  MomentOptions o;
  o.max_degree = 8;
  CHECK_THROWS_AS(planar_moment_table(PlanarPotential::gaussian(), 50, 9, true, o), Error);
  CHECK_THROWS_AS(validate_planar(PlanarPotential::from_terms({{1.0, 1, 0}, {1.0, 2, 0}, {1.0, 0, 2}})), Error);
  CHECK_THROWS_AS(validate_planar(PlanarPotential::from_terms({{1.0, 2, 0}, {-1.0, 0, 2}})), Error);
  CHECK_NOTHROW(validate_planar(PlanarPotential::quartic_perturbation(0.1)));
}
