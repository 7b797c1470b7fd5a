#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bergkern/errors.hpp"
#include "bergkern/integrate.hpp"
#include "bergkern/specfun.hpp"

using namespace bergkern;

namespace {
double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }
double crel(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("log_gamma closed values") {
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_gamma(2.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::fabs(log_gamma(0.5) - 0.5 * std::log(std::numbers::pi)) < 1e-14);
  // ln 10! = ln 3628800
  CHECK(rel(log_gamma(11.0), std::log(3628800.0)) < 1e-14);
  CHECK_THROWS_AS(log_gamma(0.0), Error);
}

TEST_CASE("regularized lower incomplete gamma") {
  for (double x : {0.1, 1.0, 3.5, 20.0}) CHECK(rel(reg_inc_gamma_lower(1.0, x), -std::expm1(-x)) < 1e-13);
  CHECK(reg_inc_gamma_lower(3.0, 0.0) == 0.0);
  // mpmath gammainc(5, 0, 5, regularized=True)
  CHECK(rel(reg_inc_gamma_lower(5.0, 5.0), 0.559506714934787588557) < 1e-13);
  // Monotone in x and bounded in [0, 1].
  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    double v = reg_inc_gamma_lower(40.0, 0.4 * i);
    CHECK(v >= prev);
    CHECK(v <= 1.0);
    prev = v;
  }
}

TEST_CASE("erfc_real") {
  CHECK(erfc_real(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(erfc_real(30.0) < 1e-300);
  CHECK(rel(erfc_real(1.0), 0.157299207050285130659) < 1e-14);
  // Independent oracle: adaptive quadrature of the defining integral.
  QuadResult q = gauss_kronrod([](double t) { return std::exp(-t * t); }, 1.0, 12.0, 1e-14);
  CHECK(rel(erfc_real(1.0), 2.0 / std::sqrt(std::numbers::pi) * q.value) < 1e-12);
  for (double x : {-3.0, -0.7, 0.2, 2.5}) CHECK(std::fabs(erfc_real(x) + erfc_real(-x) - 2.0) < 1e-14);
}

TEST_CASE("erfc_complex oracles and reflection") {
  CHECK(crel(erfc_complex(ComplexValue(0.0, 0.0)).value(), {1.0, 0.0}) < 1e-15);
  // mpmath erfc values.
  CHECK(crel(erfc_complex(ComplexValue(1.0, 1.0)).value(), {-0.316151281697947644880, -0.190453469237834686284}) < 1e-13);
  CHECK(crel(erfc_complex(ComplexValue(-2.0, 0.5)).value(), {2.00350224331303634721, -0.00474090303129433610447}) < 1e-13);
  CHECK(crel(erfc_complex(ComplexValue(3.0, -4.0)).value(), {121.186991395079444098, -27.7503372936239024981}) < 1e-12);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    ComplexValue z(u(rng), u(rng));
    std::complex<double> s = erfc_complex(z).value() + erfc_complex(ComplexValue(-z.re, -z.im)).value();
    CHECK(std::abs(s - 2.0) < 1e-12 * std::max(1.0, std::abs(erfc_complex(z).value())));
  }
  CHECK_THROWS_AS(ComplexValue(std::nan(""), 0.0), Error);
}

TEST_CASE("log_erfc_complex agrees with erfc_complex and covers the window") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    ComplexValue z(u(rng), u(rng));
    std::complex<double> a = erfc_complex(z).value();
    std::complex<double> b = log_erfc_complex(z).value();
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  }
  // Far corners stay finite in log form.
  LogComplex far = log_erfc_complex(ComplexValue(49.0, 49.0));
  CHECK(std::isfinite(far.log_modulus));
  LogComplex deep = log_erfc_complex(ComplexValue(45.0, 0.0));
  CHECK(deep.log_modulus < -2000.0);
  CHECK_THROWS_AS(log_erfc_complex(ComplexValue(51.0, 0.0)), Error);
}

TEST_CASE("Faddeeva branches agree at the split") {
  for (double t : {0.1, 0.7, 1.3, 2.0, 2.9}) {
    std::complex<double> z = std::polar(kFaddeevaSplit, t * 0.5);
    std::complex<double> a = faddeeva_upper(z, kFaddeevaSplit + 1.0);
    std::complex<double> b = faddeeva_upper(z, kFaddeevaSplit - 1.0);
    CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
  }
}

TEST_CASE("f_delta") {
  CHECK(std::fabs(f_delta(0.0) - 0.5) < 1e-12);
  // mpmath quadrature of the defining integral.
  CHECK(std::fabs(f_delta(1.0) - 0.0603220105251094131186) < 1e-11);
  CHECK(f_delta(20.0) < 1e-12);
  // Refinement oracle: Simpson at half step.
  CHECK(std::fabs(f_delta(0.0) - f_delta_simpson(0.0, 0.005)) < 1e-10);
  double prev = f_delta(-6.0);
  for (int i = -23; i <= 24; ++i) {
    double v = f_delta(0.25 * i);
    CHECK(v < prev);
    prev = v;
  }
  // Odd symmetry of the integrand about 1/2.
  for (double d : {0.3, 1.1, 2.7}) CHECK(std::fabs(f_delta(d) + f_delta(-d) - 1.0) < 1e-11);
}

TEST_CASE("halfspace_gaussian") {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd e1 = Eigen::VectorXd::Unit(2, 0), zero = Eigen::VectorXd::Zero(2);
  CHECK(rel(halfspace_gaussian(I, e1, zero), std::numbers::pi) < 1e-13);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int t = 0; t < 5; ++t) {
    Eigen::MatrixXd B(3, 3);
    for (int i = 0; i < 9; ++i) B(i / 3, i % 3) = g(rng);
    Eigen::MatrixXd A = B * B.transpose() + 0.5 * Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd v(3), b(3);
    for (int i = 0; i < 3; ++i) {
      v(i) = g(rng);
      b(i) = 0.5 * g(rng);
    }
    double c = halfspace_gaussian(A, v, b);
    CHECK(rel(halfspace_gaussian(A, 2.0 * v, b), c) < 1e-14);
    // b = 0: half the Gaussian mass (2 pi)^{d/2} sqrt(det A).
    double half = 0.5 * std::pow(2.0 * std::numbers::pi, 1.5) * std::sqrt(A.determinant());
    CHECK(rel(halfspace_gaussian(A, v, Eigen::VectorXd::Zero(3)), half) < 1e-12);
    MonteCarloEstimate mc = halfspace_gaussian_mc(A, v, b, 200000, 100 + t);
    CHECK(std::fabs(mc.mean - c) <= 4.0 * mc.std_error);
  }
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(halfspace_gaussian(bad, e1, zero), Error);
  CHECK_THROWS_AS(halfspace_gaussian(I, zero, zero), Error);
}

TEST_CASE("Monte Carlo estimate is seed-stable") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(3), b = Eigen::VectorXd::Constant(3, 0.2);
  MonteCarloEstimate a = halfspace_gaussian_mc(A, v, b, 10000, 5);
  MonteCarloEstimate c = halfspace_gaussian_mc(A, v, b, 10000, 5);
  CHECK(a.mean == c.mean);
  CHECK(a.std_error == c.std_error);
}
