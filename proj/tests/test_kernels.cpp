#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bergkern/errors.hpp"
#include "bergkern/kernels.hpp"
#include "bergkern/specfun.hpp"

using namespace bergkern;

namespace {
RadialProfile gauss() { return RadialProfile::polynomial({{2, 1.0}}); }
CVector vec(std::initializer_list<std::complex<double>> v) {
  CVector z(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) z(i++) = x;
  return z;
}
CVector random_point(std::mt19937_64& rng, int d, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector z(d);
  for (int k = 0; k < d; ++k) z(k) = {radius * u(rng) / std::sqrt(2.0 * d), radius * u(rng) / std::sqrt(2.0 * d)};
  return z;
}
}  // namespace

TEST_CASE("radial kernel at the origin") {
  for (int d : {1, 2, 3}) {
    KernelJob job = KernelJob::make(PotentialModel::radial(gauss(), d), 40);
    LogComplex k = radial_kernel(job, CVector::Zero(d), CVector::Zero(d));
    CHECK(k.log_modulus == doctest::Approx(d * std::log(40.0)).epsilon(1e-12));
    CHECK(k.phase == 0.0);
  }
}

TEST_CASE("Ginibre d=1 kernel against the incomplete gamma identity") {
  const int n = 256;
  KernelJob job = KernelJob::make(PotentialModel::radial(gauss(), 1), n);
  for (double r : {0.01, 0.1, 0.5, 0.95, 1.0, 1.05}) {
    CVector z = vec({std::polar(r, 0.3)});
    double k = radial_kernel(job, z, z).value().real();
    double expect = n * (1.0 - reg_inc_gamma_lower(double(n), n * r * r));
    CHECK(std::fabs(k / expect - 1.0) < 1e-9);
  }
}

TEST_CASE("kernel Hermitian symmetry and reproducing diagonal") {
  std::mt19937_64 rng(21);
  KernelJob job = KernelJob::make(PotentialModel::radial(RadialProfile::polynomial({{4, 0.5}}), 2), 64);
  for (int i = 0; i < 20; ++i) {
    CVector z = random_point(rng, 2, 1.2), w = random_point(rng, 2, 1.2);
    std::complex<double> a = radial_kernel(job, z, w).value(), b = std::conj(radial_kernel(job, w, z).value());
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
    std::complex<double> diag = radial_kernel(job, z, z).value();
    CHECK(diag.real() > 0.0);
    CHECK(std::fabs(diag.imag()) <= 1e-14 * diag.real());
  }
}

TEST_CASE("kernel Cauchy-Schwarz bound") {
  std::mt19937_64 rng(22);
  KernelJob job = KernelJob::make(PotentialModel::radial(gauss(), 2), 48);
  for (int i = 0; i < 100; ++i) {
    CVector z = random_point(rng, 2, 1.3), w = random_point(rng, 2, 1.3);
    double lzw = radial_kernel(job, z, w).log_modulus;
    double lzz = radial_kernel(job, z, z).log_modulus, lww = radial_kernel(job, w, w).log_modulus;
    CHECK(2.0 * lzw <= lzz + lww + 1e-12);
  }
}

TEST_CASE("Ginibre diagonal integrates to n") {
  const int n = 64;
  KernelJob job = KernelJob::make(PotentialModel::radial(gauss(), 1), n);
  // Weighted diagonal against 2r dr over the disk of radius 3, composite Simpson.
  const int m = 3000;
  const double h = 3.0 / m;
  double total = 0.0;
  for (int i = 0; i <= m; ++i) {
    double r = i * h;
    double c = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    CVector z = vec({{r, 0.0}});
    total += c * radial_kernel(job, z, z).value().real() * 2.0 * r;
  }
  total *= h / 3.0;
  CHECK(std::fabs(total / n - 1.0) < 1e-3);
}

TEST_CASE("tensor kernel: small cases and brute force") {
  KernelJob two = KernelJob::make(PotentialModel::tensor({gauss(), gauss()}), 2);
  CHECK(tensor_kernel(two, CVector::Zero(2), CVector::Zero(2)).value().real() == doctest::Approx(4.0).epsilon(1e-13));
  // d = 1 collapses onto the radial kernel.
  KernelJob t1 = KernelJob::make(PotentialModel::tensor({gauss()}), 30);
  KernelJob r1 = KernelJob::make(PotentialModel::radial(gauss(), 1), 30);
  CVector z = vec({{0.3, 0.4}}), w = vec({{-0.2, 0.7}});
  CHECK(std::abs(tensor_kernel(t1, z, w).value() - radial_kernel(r1, z, w).value()) <
        1e-12 * std::abs(radial_kernel(r1, z, w).value()));
  std::mt19937_64 rng(5);
  for (int d : {2, 3}) {
    KernelJob job = KernelJob::make(
        PotentialModel::tensor(std::vector<RadialProfile>(d, RadialProfile::polynomial({{2, 0.5}, {4, 0.25}}))), 12);
    for (int i = 0; i < 20; ++i) {
      CVector a = random_point(rng, d, 1.2), b = random_point(rng, d, 1.2);
      std::complex<double> k = tensor_kernel(job, a, b).value(), ref = tensor_kernel_bruteforce(job, a, b);
      CHECK(std::abs(k - ref) <= 1e-10 * std::abs(ref));
    }
  }
  CHECK_THROWS_AS(tensor_kernel_bruteforce(KernelJob::make(PotentialModel::tensor({gauss(), gauss()}), 65),
                                           CVector::Zero(2), CVector::Zero(2)),
                  Error);
}

TEST_CASE("partial radial kernel") {
  const int n = 50;
  KernelJob job = KernelJob::make(PotentialModel::radial(gauss(), 1), n);
  CVector z = vec({{0.3, -0.2}}), w = vec({{0.1, 0.5}});
  CHECK(std::abs(partial_radial_kernel(job, n - 1, z, w).value() - radial_kernel(job, z, w).value()) <
        1e-13 * std::abs(radial_kernel(job, z, w).value()));
  // Rescaled diagonal is the Poisson CDF P(Pois(m |zeta|^2) <= m).
  KernelJob big = KernelJob::make(PotentialModel::radial(gauss(), 1), 10000);
  const int m = 900;
  for (double zeta : {0.3, 0.9, 1.0, 1.1}) {
    CVector p = vec({zeta * std::sqrt(double(m) / 10000.0)});
    double v = partial_radial_kernel(big, m, p, p).value().real() / 10000.0;
    double lam = m * zeta * zeta;
    CHECK(std::fabs(v - (1.0 - reg_inc_gamma_lower(m + 1.0, lam))) < 1e-10);
    if (zeta == 0.9) CHECK(std::fabs(v - 1.0) < 1e-6);
  }
}

TEST_CASE("extremal and Gram partial kernels for the Gaussian") {
  const int n = 100, m = 12;
  PlanarPotential Q = PlanarPotential::gaussian();
  CHECK(extremal_partial_kernel(Q, n, m, {0.0, 0.0}).value() == doctest::Approx(1.0));
  std::complex<double> z(0.11, -0.07), w(-0.05, 0.13);
  double series = 0.0, term = 1.0, x = n * std::norm(z);
  for (int j = 0; j <= m; ++j) {
    series += term;
    term *= x / (j + 1);
  }
  CHECK(std::fabs(extremal_partial_kernel(Q, n, m, z).value() / series - 1.0) < 1e-10);
  // P_j(z) = z^j sqrt(n^{j+1}/j!): the Gram kernel is n times the same series.
  CHECK(std::fabs(gram_partial_kernel(Q, n, m, z, z).value().real() / (n * series) - 1.0) < 1e-10);
  std::complex<double> a = gram_partial_kernel(Q, n, m, z, w).value();
  std::complex<double> b = std::conj(gram_partial_kernel(Q, n, m, w, z).value());
  CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
  auto t = moment_table(Q, n, m, false);
  GramFactor g = gram_factor(*t);
  CHECK(gram_residual(g, *t) < 1e-8);
  CHECK(g.min_pivot_ratio > 0.5);
  std::complex<double> dz = gram_partial_kernel(g, z, z, true).value();
  CHECK(dz.real() >= 0.0);
  CHECK(std::fabs(dz.imag()) <= 1e-14 * dz.real());
}

TEST_CASE("Gram factor on the elliptic potential") {
  auto t = moment_table(PlanarPotential::elliptic(0.2), 200, 10, false);
  GramFactor g = gram_factor(*t);
  CHECK(gram_residual(g, *t) < 1e-8);
  for (double r : {0.0, 0.1, 0.2}) {
    double v = gram_partial_kernel(g, {0.0, r}, {0.0, r}).value().real();
    CHECK(v > 0.0);
  }
}

TEST_CASE("limiting kernels") {
  CVector xi = vec({{0.3, 0.1}, {-0.2, 0.4}});
  CHECK(std::abs(limit_ginibre(xi, xi).value() - 1.0) < 1e-14);
  CVector a = vec({1.0, 0.0}), b = vec({0.0, {0.0, 2.0}});
  CHECK(limit_ginibre(a, b).modulus() == doctest::Approx(std::exp(-2.5)).epsilon(1e-14));
  // Factorization over coordinates.
  CVector e = vec({{0.5, -0.1}, {0.2, 0.3}});
  std::complex<double> prod = limit_ginibre(xi.head(1), e.head(1)).value() * limit_ginibre(xi.tail(1), e.tail(1)).value();
  CHECK(std::abs(limit_ginibre(xi, e).value() - prod) < 1e-14);
  CHECK(std::abs(limit_erfc(0.0, 0.0).value() - 0.5) < 1e-15);
  CHECK(std::abs(limit_erfc(-8.0, -8.0).value() - 1.0) < 1e-14);
  CHECK(limit_erfc(8.0, 8.0).modulus() < 1e-28);
  std::complex<double> u(0.4, -0.3), v(-0.1, 0.6);
  CHECK(std::abs(limit_mverfc(vec({u}), vec({v})).value() - limit_erfc(u, v).value()) < 1e-14);
  CHECK(std::abs(limit_mverfc(CVector::Zero(2), CVector::Zero(2)).value() - 0.5) < 1e-15);
  // Weight-stripped half-space kernel with v = (1,1)/sqrt 2 is the multivariate erfc kernel.
  CVector vv = CVector::Constant(2, 1.0 / std::sqrt(2.0));
  LogComplex hs = halfspace_fock_kernel(xi, e, vv);
  LogComplex weight = LogComplex::polar(-0.5 * (xi.squaredNorm() + e.squaredNorm()), 0.0);
  CHECK(std::abs((hs * weight).value() - limit_mverfc(xi, e).value()) < 1e-13);
}

TEST_CASE("predicted monomial density") {
  RadialProfile g = gauss();
  const int n = 400;
  for (double tau : {0.5, 1.0}) {
    double rt = std::sqrt(tau);
    int j = static_cast<int>(tau * n);
    double expect = std::sqrt(n * g.laplacian(rt)) / (std::sqrt(std::numbers::pi) * rt);
    CHECK(hw_predicted_density(g, tau, n, j, {rt, 0.0}).value() == doctest::Approx(expect).epsilon(1e-10));
  }
  const int N = 4096;
  const int j = N - static_cast<int>(std::floor(std::sqrt(double(N))));
  double exact = std::exp((j + 1) * std::log(double(N)) - N - std::lgamma(j + 1.0));
  double tol = 5.0 * std::pow(std::log(double(N)), 3) / std::sqrt(double(N));
  double ratio = hw_predicted_density(g, 1.0, N, j, {1.0, 0.0}).value() / exact;
  CHECK(std::fabs(ratio - 1.0) <= tol);
  // The stated prefactor exceeds the exact local CLT density by sqrt 2.
  CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
  // Depends on z only through the normal coordinate.
  double a = hw_predicted_density(g, 1.0, N, j, std::polar(1.01, 0.0)).value();
  double b = hw_predicted_density(g, 1.0, N, j, std::polar(1.01, 2.0)).value();
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("reproducing pairing") {
  CVector v = CVector::Constant(2, 1.0 / std::sqrt(2.0));
  PairingResult r = reproducing_pairing(vec({{0.2, -0.1}, {-0.3, 0.2}}), vec({{0.1, 0.3}, {0.4, 0.0}}), v);
  CHECK(r.rel_error < 1e-8);
}
