#include "bergkern/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "bergkern/errors.hpp"
#include "bergkern/integrate.hpp"

namespace bergkern {

namespace {

constexpr double kSqrtPi = 1.772453850905516027298167483341145;

// Rational approximation of w(z) in the upper half plane (Weideman 1994),
// N = 40 terms. Coefficients come from a cosine transform of
// f(t) = exp(-t^2)(L^2 + t^2) on the map t = L tan(theta/2).
struct Weideman {
  static constexpr int N = 40;
  double L = 0.0;
  std::array<double, N> a{};
};

const Weideman& weideman() {
  static const Weideman table = [] {
    Weideman w;
    const int M = 2 * Weideman::N;
    const int M2 = 2 * M;
    w.L = std::sqrt(Weideman::N / std::sqrt(2.0));
    std::array<double, 2 * 2 * Weideman::N> g{};
    for (int i = 0; i < M2; ++i) {
      if (i == M) continue;  // theta = pi, f vanishes
      int k = i < M ? i : i - M2;
      double t = w.L * std::tan(k * std::numbers::pi / (2.0 * M));
      g[i] = std::exp(-t * t) * (w.L * w.L + t * t);
    }
    for (int m = 1; m <= Weideman::N; ++m) {
      double s = 0.0;
      for (int i = 0; i < M2; ++i) s += g[i] * std::cos(std::numbers::pi * i * m / M);
      w.a[m - 1] = s / M2;
    }
    return w;
  }();
  return table;
}

std::complex<double> faddeeva_rational(std::complex<double> z) {
  const Weideman& w = weideman();
  const std::complex<double> i(0.0, 1.0);
  std::complex<double> den = w.L - i * z;
  std::complex<double> Z = (w.L + i * z) / den;
  std::complex<double> p = 0.0;
  for (int m = Weideman::N - 1; m >= 0; --m) p = p * Z + w.a[m];
  return 2.0 * p / (den * den) + (1.0 / kSqrtPi) / den;
}

// Laplace continued fraction, good for |z| >= 6 in the upper half plane.
std::complex<double> faddeeva_cf(std::complex<double> z) {
  int nu = static_cast<int>(std::ceil(3.0 + 1442.0 / (26.0 + 77.0 * z.imag())));
  nu = std::max(nu, 20);
  std::complex<double> r = 0.0;
  for (int k = nu; k >= 1; --k) r = (0.5 * k) / (z - r);
  return std::complex<double>(0.0, 1.0 / kSqrtPi) / (z - r);
}

void check_window(const ComplexValue& z) {
  if (std::fabs(z.re) > kErfcWindow || std::fabs(z.im) > kErfcWindow)
    raise(ErrorKind::Window, "erfc argument (" + std::to_string(z.re) + ", " +
                                 std::to_string(z.im) + ") outside the window |Re|,|Im| <= 50");
}

// erfc(z) = exp(-z^2) w(iz) for Re z >= 0, in log form.
LogComplex log_erfc_right(double x, double y) {
  std::complex<double> w = faddeeva_upper({-y, x});
  double re_z2 = (x - y) * (x + y);
  double im_z2 = 2.0 * x * y;
  return LogComplex::polar(-re_z2 + std::log(std::abs(w)), -im_z2 + std::arg(w));
}

}  // namespace

ComplexValue::ComplexValue(double re_, double im_) : re(re_), im(im_) {
  if (!std::isfinite(re_) || !std::isfinite(im_))
    raise(ErrorKind::Domain, "complex value with non-finite component");
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) raise(ErrorKind::Domain, "log_gamma requires x > 0");
  return boost::math::lgamma(x);
}

double reg_inc_gamma_lower(double s, double x) {
  if (!(s > 0.0)) raise(ErrorKind::Domain, "reg_inc_gamma_lower requires s > 0");
  if (!(x >= 0.0)) raise(ErrorKind::Domain, "reg_inc_gamma_lower requires x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(s, x);
}

double erfc_real(double x) { return std::erfc(x); }

std::complex<double> faddeeva_upper(std::complex<double> z, double split) {
  if (std::abs(z) < split) return faddeeva_rational(z);
  return faddeeva_cf(z);
}

LogComplex log_erfc_unbounded(std::complex<double> z) {
  if (z.real() >= 0.0) return log_erfc_right(z.real(), z.imag());
  LogComplex reflected = log_erfc_right(-z.real(), -z.imag());
  return LogComplex::polar(std::log(2.0), 0.0) - reflected;
}

LogComplex log_erfc_complex(const ComplexValue& z) {
  check_window(z);
  return log_erfc_unbounded(z.value());
}

ComplexValue erfc_complex(const ComplexValue& z) {
  if (z.im == 0.0) {
    check_window(z);
    return {std::erfc(z.re), 0.0};
  }
  LogComplex v = log_erfc_complex(z);
  if (v.log_modulus > 709.0)
    raise(ErrorKind::Numeric, "erfc value at (" + std::to_string(z.re) + ", " +
                                  std::to_string(z.im) + ") overflows double precision");
  return ComplexValue(v.value());
}

namespace {

double f_integrand(double t) { return std::erfc(t) * std::erfc(-t) * 0.25; }

// The integrand is even and below 1e-18 of its peak beyond |t| = 9.
constexpr double kFTail = 9.0;

void f_limits(double delta, double& lo, double& hi) {
  lo = std::max(delta, -kFTail);
  hi = std::max(kFTail, delta + 10.0);
}

}  // namespace

double f_delta(double delta) {
  double lo, hi;
  f_limits(delta, lo, hi);
  QuadResult r = gauss_kronrod(f_integrand, lo, hi, 1e-13, 1e-16, 4000, 8);
  return std::sqrt(2.0 * std::numbers::pi) * r.value;
}

double f_delta_simpson(double delta, double h) {
  if (!(h > 0.0)) raise(ErrorKind::Domain, "f_delta_simpson requires h > 0");
  double lo, hi;
  f_limits(delta, lo, hi);
  long m = static_cast<long>(std::ceil((hi - lo) / h));
  if (m % 2) ++m;
  double step = (hi - lo) / m;
  double s = f_integrand(lo) + f_integrand(hi);
  for (long i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f_integrand(lo + i * step);
  return std::sqrt(2.0 * std::numbers::pi) * s * step / 3.0;
}

double spd_log_det(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() == 0) raise(ErrorKind::Validation, "matrix must be square");
  const long d = A.rows();
  double scale = A.cwiseAbs().maxCoeff();
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
    raise(ErrorKind::Validation, "matrix is not symmetric");
  double max_diag = A.diagonal().maxCoeff();
  if (!(max_diag > 0.0)) raise(ErrorKind::Validation, "matrix is not positive definite");
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd D(d);
  double log_det = 0.0;
  for (long i = 0; i < d; ++i) {
    double di = A(i, i);
    for (long k = 0; k < i; ++k) di -= L(i, k) * L(i, k) * D(k);
    if (!(di > 1e-12 * max_diag))
      raise(ErrorKind::Validation, "matrix is not positive definite (pivot " +
                                       std::to_string(i) + " = " + std::to_string(di) + ")");
    D(i) = di;
    log_det += std::log(di);
    for (long r = i + 1; r < d; ++r) {
      double s = A(r, i);
      for (long k = 0; k < i; ++k) s -= L(r, k) * L(i, k) * D(k);
      L(r, i) = s / di;
    }
  }
  return log_det;
}

double halfspace_gaussian(const Eigen::MatrixXd& A, const Eigen::VectorXd& v,
                          const Eigen::VectorXd& b) {
  double log_det = spd_log_det(A);
  const long d = A.rows();
  if (v.size() != d || b.size() != d) raise(ErrorKind::Validation, "dimension mismatch");
  if (v.norm() == 0.0) raise(ErrorKind::Validation, "half-space normal v must be nonzero");
  Eigen::VectorXd Av = A * v;
  double vAv = v.dot(Av);
  double bAv = b.dot(Av);
  double bAb = b.dot(A * b);
  double log_mass = 0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det) + 0.5 * bAb;
  return 0.5 * std::exp(log_mass) * std::erfc(bAv / std::sqrt(2.0 * vAv));
}

MonteCarloEstimate halfspace_gaussian_mc(const Eigen::MatrixXd& A, const Eigen::VectorXd& v,
                                         const Eigen::VectorXd& b, std::int64_t samples,
                                         std::uint64_t seed) {
  double log_det = spd_log_det(A);
  if (samples < 2) raise(ErrorKind::Validation, "Monte Carlo needs at least 2 samples");
  const long d = A.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  Eigen::MatrixXd L = llt.matrixL();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd g(d);
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    for (long k = 0; k < d; ++k) g(k) = normal(rng);
    Eigen::VectorXd x = L * g;
    double f = x.dot(v) >= 0.0 ? std::exp(-b.dot(x)) : 0.0;
    double delta = f - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (f - mean);
  }
  double mass = std::exp(0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det));
  MonteCarloEstimate out;
  out.samples = samples;
  out.mean = mass * mean;
  out.std_error = mass * std::sqrt(m2 / static_cast<double>(samples - 1) / samples);
  return out;
}

}  // namespace bergkern
