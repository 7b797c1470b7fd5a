#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "bergkern/lognum.hpp"

namespace bergkern {

// Finite complex argument; NaN or infinite parts are rejected.
struct ComplexValue {
  double re = 0.0;
  double im = 0.0;

  ComplexValue() = default;
  ComplexValue(double re_, double im_);
  explicit ComplexValue(std::complex<double> z) : ComplexValue(z.real(), z.imag()) {}
  std::complex<double> value() const { return {re, im}; }
};

// |Re z| and |Im z| bound for erfc_complex.
inline constexpr double kErfcWindow = 50.0;
// Radius where the Faddeeva evaluation switches from the rational
// approximation to the continued fraction.
inline constexpr double kFaddeevaSplit = 6.0;

double log_gamma(double x);
double reg_inc_gamma_lower(double s, double x);
double erfc_real(double x);

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0.
std::complex<double> faddeeva_upper(std::complex<double> z, double split = kFaddeevaSplit);

ComplexValue erfc_complex(const ComplexValue& z);
// Same function carried in log form; representable across the whole window.
LogComplex log_erfc_complex(const ComplexValue& z);
// Same evaluation without the window check; for quadrature tails only.
LogComplex log_erfc_unbounded(std::complex<double> z);

double f_delta(double delta);
// Composite Simpson evaluation of f with fixed step h (refinement oracle).
double f_delta_simpson(double delta, double h);

// Closed form of the half-space Gaussian integral
//   int_{x.v >= 0} exp(-x.A^{-1}x/2 - b.x) dx.
double halfspace_gaussian(const Eigen::MatrixXd& A, const Eigen::VectorXd& v,
                          const Eigen::VectorXd& b);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

// Monte Carlo estimate of the same integral, sampling x ~ N(0, A).
MonteCarloEstimate halfspace_gaussian_mc(const Eigen::MatrixXd& A, const Eigen::VectorXd& v,
                                         const Eigen::VectorXd& b, std::int64_t samples,
                                         std::uint64_t seed);

// LDL^T check with pivot threshold 1e-12 * max diagonal. Returns log det A.
double spd_log_det(const Eigen::MatrixXd& A);

}  // namespace bergkern
