#include "bergkern/lognum.hpp"

#include <cmath>
#include <numbers>

namespace bergkern {

double wrap_phase(double phase) {
  constexpr double pi = std::numbers::pi;
  if (phase > -pi && phase <= pi) return phase;
  double r = std::remainder(phase, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

LogReal LogReal::from_log(double log_value, int sign) {
  if (sign == 0 || log_value == kNegInf) return zero();
  return {log_value, sign > 0 ? 1 : -1};
}

LogReal LogReal::from_value(double x) {
  if (x == 0.0) return zero();
  return {std::log(std::fabs(x)), x > 0 ? 1 : -1};
}

double LogReal::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_value); }

LogReal operator*(const LogReal& a, const LogReal& b) {
  if (a.is_zero() || b.is_zero()) return LogReal::zero();
  return {a.log_value + b.log_value, a.sign * b.sign};
}

LogReal operator/(const LogReal& a, const LogReal& b) {
  if (a.is_zero()) return LogReal::zero();
  return {a.log_value - b.log_value, a.sign * b.sign};
}

LogReal operator+(const LogReal& a, const LogReal& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const LogReal& hi = a.log_value >= b.log_value ? a : b;
  const LogReal& lo = a.log_value >= b.log_value ? b : a;
  double t = std::exp(lo.log_value - hi.log_value);
  if (hi.sign == lo.sign) return {hi.log_value + std::log1p(t), hi.sign};
  if (t == 1.0) return LogReal::zero();
  return {hi.log_value + std::log1p(-t), hi.sign};
}

LogReal operator-(const LogReal& a, const LogReal& b) {
  return a + LogReal{b.log_value, -b.sign};
}

LogComplex LogComplex::polar(double log_modulus, double phase) {
  if (log_modulus == kNegInf) return zero();
  return {log_modulus, wrap_phase(phase)};
}

LogComplex LogComplex::from_value(std::complex<double> z) {
  if (z == std::complex<double>(0.0, 0.0)) return zero();
  return {std::log(std::abs(z)), std::arg(z)};
}

LogComplex LogComplex::from_real(const LogReal& x) {
  if (x.is_zero()) return zero();
  return polar(x.log_value, x.sign > 0 ? 0.0 : std::numbers::pi);
}

double LogComplex::modulus() const { return is_zero() ? 0.0 : std::exp(log_modulus); }

std::complex<double> LogComplex::value() const {
  if (is_zero()) return {0.0, 0.0};
  return std::polar(std::exp(log_modulus), phase);
}

LogComplex operator*(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero() || b.is_zero()) return LogComplex::zero();
  return LogComplex::polar(a.log_modulus + b.log_modulus, a.phase + b.phase);
}

LogComplex operator/(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero()) return LogComplex::zero();
  return LogComplex::polar(a.log_modulus - b.log_modulus, a.phase - b.phase);
}

LogComplex operator+(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  double m = std::max(a.log_modulus, b.log_modulus);
  std::complex<double> s = std::polar(std::exp(a.log_modulus - m), a.phase) +
                           std::polar(std::exp(b.log_modulus - m), b.phase);
  if (s == std::complex<double>(0.0, 0.0)) return LogComplex::zero();
  return LogComplex::polar(m + std::log(std::abs(s)), std::arg(s));
}

LogComplex operator-(const LogComplex& a, const LogComplex& b) {
  if (b.is_zero()) return a;
  return a + LogComplex::polar(b.log_modulus, b.phase + std::numbers::pi);
}

void PhaseSum::add(double log_modulus, double phase) {
  if (log_modulus == kNegInf) return;
  ++terms_;
  if (log_modulus > scale_) {
    if (scale_ != kNegInf) acc_ *= std::exp(scale_ - log_modulus);
    scale_ = log_modulus;
  }
  double rel = log_modulus - scale_;
  if (rel < kDropLog) {
    dropped_ = log_add(dropped_, log_modulus);
    return;
  }
  acc_ += std::polar(std::exp(rel), phase);
}

void PhaseSum::add_real(const LogReal& t) {
  if (t.is_zero()) return;
  add(t.log_value, t.sign > 0 ? 0.0 : std::numbers::pi);
}

LogComplex PhaseSum::result() const {
  if (scale_ == kNegInf || acc_ == std::complex<double>(0.0, 0.0)) return LogComplex::zero();
  return LogComplex::polar(scale_ + std::log(std::abs(acc_)), std::arg(acc_));
}

}  // namespace bergkern
