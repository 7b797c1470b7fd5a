#pragma once

#include <complex>
#include <limits>

namespace bergkern {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// ln(1e-18): terms this far below the running maximum are dropped.
inline constexpr double kDropLog = -41.446531673892822;

double wrap_phase(double phase);

// Signed real stored as (ln|x|, sign).
struct LogReal {
  double log_value = kNegInf;
  int sign = 0;

  static LogReal zero() { return {}; }
  static LogReal from_log(double log_value, int sign = 1);
  static LogReal from_value(double x);

  bool is_zero() const { return sign == 0; }
  double value() const;
};

LogReal operator*(const LogReal& a, const LogReal& b);
LogReal operator/(const LogReal& a, const LogReal& b);
LogReal operator+(const LogReal& a, const LogReal& b);
LogReal operator-(const LogReal& a, const LogReal& b);

// Complex number stored as (ln|z|, arg z) with arg in (-pi, pi].
struct LogComplex {
  double log_modulus = kNegInf;
  double phase = 0.0;

  static LogComplex zero() { return {}; }
  static LogComplex polar(double log_modulus, double phase);
  static LogComplex from_value(std::complex<double> z);
  static LogComplex from_real(const LogReal& x);

  bool is_zero() const { return log_modulus == kNegInf; }
  double modulus() const;
  std::complex<double> value() const;
  LogComplex conj() const { return polar(log_modulus, -phase); }
};

LogComplex operator*(const LogComplex& a, const LogComplex& b);
LogComplex operator/(const LogComplex& a, const LogComplex& b);
LogComplex operator+(const LogComplex& a, const LogComplex& b);
LogComplex operator-(const LogComplex& a, const LogComplex& b);

// Phase-coherent log-domain accumulator: keeps a running log scale and a
// complex residual in scaled units, so oscillating sums do not lose the
// phase information a pure log-sum-exp would.
class PhaseSum {
 public:
  PhaseSum() = default;
  // Seeds the scale when the dominant term is known in advance.
  explicit PhaseSum(double anchor) : scale_(anchor) {}

  void add(double log_modulus, double phase);
  void add(const LogComplex& t) { add(t.log_modulus, t.phase); }
  void add_real(const LogReal& t);

  LogComplex result() const;
  // ln of the summed moduli of dropped terms (-inf when nothing was dropped).
  double dropped_log() const { return dropped_; }
  long terms() const { return terms_; }

 private:
  double scale_ = kNegInf;
  std::complex<double> acc_{0.0, 0.0};
  double dropped_ = kNegInf;
  long terms_ = 0;
};

double log_add(double a, double b);

}  // namespace bergkern
