#include "bergkern/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <limits>
#include <numbers>

#include "bergkern/errors.hpp"
#include "bergkern/integrate.hpp"
#include "bergkern/parallel.hpp"
#include "bergkern/specfun.hpp"

namespace bergkern {

namespace {

// ln(1e-20): the walk stops once the integrand is this far below its peak.
constexpr double kTailCut = 46.0;

struct RadialIntegrand {
  const RadialProfile& profile;
  double n;
  double c;  // 2d - 1 + 2j
  double operator()(double r) const { return c * std::log(r) - n * profile.V(r); }
};

double solve_rdV(const RadialProfile& profile, double target) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; profile.rdV(hi) <= target; ++i) {
    if (i > 400) raise(ErrorKind::Numeric, "radial peak bracket failed");
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

struct Peak {
  double r;
  double sigma;
};

Peak locate_peak(const RadialIntegrand& g) {
  double r = solve_rdV(g.profile, g.c / g.n);
  double curv = g.c / (r * r) + g.n * g.profile.d2V(r);
  double floor = 0.25 * g.c / (r * r);
  if (!std::isfinite(curv) || curv < floor) curv = floor;
  return {r, 1.0 / std::sqrt(curv)};
}

double walk(const RadialIntegrand& g, double from, double ref, double sigma, double limit,
            int dir) {
  double step = sigma;
  for (int i = 0; i < 200; ++i) {
    double x = from + dir * step;
    if (dir < 0 ? x <= limit : x >= limit) return limit;
    if (g(x) < ref - kTailCut) return x;
    step *= 2.0;
  }
  return limit;
}

// ln int_lo^hi exp(g(r)) dr for the unimodal log-integrand g.
double log_integral(const RadialIntegrand& g, double lo, double hi) {
  Peak pk = locate_peak(g);
  double peak = std::clamp(pk.r, lo, hi);
  double ref = g(peak);
  double left = walk(g, peak, ref, pk.sigma, lo, -1);
  double right = walk(g, peak, ref, pk.sigma, hi, +1);
  auto f = [&](double r) { return r <= 0.0 ? 0.0 : std::exp(g(r) - ref); };
  double total = 0.0;
  bool ok = true;
  if (peak > left) {
    QuadResult q = gauss_kronrod(f, left, peak, 1e-12, 0.0, 4000, 4);
    total += q.value;
    ok = ok && q.converged;
  }
  if (right > peak) {
    QuadResult q = gauss_kronrod(f, peak, right, 1e-12, 0.0, 4000, 4);
    total += q.value;
    ok = ok && q.converged;
  }
  if (!ok) raise(ErrorKind::Numeric, "radial quadrature did not converge");
  if (!(total > 0.0)) return kNegInf;
  return ref + std::log(total);
}

void check_args(int n, int d, int j) {
  if (n < 1) raise(ErrorKind::Domain, "n must be >= 1");
  if (d < 1) raise(ErrorKind::Domain, "d must be >= 1");
  if (j < 0) raise(ErrorKind::Domain, "j must be >= 0");
  if (j > 10 * n + d) raise(ErrorKind::Domain, "degree j exceeds 10 n");
}

LogReal normalized(double log_integral_value, int d, int j) {
  if (log_integral_value == kNegInf) return LogReal::zero();
  return LogReal::from_log(std::log(2.0) - log_gamma(j + d) + log_integral_value);
}

}  // namespace

LogReal radial_norm(const RadialProfile& profile, int n, int d, int j) {
  check_args(n, d, j);
  RadialIntegrand g{profile, static_cast<double>(n), 2.0 * d - 1.0 + 2.0 * j};
  return normalized(log_integral(g, 0.0, std::numeric_limits<double>::infinity()), d, j);
}

LogReal ball_integral(const RadialProfile& profile, int n, int d, int j, double a) {
  check_args(n, d, j);
  if (!(a >= 0.0)) raise(ErrorKind::Domain, "ball radius must be >= 0");
  if (a == 0.0) return LogReal::zero();
  RadialIntegrand g{profile, static_cast<double>(n), 2.0 * d - 1.0 + 2.0 * j};
  return normalized(log_integral(g, 0.0, a), d, j);
}

LogReal outer_integral(const RadialProfile& profile, int n, int d, int j, double a) {
  check_args(n, d, j);
  if (!(a >= 0.0)) raise(ErrorKind::Domain, "ball radius must be >= 0");
  RadialIntegrand g{profile, static_cast<double>(n), 2.0 * d - 1.0 + 2.0 * j};
  return normalized(log_integral(g, a, std::numeric_limits<double>::infinity()), d, j);
}

NormTable build_norm_table(const RadialProfile& profile, int n, int d, int threads) {
  NormTable t;
  t.n = n;
  t.d = d;
  t.profile = profile;
  t.values.resize(static_cast<std::size_t>(n + d));
  parallel_for(t.values.size(),
               [&](std::size_t j) { t.values[j] = radial_norm(profile, n, d, static_cast<int>(j)); },
               threads);
  return t;
}

namespace {
std::mutex g_table_mutex;
std::map<std::string, std::shared_ptr<const NormTable>> g_tables;
}  // namespace

std::shared_ptr<const NormTable> norm_table(const RadialProfile& profile, int n, int d) {
  std::string key = profile.canonical() + "|" + std::to_string(n) + "|" + std::to_string(d);
  {
    std::lock_guard<std::mutex> lock(g_table_mutex);
    auto it = g_tables.find(key);
    if (it != g_tables.end()) return it->second;
  }
  auto table = std::make_shared<const NormTable>(build_norm_table(profile, n, d));
  std::lock_guard<std::mutex> lock(g_table_mutex);
  return g_tables.emplace(key, table).first->second;
}

void clear_norm_table_cache() {
  std::lock_guard<std::mutex> lock(g_table_mutex);
  g_tables.clear();
}

std::optional<double> closed_form_log_norm(const RadialProfile& profile, int n, int d, int j) {
  double c = 0.0, e = 0.0;
  if (profile.kind() == RadialProfile::Kind::Power) {
    c = profile.scale() / profile.b();
    e = 2.0 * profile.b();
  } else {
    if (profile.terms().size() != 1) return std::nullopt;
    c = profile.scale() * profile.terms()[0].coefficient;
    e = profile.terms()[0].exponent;
  }
  // (2/Gamma(j+d)) (1/e) (n c)^{-(2j+2d)/e} Gamma((2j+2d)/e)
  double s = (2.0 * j + 2.0 * d) / e;
  return std::log(2.0 / e) - log_gamma(j + double(d)) - s * std::log(n * c) + log_gamma(s);
}

}  // namespace bergkern
