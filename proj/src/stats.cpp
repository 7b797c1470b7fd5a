#include "bergkern/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/special_functions/binomial.hpp>

#include "bergkern/errors.hpp"
#include "bergkern/integrate.hpp"
#include "bergkern/parallel.hpp"
#include "bergkern/quad.hpp"
#include "bergkern/specfun.hpp"

namespace bergkern {

namespace {

void require_radial(const PotentialModel& model) {
  if (model.variant() != PotentialModel::Variant::Radial)
    raise(ErrorKind::Validation, "counting statistics need a radial model");
}

constexpr int kChunks = 64;

}  // namespace

double edge_radius(const PotentialModel& model, int n, double delta) {
  require_radial(model);
  if (n < 1) raise(ErrorKind::Domain, "n must be >= 1");
  return 1.0 + delta / std::sqrt(2.0 * n * model.profile().laplacian(1.0));
}

CountingSetup CountingSetup::at_radius(const PotentialModel& model, int n, double a) {
  require_radial(model);
  if (n < 1) raise(ErrorKind::Domain, "n must be >= 1");
  if (!(a >= 0.0) || !std::isfinite(a)) raise(ErrorKind::Domain, "radius must be >= 0");
  return {model, n, a, std::nullopt};
}

CountingSetup CountingSetup::at_delta(const PotentialModel& model, int n, double delta) {
  require_radial(model);
  if (!std::isfinite(delta)) raise(ErrorKind::Domain, "delta must be finite");
  CountingSetup s{model, n, std::nullopt, delta};
  if (!(s.radius() > 0.0)) raise(ErrorKind::Domain, "a_n(delta) must be positive");
  return s;
}

double CountingSetup::radius() const {
  if (a.has_value() == delta.has_value()) raise(ErrorKind::Validation, "set exactly one of a and delta");
  if (a) return *a;
  return edge_radius(model, n, *delta);
}

std::string method_name(VarianceMethod m) {
  switch (m) {
    case VarianceMethod::BernoulliExact: return "bernoulli_exact";
    case VarianceMethod::Integral: return "integral";
    case VarianceMethod::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

double log_multiplicity(int j, int d) {
  if (d == 1) return 0.0;
  return log_gamma(j + d) - log_gamma(j + 1.0) - log_gamma(double(d));
}

double basis_size(int n, int d) {
  return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n + d - 1), static_cast<unsigned>(d));
}

double ball_probability(const CountingSetup& setup, int j) {
  if (j < 0 || j >= setup.n) raise(ErrorKind::Domain, "ball probability needs 0 <= j < n");
  const RadialProfile& p = setup.model.profile();
  LogReal in = ball_integral(p, setup.n, setup.dim(), j, setup.radius());
  LogReal out = outer_integral(p, setup.n, setup.dim(), j, setup.radius());
  if (in.is_zero()) return 0.0;
  if (out.is_zero()) return 1.0;
  return 1.0 / (1.0 + std::exp(out.log_value - in.log_value));
}

double outer_probability(const CountingSetup& setup, int j) {
  if (j < 0 || j >= setup.n) raise(ErrorKind::Domain, "outer probability needs 0 <= j < n");
  const RadialProfile& p = setup.model.profile();
  LogReal in = ball_integral(p, setup.n, setup.dim(), j, setup.radius());
  LogReal out = outer_integral(p, setup.n, setup.dim(), j, setup.radius());
  if (out.is_zero()) return 0.0;
  if (in.is_zero()) return 1.0;
  return 1.0 / (1.0 + std::exp(in.log_value - out.log_value));
}

namespace {

struct Bernoulli {
  std::vector<double> p, q, log_mult;
};

Bernoulli bernoulli_terms(const CountingSetup& setup) {
  const int n = setup.n, d = setup.dim();
  Bernoulli b;
  b.p.resize(n);
  b.q.resize(n);
  b.log_mult.resize(n);
  parallel_for(n, [&](std::size_t j) {
    b.p[j] = ball_probability(setup, static_cast<int>(j));
    b.q[j] = outer_probability(setup, static_cast<int>(j));
    b.log_mult[j] = log_multiplicity(static_cast<int>(j), d);
  });
  return b;
}

}  // namespace

VarianceResult variance_bernoulli(const CountingSetup& setup) {
  Bernoulli b = bernoulli_terms(setup);
  VarianceResult r;
  r.method = VarianceMethod::BernoulliExact;
  for (int j = 0; j < setup.n; ++j) {
    double m = std::exp(b.log_mult[j]);
    r.mean += m * b.p[j];
    r.variance += m * b.p[j] * b.q[j];
  }
  r.diagnostics.evaluations = 2L * setup.n;
  return r;
}

namespace {

// Nodes on [a, a + sign*w] with panel widths growing geometrically away from a.
void graded_nodes(double a, double w, int sign, const IntegralOptions& o, std::vector<double>& x,
                  std::vector<double>& wt) {
  const GaussRule& gl = gauss_legendre(o.order);
  const double ratio = 1.5;
  double total = (std::pow(ratio, o.panels) - 1.0) / (ratio - 1.0);
  double h0 = w / total;
  double left = 0.0;
  for (int p = 0; p < o.panels; ++p) {
    double h = h0 * std::pow(ratio, p);
    for (int i = 0; i < o.order; ++i) {
      double t = left + 0.5 * h * (gl.nodes[i] + 1.0);
      x.push_back(a + sign * t);
      wt.push_back(0.5 * h * gl.weights[i]);
    }
    left += h;
  }
}

}  // namespace

VarianceResult variance_integral(const CountingSetup& setup, const IntegralOptions& opts) {
  const int n = setup.n, d = setup.dim();
  const double a = setup.radius();
  const RadialProfile& prof = setup.model.profile();
  const double w = opts.window_constant * std::log(std::max(n, 2)) / std::sqrt(double(n));
  auto table = norm_table(prof, n, d);
  // c_j = ln j! + ln Gamma(j+d) + 2 ln h_j; F = (4/Gamma(d)) sum_j (r r')^{2j+2d-1} e^{-n(V+V')} / e^{c_j}.
  std::vector<double> c(n);
  for (int j = 0; j < n; ++j) c[j] = log_gamma(j + 1.0) + log_gamma(j + double(d)) + 2.0 * table->log_h(j);
  const double log_pref = std::log(4.0) - log_gamma(double(d));

  std::vector<double> xi, wi, xo, wo;
  graded_nodes(a, std::min(w, a), -1, opts, xi, wi);
  graded_nodes(a, w, 1, opts, xo, wo);

  auto log_F = [&](double r, double s) {
    double lrs = std::log(r * s);
    double base = log_pref - n * (prof.V(r) + prof.V(s)) + (2.0 * d - 1.0) * lrs;
    // Terms are log-concave in j; locate the peak by bisection on the increment.
    auto inc = [&](int j) { return 2.0 * lrs - (c[j + 1] - c[j]); };
    int lo = 0, hi = n - 1;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (inc(mid) > 0.0) lo = mid + 1;
      else hi = mid;
    }
    const int peak = lo;
    const double top = 2.0 * peak * lrs - c[peak];
    double sum = 0.0;
    for (int j = peak; j < n; ++j) {
      double t = 2.0 * j * lrs - c[j] - top;
      if (t < -45.0) break;
      sum += std::exp(t);
    }
    for (int j = peak - 1; j >= 0; --j) {
      double t = 2.0 * j * lrs - c[j] - top;
      if (t < -45.0) break;
      sum += std::exp(t);
    }
    return base + top + std::log(sum);
  };

  std::vector<double> partial(xi.size(), 0.0);
  parallel_for(xi.size(), [&](std::size_t i) {
    if (!(xi[i] > 0.0)) return;
    double acc = 0.0;
    for (std::size_t k = 0; k < xo.size(); ++k) acc += wo[k] * std::exp(log_F(xi[i], xo[k]));
    partial[i] = wi[i] * acc;
  });
  VarianceResult r;
  r.method = VarianceMethod::Integral;
  for (double v : partial) r.variance += v;
  // The mean is a single radial integral of the diagonal density; reuse the exact route.
  double mean = 0.0;
  for (int j = 0; j < n; ++j) mean += std::exp(log_multiplicity(j, d)) * ball_probability(setup, j);
  r.mean = mean;
  r.diagnostics.window = w;
  r.diagnostics.evaluations = static_cast<long>(xi.size() * xo.size());
  return r;
}

double edge_variance_limit(const PotentialModel& model, double delta) {
  require_radial(model);
  const int d = model.dim();
  double sphere = 2.0 * std::pow(std::numbers::pi, d) / std::tgamma(double(d));
  return f_delta(delta) / (2.0 * std::numbers::pi * std::sqrt(std::numbers::pi)) *
         std::sqrt(model.profile().laplacian(1.0)) * sphere;
}

VarianceResult mc_count(const CountingSetup& setup, long trials, unsigned long long seed) {
  if (trials < 1) raise(ErrorKind::Domain, "trials must be positive");
  Bernoulli b = bernoulli_terms(setup);
  const int n = setup.n;
  std::vector<long long> mult(n);
  double shift = 0.0;
  for (int j = 0; j < n; ++j) {
    mult[j] = std::llround(std::exp(b.log_mult[j]));
    shift += mult[j] * b.p[j];
  }
  shift = std::round(shift);
  struct Moments {
    long count = 0;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;  // sums of powers of (count - shift)
  };
  std::vector<Moments> chunks(kChunks);
  parallel_for(kChunks, [&](std::size_t c) {
    long lo = trials * static_cast<long>(c) / kChunks;
    long hi = trials * static_cast<long>(c + 1) / kChunks;
    std::seed_seq ss{static_cast<std::uint32_t>(seed & 0xffffffffULL), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(ss);
    Moments m;
    for (long t = lo; t < hi; ++t) {
      long long total = 0;
      for (int j = 0; j < n; ++j) {
        if (b.p[j] <= 0.0) continue;
        if (b.q[j] <= 0.0) {
          total += mult[j];
          continue;
        }
        if (mult[j] == 1) {
          total += std::uniform_real_distribution<double>(0.0, 1.0)(rng) < b.p[j] ? 1 : 0;
        } else {
          std::binomial_distribution<long long> bin(mult[j], b.p[j]);
          total += bin(rng);
        }
      }
      double x = static_cast<double>(total) - shift;
      m.count += 1;
      m.s1 += x;
      m.s2 += x * x;
      m.s3 += x * x * x;
      m.s4 += x * x * x * x;
    }
    chunks[c] = m;
  });
  Moments all;
  for (const auto& m : chunks) {
    all.count += m.count;
    all.s1 += m.s1;
    all.s2 += m.s2;
    all.s3 += m.s3;
    all.s4 += m.s4;
  }
  VarianceResult r;
  r.method = VarianceMethod::MonteCarlo;
  const double T = static_cast<double>(all.count);
  double mu = all.s1 / T;
  r.mean = shift + mu;
  r.diagnostics.trials = all.count;
  r.diagnostics.insufficient_data = trials < 10000;
  if (all.count < 2) {
    r.variance = 0.0;
    return r;
  }
  double m2 = all.s2 / T - mu * mu;
  double m4 = all.s4 / T - 4.0 * mu * all.s3 / T + 6.0 * mu * mu * all.s2 / T - 3.0 * mu * mu * mu * mu;
  r.variance = m2 * T / (T - 1.0);
  r.diagnostics.mean_std_error = std::sqrt(r.variance / T);
  r.diagnostics.variance_std_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / T);
  return r;
}

}  // namespace bergkern
