#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>

#include "bergkern/errors.hpp"
#include "bergkern/integrate.hpp"
#include "bergkern/quad.hpp"

namespace bergkern {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

constexpr double kTailCut = 46.0;

}  // namespace

PlanarPotential PlanarPotential::from_terms(std::vector<PlanarTerm> terms) {
  std::map<std::pair<int, int>, double> merged;
  for (const auto& t : terms) {
    if (t.px < 0 || t.py < 0) raise(ErrorKind::Validation, "planar term exponents must be >= 0");
    if (!std::isfinite(t.coefficient)) raise(ErrorKind::Validation, "planar coefficient must be finite");
    merged[{t.px, t.py}] += t.coefficient;
  }
  PlanarPotential Q;
  for (const auto& [key, c] : merged)
    if (c != 0.0) Q.terms_.push_back({c, key.first, key.second});
  if (Q.terms_.empty()) raise(ErrorKind::Validation, "planar potential has no terms");
  return Q;
}

PlanarPotential PlanarPotential::gaussian() { return from_terms({{1.0, 2, 0}, {1.0, 0, 2}}); }

PlanarPotential PlanarPotential::elliptic(double t) {
  return from_terms({{1.0 - t, 2, 0}, {1.0 + t, 0, 2}});
}

PlanarPotential PlanarPotential::quartic_perturbation(double eps) {
  return from_terms({{1.0, 2, 0}, {1.0, 0, 2}, {eps, 4, 0}, {2.0 * eps, 2, 2}, {eps, 0, 4}});
}

double PlanarPotential::value(double x, double y) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coefficient * std::pow(x, t.px) * std::pow(y, t.py);
  return s;
}

double PlanarPotential::value_polar(double r, double theta) const {
  return value(r * std::cos(theta), r * std::sin(theta));
}

double PlanarPotential::laplacian_at_origin() const {
  double cxx = 0.0, cyy = 0.0;
  for (const auto& t : terms_) {
    if (t.px == 2 && t.py == 0) cxx += t.coefficient;
    if (t.px == 0 && t.py == 2) cyy += t.coefficient;
  }
  // (Q_xx + Q_yy) / 4 with Q_xx = 2 cxx at the origin.
  return 0.5 * (cxx + cyy);
}

int PlanarPotential::degree() const {
  int deg = 0;
  for (const auto& t : terms_) deg = std::max(deg, t.px + t.py);
  return deg;
}

std::string PlanarPotential::canonical() const {
  std::string out = "planar[";
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out += ",";
    out += fmt17(terms_[i].coefficient) + "x" + std::to_string(terms_[i].px) + "y" +
           std::to_string(terms_[i].py);
  }
  return out + "]";
}

void validate_planar(const PlanarPotential& Q) {
  for (const auto& t : Q.terms())
    if (t.px + t.py == 1)
      raise(ErrorKind::Validation, "planar potential has a nonzero gradient at 0");
  if (!(Q.laplacian_at_origin() > 0.0))
    raise(ErrorKind::Validation, "planar potential needs a positive Laplacian at 0");
  int deg = Q.degree();
  if (deg % 2 != 0) raise(ErrorKind::Validation, "planar potential must have even degree");
  const double q0 = Q.value(0.0, 0.0);
  for (int i = 0; i < 128; ++i) {
    double th = 2.0 * std::numbers::pi * i / 128.0;
    double top = 0.0;
    for (const auto& t : Q.terms())
      if (t.px + t.py == deg)
        top += t.coefficient * std::pow(std::cos(th), t.px) * std::pow(std::sin(th), t.py);
    if (!(top > 0.0))
      raise(ErrorKind::Validation, "top-degree part of the planar potential is not positive");
    for (int k = 0; k <= 60; ++k) {
      double r = 1e-3 * std::pow(1e4, k / 60.0);
      if (!(Q.value_polar(r, th) > q0))
        raise(ErrorKind::Validation, "sampled minimum of the planar potential is not at 0 (r = " +
                                         fmt17(r) + ", theta = " + fmt17(th) + ")");
    }
  }
}

namespace {

struct Shell {
  int s = 0;
  std::vector<double> r_nodes, r_weights;
  std::vector<double> log_weight;  // l(r, theta) - l*, row-major r x theta
  double log_anchor = 0.0;         // l*
  int M = 0;
};

// l(r, theta) = (s + 1) ln r - n Q(r, theta); returns max over theta.
double envelope(const PlanarPotential& Q, double n, int s, double r, int M) {
  double best = kNegInf;
  for (int i = 0; i < M; ++i) {
    double th = 2.0 * std::numbers::pi * i / M;
    best = std::max(best, (s + 1) * std::log(r) - n * Q.value_polar(r, th));
  }
  return best;
}

void radial_range(const PlanarPotential& Q, double n, int s, double& lo, double& hi) {
  constexpr int kScan = 400;
  constexpr int kAngles = 64;
  double R = 1.0;
  std::vector<double> e(kScan + 1);
  for (int attempt = 0; attempt < 60; ++attempt) {
    double best = kNegInf;
    for (int i = 1; i <= kScan; ++i) {
      e[i] = envelope(Q, n, s, R * i / kScan, kAngles);
      best = std::max(best, e[i]);
    }
    if (e[kScan] < best - kTailCut - 4.0) {
      int first = kScan, last = 1;
      for (int i = 1; i <= kScan; ++i) {
        if (e[i] >= best - kTailCut) {
          first = std::min(first, i);
          last = std::max(last, i);
        }
      }
      lo = R * std::max(0, first - 1) / kScan;
      hi = R * std::min(kScan, last + 1) / kScan;
      // Refine the scan when the bump is narrow relative to the scan step.
      if (last - first < 40 && lo > 0.0) {
        double span = hi - lo;
        double step = span / kScan;
        double best2 = kNegInf;
        std::vector<double> e2(kScan + 1);
        for (int i = 0; i <= kScan; ++i) {
          e2[i] = envelope(Q, n, s, lo + i * step, kAngles);
          best2 = std::max(best2, e2[i]);
        }
        int f2 = kScan, l2 = 0;
        for (int i = 0; i <= kScan; ++i) {
          if (e2[i] >= best2 - kTailCut) {
            f2 = std::min(f2, i);
            l2 = std::max(l2, i);
          }
        }
        double nlo = lo + std::max(0, f2 - 1) * step;
        double nhi = lo + std::min(kScan, l2 + 1) * step;
        lo = nlo;
        hi = nhi;
      }
      return;
    }
    R *= 2.0;
  }
  raise(ErrorKind::Numeric, "planar moment radial range not found");
}

Shell build_shell(const PlanarPotential& Q, double n, int s, double lo, double hi, int panels,
                  int M) {
  Shell sh;
  sh.s = s;
  sh.M = M;
  const GaussRule& gl = gauss_legendre(16);
  double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    double a = lo + p * width;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      sh.r_nodes.push_back(a + 0.5 * width * (gl.nodes[i] + 1.0));
      sh.r_weights.push_back(0.5 * width * gl.weights[i]);
    }
  }
  const std::size_t nr = sh.r_nodes.size();
  sh.log_weight.resize(nr * M);
  double best = kNegInf;
  for (std::size_t i = 0; i < nr; ++i) {
    double r = sh.r_nodes[i];
    for (int t = 0; t < M; ++t) {
      double th = 2.0 * std::numbers::pi * t / M;
      double l = (s + 1) * std::log(r) - n * Q.value_polar(r, th);
      sh.log_weight[i * M + t] = l;
      best = std::max(best, l);
    }
  }
  sh.log_anchor = best;
  for (auto& l : sh.log_weight) l = std::exp(l - best);
  return sh;
}

// Moments of the shell for the given frequencies q = j - k. stride > 1 uses
// every stride-th angle (coarser trapezoid for the refinement check).
std::vector<std::complex<double>> shell_sums(const Shell& sh, const std::vector<int>& qs,
                                             int stride) {
  const std::size_t nr = sh.r_nodes.size();
  const int M = sh.M;
  std::vector<std::complex<double>> out(qs.size(), {0.0, 0.0});
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    int q = qs[qi];
    std::vector<std::complex<double>> phase;
    for (int t = 0; t < M; t += stride) {
      double th = 2.0 * std::numbers::pi * t / M;
      phase.emplace_back(std::cos(q * th), std::sin(q * th));
    }
    std::complex<double> total = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
      std::complex<double> ang = 0.0;
      const double* row = &sh.log_weight[i * M];
      int idx = 0;
      for (int t = 0; t < M; t += stride, ++idx) ang += phase[idx] * row[t];
      total += sh.r_weights[i] * ang;
    }
    // (1/pi) * (2 pi / points) angular weight
    out[qi] = total * (2.0 / (M / stride));
  }
  return out;
}

// Integral of the modulus of the shell weight, in anchor units; the scale
// against which oscillatory moments are judged.
double shell_mass(const Shell& sh) {
  const std::size_t nr = sh.r_nodes.size();
  double total = 0.0;
  for (std::size_t i = 0; i < nr; ++i) {
    double row = 0.0;
    for (int t = 0; t < sh.M; ++t) row += sh.log_weight[i * sh.M + t];
    total += sh.r_weights[i] * row;
  }
  return total * (2.0 / sh.M);
}

double max_change(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  return diff;
}

// Returns moments for the listed q values on shell s = j + k. Convergence is
// measured relative to the shell mass, so moments that vanish by symmetry do
// not drive refinement; entries below the quadrature noise floor are zero.
std::vector<LogComplex> shell_moments(const PlanarPotential& Q, int n, int s,
                                      const std::vector<int>& qs, const MomentOptions& opts) {
  double lo, hi;
  radial_range(Q, n, s, lo, hi);
  int M = std::max(16, opts.angular_points);
  int panels = 8;
  Shell sh = build_shell(Q, n, s, lo, hi, panels, M);
  std::vector<std::complex<double>> cur = shell_sums(sh, qs, 1);
  double mass = shell_mass(sh);
  for (int iter = 0; iter < 12; ++iter) {
    // Angular refinement: compare with the half-resolution trapezoid.
    std::vector<std::complex<double>> coarse = shell_sums(sh, qs, 2);
    if (max_change(cur, coarse) > 1e-12 * mass && M < 8192) {
      M *= 2;
      sh = build_shell(Q, n, s, lo, hi, panels, M);
      cur = shell_sums(sh, qs, 1);
      mass = shell_mass(sh);
      continue;
    }
    Shell fine = build_shell(Q, n, s, lo, hi, 2 * panels, M);
    std::vector<std::complex<double>> next = shell_sums(fine, qs, 1);
    // The two shells are anchored at their own node maxima.
    double shift = std::exp(fine.log_anchor - sh.log_anchor);
    std::vector<std::complex<double>> shifted = next;
    for (auto& x : shifted) x *= shift;
    bool done = max_change(cur, shifted) < 1e-12 * mass;
    panels *= 2;
    sh = std::move(fine);
    cur = std::move(next);
    mass = shell_mass(sh);
    if (done || panels >= 1024) break;
  }
  const double floor = 1e-14 * mass;
  std::vector<LogComplex> out;
  out.reserve(qs.size());
  for (const auto& v : cur) {
    LogComplex c = std::abs(v) <= floor ? LogComplex::zero() : LogComplex::from_value(v);
    out.push_back(c.is_zero() ? c : LogComplex::polar(c.log_modulus + sh.log_anchor, c.phase));
  }
  return out;
}

void check_degree(int j, int k, const MomentOptions& opts) {
  if (j < 0 || k < 0) raise(ErrorKind::Domain, "moment indices must be >= 0");
  if (j > opts.max_degree || k > opts.max_degree)
    raise(ErrorKind::Numeric, "moment degree exceeds the conditioning cap " +
                                  std::to_string(opts.max_degree));
}

}  // namespace

LogComplex planar_moment(const PlanarPotential& Q, int n, int j, int k, const MomentOptions& opts) {
  if (n < 1) raise(ErrorKind::Domain, "n must be >= 1");
  check_degree(j, k, opts);
  validate_planar(Q);
  return shell_moments(Q, n, j + k, {j - k}, opts).front();
}

const LogComplex& MomentTable::at(int j, int k) const {
  if (diagonal_only) {
    if (j != k) raise(ErrorKind::Domain, "moment table holds the diagonal only");
    return entries.at(static_cast<std::size_t>(j));
  }
  return entries.at(static_cast<std::size_t>(j) * (m + 1) + k);
}

const LogComplex& MomentTable::diag(int j) const { return at(j, j); }

MomentTable planar_moment_table(const PlanarPotential& Q, int n, int m, bool diagonal_only,
                                const MomentOptions& opts) {
  if (n < 1) raise(ErrorKind::Domain, "n must be >= 1");
  if (m < 0) raise(ErrorKind::Domain, "m must be >= 0");
  check_degree(m, m, opts);
  validate_planar(Q);
  MomentTable t;
  t.Q = Q;
  t.n = n;
  t.m = m;
  t.diagonal_only = diagonal_only;
  if (diagonal_only) {
    t.entries.resize(m + 1);
    for (int j = 0; j <= m; ++j) t.entries[j] = shell_moments(Q, n, 2 * j, {0}, opts).front();
    return t;
  }
  t.entries.resize(static_cast<std::size_t>(m + 1) * (m + 1));
  for (int s = 0; s <= 2 * m; ++s) {
    std::vector<int> qs;
    std::vector<std::pair<int, int>> idx;
    for (int j = std::max(0, s - m); j <= std::min(s, m); ++j) {
      qs.push_back(j - (s - j));
      idx.emplace_back(j, s - j);
    }
    std::vector<LogComplex> vals = shell_moments(Q, n, s, qs, opts);
    for (std::size_t i = 0; i < idx.size(); ++i)
      t.entries[static_cast<std::size_t>(idx[i].first) * (m + 1) + idx[i].second] = vals[i];
  }
  return t;
}

namespace {
std::mutex g_moment_mutex;
std::map<std::string, std::shared_ptr<const MomentTable>> g_moments;
}  // namespace

std::shared_ptr<const MomentTable> moment_table(const PlanarPotential& Q, int n, int m,
                                                bool diagonal_only, const MomentOptions& opts) {
  std::string key = Q.canonical() + "|" + std::to_string(n) + "|" + std::to_string(m) + "|" +
                    (diagonal_only ? "d" : "f") + "|" + std::to_string(opts.max_degree) + "|" +
                    std::to_string(opts.angular_points);
  {
    std::lock_guard<std::mutex> lock(g_moment_mutex);
    auto it = g_moments.find(key);
    if (it != g_moments.end()) return it->second;
  }
  auto table = std::make_shared<const MomentTable>(planar_moment_table(Q, n, m, diagonal_only, opts));
  std::lock_guard<std::mutex> lock(g_moment_mutex);
  return g_moments.emplace(key, table).first->second;
}

}  // namespace bergkern
