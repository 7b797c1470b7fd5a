#include "bergkern/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>


namespace bergkern {

namespace {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// QUADPACK qk15 error heuristic.
Panel kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::fabs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    double f1 = f(c - dx), f2 = f(c + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
  double result = resk * h;
  resabs *= std::fabs(h);
  resasc *= std::fabs(h);
  double err = std::fabs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  return {a, b, result, err};
}

}  // namespace

QuadResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                         double rel_tol, double abs_tol, int max_panels, int initial_panels) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Panel> heap;
  double total = 0.0, total_err = 0.0;
  initial_panels = std::max(1, initial_panels);
  for (int i = 0; i < initial_panels; ++i) {
    double lo = a + (b - a) * i / initial_panels;
    double hi = i + 1 == initial_panels ? b : a + (b - a) * (i + 1) / initial_panels;
    Panel p = kronrod15(f, lo, hi);
    out.evaluations += 15;
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  int panels = initial_panels;
  while (total_err > std::max(abs_tol, rel_tol * std::fabs(total)) && panels < max_panels) {
    Panel worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    Panel left = kronrod15(f, worst.a, mid);
    Panel right = kronrod15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed the drift of incremental updates.
  total = 0.0;
  total_err = 0.0;
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : all) {
    total += p.value;
    total_err += p.error;
  }
  out.value = total;
  out.error = total_err;
  out.converged = total_err <= std::max(abs_tol, rel_tol * std::fabs(total));
  return out;
}

const GaussRule& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  rule.nodes.assign(order, 0.0);
  rule.weights.assign(order, 0.0);
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < (order + 1) / 2; ++k) {
    double x = std::cos(pi * (k + 0.75) / (order + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= order; ++m) {
        double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      double pn = order == 0 ? 1.0 : p1;
      double pm = order == 0 ? 0.0 : p0;
      if (order == 1) {
        pn = x;
        pm = 1.0;
      }
      dp = order * (x * pn - pm) / (x * x - 1.0);
      double dx = pn / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[k] = -x;
    rule.nodes[order - 1 - k] = x;
    rule.weights[k] = w;
    rule.weights[order - 1 - k] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace bergkern
