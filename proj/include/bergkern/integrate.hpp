#pragma once

#include <functional>
#include <vector>

namespace bergkern {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod (7,15) on [a, b]. The interval is pre-split into
// `initial_panels` equal pieces; the worst panel is bisected until the
// summed error estimate is below max(abs_tol, rel_tol * |integral|).
QuadResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-12, double abs_tol = 0.0, int max_panels = 4000,
                         int initial_panels = 1);

// Fixed Gauss-Legendre rule on [-1, 1] (Golub-Welsch, cached per order).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

}  // namespace bergkern
