#pragma once

#include <optional>
#include <string>

#include "bergkern/potentials.hpp"

namespace bergkern {

struct CountingSetup {
  PotentialModel model;  // radial
  int n = 0;
  std::optional<double> a;
  std::optional<double> delta;

  static CountingSetup at_radius(const PotentialModel& model, int n, double a);
  static CountingSetup at_delta(const PotentialModel& model, int n, double delta);
  int dim() const { return model.dim(); }
  // a, or a_n(delta) = 1 + delta / sqrt(2 n Laplacian(1)).
  double radius() const;
};

double edge_radius(const PotentialModel& model, int n, double delta);

enum class VarianceMethod { BernoulliExact, Integral, MonteCarlo };
std::string method_name(VarianceMethod m);

struct VarianceDiagnostics {
  long trials = 0;
  double mean_std_error = 0.0;
  double variance_std_error = 0.0;
  bool insufficient_data = false;
  double window = 0.0;     // annular half-width of the integral route
  long evaluations = 0;    // integrand or quadrature evaluations
};

struct VarianceResult {
  double mean = 0.0;
  double variance = 0.0;
  VarianceMethod method = VarianceMethod::BernoulliExact;
  VarianceDiagnostics diagnostics;
};

// Total number of basis monomials binom(n+d-1, d).
double basis_size(int n, int d);
// ln binom(j+d-1, d-1).
double log_multiplicity(int j, int d);

// p_j = mass of the degree-j radial density inside the ball of radius a.
double ball_probability(const CountingSetup& setup, int j);
// 1 - p_j computed from the outer integral.
double outer_probability(const CountingSetup& setup, int j);

VarianceResult variance_bernoulli(const CountingSetup& setup);

struct IntegralOptions {
  double window_constant = 10.0;  // half-width = c log n / sqrt n
  int panels = 14;                // graded panels per side
  int order = 16;                 // Gauss-Legendre nodes per panel
};

// Double radial integral of the squared kernel across the sphere |z| = a.
VarianceResult variance_integral(const CountingSetup& setup, const IntegralOptions& opts = {});

double edge_variance_limit(const PotentialModel& model, double delta);

// Sums of independent binomial counts; per-chunk generators seeded from
// (seed, chunk) and merged in chunk order.
VarianceResult mc_count(const CountingSetup& setup, long trials, unsigned long long seed);

}  // namespace bergkern
