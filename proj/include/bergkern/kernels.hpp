#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "bergkern/lognum.hpp"
#include "bergkern/potentials.hpp"
#include "bergkern/quad.hpp"

namespace bergkern {

struct KernelJob {
  PotentialModel model;
  int n = 0;
  std::shared_ptr<const NormTable> table;                      // radial
  std::vector<std::shared_ptr<const NormTable>> factor_tables;  // tensor, d = 1 each
  // ln(j!) + ln h_j, per factor (one row for radial models).
  std::vector<std::vector<double>> coef;

  static KernelJob make(const PotentialModel& model, int n);
};

// sum_{j<n} (z.w)^j / (j! h_j) with weight exp(-n(V(|z|)+V(|w|))/2).
LogComplex radial_kernel(const KernelJob& job, const CVector& z, const CVector& w);
// sum over |j| < n of prod_k (z_k conj w_k)^{j_k} / (j_k! h_{k,j_k}), weighted.
LogComplex tensor_kernel(const KernelJob& job, const CVector& z, const CVector& w);
LogComplex kernel(const KernelJob& job, const CVector& z, const CVector& w);
// Direct enumeration of all multi-indices with |j| < n (tensor models, small n).
std::complex<double> tensor_kernel_bruteforce(const KernelJob& job, const CVector& z, const CVector& w);
// Radial kernel truncated at j <= m (m < n + d).
LogComplex partial_radial_kernel(const KernelJob& job, int m, const CVector& z, const CVector& w);

// sum_{j<=m} (J_00 / J_jj) |z|^{2j}.
LogReal extremal_partial_kernel(const PlanarPotential& Q, int n, int m, std::complex<double> z,
                                const MomentOptions& opts = {});
LogReal extremal_partial_kernel(const MomentTable& moments, std::complex<double> z);

struct GramFactor {
  int m = 0;
  int n = 0;
  PlanarPotential Q;
  std::vector<double> log_scale;  // ln sqrt(J_jj)
  Eigen::MatrixXcd L;             // Cholesky factor of the unit-diagonal moment matrix
  double min_pivot_ratio = 1.0;
};

// Pivots below 1e-13 (relative) stop the factorization with a degree-cap error.
GramFactor gram_factor(const MomentTable& moments);
// sum_{j<=m} P_j(z) conj(P_j(w)), times exp(-n(Q(z)+Q(w))/2) when weighted.
LogComplex gram_partial_kernel(const PlanarPotential& Q, int n, int m, std::complex<double> z,
                               std::complex<double> w, bool weighted = false,
                               const MomentOptions& opts = {});
LogComplex gram_partial_kernel(const GramFactor& g, std::complex<double> z, std::complex<double> w,
                               bool weighted = false);
// max |<P_a, P_b> - delta_ab| recomputed from the moment matrix.
double gram_residual(const GramFactor& g, const MomentTable& moments);

LogComplex limit_ginibre(const CVector& xi, const CVector& eta);
LogComplex limit_erfc(std::complex<double> xi, std::complex<double> eta);
LogComplex limit_mverfc(const CVector& xi, const CVector& eta);
// Weight-stripped kernel (1/2) exp(xi.eta) erfc((xi.v + v.eta)/sqrt 2).
LogComplex halfspace_fock_kernel(const CVector& xi, const CVector& eta, const CVector& v);

// Predicted |P_j(z)|^2 exp(-n Q(z)) near the tau-circle of a radial planar factor.
LogReal hw_predicted_density(const RadialProfile& profile, double tau, int n, int j,
                             std::complex<double> z);

struct PairingResult {
  std::complex<double> integral;  // int K(zeta,eta) conj K(zeta,xi) e^{-|zeta|^2} d omega
  std::complex<double> kernel;    // K(xi, eta)
  double rel_error = 0.0;
};

// Numerical Gaussian pairing of the weight-stripped kernel; checks the
// reproducing identity at (xi, eta).
PairingResult reproducing_pairing(const CVector& xi, const CVector& eta, const CVector& v,
                                  int nodes_re = 160, int nodes_im = 320);

}  // namespace bergkern
