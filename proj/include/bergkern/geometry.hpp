#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "bergkern/potentials.hpp"

namespace bergkern {

struct SimplexWeights {
  std::vector<double> tau;

  static SimplexWeights make(std::vector<double> tau);
  int size() const { return static_cast<int>(tau.size()); }
  int active() const;  // number of tau_k > 0
};

struct EdgeFrame {
  CVector z0;
  std::optional<SimplexWeights> tau;
  CVector normal;          // outward unit normal; zero in bulk-degenerate coordinates
  CVector planar_normals;  // per-coordinate unit phases e^{i theta_k} (1 where tau_k = 0)
  CMatrix hessian;
  CMatrix hessian_inv_sqrt;
  double ma_det = 0.0;
  CMatrix U;
  int active = 0;  // l: coordinates with tau_k > 0 (d for radial frames)

  std::string summary() const;
};

double planar_obstacle(const RadialProfile& profile, double tau, std::complex<double> z);

struct ObstacleResult {
  double value = 0.0;
  SimplexWeights argmax;
  bool inside = false;
  double level = 0.0;  // common water-filling derivative
};

ObstacleResult pluri_obstacle(const PotentialModel& model, const CVector& z);
// sum_k Qcheck_{k, tau_k}(z_k) for a given simplex point.
double simplex_objective(const PotentialModel& model, const SimplexWeights& tau, const CVector& z);

struct Containment {
  bool inside = false;
  double margin = 0.0;
};

Containment droplet_contains(const PotentialModel& model, const CVector& z);

// Real orthogonal Householder reflection exchanging 1_S/sqrt(|S|) and
// (1,...,1)/sqrt(d), where S is the set of flagged coordinates.
Eigen::MatrixXd canonical_rotation(const std::vector<bool>& flagged);

EdgeFrame edge_frame_tensor(const PotentialModel& model, const SimplexWeights& tau,
                            const std::vector<double>& angles);
EdgeFrame edge_frame_radial(const PotentialModel& model, const CVector& direction);

}  // namespace bergkern
