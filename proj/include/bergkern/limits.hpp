#pragma once

#include <string>
#include <vector>

#include "bergkern/geometry.hpp"
#include "bergkern/kernels.hpp"

namespace bergkern {

enum class ScalingMode { ErfcNormal, MverfcUnitary, BulkGinibre };
// ScalarDet: z0 + U xi / sqrt(n det). Matrix: z0 + M U xi / sqrt(n), M = H^{-1/2}.
enum class Normalization { ScalarDet, Matrix };

std::string mode_name(ScalingMode mode);
ScalingMode parse_mode(const std::string& name);
std::string normalization_name(Normalization norm);
Normalization parse_normalization(const std::string& name);

// Frame at an interior point for bulk scaling: Hessian, M = H^{-1/2}, U = I.
EdgeFrame bulk_frame(const PotentialModel& model, const CVector& z);

struct GridPoint {
  CVector xi;
  CVector eta;
  bool diagonal() const;
};

struct GridSpec {
  double re_min = -1.5;
  double re_max = 1.5;
  double step = 0.5;
  double cap = 1.5;            // |xi|, |eta| bound
  bool diagonal_only = false;
  std::size_t max_pairs = 400;  // deterministic stride subsampling above this
};

// Tensor grid over Re/Im per complex coordinate; scalar modes use dim = 1.
std::vector<GridPoint> make_grid(const GridSpec& spec, int dim);

struct ScalingOptions {
  Normalization norm = Normalization::ScalarDet;
  double relative_floor = 0.05;  // diagonal metric is relative when the limit reaches this
};

// Point z(xi) of the scaling map.
CVector scaled_point(const EdgeFrame& frame, ScalingMode mode, int n, const CVector& xi,
                     const ScalingOptions& opts = {});
// kernel(z(xi), z(eta)) / (n^d det).
LogComplex rescaled_kernel(const KernelJob& job, const EdgeFrame& frame, ScalingMode mode,
                           const CVector& xi, const CVector& eta, const ScalingOptions& opts = {});
LogComplex limit_kernel(ScalingMode mode, const CVector& xi, const CVector& eta);

struct ComparisonRow {
  int n = 0;
  CVector xi;
  CVector eta;
  bool diagonal = false;
  double finite_value = 0.0;  // real value on the diagonal, modulus off it
  double limit_value = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double error = 0.0;  // the metric entering the sup
};

struct Comparison {
  int n = 0;
  double sup_error = 0.0;
  std::vector<ComparisonRow> rows;
};

Comparison compare_to_limit(const KernelJob& job, const EdgeFrame& frame, ScalingMode mode,
                            const std::vector<GridPoint>& grid, const ScalingOptions& opts = {});

struct ScalingReport {
  std::string model_id;
  std::string frame_summary;
  ScalingMode mode = ScalingMode::ErfcNormal;
  Normalization norm = Normalization::ScalarDet;
  std::vector<int> n_list;
  std::vector<GridPoint> grid;
  std::vector<double> sup_error;
  double fitted_rate = 0.0;
  std::vector<ComparisonRow> rows;
};

// Least-squares slope of log y against log x.
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

ScalingReport convergence_study(const PotentialModel& model, const EdgeFrame& frame, ScalingMode mode,
                                const std::vector<GridPoint>& grid, const std::vector<int>& n_list,
                                const ScalingOptions& opts = {});

struct DecayResult {
  Eigen::VectorXd direction;  // unit vector in R^{2d}, (Re z_1, Im z_1, ...)
  Eigen::VectorXd maximizer;
  double min_value = 0.0;
  double max_value = 0.0;
  double angle_to_normal = 0.0;  // radians
  double max_angle_to_inward = 0.0;
};

Eigen::VectorXd to_real(const CVector& z);
CVector to_complex(const Eigen::VectorXd& x);
double real_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Sampled directions on S^{2d-1} (fixed seed) followed by a local pattern
// search around the best and worst samples.
DecayResult steepest_decay_direction(const KernelJob& job, const EdgeFrame& frame, double radius,
                                     int samples, unsigned long long seed = 20240611ULL);

// Diagonal check against (1/2) erfc(sqrt2 Re sum xi_k / sqrt d) at a frame with
// vanishing tau entries, rescaled with M U xi / sqrt n.
Comparison bulk_degenerate_check(const KernelJob& job, const EdgeFrame& frame,
                                 const std::vector<GridPoint>& grid);

}  // namespace bergkern
