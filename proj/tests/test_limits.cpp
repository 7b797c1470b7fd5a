#include <doctest.h>

#include <cmath>
#include <set>

#include "bergkern/errors.hpp"
#include "bergkern/limits.hpp"

using namespace bergkern;

namespace {
RadialProfile gauss() { return RadialProfile::polynomial({{2, 1.0}}); }
CVector e1(int d) {
  CVector z = CVector::Zero(d);
  z(0) = 1.0;
  return z;
}
}  // namespace

TEST_CASE("mode and normalization names round-trip") {
  for (auto m : {ScalingMode::ErfcNormal, ScalingMode::MverfcUnitary, ScalingMode::BulkGinibre})
    CHECK(parse_mode(mode_name(m)) == m);
  for (auto m : {Normalization::ScalarDet, Normalization::Matrix}) CHECK(parse_normalization(normalization_name(m)) == m);
  CHECK_THROWS_AS(parse_mode("nope"), Error);
}

TEST_CASE("grids") {
  GridSpec s;
  s.re_min = -2;
  s.re_max = 2;
  s.step = 0.5;
  s.cap = 2;
  s.max_pairs = 0;
  auto g = make_grid(s, 1);
  // 49 lattice points with |z| <= 2, all ordered pairs.
  CHECK(g.size() == 49u * 49u);
  s.diagonal_only = true;
  auto diag = make_grid(s, 1);
  CHECK(diag.size() == 49u);
  for (const auto& p : diag) CHECK(p.diagonal());
  s.diagonal_only = false;
  s.max_pairs = 100;
  auto sub = make_grid(s, 1);
  CHECK(sub.size() <= 100u);
  CHECK(sub.size() >= 90u);
  for (const auto& p : make_grid(GridSpec{}, 2)) {
    CHECK(p.xi.norm() <= 1.5 + 1e-12);
    CHECK(p.eta.norm() <= 1.5 + 1e-12);
  }
}

TEST_CASE("rescaled kernels at the origin of the scaling") {
  PotentialModel g1 = PotentialModel::radial(gauss(), 1);
  KernelJob job = KernelJob::make(g1, 1024);
  EdgeFrame f = edge_frame_radial(g1, e1(1));
  LogComplex k = rescaled_kernel(job, f, ScalingMode::ErfcNormal, CVector::Zero(1), CVector::Zero(1));
  CHECK(std::fabs(k.modulus() - 0.5) <= 0.02 * 0.5);
  PotentialModel g2 = PotentialModel::radial(gauss(), 2);
  KernelJob job2 = KernelJob::make(g2, 64);
  EdgeFrame b = bulk_frame(g2, CVector::Zero(2));
  LogComplex c = rescaled_kernel(job2, b, ScalingMode::BulkGinibre, CVector::Zero(2), CVector::Zero(2));
  CHECK(std::abs(c.value() - 1.0) < 1e-12);
  CVector xi(1), eta(1);
  xi(0) = {0.3, -0.4};
  eta(0) = {-0.5, 0.2};
  std::complex<double> a = rescaled_kernel(job, f, ScalingMode::ErfcNormal, xi, eta).value();
  std::complex<double> bb = std::conj(rescaled_kernel(job, f, ScalingMode::ErfcNormal, eta, xi).value());
  CHECK(std::abs(a - bb) < 1e-12 * std::abs(a));
}

TEST_CASE("comparison metric and convergence") {
  PotentialModel g1 = PotentialModel::radial(gauss(), 1);
  EdgeFrame f = edge_frame_radial(g1, e1(1));
  std::vector<GridPoint> zero = {GridPoint{CVector::Zero(1), CVector::Zero(1)}};
  Comparison c = compare_to_limit(KernelJob::make(g1, 1024), f, ScalingMode::ErfcNormal, zero);
  REQUIRE(c.rows.size() == 1u);
  CHECK(c.sup_error == doctest::Approx(c.rows[0].error));
  CHECK(c.sup_error >= 0.0);
  CHECK(std::fabs(c.rows[0].limit_value - 0.5) < 1e-15);
  // d = 2 multivariate erfc convergence on the diagonal.
  PotentialModel g2 = PotentialModel::radial(gauss(), 2);
  GridSpec s;
  s.diagonal_only = true;
  auto grid = make_grid(s, 2);
  ScalingReport r =
      convergence_study(g2, edge_frame_radial(g2, e1(2)), ScalingMode::MverfcUnitary, grid, {64, 128, 256, 512, 1024});
  for (double e : r.sup_error) CHECK(e > 0.0);
  CHECK(r.fitted_rate >= -0.75);
  CHECK(r.fitted_rate <= -0.25);
  CHECK(fit_log_slope({1, 2, 4, 8}, {3, 1.5, 0.75, 0.375}) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("steepest decay direction") {
  PotentialModel g2 = PotentialModel::radial(gauss(), 2);
  KernelJob job = KernelJob::make(g2, 256);
  CVector dir(2);
  dir << std::complex<double>(0.6, 0.0), std::complex<double>(0.0, 0.8);
  EdgeFrame f = edge_frame_radial(g2, dir);
  DecayResult r = steepest_decay_direction(job, f, 3.0 / 16.0, 128);
  CHECK(r.angle_to_normal <= 0.2);
  CHECK(r.max_angle_to_inward <= 0.3);
  CHECK(std::fabs(r.direction.norm() - 1.0) < 1e-12);
  DecayResult again = steepest_decay_direction(job, f, 3.0 / 16.0, 128);
  CHECK((again.direction - r.direction).norm() == 0.0);
  CHECK(real_angle(to_real(f.normal), to_real(f.normal)) == doctest::Approx(0.0));
  CHECK((to_complex(to_real(dir)) - dir).norm() == 0.0);
}

TEST_CASE("bulk degenerate check") {
  PotentialModel t = PotentialModel::tensor({gauss(), gauss()});
  KernelJob job = KernelJob::make(t, 512);
  EdgeFrame f = edge_frame_tensor(t, SimplexWeights::make({1.0, 0.0}), {0.0, 0.0});
  std::vector<GridPoint> zero = {GridPoint{CVector::Zero(2), CVector::Zero(2)}};
  Comparison c = bulk_degenerate_check(job, f, zero);
  CHECK(std::fabs(c.rows[0].finite_value - 0.5) < 0.05);
  EdgeFrame full = edge_frame_tensor(t, SimplexWeights::make({0.5, 0.5}), {0.0, 0.0});
  CVector x(2);
  x << std::complex<double>(0.0, 0.0), std::complex<double>(0.0, 0.0);
  GridSpec s;
  s.diagonal_only = true;
  auto grid = make_grid(s, 2);
  ScalingOptions m;
  m.norm = Normalization::Matrix;
  CHECK(bulk_degenerate_check(job, full, grid).sup_error ==
        doctest::Approx(compare_to_limit(job, full, ScalingMode::MverfcUnitary, grid, m).sup_error));
  std::vector<GridPoint> off = {GridPoint{CVector::Zero(2), CVector::Ones(2)}};
  CHECK_THROWS_AS(bulk_degenerate_check(job, f, off), Error);
}
