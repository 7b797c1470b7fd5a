#include "bergkern/commands.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>

#include "bergkern/errors.hpp"
#include "bergkern/kernels.hpp"
#include "bergkern/limits.hpp"
#include "bergkern/parallel.hpp"
#include "bergkern/quad.hpp"
#include "bergkern/specfun.hpp"
#include "bergkern/stats.hpp"

namespace bergkern {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Json default_model_json(int d) {
  return Json{{"variant", "radial"}, {"d", d}, {"profile", {{"kind", "polynomial"}, {"terms", {{{"exponent", 2}, {"coefficient", 1.0}}}}}}};
}

PotentialModel model_param(Params& p, int default_d = 1) {
  if (!p.has("model")) p.set("model", default_model_json(default_d));
  return parse_model(p.at("model"));
}

PlanarPotential planar_param(Params& p, const Json& def) {
  if (!p.has("planar")) p.set("planar", def);
  PlanarPotential Q = parse_planar(p.at("planar"));
  validate_planar(Q);
  return Q;
}

int positive_int(Params& p, const std::string& key, long def) {
  long v = p.integer(key, def);
  if (v < 1 || v > 100000000L) raise(ErrorKind::Validation, "'" + key + "' must be a positive integer");
  return static_cast<int>(v);
}

CVector unit_vector(int d, int k) {
  CVector e = CVector::Zero(d);
  e(k) = 1.0;
  return e;
}

// Edge frame from "direction" (radial) or "tau" + "angles" (tensor).
EdgeFrame frame_param(Params& p, const PotentialModel& model) {
  const int d = model.dim();
  if (model.variant() == PotentialModel::Variant::Radial) {
    if (!p.has("direction")) p.set("direction", cvector_json(unit_vector(d, 0)));
    return edge_frame_radial(model, parse_cvector(p.at("direction")));
  }
  std::vector<double> tau = p.numbers("tau", std::vector<double>(d, 1.0 / d));
  std::vector<double> angles = p.numbers("angles", std::vector<double>(d, 0.0));
  return edge_frame_tensor(model, SimplexWeights::make(tau), angles);
}

GridSpec grid_param(Params& p) {
  if (!p.has("grid")) p.set("grid", Json::object());
  Json g = p.at("grid");
  Params gp(g);
  GridSpec s;
  s.re_min = gp.number("re_min", s.re_min);
  s.re_max = gp.number("re_max", s.re_max);
  s.step = gp.number("step", s.step);
  s.cap = gp.number("cap", s.cap);
  s.diagonal_only = gp.flag("diagonal_only", s.diagonal_only);
  s.max_pairs = static_cast<std::size_t>(gp.integer("max_pairs", static_cast<long>(s.max_pairs)));
  p.set("grid", gp.resolved());
  return s;
}

std::vector<int> n_list_param(Params& p, int def_n) {
  if (p.has("n_list")) {
    std::vector<int> ns = p.integers("n_list", {});
    if (ns.empty()) raise(ErrorKind::Validation, "'n_list' must not be empty");
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (ns[i] < 1) raise(ErrorKind::Validation, "'n_list' entries must be positive");
      if (i && ns[i] <= ns[i - 1]) raise(ErrorKind::Validation, "'n_list' must be strictly increasing");
    }
    return ns;
  }
  return {positive_int(p, "n", def_n)};
}

std::vector<std::string> comparison_columns() {
  return {"n", "xi", "eta", "diagonal", "finite_value", "limit_value", "abs_err", "rel_err", "error"};
}

void add_comparison_rows(Report& r, const std::vector<ComparisonRow>& rows) {
  for (const auto& c : rows)
    r.add_row({static_cast<long long>(c.n), cvector_text(c.xi), cvector_text(c.eta), c.diagonal, c.finite_value,
               c.limit_value, c.abs_err, c.rel_err, c.error});
}

std::complex<double> random_disc_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = radius * std::sqrt(u(rng));
  return std::polar(r, 2.0 * std::numbers::pi * u(rng));
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"kernel",        "droplet", "obstacle", "edge-limit",
                                                 "bulk-limit",    "partial-kernel", "moments", "variance",
                                                 "identity-check"};
  return names;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Window:
    case ErrorKind::Numeric: return 3;
    default: return 2;
  }
}

Report cmd_kernel(Params& p) {
  PotentialModel model = model_param(p);
  const int n = positive_int(p, "n", 64);
  const int d = model.dim();
  const bool brute = p.flag("brute_force", false);
  if (brute && model.variant() != PotentialModel::Variant::Tensor)
    raise(ErrorKind::Validation, "brute_force applies to tensor models");
  std::vector<std::pair<CVector, CVector>> pairs;
  if (p.has("pairs")) {
    for (const auto& e : p.at("pairs")) {
      if (!e.contains("z") || !e.contains("w")) raise(ErrorKind::Validation, "each pair needs 'z' and 'w'");
      pairs.emplace_back(parse_cvector(e["z"]), parse_cvector(e["w"]));
    }
  } else {
    const int count = positive_int(p, "count", 10);
    const double radius = p.number("radius", 1.2);
    std::mt19937_64 rng(static_cast<std::uint64_t>(p.integer("seed", 1)));
    for (int i = 0; i < count; ++i) {
      CVector z(d), w(d);
      for (int k = 0; k < d; ++k) {
        z(k) = random_disc_point(rng, radius / std::sqrt(double(d)));
        w(k) = random_disc_point(rng, radius / std::sqrt(double(d)));
      }
      pairs.emplace_back(z, w);
    }
  }
  KernelJob job = KernelJob::make(model, n);
  Report r;
  r.columns = {"index", "z", "w", "re", "im", "log_modulus", "phase", "brute_re", "brute_im", "rel_diff"};
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [z, w] = pairs[i];
    LogComplex k = kernel(job, z, w);
    std::complex<double> v = k.value();
    std::complex<double> b(kNaN, kNaN);
    double rel = kNaN;
    if (brute) {
      b = tensor_kernel_bruteforce(job, z, w);
      rel = std::abs(v - b) / std::abs(b);
      worst = std::max(worst, rel);
    }
    r.add_row({static_cast<long long>(i), cvector_text(z), cvector_text(w), v.real(), v.imag(), k.log_modulus,
               k.phase, b.real(), b.imag(), rel});
  }
  r.summary["model"] = model.canonical();
  r.summary["pairs"] = pairs.size();
  if (brute) {
    r.summary["max_rel_diff"] = worst;
    r.summary["pass"] = worst <= 1e-10;
  }
  return r;
}

Report cmd_droplet(Params& p) {
  PotentialModel model = model_param(p);
  EdgeFrame f = frame_param(p, model);
  const int d = model.dim();
  Report r;
  r.columns = {"k", "z0_re", "z0_im", "normal_re", "normal_im", "hessian_diag", "inv_sqrt_diag", "U_re", "U_im"};
  for (int k = 0; k < d; ++k)
    r.add_row({static_cast<long long>(k), f.z0(k).real(), f.z0(k).imag(), f.normal(k).real(), f.normal(k).imag(),
               f.hessian(k, k).real(), f.hessian_inv_sqrt(k, k).real(), f.U(k, 0).real(), f.U(k, 0).imag()});
  r.summary["model"] = model.canonical();
  r.summary["frame"] = f.summary();
  r.summary["ma_det"] = f.ma_det;
  r.summary["active"] = f.active;
  r.summary["margin"] = droplet_margin(model, f.z0);
  ValidationReport v = validate(model);
  Json items = Json::array();
  for (const auto& it : v.items)
    items.push_back({{"name", it.name}, {"passed", it.passed}, {"offending_radius", it.offending_radius}, {"detail", it.detail}});
  r.summary["validation"] = {{"ok", v.ok()}, {"items", items}};
  if (p.has("points")) {
    Json pts = Json::array();
    for (const auto& e : p.at("points")) {
      CVector z = parse_cvector(e);
      Containment c = droplet_contains(model, z);
      pts.push_back({{"point", cvector_json(z)}, {"inside", c.inside}, {"margin", c.margin}});
    }
    r.summary["points"] = pts;
  }
  return r;
}

Report cmd_obstacle(Params& p) {
  Report r;
  if (p.has("points")) {
    PotentialModel model = model_param(p);
    r.columns = {"index", "z", "value", "inside", "level", "Q"};
    long i = 0;
    for (const auto& e : p.at("points")) {
      CVector z = parse_cvector(e);
      ObstacleResult o = pluri_obstacle(model, z);
      r.add_row({static_cast<long long>(i++), cvector_text(z), o.value, o.inside, o.level, model.Q(z)});
    }
    r.summary["model"] = model.canonical();
    return r;
  }
  // Anisotropic Gaussian example: obstacle = 1 + log sum a_k |z_k|^2 outside the droplet.
  std::vector<double> a = p.numbers("coefficients", {1.0, 1.0});
  const int count = positive_int(p, "count", 200);
  const double s_min = p.number("s_min", 4.0), s_max = p.number("s_max", 25.0);
  const double tol = p.number("tolerance", 1e-8);
  if (!(s_min > 1.0) || s_max < s_min) raise(ErrorKind::Validation, "need 1 < s_min <= s_max");
  std::vector<RadialProfile> factors;
  for (double ak : a) {
    if (!(ak > 0.0)) raise(ErrorKind::Validation, "coefficients must be positive");
    factors.push_back(RadialProfile::polynomial({{2, ak}}));
  }
  PotentialModel model = PotentialModel::tensor(factors);
  const int d = model.dim();
  std::mt19937_64 rng(static_cast<std::uint64_t>(p.integer("seed", 1)));
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(s_min, s_max);
  r.columns = {"index", "z", "s", "obstacle", "expected", "deviation"};
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    CVector z(d);
    for (int k = 0; k < d; ++k) z(k) = {g(rng), g(rng)};
    double s0 = 0.0;
    for (int k = 0; k < d; ++k) s0 += a[k] * std::norm(z(k));
    double s = u(rng);
    z *= std::sqrt(s / s0);
    double val = pluri_obstacle(model, z).value;
    double expected = 1.0 + std::log(s);
    double dev = std::fabs(val - expected);
    worst = std::max(worst, dev);
    r.add_row({static_cast<long long>(i), cvector_text(z), s, val, expected, dev});
  }
  r.summary["max_deviation"] = worst;
  r.summary["tolerance"] = tol;
  r.summary["pass"] = worst <= tol;
  return r;
}

Report cmd_edge_limit(Params& p) {
  PotentialModel model = model_param(p);
  const int d = model.dim();
  EdgeFrame frame = frame_param(p, model);
  std::string action = p.text("action", "compare");
  Report r;
  r.summary["model"] = model.canonical();
  r.summary["frame"] = frame.summary();
  if (action == "steepest-decay") {
    const int n = positive_int(p, "n", 256);
    const double radius = p.number("radius", 3.0 / std::sqrt(double(n)));
    const int samples = positive_int(p, "samples", 128);
    const auto seed = static_cast<unsigned long long>(p.integer("seed", 20240611));
    KernelJob job = KernelJob::make(model, n);
    DecayResult dr = steepest_decay_direction(job, frame, radius, samples, seed);
    Eigen::VectorXd nrm = to_real(frame.normal);
    r.columns = {"component", "minimizer", "maximizer", "normal"};
    for (Eigen::Index i = 0; i < dr.direction.size(); ++i)
      r.add_row({static_cast<long long>(i), dr.direction(i), dr.maximizer(i), nrm(i)});
    r.summary["angle_to_normal"] = dr.angle_to_normal;
    r.summary["max_angle_to_inward"] = dr.max_angle_to_inward;
    r.summary["min_log_density"] = dr.min_value;
    r.summary["max_log_density"] = dr.max_value;
    r.summary["pass"] = dr.angle_to_normal <= 0.2;
    return r;
  }
  GridSpec gs = grid_param(p);
  if (action == "bulk-degenerate") {
    const int n = positive_int(p, "n", 512);
    gs.diagonal_only = true;
    auto grid = make_grid(gs, d);
    KernelJob job = KernelJob::make(model, n);
    Comparison c = bulk_degenerate_check(job, frame, grid);
    r.columns = comparison_columns();
    add_comparison_rows(r, c.rows);
    r.summary["sup_error"] = c.sup_error;
    return r;
  }
  if (action != "compare") raise(ErrorKind::Validation, "unknown edge-limit action '" + action + "'");
  ScalingMode mode = parse_mode(p.text("mode", d == 1 ? "erfc_normal" : "mverfc_unitary"));
  ScalingOptions opts;
  opts.norm = parse_normalization(p.text("normalization", "scalar_det"));
  opts.relative_floor = p.number("relative_floor", opts.relative_floor);
  auto grid = make_grid(gs, mode == ScalingMode::ErfcNormal ? 1 : d);
  std::vector<int> ns = n_list_param(p, 1024);
  r.columns = comparison_columns();
  r.summary["mode"] = mode_name(mode);
  r.summary["normalization"] = normalization_name(opts.norm);
  r.summary["grid_pairs"] = grid.size();
  if (ns.size() == 1) {
    KernelJob job = KernelJob::make(model, ns[0]);
    Comparison c = compare_to_limit(job, frame, mode, grid, opts);
    add_comparison_rows(r, c.rows);
    r.summary["n_list"] = ns;
    r.summary["sup_error"] = std::vector<double>{c.sup_error};
    return r;
  }
  ScalingReport rep = convergence_study(model, frame, mode, grid, ns, opts);
  add_comparison_rows(r, rep.rows);
  r.summary["n_list"] = rep.n_list;
  r.summary["sup_error"] = rep.sup_error;
  r.summary["fitted_rate"] = rep.fitted_rate;
  r.summary["monotone"] = rep.sup_error.back() < rep.sup_error.front();
  return r;
}

Report cmd_bulk_limit(Params& p) {
  PotentialModel model = model_param(p, 2);
  const int d = model.dim();
  if (!p.has("point")) {
    CVector z = CVector::Zero(d);
    z(0) = 0.5;
    p.set("point", cvector_json(z));
  }
  EdgeFrame frame = bulk_frame(model, parse_cvector(p.at("point")));
  GridSpec gs = grid_param(p);
  auto grid = make_grid(gs, d);
  const int n = positive_int(p, "n", 512);
  KernelJob job = KernelJob::make(model, n);
  Comparison c = compare_to_limit(job, frame, ScalingMode::BulkGinibre, grid);
  Report r;
  r.columns = comparison_columns();
  add_comparison_rows(r, c.rows);
  r.summary["model"] = model.canonical();
  r.summary["point"] = cvector_json(frame.z0);
  r.summary["sup_error"] = c.sup_error;
  return r;
}

Report cmd_partial_kernel(Params& p) {
  std::string kind = p.text("kind", "radial");
  Report r;
  if (kind == "radial" || kind == "extremal") {
    const int n = positive_int(p, "n", 10000);
    const int m = positive_int(p, "m", static_cast<long>(std::ceil(std::sqrt(double(n)) * std::log(double(n)))));
    const double c = p.number("safety", 0.9);
    const double bound_const = p.number("bound_constant", kind == "radial" ? 2.0 : 5.0);
    const int points = positive_int(p, "points", 64);
    const double sm = std::sqrt(double(m));
    std::function<double(double)> normalized;
    std::shared_ptr<KernelJob> job;
    std::shared_ptr<const MomentTable> moments;
    PlanarPotential Q = PlanarPotential::gaussian();
    if (kind == "radial") {
      PotentialModel model = model_param(p);
      if (m >= n + model.dim()) raise(ErrorKind::Validation, "partial kernel needs m < n + d");
      job = std::make_shared<KernelJob>(KernelJob::make(model, n));
      const int d = model.dim();
      const double a0 = model.profile().half_dV_over_r(0.0);
      if (!(a0 > 0.0) || !std::isfinite(a0)) raise(ErrorKind::Numeric, "Hessian at the origin is not positive");
      normalized = [job, m, d, a0, n](double t) {
        CVector z = CVector::Zero(d);
        z(0) = t / std::sqrt(n * a0);
        LogComplex k = partial_radial_kernel(*job, m, z, z);
        return std::exp(k.log_modulus - d * std::log(n * a0));
      };
      r.summary["model"] = model.canonical();
    } else {
      Q = planar_param(p, Json{{"kind", "quartic"}, {"eps", 0.1}});
      MomentOptions mo;
      mo.max_degree = positive_int(p, "max_degree", mo.max_degree);
      moments = moment_table(Q, n, m, true, mo);
      const double lap = Q.laplacian_at_origin();
      normalized = [moments, Q, lap, n](double t) {
        std::complex<double> z(t / std::sqrt(n * lap), 0.0);
        LogReal e = extremal_partial_kernel(*moments, z);
        return std::exp(e.log_value - n * Q.value(z.real(), z.imag()));
      };
      r.summary["planar"] = Q.canonical();
    }
    r.columns = {"radius_over_sqrt_m", "value", "deviation", "asserted"};
    double worst = 0.0;
    for (int i = 0; i <= points; ++i) {
      double t = c * i / points;
      double v = normalized(t * sm);
      double dev = std::fabs(v - 1.0);
      worst = std::max(worst, dev);
      r.add_row({t, v, dev, true});
    }
    // Reported without assertion: the band between sqrt(m) and sqrt(e m).
    const int extra = std::max(8, points / 4);
    for (int i = 1; i <= extra; ++i) {
      double t = 1.0 + (std::sqrt(std::numbers::e) - 1.0) * i / extra;
      double v = normalized(t * sm);
      r.add_row({t, v, std::fabs(v - 1.0), false});
    }
    double bound = bound_const * m / n;
    r.summary["n"] = n;
    r.summary["m"] = m;
    r.summary["sup_deviation"] = worst;
    r.summary["bound"] = bound;
    r.summary["pass"] = worst <= bound;
    return r;
  }
  if (kind != "gram") raise(ErrorKind::Validation, "partial-kernel kind is radial, extremal or gram");
  PlanarPotential Q = planar_param(p, Json{{"kind", "elliptic"}, {"t", 0.2}});
  const int n = positive_int(p, "n", 200);
  const int m = positive_int(p, "m", 10);
  const int count = positive_int(p, "count", 50);
  const double rmax = p.number("rmax", 0.2);
  const double bound = p.number("bound_constant", 1.5) * m / n;
  MomentOptions mo;
  mo.max_degree = positive_int(p, "max_degree", mo.max_degree);
  auto full = moment_table(Q, n, m, false, mo);
  GramFactor g = gram_factor(*full);
  const double lap = Q.laplacian_at_origin();
  std::mt19937_64 rng(static_cast<std::uint64_t>(p.integer("seed", 1)));
  r.columns = {"index", "z", "gram", "extremal", "rel_deviation"};
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    std::complex<double> z = random_disc_point(rng, rmax);
    double gv = std::exp(gram_partial_kernel(g, z, z).log_modulus) / (n * lap);
    double ev = extremal_partial_kernel(*full, z).value();
    double dev = std::fabs(gv - ev) / ev;
    worst = std::max(worst, dev);
    CVector zz(1);
    zz(0) = z;
    r.add_row({static_cast<long long>(i), cvector_text(zz), gv, ev, dev});
  }
  r.summary["planar"] = Q.canonical();
  r.summary["max_rel_deviation"] = worst;
  r.summary["bound"] = bound;
  r.summary["pass"] = worst <= bound;
  r.summary["min_pivot_ratio"] = g.min_pivot_ratio;
  r.summary["orthonormality_residual"] = gram_residual(g, *full);
  return r;
}

Report cmd_moments(Params& p) {
  std::string kind = p.text("kind", "planar");
  Report r;
  if (kind == "radial-norms") {
    PotentialModel model = model_param(p);
    if (model.variant() != PotentialModel::Variant::Radial) raise(ErrorKind::Validation, "radial-norms needs a radial model");
    const int n = positive_int(p, "n", 256);
    const int jmax = static_cast<int>(p.integer("j_max", 2L * n));
    if (jmax < 0) raise(ErrorKind::Validation, "'j_max' must be >= 0");
    const int d = model.dim();
    std::vector<double> quad(jmax + 1), closed(jmax + 1, kNaN);
    parallel_for(jmax + 1, [&](std::size_t j) {
      quad[j] = radial_norm(model.profile(), n, d, static_cast<int>(j)).log_value;
      if (auto c = closed_form_log_norm(model.profile(), n, d, static_cast<int>(j))) closed[j] = *c;
    });
    r.columns = {"j", "log_h", "closed_form_log_h", "rel_err"};
    double worst = 0.0;
    for (int j = 0; j <= jmax; ++j) {
      double rel = std::isnan(closed[j]) ? kNaN : std::fabs(std::expm1(quad[j] - closed[j]));
      if (!std::isnan(rel)) worst = std::max(worst, rel);
      r.add_row({static_cast<long long>(j), quad[j], closed[j], rel});
    }
    r.summary["model"] = model.canonical();
    r.summary["max_rel_err"] = worst;
    return r;
  }
  if (kind != "planar") raise(ErrorKind::Validation, "moments kind is planar or radial-norms");
  PlanarPotential Q = planar_param(p, Json{{"kind", "elliptic"}, {"t", 0.2}});
  const int n = positive_int(p, "n", 200);
  const long mm = p.integer("m", 20);
  if (mm < 0) raise(ErrorKind::Validation, "'m' must be >= 0");
  const int m = static_cast<int>(mm);
  const double cst = p.number("bound_constant", 8.0);
  MomentOptions mo;
  mo.max_degree = positive_int(p, "max_degree", mo.max_degree);
  auto table = moment_table(Q, n, m, false, mo);
  const double lap = Q.laplacian_at_origin();
  r.columns = {"j", "k", "log_modulus", "phase", "ratio", "bound", "holds"};
  bool all = true;
  double worst = 0.0, worst_upper = 0.0;
  long long violations = 0;
  for (int j = 0; j <= m; ++j)
    for (int k = 0; k <= m; ++k) {
      const LogComplex& v = table->at(j, k);
      double ratio = v.is_zero() ? 0.0 : std::exp(v.log_modulus - table->diag(j).log_modulus);
      int gap = std::abs(j - k);
      double bound = gap == 0 ? 1.0 : std::pow(cst * (j + k) / (2.0 * n * lap), gap);
      bool holds = ratio <= bound * (1.0 + 1e-12);
      all = all && holds;
      violations += holds ? 0 : 1;
      if (bound > 0.0) worst = std::max(worst, ratio / bound);
      if (bound > 0.0 && k > j) worst_upper = std::max(worst_upper, ratio / bound);
      r.add_row({static_cast<long long>(j), static_cast<long long>(k), v.log_modulus, v.phase, ratio, bound, holds});
    }
  r.summary["planar"] = Q.canonical();
  r.summary["all_hold"] = all;
  r.summary["max_ratio_over_bound"] = worst;
  // Pairs with k > j only, where J_jj is the larger diagonal entry.
  r.summary["max_ratio_over_bound_upper"] = worst_upper;
  r.summary["violations"] = violations;
  return r;
}

Report cmd_variance(Params& p) {
  PotentialModel model = model_param(p);
  const int n = positive_int(p, "n", 1024);
  const int d = model.dim();
  std::vector<CountingSetup> setups;
  if (p.has("a")) {
    for (double a : p.numbers("a", {})) setups.push_back(CountingSetup::at_radius(model, n, a));
  } else {
    for (double del : p.numbers("deltas", {-1.0, 0.0, 1.0})) setups.push_back(CountingSetup::at_delta(model, n, del));
  }
  std::vector<std::string> methods;
  if (!p.has("methods")) p.set("methods", Json::array({"bernoulli", "integral"}));
  for (const auto& m : p.at("methods")) methods.push_back(m.get<std::string>());
  IntegralOptions io;
  io.window_constant = p.number("window_constant", io.window_constant);
  const long trials = p.integer("trials", 100000);
  const auto seed = static_cast<unsigned long long>(p.integer("seed", 1));
  const double scale = std::pow(double(n), d - 1) * std::sqrt(double(n));
  Report r;
  r.columns = {"n", "d", "delta", "a", "method", "mean", "variance", "limit_value", "ratio", "std_error"};
  double worst_cross = 0.0, worst_limit = 0.0;
  for (const auto& s : setups) {
    double limit = s.delta ? edge_variance_limit(model, *s.delta) : kNaN;
    double ref = kNaN;
    for (const auto& m : methods) {
      VarianceResult v;
      if (m == "bernoulli") v = variance_bernoulli(s);
      else if (m == "integral") v = variance_integral(s, io);
      else if (m == "monte_carlo") v = mc_count(s, trials, seed);
      else raise(ErrorKind::Validation, "unknown variance method '" + m + "'");
      double ratio = v.variance / scale / limit;
      if (m == "bernoulli") {
        ref = v.variance;
        if (s.delta) worst_limit = std::max(worst_limit, std::fabs(ratio - 1.0));
      } else if (m == "integral" && !std::isnan(ref)) {
        worst_cross = std::max(worst_cross, std::fabs(v.variance - ref) / ref);
      }
      r.add_row({static_cast<long long>(n), static_cast<long long>(d), s.delta ? *s.delta : kNaN, s.radius(),
                 method_name(v.method), v.mean, v.variance, limit, ratio, v.diagnostics.variance_std_error});
    }
  }
  r.summary["model"] = model.canonical();
  r.summary["basis_size"] = basis_size(n, d);
  r.summary["max_limit_deviation"] = worst_limit;
  r.summary["max_cross_method_deviation"] = worst_cross;
  return r;
}

Report cmd_identity_check(Params& p) {
  std::string kind = p.text("kind", "halfspace");
  Report r;
  if (kind == "halfspace") {
    const int d = positive_int(p, "d", 3);
    const int count = positive_int(p, "count", 5);
    const long samples = p.integer("samples", 1000000);
    const auto seed = static_cast<std::uint64_t>(p.integer("seed", 1));
    const double sigmas = p.number("sigmas", 3.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    r.columns = {"index", "closed_form", "mc_mean", "std_error", "z_score", "b0_closed_form", "b0_expected", "b0_rel_err"};
    double worst_z = 0.0, worst_b0 = 0.0;
    for (int i = 0; i < count; ++i) {
      Eigen::MatrixXd B(d, d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) B(a, b) = g(rng);
      Eigen::MatrixXd A = B * B.transpose() / d + 0.5 * Eigen::MatrixXd::Identity(d, d);
      Eigen::VectorXd v(d), b(d);
      for (int k = 0; k < d; ++k) {
        v(k) = g(rng);
        b(k) = u(rng);
      }
      double cf = halfspace_gaussian(A, v, b);
      MonteCarloEstimate mc = halfspace_gaussian_mc(A, v, b, samples, seed + 1000 + i);
      double z = std::fabs(mc.mean - cf) / mc.std_error;
      double b0 = halfspace_gaussian(A, v, Eigen::VectorXd::Zero(d));
      double expect = 0.5 * std::exp(0.5 * (d * std::log(2.0 * std::numbers::pi) + spd_log_det(A)));
      double rel = std::fabs(b0 - expect) / expect;
      worst_z = std::max(worst_z, z);
      worst_b0 = std::max(worst_b0, rel);
      r.add_row({static_cast<long long>(i), cf, mc.mean, mc.std_error, z, b0, expect, rel});
    }
    r.summary["max_z_score"] = worst_z;
    r.summary["max_b0_rel_err"] = worst_b0;
    r.summary["pass"] = worst_z <= sigmas && worst_b0 <= 1e-12;
    return r;
  }
  if (kind != "reproducing") raise(ErrorKind::Validation, "identity-check kind is halfspace or reproducing");
  const int d = positive_int(p, "d", 2);
  const int count = positive_int(p, "count", 10);
  const int nodes_re = positive_int(p, "nodes_re", 160);
  const int nodes_im = positive_int(p, "nodes_im", 320);
  const double tol = p.number("tolerance", 0.02);
  std::mt19937_64 rng(static_cast<std::uint64_t>(p.integer("seed", 1)));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector v = CVector::Constant(d, 1.0 / std::sqrt(double(d)));
  r.columns = {"index", "xi", "eta", "kernel_re", "kernel_im", "integral_re", "integral_im", "rel_error"};
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    // Real parts on the v-ray, imaginary parts free.
    CVector xi(d), eta(d);
    double s = u(rng), t = u(rng);
    for (int k = 0; k < d; ++k) {
      xi(k) = {s * v(k).real(), u(rng)};
      eta(k) = {t * v(k).real(), u(rng)};
    }
    PairingResult pr = reproducing_pairing(xi, eta, v, nodes_re, nodes_im);
    worst = std::max(worst, pr.rel_error);
    r.add_row({static_cast<long long>(i), cvector_text(xi), cvector_text(eta), pr.kernel.real(), pr.kernel.imag(),
               pr.integral.real(), pr.integral.imag(), pr.rel_error});
  }
  r.summary["max_rel_error"] = worst;
  r.summary["tolerance"] = tol;
  r.summary["pass"] = worst <= tol;
  return r;
}

Report run_command(const std::string& command, Params& params) {
  Report r;
  if (command == "kernel") r = cmd_kernel(params);
  else if (command == "droplet") r = cmd_droplet(params);
  else if (command == "obstacle") r = cmd_obstacle(params);
  else if (command == "edge-limit") r = cmd_edge_limit(params);
  else if (command == "bulk-limit") r = cmd_bulk_limit(params);
  else if (command == "partial-kernel") r = cmd_partial_kernel(params);
  else if (command == "moments") r = cmd_moments(params);
  else if (command == "variance") r = cmd_variance(params);
  else if (command == "identity-check") r = cmd_identity_check(params);
  else raise(ErrorKind::Validation, "unknown command '" + command + "'");
  r.command = command;
  r.config = params.resolved();
  return r;
}

}  // namespace bergkern
