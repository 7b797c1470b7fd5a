// Acceptance runner: one PASS/FAIL line per criterion. Each criterion loads
// its frozen config from configs/ and runs the same command code as the CLI.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bergkern/commands.hpp"
#include "bergkern/config.hpp"
#include "bergkern/errors.hpp"

#ifndef BERGKERN_CONFIG_DIR
#define BERGKERN_CONFIG_DIR "configs"
#endif

namespace {

using bergkern::Json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

Json load(const std::string& name) {
  return bergkern::load_json_file(std::string(BERGKERN_CONFIG_DIR) + "/" + name + ".json");
}

// Runs a config with optional overrides and returns the report summary.
Json run(const std::string& name, const Json& overrides = Json::object()) {
  Json doc = load(name);
  std::string command = doc.at("command").get<std::string>();
  doc.erase("command");
  doc.erase("output");
  for (auto it = overrides.begin(); it != overrides.end(); ++it) doc[it.key()] = it.value();
  bergkern::Params p(doc);
  return bergkern::run_command(command, p).summary;
}

double first(const Json& v) { return v.is_array() ? v.at(0).get<double>() : v.get<double>(); }

Outcome c01() {
  double worst = 0.0;
  const std::vector<Json> profiles = {Json{{"kind", "gaussian"}}, Json{{"kind", "power"}, {"b", 0.75}},
                                      Json{{"kind", "power"}, {"b", 3.0}}};
  for (int n : {16, 256, 4096})
    for (int d : {1, 2, 3})
      for (const auto& prof : profiles) {
        Json model = {{"variant", "radial"}, {"d", d}, {"profile", prof}};
        Json s = run("c01_radial_norms", Json{{"n", n}, {"model", model}, {"j_max", 2 * n}});
        worst = std::max(worst, s.at("max_rel_err").get<double>());
      }
  return {worst <= 1e-10, "max rel err " + num(worst) + " (bound 1e-10)"};
}

Outcome c02() {
  Json s = run("c02_edge_ginibre");
  const auto ns = s.at("n_list").get<std::vector<int>>();
  const auto errs = s.at("sup_error").get<std::vector<double>>();
  double at1024 = NAN;
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (ns[i] == 1024) at1024 = errs[i];
  const double rate = s.at("fitted_rate").get<double>();
  bool ok = at1024 <= 0.05 && rate >= -0.70 && rate <= -0.30;
  return {ok, "sup err at n=1024 " + num(at1024) + " (bound 0.05), rate " + num(rate) + " (in [-0.70,-0.30])"};
}

Outcome c03() {
  double a = first(run("c03_mverfc_r2").at("sup_error"));
  double b = first(run("c03_mverfc_r4").at("sup_error"));
  return {a <= 0.08 && b <= 0.08, "V=r^2 " + num(a) + ", V=r^4/2 " + num(b) + " (bound 0.08)"};
}

Outcome c04() {
  double a = first(run("c04_tensor_degenerate").at("sup_error"));
  double b = first(run("c04_tensor_mverfc").at("sup_error"));
  return {a <= 0.1 && b <= 0.08, "tau=(1,0) " + num(a) + " (bound 0.1), tau=(1/2,1/2) " + num(b) + " (bound 0.08)"};
}

Outcome c05() {
  double worst = 0.0;
  for (int n : {4, 9, 16}) worst = std::max(worst, run("c05_tensor_bruteforce", Json{{"n", n}}).at("max_rel_diff").get<double>());
  return {worst <= 1e-10, "max rel diff " + num(worst) + " over n in {4,9,16} (bound 1e-10)"};
}

Outcome c06() {
  Json s = run("c06_obstacle");
  return {s.at("pass").get<bool>(), "max deviation " + num(s.at("max_deviation").get<double>()) + " (bound 1e-8)"};
}

Outcome c07() {
  Json a = run("c07_partial_ginibre");
  Json b = run("c07_partial_quartic");
  bool ok = a.at("pass").get<bool>() && b.at("pass").get<bool>();
  return {ok, "Ginibre " + num(a.at("sup_deviation").get<double>()) + " (bound " + num(a.at("bound").get<double>()) +
                  "), quartic " + num(b.at("sup_deviation").get<double>()) + " (bound " +
                  num(b.at("bound").get<double>()) + ")"};
}

Outcome c08() {
  Json s = run("c08_gram_oracle");
  return {s.at("pass").get<bool>(), "max rel deviation " + num(s.at("max_rel_deviation").get<double>()) + " (bound " +
                                        num(s.at("bound").get<double>()) + ")"};
}

Outcome c09() {
  Json s = run("c09_moment_decay");
  return {s.at("all_hold").get<bool>(),
          std::to_string(s.at("violations").get<long long>()) + " violations, max ratio/bound " +
              num(s.at("max_ratio_over_bound").get<double>()) + " (k>j only " +
              num(s.at("max_ratio_over_bound_upper").get<double>()) + ")"};
}

Outcome c10() {
  Json a = run("c10_variance_d1");
  Json b = run("c10_variance_d2");
  double la = a.at("max_limit_deviation").get<double>(), lb = b.at("max_limit_deviation").get<double>();
  double ca = a.at("max_cross_method_deviation").get<double>(), cb = b.at("max_cross_method_deviation").get<double>();
  bool ok = la <= 0.05 && lb <= 0.05 && ca <= 0.01 && cb <= 0.01;
  return {ok, "limit deviation d=1 " + num(la) + ", d=2 " + num(lb) + " (bound 0.05); methods " +
                  num(std::max(ca, cb)) + " (bound 0.01)"};
}

Outcome c11() {
  Json s = run("c11_halfspace");
  return {s.at("pass").get<bool>(), "max z-score " + num(s.at("max_z_score").get<double>()) + " (bound 3), b=0 rel err " +
                                        num(s.at("max_b0_rel_err").get<double>()) + " (bound 1e-12)"};
}

Outcome c12() {
  Json a = run("c12_decay_radial");
  Json b = run("c12_decay_tensor");
  double ta = a.at("angle_to_normal").get<double>(), tb = b.at("angle_to_normal").get<double>();
  return {ta <= 0.2 && tb <= 0.2, "radial " + num(ta) + " rad, tensor " + num(tb) + " rad (bound 0.2)"};
}

Outcome c13() {
  Json s = run("c13_reproducing");
  return {s.at("pass").get<bool>(), "max rel error " + num(s.at("max_rel_error").get<double>()) + " (bound 0.02)"};
}

struct Criterion {
  std::string title;
  double budget_s;
  std::function<Outcome()> check;
};

const std::map<int, Criterion>& criteria() {
  static const std::map<int, Criterion> all = {
      {1, {"radial norm closed forms", 30, c01}},
      {2, {"planar edge limit, Ginibre d=1", 120, c02}},
      {3, {"multivariate erfc limit, radial d=2", 180, c03}},
      {4, {"tensor edge limit and bulk degeneracy", 180, c04}},
      {5, {"tensor convolution vs brute force", 5, c05}},
      {6, {"obstacle water-filling", 5, c06}},
      {7, {"partial kernels", 120, c07}},
      {8, {"extremal formula vs Gram oracle", 60, c08}},
      {9, {"moment decay bound", 60, c09}},
      {10, {"number variance edge limit", 120, c10}},
      {11, {"half-space Gaussian identity", 60, c11}},
      {12, {"steepest-decay direction", 60, c12}},
      {13, {"reproducing pairing", 120, c13}},
  };
  return all;
}

bool run_one(int id) {
  const Criterion& c = criteria().at(id);
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.check();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = secs <= c.budget_s;
  bool pass = o.pass && in_time;
  std::ostringstream line;
  line << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << c.title << ": " << o.detail << "; "
       << num(secs) << " s (budget " << c.budget_s << " s" << (in_time ? "" : ", exceeded") << ")";
  std::cout << line.str() << std::endl;
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      ids.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (ids.empty())
    for (const auto& [id, c] : criteria()) ids.push_back(id);
  bool all = true;
  for (int id : ids) {
    if (!criteria().count(id)) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    all = run_one(id) && all;
  }
  return all ? 0 : 1;
}
