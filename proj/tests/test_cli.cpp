#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bergkern/commands.hpp"
#include "bergkern/config.hpp"
#include "bergkern/errors.hpp"
#include "bergkern/report.hpp"

#ifndef BERGKERN_CLI_PATH
#define BERGKERN_CLI_PATH "bergkern"
#endif

using namespace bergkern;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "bergkern_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

// Runs the CLI and returns its exit status; stdout and stderr land in files.
int cli(const std::string& args, const std::string& tag) {
  std::string cmd = std::string(BERGKERN_CLI_PATH) + " " + args + " >" + scratch(tag + ".out").string() + " 2>" +
                    scratch(tag + ".err").string();
  int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
  return WEXITSTATUS(status);
#else
  return status;
#endif
}

}  // namespace

TEST_CASE("params record defaults and reject wrong types") {
  Params p(Json{{"n", 12}, {"name", "x"}});
  CHECK(p.integer("n", 3) == 12);
  CHECK(p.number("scale", 2.5) == 2.5);
  CHECK(p.resolved().at("scale") == 2.5);
  CHECK_THROWS_AS(p.integer("name", 1), Error);
  CHECK_THROWS_AS(p.number("name"), Error);
  CHECK(p.numbers("v", {1.0, 2.0}).size() == 2u);
}

TEST_CASE("model and planar parsing") {
  PotentialModel m = parse_model(Json::parse(R"({"variant":"radial","d":2,"profile":{"kind":"power","b":2}})"));
  CHECK(m.dim() == 2);
  PotentialModel t = parse_model(Json::parse(R"({"variant":"tensor","factors":[{"kind":"gaussian"},{"kind":"gaussian"}]})"));
  CHECK(t.dim() == 2);
  CHECK_THROWS_AS(parse_model(Json::parse(R"({"variant":"other"})")), Error);
  CHECK_THROWS_AS(parse_profile(Json::parse(R"({"kind":"polynomial","terms":[{"exponent":2}]})")), Error);
  CHECK(parse_planar(Json::parse(R"({"kind":"elliptic","t":0.2})")).canonical() == PlanarPotential::elliptic(0.2).canonical());
  CVector z = parse_cvector(Json::parse("[[1, 2], 3]"));
  CHECK(z(0) == std::complex<double>(1.0, 2.0));
  CHECK(z(1) == std::complex<double>(3.0, 0.0));
  CHECK(parse_cvector(cvector_json(z)) == z);
  CHECK(profile_json(parse_profile(Json{{"kind", "power"}, {"b", 2.0}})).at("b") == 2.0);
}

TEST_CASE("report formats") {
  Report r;
  r.command = "kernel";
  r.config = Json{{"n", 4}};
  r.columns = {"a", "b"};
  std::ostringstream empty;
  write_csv(empty, r);
  CHECK(empty.str() == "a,b\n");
  r.add_row({1LL, std::string("x,\"y\"")});
  r.add_row({0.1, true});
  CHECK_THROWS_AS(r.add_row({1LL}), Error);
  std::ostringstream csv;
  write_csv(csv, r);
  CHECK(csv.str() == "a,b\n1,\"x,\"\"y\"\"\"\n0.10000000000000001,true\n");
  r.summary["value"] = 0.125;
  Json j = Json::parse(report_json(r).dump());
  CHECK(j.at("schema") == kSchema);
  CHECK(j.at("summary") == r.summary);
  CHECK(j.at("rows").size() == 2u);
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(csv_field("plain") == "plain");
}

TEST_CASE("commands echo resolved parameters") {
  Params p(Json{{"coefficients", {1.0, 2.0}}, {"count", 10}});
  Report r = run_command("obstacle", p);
  CHECK(r.rows.size() == 10u);
  CHECK(r.summary.at("pass") == true);
  CHECK(p.resolved().contains("s_min"));
  Params bad(Json::object());
  CHECK_THROWS_AS(run_command("unknown", bad), Error);
  CHECK(exit_code(ErrorKind::Validation) == 2);
  CHECK(exit_code(ErrorKind::Io) == 2);
  CHECK(exit_code(ErrorKind::Numeric) == 3);
  CHECK(exit_code(ErrorKind::Window) == 3);
}

TEST_CASE("CLI end to end") {
  fs::path cfg = scratch("kernel.json");
  {
    std::ofstream out(cfg);
    out << R"({"command":"kernel","model":{"variant":"tensor","factors":[{"kind":"gaussian"},{"kind":"gaussian"}]},)"
        << R"("n":8,"count":5,"seed":3,"brute_force":true})";
  }
  fs::path a = scratch("a.csv"), b = scratch("b.csv");
  REQUIRE(cli("kernel --config " + cfg.string() + " --out " + a.string(), "run1") == 0);
  REQUIRE(cli("kernel --config " + cfg.string() + " --out " + b.string() + " --threads 3", "run2") == 0);
  CHECK(slurp(a) == slurp(b));
  Json summary = Json::parse(slurp(scratch("run1.out")));
  CHECK(summary.at("pass") == true);
  // Flags override the file.
  fs::path c = scratch("c.json");
  REQUIRE(cli("kernel --config " + cfg.string() + " --n 6 --format json --out " + c.string(), "run3") == 0);
  Json rep = Json::parse(slurp(c));
  CHECK(rep.at("config").at("n") == 6);
  CHECK(rep.at("schema") == kSchema);
  // --set takes JSON values.
  REQUIRE(cli("obstacle --set count=3 --format json", "run4") == 0);
  CHECK(Json::parse(slurp(scratch("run4.out"))).at("rows").size() == 3u);
}

TEST_CASE("CLI errors and exit codes") {
  CHECK(cli("kernel --n 0", "e1") == 2);
  Json err = Json::parse(slurp(scratch("e1.err")));
  CHECK(err.at("error").at("kind") == "validation");
  CHECK(cli("kernel --config /nonexistent/file.json", "e2") == 2);
  CHECK(cli("nosuchcommand", "e3") == 2);
  fs::path cfg = scratch("wrong.json");
  {
    std::ofstream out(cfg);
    out << R"({"command":"moments"})";
  }
  CHECK(cli("kernel --config " + cfg.string(), "e4") == 2);
  // Degree above the moment cap is a numeric failure.
  CHECK(cli("moments --m 80", "e5") == 3);
  CHECK(Json::parse(slurp(scratch("e5.err"))).at("error").at("kind") == "numeric");
  CHECK(cli("edge-limit --n-list 256,128", "e6") == 2);
  CHECK(cli("kernel --threads 0", "e7") == 2);
}
