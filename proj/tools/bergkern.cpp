#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bergkern/commands.hpp"
#include "bergkern/errors.hpp"
#include "bergkern/parallel.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::string threads;
  std::vector<std::string> sets;
  long n = 0;
  long m = 0;
  long seed = 0;
  std::vector<int> n_list;
};

void error_record(const std::string& kind, const std::string& message) {
  bergkern::Json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

// key=value with value parsed as JSON when possible, as a string otherwise.
void apply_set(bergkern::Json& doc, const std::string& item) {
  auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0)
    bergkern::raise(bergkern::ErrorKind::Validation, "--set expects key=value, got '" + item + "'");
  std::string key = item.substr(0, eq), value = item.substr(eq + 1);
  bergkern::Json v;
  try {
    v = bergkern::Json::parse(value);
  } catch (const nlohmann::json::parse_error&) {
    v = value;
  }
  doc[key] = v;
}

int run(const std::string& command, const Options& o, CLI::App& sub) {
  bergkern::Json doc = o.config.empty() ? bergkern::Json::object() : bergkern::load_json_file(o.config);
  if (!doc.is_object()) bergkern::raise(bergkern::ErrorKind::Validation, "config must be a JSON object");
  if (doc.contains("command") && doc["command"] != command)
    bergkern::raise(bergkern::ErrorKind::Validation,
                    "config is for command '" + doc["command"].get<std::string>() + "', not '" + command + "'");
  doc.erase("command");
  bergkern::Json output = doc.contains("output") ? doc["output"] : bergkern::Json::object();
  doc.erase("output");
  // Flags win over the file.
  if (sub.count("--n")) doc["n"] = o.n;
  if (sub.count("--m")) doc["m"] = o.m;
  if (sub.count("--seed")) doc["seed"] = o.seed;
  if (sub.count("--n-list")) doc["n_list"] = o.n_list;
  for (const auto& s : o.sets) apply_set(doc, s);
  std::string threads = !o.threads.empty() ? o.threads : (doc.contains("threads") ? doc["threads"].dump() : "\"auto\"");
  doc.erase("threads");
  if (threads.size() > 1 && threads.front() == '"') threads = threads.substr(1, threads.size() - 2);
  int nthreads = 0;
  if (threads != "auto") {
    try {
      nthreads = std::stoi(threads);
    } catch (const std::exception&) {
      bergkern::raise(bergkern::ErrorKind::Validation, "threads must be a positive integer or auto");
    }
    if (nthreads < 1) bergkern::raise(bergkern::ErrorKind::Validation, "threads must be a positive integer or auto");
  }
  bergkern::set_default_threads(nthreads);
  std::string path = !o.out.empty() ? o.out : output.value("path", std::string());
  std::string format = !o.format.empty() ? o.format : output.value("format", std::string("csv"));
  bergkern::Params params(doc);
  bergkern::Report report = bergkern::run_command(command, params);
  report.config["threads"] = threads;
  report.config["output"] = {{"path", path}, {"format", format}};
  bergkern::emit_report(report, path, format);
  if (!path.empty() && path != "-") std::cout << report.summary.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted polynomial Bergman kernels, edge limits and counting statistics"};
  app.require_subcommand(1);
  Options o;
  std::string chosen;
  for (const auto& name : bergkern::command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--out", o.out, "report path (stdout when absent)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", o.threads, "worker threads or auto");
    sub->add_option("--n", o.n, "polynomial degree bound n");
    sub->add_option("--m", o.m, "partial kernel or moment degree");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--n-list", o.n_list, "increasing list of n")->delimiter(',');
    sub->add_option("--set", o.sets, "override a config field: key=json");
    sub->callback([&chosen, name]() { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    error_record("validation", e.what());
    return 2;
  }
  try {
    return run(chosen, o, *app.get_subcommand(chosen));
  } catch (const bergkern::Error& e) {
    error_record(e.kind_name(), e.what());
    return bergkern::exit_code(e.kind());
  } catch (const std::exception& e) {
    error_record("numeric", e.what());
    return 3;
  }
}
