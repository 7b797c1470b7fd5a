#include "bergkern/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bergkern/errors.hpp"

namespace bergkern {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  raise(ErrorKind::Validation, "config field '" + key + "': " + what);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Params::Params(Json doc) : doc_(std::move(doc)) {
  if (!doc_.is_object()) raise(ErrorKind::Validation, "config must be a JSON object");
}

bool Params::has(const std::string& key) const { return doc_.contains(key) && !doc_[key].is_null(); }

const Json& Params::at(const std::string& key) const {
  if (!has(key)) bad(key, "required field is missing");
  return doc_[key];
}

double Params::number(const std::string& key) const {
  const Json& v = at(key);
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

double Params::number(const std::string& key, double def) {
  if (!has(key)) doc_[key] = def;
  return static_cast<const Params&>(*this).number(key);
}

long Params::integer(const std::string& key) const {
  const Json& v = at(key);
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>())) return static_cast<long>(v.get<double>());
  bad(key, "expected an integer");
}

long Params::integer(const std::string& key, long def) {
  if (!has(key)) doc_[key] = def;
  return static_cast<const Params&>(*this).integer(key);
}

bool Params::flag(const std::string& key, bool def) {
  if (!has(key)) doc_[key] = def;
  if (!doc_[key].is_boolean()) bad(key, "expected true or false");
  return doc_[key].get<bool>();
}

std::string Params::text(const std::string& key, const std::string& def) {
  if (!has(key)) doc_[key] = def;
  if (!doc_[key].is_string()) bad(key, "expected a string");
  return doc_[key].get<std::string>();
}

std::vector<double> Params::numbers(const std::string& key, const std::vector<double>& def) {
  if (!has(key)) doc_[key] = def;
  const Json& v = doc_[key];
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) bad(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) bad(key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> Params::integers(const std::string& key, const std::vector<int>& def) {
  if (!has(key)) doc_[key] = def;
  const Json& v = doc_[key];
  if (v.is_number_integer()) return {v.get<int>()};
  if (!v.is_array()) bad(key, "expected an array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) bad(key, "expected an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    raise(ErrorKind::Validation, "config file '" + path + "' is not valid JSON: " + e.what());
  }
}

RadialProfile parse_profile(const Json& j) {
  if (!j.is_object()) bad("profile", "expected an object");
  std::string kind = j.value("kind", std::string("polynomial"));
  if (kind == "power") {
    if (!j.contains("b") || !j["b"].is_number()) bad("profile.b", "power profile needs a number b");
    return RadialProfile::power(j["b"].get<double>());
  }
  if (kind == "gaussian") return RadialProfile::polynomial({{2, 1.0}});
  if (kind != "polynomial") bad("profile.kind", "unknown profile kind '" + kind + "'");
  if (!j.contains("terms") || !j["terms"].is_array()) bad("profile.terms", "expected an array");
  std::vector<Monomial> terms;
  for (const auto& t : j["terms"]) {
    if (!t.contains("exponent") || !t["exponent"].is_number_integer() || !t.contains("coefficient") ||
        !t["coefficient"].is_number())
      bad("profile.terms", "each term needs an integer exponent and a numeric coefficient");
    terms.push_back({t["exponent"].get<int>(), t["coefficient"].get<double>()});
  }
  return RadialProfile::polynomial(terms);
}

Json profile_json(const RadialProfile& p) {
  Json j;
  if (p.kind() == RadialProfile::Kind::Power) {
    j["kind"] = "power";
    j["b"] = p.b();
  } else {
    j["kind"] = "polynomial";
    j["terms"] = Json::array();
    for (const auto& t : p.terms()) j["terms"].push_back({{"exponent", t.exponent}, {"coefficient", t.coefficient}});
  }
  return j;
}

PotentialModel parse_model(const Json& j) {
  if (!j.is_object()) bad("model", "expected an object");
  std::string variant = j.value("variant", std::string("radial"));
  if (variant == "radial") {
    int d = j.value("d", 1);
    Json prof = j.contains("profile") ? j["profile"] : Json{{"kind", "gaussian"}};
    return PotentialModel::radial(parse_profile(prof), d);
  }
  if (variant == "tensor") {
    if (!j.contains("factors") || !j["factors"].is_array()) bad("model.factors", "expected an array");
    std::vector<RadialProfile> f;
    for (const auto& p : j["factors"]) f.push_back(parse_profile(p));
    return PotentialModel::tensor(f);
  }
  bad("model.variant", "expected 'radial' or 'tensor'");
}

PlanarPotential parse_planar(const Json& j) {
  if (!j.is_object()) bad("planar", "expected an object");
  std::string kind = j.value("kind", std::string("gaussian"));
  if (kind == "gaussian") return PlanarPotential::gaussian();
  if (kind == "elliptic") return PlanarPotential::elliptic(j.value("t", 0.2));
  if (kind == "quartic") return PlanarPotential::quartic_perturbation(j.value("eps", 0.1));
  if (kind == "terms") {
    if (!j.contains("terms") || !j["terms"].is_array()) bad("planar.terms", "expected an array");
    std::vector<PlanarTerm> terms;
    for (const auto& t : j["terms"])
      terms.push_back({t.value("coefficient", 0.0), t.value("px", 0), t.value("py", 0)});
    return PlanarPotential::from_terms(terms);
  }
  bad("planar.kind", "unknown planar potential '" + kind + "'");
}

std::complex<double> parse_complex(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  bad("point", "complex values are numbers or [re, im] pairs");
}

CVector parse_cvector(const Json& j) {
  if (!j.is_array() || j.empty()) bad("point", "expected a non-empty array of complex values");
  CVector z(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) z(static_cast<Eigen::Index>(k)) = parse_complex(j[k]);
  return z;
}

Json cvector_json(const CVector& z) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < z.size(); ++k) a.push_back({z(k).real(), z(k).imag()});
  return a;
}

std::string cvector_text(const CVector& z) {
  std::string s;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    if (k) s += ";";
    s += fmt(z(k).real());
    s += z(k).imag() < 0 || std::signbit(z(k).imag()) ? "-" : "+";
    s += fmt(std::fabs(z(k).imag()));
    s += "i";
  }
  return s;
}

}  // namespace bergkern
