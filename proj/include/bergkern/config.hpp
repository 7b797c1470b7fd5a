#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bergkern/geometry.hpp"
#include "bergkern/quad.hpp"

namespace bergkern {

using Json = nlohmann::ordered_json;

// Command parameters backed by a JSON document. Reads of absent keys store
// the default, so the resolved document echoes every value in effect.
class Params {
 public:
  Params() : doc_(Json::object()) {}
  explicit Params(Json doc);

  bool has(const std::string& key) const;
  const Json& at(const std::string& key) const;
  void set(const std::string& key, Json value) { doc_[key] = std::move(value); }

  double number(const std::string& key, double def);
  double number(const std::string& key) const;
  long integer(const std::string& key, long def);
  long integer(const std::string& key) const;
  bool flag(const std::string& key, bool def);
  std::string text(const std::string& key, const std::string& def);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& def);
  std::vector<int> integers(const std::string& key, const std::vector<int>& def);

  const Json& resolved() const { return doc_; }

 private:
  Json doc_;
};

Json load_json_file(const std::string& path);

RadialProfile parse_profile(const Json& j);
Json profile_json(const RadialProfile& p);
// {"variant": "radial", "d": 2, "profile": {...}} or {"variant": "tensor", "factors": [...]}.
PotentialModel parse_model(const Json& j);
// {"kind": "gaussian" | "elliptic" | "quartic" | "terms", ...}
PlanarPotential parse_planar(const Json& j);

// Complex numbers as [re, im] or plain reals; vectors as arrays of those.
std::complex<double> parse_complex(const Json& j);
CVector parse_cvector(const Json& j);
Json cvector_json(const CVector& z);
std::string cvector_text(const CVector& z);

}  // namespace bergkern
