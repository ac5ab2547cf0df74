#pragma once

// JSON encodings shared by model persistence and the run configuration.
// Decoders start from the defaults of the target struct, so partial objects
// are accepted; unknown keys are rejected.

#include <cmath>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "softboost/boosting.hpp"
#include "softboost/ensembles.hpp"
#include "softboost/learners.hpp"

namespace softboost::codec {

using nlohmann::json;

inline json encode_double(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double decode_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
  }
  throw ValidationError("expected a number, found " + j.dump());
}

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    if constexpr (std::is_same_v<T, double>) {
      out = decode_double(j.at(key));
    } else {
      out = j.at(key).get<T>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
  }
}

json encode(const TreeConfig& c);
TreeConfig decode_tree_config(const json& j, TreeConfig base = {});
json encode(const BoostConfig& c);
BoostConfig decode_boost_config(const json& j, BoostConfig base = {});
json encode(const ForestConfig& c);
ForestConfig decode_forest_config(const json& j, ForestConfig base = {});
json encode(const BoostGrid& g);
BoostGrid decode_grid(const json& j);
json encode(const Level1Spec& s);
Level1Spec decode_level1_spec(const json& j, const Level1Spec& base = {});

}  // namespace softboost::codec
