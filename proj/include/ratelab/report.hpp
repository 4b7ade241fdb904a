#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "ratelab/extended_value.hpp"

namespace ratelab {

using json = nlohmann::ordered_json;

// JSON cannot carry IEEE infinities; serialize them as the same literals the
// CSV writers use so every report stays parseable and deterministic.
inline json json_number(double v) {
  if (std::isnan(v)) throw std::domain_error("json_number: NaN");
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

inline json json_number(ExtendedValue v) { return json_number(v.as_double()); }

// Outcome of one named check. `worst_violation` is 0 when the checked
// inequalities hold everywhere; `witness` describes the worst offender.
// `proxy` discloses when limit quantities were replaced by finite proxies
// (currently always "tail-window" for asymptotic checks).
struct CheckReport {
  std::string check;
  bool pass = false;
  double worst_violation = 0.0;
  json witness = json::object();
  json details = json::object();
  std::string proxy;

  json to_json() const {
    json j;
    j["check"] = check;
    j["pass"] = pass;
    j["worst_violation"] = json_number(worst_violation);
    j["witness"] = witness;
    if (!proxy.empty()) j["proxy"] = proxy;
    if (!details.empty()) j["details"] = details;
    return j;
  }
};

// Default tolerances: `asymptotic` absorbs tail-window and grid resolution
// error; `exact` guards identities that hold to rounding.
struct Tolerances {
  double asymptotic = 1e-2;
  double exact = 1e-8;
};

}  // namespace ratelab
