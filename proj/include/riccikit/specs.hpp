#pragma once

#include "riccikit/convex_geometry.hpp"
#include "riccikit/fields.hpp"
#include "riccikit/measures.hpp"

#include <json.hpp>

namespace riccikit {

using Json = nlohmann::json;

/// {"kind": "exponential", "rate": 1, "lower": 0, "upper": 5}. Optional
/// lower/upper truncate the declared support.
Potential1D potential_from_json(const Json& spec);

/// {"kind": "ball" | "box" | "simplex" | "lp_ball" | "ellipse", ...}.
ConvexBody body_from_json(const Json& spec, int dim);

/// Measure kinds: gaussian; product with "coord" (repeated) or "coords";
/// tilted with "base" and non-negative quadratic tilt
/// delta |x|^2 / 2 + kappa (sum x)^2 / 2; uniform and cone over "body"
/// (falling back to `body` when the spec has none).
Measure measure_from_json(const Json& spec, int dim, const Json& body = Json());

/// Reads a number, with a JSON-pointer-like path in the error message.
double number_at(const Json& obj, const char* key, double fallback);
int integer_at(const Json& obj, const char* key, int fallback);

}  // namespace riccikit
