#include "riccikit/specs.hpp"

#include <cmath>

namespace riccikit {

namespace {

[[noreturn]] void schema(const std::string& message) { throw Error(ErrorCode::SchemaViolation, message); }

std::string kind_of(const Json& spec, const char* where) {
  if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
    schema(std::string(where) + "/kind: expected a string");
  }
  return spec["kind"].get<std::string>();
}

}  // namespace

double number_at(const Json& obj, const char* key, double fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  const Json& v = obj[key];
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
  }
  schema(std::string("/") + key + ": expected a number");
}

int integer_at(const Json& obj, const char* key, int fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) schema(std::string("/") + key + ": expected an integer");
  return obj[key].get<int>();
}

Potential1D potential_from_json(const Json& spec) {
  const std::string kind = kind_of(spec, "potential");
  Potential1D v;
  if (kind == "quadratic") {
    v = potentials::quadratic(number_at(spec, "curvature", 1.0), number_at(spec, "center", 0.0));
  } else if (kind == "power") {
    v = potentials::power(number_at(spec, "c", 1.0), number_at(spec, "q", 2.0));
  } else if (kind == "exponential") {
    v = potentials::exponential(number_at(spec, "rate", 1.0));
  } else if (kind == "laplace") {
    v = potentials::laplace(number_at(spec, "rate", 1.0));
  } else if (kind == "uniform") {
    v = potentials::uniform(number_at(spec, "a", 0.0), number_at(spec, "b", 1.0));
  } else if (kind == "cosine") {
    v = potentials::cosine(number_at(spec, "half_width", 0.5));
  } else if (kind == "exp_quadratic") {
    v = potentials::exp_quadratic(number_at(spec, "rate", 1.0), number_at(spec, "curvature", 1.0));
  } else if (kind == "logcosh_mix") {
    v = potentials::logcosh_mix(number_at(spec, "alpha", 1.0), number_at(spec, "beta", 0.0),
                                number_at(spec, "gamma", 1.0), number_at(spec, "delta", 0.0));
  } else if (kind == "cosh") {
    v = potentials::cosh_potential();
  } else if (kind == "legendre_power") {
    v = potentials::legendre_power_example(number_at(spec, "q", 3.0));
  } else {
    schema("/potential/kind: unknown potential '" + kind + "'");
  }
  const double lo = number_at(spec, "lower", v.lower);
  const double hi = number_at(spec, "upper", v.upper);
  if (!(lo < hi) || lo < v.lower || hi > v.upper) schema("/potential: truncation must lie inside the support");
  v.lower = lo;
  v.upper = hi;
  return v;
}

ConvexBody body_from_json(const Json& spec, int dim) {
  const std::string kind = kind_of(spec, "body");
  try {
    if (kind == "ball") return ConvexBody::ball(dim, number_at(spec, "radius", 1.0));
    if (kind == "box") return ConvexBody::box(Vec::Constant(dim, number_at(spec, "half_width", 1.0)));
    if (kind == "simplex") return ConvexBody::simplex(dim, number_at(spec, "scale", 1.0));
    if (kind == "lp_ball") return ConvexBody::lp_ball(dim, number_at(spec, "p", 4.0), number_at(spec, "radius", 1.0));
    if (kind == "ellipse") {
      if (dim != 2) schema("/body: ellipse requires dimension 2");
      return ConvexBody::ellipse(number_at(spec, "a", 2.0), number_at(spec, "b", 1.0));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) schema(std::string("/body: ") + e.what());
    throw;
  }
  schema("/body/kind: unknown body '" + kind + "'");
}

Measure measure_from_json(const Json& spec, int dim, const Json& body) {
  const std::string kind = kind_of(spec, "measure");
  if (kind == "gaussian") return gaussian_measure(dim);
  if (kind == "product") {
    std::vector<Potential1D> coords;
    if (spec.contains("coords")) {
      if (!spec["coords"].is_array() || static_cast<int>(spec["coords"].size()) != dim) {
        schema("/measure/coords: expected an array of length " + std::to_string(dim));
      }
      for (const Json& c : spec["coords"]) coords.push_back(potential_from_json(c));
    } else if (spec.contains("coord")) {
      coords.assign(dim, potential_from_json(spec["coord"]));
    } else {
      schema("/measure: product needs coord or coords");
    }
    return product_measure(coords);
  }
  if (kind == "tilted") {
    if (!spec.contains("base")) schema("/measure/base: missing");
    const Measure base = measure_from_json(spec["base"], dim, body);
    const double delta = number_at(spec, "delta", 0.0);
    const double kappa = number_at(spec, "kappa", 0.0);
    if (delta < 0.0 || kappa < 0.0) schema("/measure: tilt coefficients must be non-negative");
    const Mat a = delta * Mat::Identity(dim, dim) + kappa * Mat::Ones(dim, dim);
    return tilted_measure(base, quadratic_field(a));
  }
  if (kind == "uniform" || kind == "cone") {
    const Json& b = spec.contains("body") ? spec["body"] : body;
    if (b.is_null()) schema("/measure/body: missing");
    const ConvexBody cb = body_from_json(b, dim);
    return kind == "uniform" ? uniform_measure(cb) : cone_measure(cb);
  }
  schema("/measure/kind: unknown measure '" + kind + "'");
}

}  // namespace riccikit
