#pragma once

#include "riccikit/convex_geometry.hpp"
#include "riccikit/fields.hpp"
#include "riccikit/measures.hpp"
#include "riccikit/specs.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace riccikit {

enum class LhsKind { Variance, EntropyOfSquare, L2Dirichlet };

std::string_view to_string(LhsKind kind);

/// Boundary contribution written against the cone measure sigma of the body:
/// (1/Vol) \int_boundary u (f - C)^2 dH = E_sigma[(d / <x, n>) u (f - C)^2],
/// so `weight` already contains the factor d / <x, n>. Without `uses_function`
/// the term is E_sigma[weight].
struct BoundaryTerm {
  std::function<double(const Vec&)> weight;
  bool free_constant = true;
  bool uses_function = true;
};

/// Sample-based precondition: margin(x) >= 0 means satisfied at x.
struct HypothesisCheck {
  std::string name;
  std::function<double(const Vec&)> margin;
  bool on_boundary = false;
};

struct HypothesisResult {
  std::string name;
  double margin = 0.0;
  Vec location;
  bool passed = true;
};

/// Which test-function family the instance quantifies over.
enum class FunctionFamily { General, Lipschitz, Dirichlet };

struct InequalityInstance {
  std::string id;
  int dim = 0;
  LhsKind lhs_kind = LhsKind::Variance;
  double lhs_scale = 1.0;
  /// Interior RHS density: E_mu[<W(x) grad f, grad f>], times rhs_constant.
  QuadraticFormField rhs_weight;
  double rhs_constant = 1.0;
  std::optional<BoundaryTerm> boundary;
  /// Adds max_i E x_i^2 * E |grad f|^2 (orthant-to-space transfer).
  bool coordinate_moment_term = false;
  bool constant_known = true;
  FunctionFamily family = FunctionFamily::General;
  Measure measure;
  std::shared_ptr<const ConvexBody> body;
  std::vector<HypothesisCheck> hypotheses;
  /// Parameter-level checks evaluated once at instantiation.
  std::vector<HypothesisResult> static_checks;
  /// Derived scalars worth reporting (rho, lambda, R, KE residual, ...).
  std::map<std::string, double> notes;
};

struct CatalogEntry {
  std::string id;
  std::string statement;
  LhsKind lhs_kind;
  bool constant_known;
  /// Parameter names with their defaults, as JSON.
  Json parameters;
  int min_dim = 1;
  int max_dim = 64;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& id);

/// Builds the instance for `id` in dimension `dim`. `params` may carry
/// "measure", "body", "target" specs and scalars; missing entries use the
/// entry's reference configuration. Hypotheses are checked on a pilot grid
/// drawn from `seed`; a violation throws HypothesisViolated.
InequalityInstance instantiate(const std::string& id, int dim, const Json& params = Json::object(),
                               std::uint64_t seed = 0);

/// Minimal margin per hypothesis over `points` (interior checks) and
/// `boundary_points` (boundary checks), plus the static checks.
std::vector<HypothesisResult> hypothesis_margins(const InequalityInstance& instance, const PointSet& points,
                                                 const PointSet& boundary_points = PointSet());

/// Small-dimension condition (1/2 - 1/N) d >= 3 for N <= 0 (always true at N = 0).
bool small_dimension_condition(double N, int d);

/// Closed-form rho_p of the polynomially decaying product metric.
double rho_poly_bounded(double p, double R);
double rho_poly_monotone(double p, double lambda);

}  // namespace riccikit
