#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riccikit/inequality_catalog.hpp"

#include <cmath>
#include <set>

using namespace riccikit;

namespace {

ErrorCode code_of(const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("every catalog id instantiates with its defaults") {
  std::set<std::string> seen;
  for (const CatalogEntry& e : catalog()) {
    CAPTURE(e.id);
    CHECK(seen.insert(e.id).second);
    const int d = std::max(e.min_dim, std::min(e.max_dim, 8));
    const InequalityInstance in = instantiate(e.id, d, Json::object(), 7);
    CHECK(in.dim == d);
    CHECK(in.measure.dim == d);
    for (const HypothesisResult& r : in.static_checks) {
      CAPTURE(r.name);
      CHECK(r.passed);
    }
    const PointSet x = sample_measure(in.measure, 8, 1);
    for (int j = 0; j < x.cols(); ++j) {
      if (in.measure.on_boundary) continue;
      const Mat w = in.rhs_weight(x.col(j));
      CHECK(w.rows() == d);
      CHECK(min_eigenvalue(w) >= -1e-12);
    }
  }
  CHECK(seen.size() == 22);
}

TEST_CASE("unknown ids and bad dimensions") {
  CHECK(code_of([] { instantiate("nope", 2); }) == ErrorCode::UnknownId);
  CHECK(code_of([] { instantiate("hardy_boundary", 5); }) == ErrorCode::SchemaViolation);
  CHECK(code_of([] { instantiate("compact_bl", 2); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("closed-form weights") {
  SUBCASE("poly_product part 2") {
    const InequalityInstance in = instantiate("poly_product", 3, Json{{"part", 2}});
    Vec x(3);
    x << 0.5, 1.0, 2.0;
    const Mat w = in.rhs_constant * in.rhs_weight(x);
    CHECK(w(0, 0) == doctest::Approx(1.0));
    CHECK(w(1, 1) == doctest::Approx(4.0));
    CHECK(w(2, 2) == doctest::Approx(16.0));
    CHECK(std::abs(w(0, 1)) < 1e-14);
  }
  SUBCASE("classical Gaussian") {
    const InequalityInstance in = instantiate("classical_bl", 4);
    const PointSet x = sample_measure(in.measure, 64, 3);
    const auto margins = hypothesis_margins(in, x);
    REQUIRE(margins.size() == 1);
    CHECK(margins[0].margin == doctest::Approx(1.0).epsilon(1e-6));
    CHECK((in.rhs_weight(x.col(0)) - Mat::Identity(4, 4)).norm() < 1e-6);
  }
  SUBCASE("hardy boundary weight on the unit ball at N = 0") {
    const InequalityInstance in = instantiate("hardy_boundary", 6, Json{{"N", 0.0}});
    REQUIRE(in.boundary.has_value());
    Vec y = Vec::Zero(6);
    y(2) = 1.0;
    // d/<y,n> times 1/((d/2) <y,n>/|y|^2) with <y,n> = |y| = 1.
    CHECK(in.boundary->weight(y) == doctest::Approx(6.0 / 3.0));
    CHECK(in.lhs_scale == doctest::Approx(1.0));
    CHECK(in.rhs_weight(y)(0, 0) == doctest::Approx(4.0 / 36.0));
  }
  SUBCASE("hardy_n0 matches hardy_boundary at N = 0") {
    const InequalityInstance a = instantiate("hardy_n0", 7);
    const InequalityInstance b = instantiate("hardy_boundary", 7, Json{{"N", 0.0}});
    Vec y = Vec::Constant(7, 1.0 / std::sqrt(7.0));
    CHECK(a.boundary->weight(y) == doctest::Approx(b.boundary->weight(y)));
  }
  SUBCASE("cone variance constant") {
    const InequalityInstance in = instantiate("cone_variance", 4, Json{{"body", {{"kind", "simplex"}, {"scale", 2.0}}}});
    Vec y = Vec::Constant(4, 0.5);
    // lambda = 1/2, <y,n> = 2/sqrt(4) = 1, |y|^2 = 1.
    CHECK(in.boundary->weight(y) == doctest::Approx(4.0 / (0.25 * 3.0 * 2.0)));
    CHECK_FALSE(in.boundary->uses_function);
  }
  SUBCASE("l1 constant forms agree on the simplex") {
    for (int d : {3, 5, 9}) {
      const double t = 1.5;
      const Json body = {{"kind", "simplex"}, {"scale", t}};
      const double k1 = instantiate("l1_type", d, Json{{"body", body}, {"form", 1}}).notes.at("poincare_rhs");
      const double k2 = instantiate("l1_type", d, Json{{"body", body}, {"form", 2}}).notes.at("poincare_rhs");
      const double exact = 2.0 * t * t * (d + 3.0) / (d * (d + 1.0) * (d + 2.0));
      CHECK(k1 == doctest::Approx(exact));
      CHECK(k2 == doctest::Approx(exact));
    }
  }
}

TEST_CASE("rho closed forms") {
  // At p = 1/2 the constant 2/rho is 4/lambda.
  CHECK(rho_poly_monotone(0.5, 1.0) == doctest::Approx(0.5));
  CHECK(2.0 / rho_poly_monotone(0.5, 2.0) == doctest::Approx(2.0));
  CHECK(rho_poly_bounded(0.5, 1.0) == doctest::Approx(0.25));
  // Continuity at p = 1/2.
  CHECK(rho_poly_monotone(0.5 + 1e-7, 1.0) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(small_dimension_condition(0.0, 6));
  CHECK(small_dimension_condition(-6.0, 9));
  CHECK_FALSE(small_dimension_condition(-6.0, 4));
}

TEST_CASE("poly_product parts 4 and 5 satisfy their curvature bound") {
  for (int part : {4, 5}) {
    CAPTURE(part);
    const InequalityInstance in = instantiate("poly_product", 3, Json{{"part", part}});
    const PointSet x = sample_measure(in.measure, 2048, 11);
    for (const HypothesisResult& r : hypothesis_margins(in, x)) {
      CAPTURE(r.name);
      CHECK(r.margin >= -1e-8);
    }
  }
}

TEST_CASE("violated hypotheses are rejected") {
  // Rates below lambda break the slope condition of the corollary.
  const Json slow = {{"kind", "product"}, {"coord", {{"kind", "exponential"}, {"rate", 0.5}}}};
  CHECK(code_of([&] { instantiate("exp_product", 2, Json{{"measure", slow}, {"lambda", 1.0}}); }) ==
        ErrorCode::HypothesisViolated);
  // A double-well marginal is not log-concave.
  const Json well = {{"kind", "product"},
                     {"coord", {{"kind", "logcosh_mix"}, {"alpha", 0.1}, {"beta", -0.5}, {"gamma", 1.0}, {"delta", 0.0}}}};
  CHECK(code_of([&] { instantiate("classical_bl", 2, Json{{"measure", well}}); }) == ErrorCode::HypothesisViolated);
  CHECK(code_of([&] { instantiate("bakry_emery_lsi", 2, Json{{"rho", 2.0}}); }) == ErrorCode::HypothesisViolated);
  CHECK(code_of([&] { instantiate("strong_boundary", 8, Json{{"theta", 0.75}}); }) == ErrorCode::HypothesisViolated);
}

TEST_CASE("negative-dimension weight is dominated by the Bakry-Emery weight") {
  const InequalityInstance neg = instantiate("negdim_bl", 3);
  const PointSet x = sample_measure(neg.measure, 256, 5);
  for (int j = 0; j < x.cols(); ++j) {
    const Vec p = x.col(j);
    const Mat inv = spd_inverse(hessian_of(neg.measure.potential, p));
    CHECK(min_eigenvalue(inv - neg.rhs_weight(p)) >= -1e-9);
  }
}

TEST_CASE("compact BL static checks on the uniform interval") {
  const InequalityInstance in = instantiate("compact_bl", 1);
  CHECK(in.notes.at("R") == doctest::Approx(0.5));
  CHECK(in.notes.at("ke_residual") < 1e-8);
  CHECK(in.notes.at("ke_max_hessian") <= 2.0 * 0.25 + 1e-9);
  Vec x(1);
  x << 0.1;
  CHECK(in.rhs_constant * in.rhs_weight(x)(0, 0) == doctest::Approx(4.0 * 0.25));
}

TEST_CASE("dim_bl_boundary parts") {
  const InequalityInstance p1 = instantiate("dim_bl_boundary", 4);
  CHECK(p1.lhs_scale == doctest::Approx(-4.0 / -5.0));
  CHECK(p1.boundary.has_value());
  const InequalityInstance p2 = instantiate("dim_bl_boundary", 4, Json{{"part", 2}});
  CHECK_FALSE(p2.boundary.has_value());
  const InequalityInstance p3 = instantiate("dim_bl_boundary", 4, Json{{"part", 3}});
  CHECK(p3.lhs_kind == LhsKind::L2Dirichlet);
  CHECK(p3.family == FunctionFamily::Dirichlet);
  Vec y = Vec::Zero(4);
  y(0) = 1.0;
  CHECK(p1.boundary->weight(y) > 0.0);
}
