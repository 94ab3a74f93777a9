#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riccikit/verification_engine.hpp"

#include <algorithm>
#include <cmath>

using namespace riccikit;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

EngineOptions quick(int n = 20000, std::uint64_t seed = 3) {
  EngineOptions o;
  o.samples = n;
  o.seed = seed;
  return o;
}

std::vector<double> column(const PointSet& x, int i) {
  std::vector<double> out(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) out[j] = x(i, j);
  return out;
}

const ReportRow& row_of(const VerificationReport& r, const std::string& f) {
  for (const ReportRow& row : r.rows) {
    if (row.function == f) return row;
  }
  FAIL("missing row " << f);
  return r.rows.front();
}

}  // namespace

TEST_CASE("suite gradients match finite differences") {
  Rng rng(4);
  for (int d : {1, 3, 6}) {
    PointSet x(d, 20);
    for (int j = 0; j < 20; ++j)
      for (int i = 0; i < d; ++i) x(i, j) = rng.uniform(-0.3, 0.3) + (i == 0 ? 0.1 : 0.0);
    for (const TestFunction& f : default_suite(d, 9)) CHECK(gradient_self_test(f, x) < 1e-6);
    for (const TestFunction& f : lipschitz_suite(d, 9, 1.0)) CHECK(gradient_self_test(f, x) < 1e-6);
    for (const TestFunction& f : dirichlet_suite(ConvexBody::ball(d, 1.0), 9)) {
      CHECK(gradient_self_test(f, x) < 1e-6);
      CHECK(f.vanishes_on_boundary);
    }
  }
  CHECK(default_suite(4, 1).size() == 4 + 2 + 6 + 2 + 5);
  CHECK(default_suite(6, 1).size() == 6 + 2 + 5 + 2 + 5);
}

TEST_CASE("Lipschitz normalization bounds the gradient on the support") {
  const int d = 4;
  const ConvexBody body = ConvexBody::simplex(d, 1.0);
  Rng rng(8);
  const PointSet x = body.sample_uniform(rng, 2000);
  for (const TestFunction& f : lipschitz_suite(d, 2, body.circumradius())) {
    for (int j = 0; j < x.cols(); ++j) CHECK(f.grad(x.col(j)).norm() <= 1.0 + 1e-12);
  }
}

TEST_CASE("samplers") {
  const int n = 40000;
  SUBCASE("uniform interval mean") {
    const Measure m = product_measure({potentials::uniform(0.0, 1.0)});
    const PointSet x = sample_measure(m, n, 1);
    CHECK(std::abs(x.row(0).mean() - 0.5) < 3.0 / std::sqrt(double(n)));
  }
  SUBCASE("exponential marginals") {
    const Measure m = product_measure(std::vector<Potential1D>(3, potentials::exponential(1.0)));
    const PointSet x = sample_measure(m, n, 2);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(x.row(i).mean() - 1.0) < 4.0 / std::sqrt(double(n)));
  }
  SUBCASE("mu_q against a quadrature CDF") {
    const Potential1D v = potentials::power(1.0, 1.5);
    const Measure m = product_measure({v});
    const PointSet x = sample_measure(m, n, 3);
    std::vector<double> xs = column(x, 0);
    std::sort(xs.begin(), xs.end());
    // Independent CDF: Simpson on a fine grid of exp(-x^1.5).
    const int grid = 200000;
    const double top = 40.0, h = top / grid;
    std::vector<double> cdf(grid + 1, 0.0);
    for (int k = 0; k < grid; ++k) {
      const double a = k * h, b = a + h, mid = a + h / 2;
      cdf[k + 1] = cdf[k] + h / 6.0 * (std::exp(-std::pow(a, 1.5)) + 4 * std::exp(-std::pow(mid, 1.5)) +
                                        std::exp(-std::pow(b, 1.5)));
    }
    double ks = 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = xs[j] / h;
      const int k = std::min(grid - 1, static_cast<int>(t));
      const double F = (cdf[k] + (t - k) * (cdf[k + 1] - cdf[k])) / cdf[grid];
      ks = std::max({ks, std::abs(F - double(j) / n), std::abs(F - double(j + 1) / n)});
    }
    CHECK(ks < 3.0 / std::sqrt(double(n)));
  }
  SUBCASE("sharding is independent of the worker count") {
    const Measure m = gaussian_measure(3);
    CHECK((sample_measure(m, 10000, 5, 1) - sample_measure(m, 10000, 5, 4)).norm() == 0.0);
  }
}

TEST_CASE("left-side estimators against closed forms") {
  const int n = 100000;
  SUBCASE("uniform variance") {
    const PointSet x = sample_measure(product_measure({potentials::uniform(0.0, 1.0)}), n, 11);
    const Estimate e = estimate_functional(LhsKind::Variance, column(x, 0), 200, 1);
    CHECK(std::abs(e.value - 1.0 / 12.0) < 4.0 * e.stderr);
    CHECK(e.stderr > 0.0);
  }
  SUBCASE("Gaussian variance") {
    const PointSet x = sample_measure(gaussian_measure(1), n, 12);
    const Estimate e = estimate_functional(LhsKind::Variance, column(x, 0), 200, 1);
    CHECK(std::abs(e.value - 1.0) < 4.0 * e.stderr);
  }
  SUBCASE("exponential variance and entropy") {
    const PointSet x = sample_measure(product_measure({potentials::exponential(1.0)}), n, 13);
    const std::vector<double> v = column(x, 0);
    const Estimate var = estimate_functional(LhsKind::Variance, v, 200, 1);
    CHECK(std::abs(var.value - 1.0) < 4.0 * var.stderr);
    // E x^2 log x^2 = 2 Gamma'(3) = 4 (3/2 - gamma); E x^2 = 2.
    const double exact = 4.0 * (1.5 - kEulerGamma) - 2.0 * std::log(2.0);
    const Estimate ent = estimate_functional(LhsKind::EntropyOfSquare, v, 200, 1);
    CHECK(std::abs(ent.value - exact) < 4.0 * ent.stderr);
  }
  SUBCASE("entropy linearizes to the variance") {
    const PointSet x = sample_measure(gaussian_measure(1), n, 14);
    const double eps = 1e-3;
    std::vector<double> v = column(x, 0), g(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) g[j] = 1.0 + eps * v[j];
    const double ent = estimate_functional(LhsKind::EntropyOfSquare, g, 10, 1).value;
    const double var = estimate_functional(LhsKind::Variance, v, 10, 1).value;
    CHECK(ent / (2.0 * eps * eps) == doctest::Approx(var).epsilon(0.01));
  }
  CHECK_THROWS_AS(estimate_functional(LhsKind::Variance, std::vector<double>(50, 1.0), 10, 1), Error);
}

TEST_CASE("right-side estimators") {
  SUBCASE("Gaussian linear equality case") {
    const InequalityInstance in = instantiate("classical_bl", 2);
    const VerificationReport r = check_inequality(in, quick());
    for (const ReportRow& row : r.rows) {
      CAPTURE(row.function);
      CHECK(row.status == "pass");
    }
    const ReportRow& x1 = row_of(r, "x1");
    CHECK(x1.rhs == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(x1.slack) < 4.0 * x1.lhs_err);
  }
  SUBCASE("poly_product part 2 in d = 1") {
    const InequalityInstance in = instantiate("poly_product", 1, Json{{"part", 2}});
    const VerificationReport r = check_inequality(in, quick(100000));
    const ReportRow& x1 = row_of(r, "x1");
    CHECK(std::abs(x1.rhs - 8.0) < 4.0 * x1.rhs_err);
    CHECK(std::abs(x1.lhs - 1.0) < 4.0 * x1.lhs_err);
  }
  SUBCASE("hardy_n0 boundary term by sphere moments") {
    for (int d : {3, 6}) {
      const InequalityInstance in = instantiate("hardy_n0", d);
      const VerificationReport r = check_inequality(in, quick(100000));
      const ReportRow& x1 = row_of(r, "x1");
      const double exact = 4.0 / (d * (d + 2.0)) + 2.0 / d;
      CHECK(std::abs(x1.rhs - exact) < 4.0 * x1.rhs_err);
      CHECK(std::abs(x1.lhs - 1.0 / (d + 2.0)) < 4.0 * x1.lhs_err);
    }
  }
  SUBCASE("Payne-Weinberger ratio on the ball") {
    const int d = 3;
    const VerificationReport r = check_inequality(instantiate("payne_weinberger", d), quick(100000));
    const ReportRow& x1 = row_of(r, "x1");
    CHECK(x1.rhs == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(x1.lhs - 0.25 / (d + 2.0)) < 4.0 * x1.lhs_err);
  }
  SUBCASE("cone variance uses exact facet quadrature") {
    const VerificationReport r = check_inequality(instantiate("cone_variance", 4), quick());
    const ReportRow& x1 = row_of(r, "x1");
    CHECK(x1.rhs_err == 0.0);
    // E_sigma |x|^2 / <x,n>^2 = 2d/(d+1) on the unit simplex facet.
    CHECK(x1.rhs == doctest::Approx(4.0 / 6.0 * 8.0 / 5.0));
    CHECK(std::abs(x1.lhs - 3.0 / 80.0) < 4.0 * x1.lhs_err);
  }
}

TEST_CASE("check_inequality rows and statuses") {
  SUBCASE("report-only rows and the Rayleigh row") {
    const VerificationReport r = check_inequality(instantiate("l1_type", 3), quick());
    for (const ReportRow& row : r.rows) CHECK(row.status == "report-only");
    const ReportRow& cp = row_of(r, "rayleigh_cp");
    CHECK(cp.lhs > 0.0);
    CHECK(report_exit_code(r) == 0);
  }
  SUBCASE("function filter") {
    EngineOptions o = quick();
    o.functions = {"x1", "sum"};
    const VerificationReport r = check_inequality(instantiate("classical_bl", 3), o);
    CHECK(r.rows.size() == 2);
  }
  SUBCASE("determinism across workers") {
    const InequalityInstance in = instantiate("hardy_boundary", 6, Json{{"N", -1.0}});
    EngineOptions a = quick(30000), b = quick(30000);
    b.workers = 3;
    const VerificationReport ra = check_inequality(in, a), rb = check_inequality(in, b);
    REQUIRE(ra.rows.size() == rb.rows.size());
    for (std::size_t i = 0; i < ra.rows.size(); ++i) {
      CHECK(ra.rows[i].lhs == rb.rows[i].lhs);
      CHECK(ra.rows[i].rhs == rb.rows[i].rhs);
      CHECK(ra.rows[i].rhs_err == rb.rows[i].rhs_err);
    }
  }
  SUBCASE("slack rule and exit codes") {
    CHECK(slack_status(1.0, 0.0, 0.99, 0.0, 0.02) == "pass");
    CHECK(slack_status(1.0, 0.0, 0.97, 0.0, 0.02) == "fail");
    CHECK(slack_status(1.0, 0.02, 0.95, 0.0, 0.02) == "pass");
    VerificationReport rep;
    rep.rows.resize(2);
    rep.rows[0].status = "pass";
    rep.rows[1].status = "error";
    CHECK(report_exit_code(rep) == 3);
    rep.rows[0].status = "fail";
    CHECK(report_exit_code(rep) == 1);
    rep.rows[1].status = "report-only";
    rep.rows[0].status = "pass";
    CHECK(report_exit_code(rep) == 0);
  }
}

TEST_CASE("refined weight stays within twice the classical weight") {
  const InequalityInstance refined = instantiate("refined_bl", 1);
  InequalityInstance classical = instantiate("classical_bl", 1, Json{{"measure", catalog_entry("refined_bl").parameters["measure"]}});
  const VerificationReport a = check_inequality(refined, quick());
  const VerificationReport b = check_inequality(classical, quick());
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].rhs <= 2.0 * b.rows[i].rhs + 1e-8);
}

TEST_CASE("spectral gap oracle") {
  CHECK(spectral_gap_1d(potentials::uniform(0.0, 1.0), 0.0, 1.0).lambda1 == doctest::Approx(kPi * kPi).epsilon(1e-4 / (kPi * kPi)));
  CHECK(std::abs(spectral_gap_1d(potentials::quadratic(), -8.0, 8.0).lambda1 - 1.0) < 1e-4);
  // -u'' + u' = lambda u on [0, L] with Neumann ends: lambda_1 = 1/4 + (pi/L)^2.
  const double gap = spectral_gap_1d(potentials::exponential(1.0), 0.0, 40.0).lambda1;
  CHECK(std::abs(gap - (0.25 + kPi * kPi / 1600.0)) < 1e-4);
  CHECK_THROWS_AS(spectral_gap_1d(potentials::quadratic(), -1.0, 1.0, 100), Error);
}

TEST_CASE("psd_verify and Rayleigh bound") {
  Rng rng(3);
  PointSet x(2, 10);
  for (int j = 0; j < 10; ++j) x.col(j) = Vec::Constant(2, rng.uniform());
  CHECK(psd_verify([](const Vec&) { return Mat(Mat::Identity(2, 2)); }, x).min_eigenvalue == 1.0);
  const PsdResult bad = psd_verify([](const Vec&) { return Mat(Vec(Eigen::Vector2d(1.0, -1.0)).asDiagonal()); }, x);
  CHECK(bad.min_eigenvalue == -1.0);
  CHECK(bad.location.size() == 2);

  const PointSet g = sample_measure(gaussian_measure(3), 20000, 1);
  CHECK(rayleigh_lower_bound(g) == doctest::Approx(1.0).epsilon(0.05));
  const PointSet u = sample_measure(product_measure({potentials::uniform(0.0, 1.0)}), 20000, 1);
  const double cp = rayleigh_lower_bound(u);
  CHECK(cp > 1.0 / 12.0);
  CHECK(cp < 1.0 / (kPi * kPi) * 1.02);
}
