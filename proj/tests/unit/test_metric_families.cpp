#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riccikit/metric_families.hpp"
#include "support/fixtures.hpp"

#include <cmath>

using namespace riccikit;
using fixtures::max_abs;

TEST_CASE("hessian ricci of the identity gaussian transport") {
  const PotentialField q = quadratic_field(Mat::Identity(3, 3));
  HessianMetricData data{q, q, q, nullptr, true};
  const Vec x = (Vec(3) << 0.2, -0.5, 1.0).finished();
  const HessianRicci r = hessian_ricci(data, x);
  CHECK(max_abs(r.H) < 1e-12);
  CHECK(max_abs(r.ric - Mat::Identity(3, 3)) < 1e-12);
  CHECK(max_abs(hessian_H_lower_bound(data, x)) < 1e-12);
  CHECK(max_abs(refined_Q(data, x) - Mat::Identity(3, 3)) < 1e-12);
}

TEST_CASE("one-dimensional power potential") {
  for (double q : {1.2, 1.5, 2.0, 3.0}) {
    for (double c : {0.5, 1.0, 2.0}) {
      const Potential1D v = potentials::power(c, q);
      const PotentialField f = separable_field({v});
      HessianMetricData data{f, f, {}, nullptr, true};
      for (double x : {0.3, 0.8, 1.7, 3.1}) {
        const double expected = c * q * q / 2 * std::pow(x, q - 2) + q * (2 - q) / (4 * x * x);
        CHECK(ric_1d_exact(v, x) == doctest::Approx(expected).epsilon(1e-12));
        const Vec p = Vec::Constant(1, x);
        CHECK(hessian_ricci(data, p).ric(0, 0) == doctest::Approx(expected).epsilon(1e-9));
        // Cauchy–Schwarz is tight in one dimension.
        CHECK(hessian_H_lower_bound(data, p)(0, 0) == doctest::Approx(hessian_ricci(data, p).H(0, 0)).epsilon(1e-9));
      }
    }
  }
  CHECK(ric_1d_exact(potentials::power(1.0, 1.5), 1.0) == doctest::Approx(21.0 / 16.0));
  CHECK(ric_1d_exact(potentials::quadratic(), 0.4) == doctest::Approx(1.0));
}

TEST_CASE("degenerate one-dimensional hessian") {
  try {
    ric_1d_exact(potentials::exponential(1.0), 1.0);
    FAIL("expected DegenerateHessian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateHessian);
  }
}

TEST_CASE("hessian metric lower bound and refined weight are dominated") {
  Rng rng(17);
  for (int d : {2, 3}) {
    for (int pair = 0; pair < 5; ++pair) {
      const PotentialField phi = fixtures::smooth_convex(d, 100 + pair);
      const PotentialField V = fixtures::smooth_convex(d, 200 + pair);
      // W is implied by the Monge–Ampère equation, as the lower bound requires.
      HessianMetricData data{phi, V, {}, nullptr, true};
      for (int t = 0; t < 20; ++t) {
        const Vec x = fixtures::random_point(d, rng, -1.5, 1.5);
        const HessianRicci r = hessian_ricci(data, x);
        CHECK(min_eigenvalue(r.H - hessian_H_lower_bound(data, x)) >= -1e-8);
        CHECK(min_eigenvalue(r.ric - refined_Q(data, x)) >= -1e-8);
      }
    }
  }
}

TEST_CASE("constant target weight reduces to the negative-dimensional weight") {
  const int d = 2;
  const PotentialField phi = fixtures::smooth_convex(d, 5);
  const PotentialField V = fixtures::smooth_convex(d, 6);
  HessianMetricData data{phi, V, constant_field(d), nullptr, true};
  const Vec x = (Vec(2) << 0.1, 0.4).finished();
  const Vec g = V.grad(x);
  CHECK(max_abs(refined_Q(data, x) - (0.5 * V.hess(x) + g * g.transpose() / (4.0 * d))) < 1e-12);
}

TEST_CASE("implied target agrees with tensor pipeline") {
  Rng rng(3);
  for (int d : {1, 2, 3}) {
    const PotentialField phi = fixtures::smooth_convex(d, 40 + d);
    const PotentialField V = fixtures::smooth_convex(d, 50 + d);
    HessianMetricData data{phi, V, {}, nullptr, true};
    for (int t = 0; t < 10; ++t) {
      const Vec x = fixtures::random_point(d, rng, -1, 1);
      const Mat closed = hessian_ricci(data, x).ric;
      const Mat fd = generalized_ricci(hessian_metric(phi), V, x).ric_gmu;
      CHECK(max_abs(closed - fd) < 1e-4);
    }
  }
}

TEST_CASE("separable hessian metric matches the product formula") {
  const Potential1D a = potentials::logcosh_mix(1.0, 0.5, 1.0, 0.0);
  const PotentialField phi = separable_field({a, a});
  const PotentialField V = fixtures::smooth_convex(2, 77);
  HessianMetricData data{phi, V, {}, nullptr, true};
  ProductMetricData prod;
  Profile prof;
  prof.u = [a](double t) { return 1.0 / std::sqrt(a.d2(t)); };
  prof.du = [a](double t) { return -0.5 * a.d3(t) * std::pow(a.d2(t), -1.5); };
  prof.d2u = [a](double t) {
    return -0.5 * a.d4(t) * std::pow(a.d2(t), -1.5) + 0.75 * a.d3(t) * a.d3(t) * std::pow(a.d2(t), -2.5);
  };
  prod.profiles = {prof, prof};
  const Vec x = (Vec(2) << 0.3, -0.7).finished();
  const MetricField g = product_metric(prod);
  const Mat expected = generalized_ricci(hessian_metric(phi), V, x).ric_gmu;
  CHECK(max_abs(product_ricci(prod, V, x) - hessian_ricci(data, x).ric) < 1e-8);
  CHECK(max_abs(product_ricci(prod, V, x) - expected) < 1e-4);
  (void)g;
}

TEST_CASE("product ricci examples") {
  const PotentialField V = quadratic_field(Mat::Zero(3, 3), Vec::Ones(3));
  const Mat r = product_ricci(uniform_product(3, power_profile(0.5)), V, Vec::Ones(3));
  CHECK(max_abs(r - 0.75 * Mat::Identity(3, 3)) < 1e-14);
  const PotentialField V2 = quadratic_field(Mat::Zero(2, 2), Vec::Constant(2, 2.0));
  const Mat e = product_ricci(uniform_product(2, exp_profile(1.0)), V2, (Vec(2) << 0.4, 1.1).finished());
  CHECK(max_abs(e - Mat::Identity(2, 2)) < 1e-14);
  const Mat id = product_ricci(uniform_product(2, power_profile(0.0)), fixtures::smooth_convex(2, 1), Vec::Ones(2));
  CHECK(max_abs(id - fixtures::smooth_convex(2, 1).hess(Vec::Ones(2))) < 1e-14);
  try {
    product_ricci(uniform_product(1, power_profile(0.5)), separable_field({potentials::exponential(1)}),
                  Vec::Constant(1, -1.0));
    FAIL("expected ProfileNotPositive");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::ProfileNotPositive);
  }
}

TEST_CASE("entropic route collapses to the one-dimensional formula") {
  const PotentialField gauss = quadratic_field(Mat::Identity(1, 1));
  CHECK(entropic_hessian_ricci(gauss, Vec::Constant(1, 0.3))(0, 0) == doctest::Approx(1.0).epsilon(1e-7));
  const PotentialField g3 = quadratic_field(Mat::Identity(3, 3));
  CHECK(max_abs(entropic_hessian_ricci(g3, Vec::Constant(3, 0.2)) - Mat::Identity(3, 3)) < 1e-7);
  const Potential1D v = potentials::logcosh_mix(0.7, 1.0, 1.3, 0.2);
  const PotentialField f = separable_field({v});
  for (double x : {-1.5, -0.3, 0.0, 0.8, 2.0}) {
    CHECK(entropic_hessian_ricci(f, Vec::Constant(1, x))(0, 0) == doctest::Approx(ric_1d_exact(v, x)).epsilon(1e-7));
  }
}

TEST_CASE("conformal generalized ricci") {
  ConformalMetricData flat;
  flat.phi = constant_field(3);
  const PotentialField V = quadratic_field(Mat::Identity(3, 3));
  CHECK(max_abs(conformal_ricci_N(flat, V, kInfinity, Vec::Constant(3, 0.4)) - Mat::Identity(3, 3)) < 1e-14);

  Rng rng(4);
  for (int d : {3, 6}) {
    const ConformalMetricData data = radial_conformal(d, 0.7, 1e-2);
    const PotentialField W = fixtures::smooth_convex(d, 9);
    for (double N : {kInfinity, 0.0, -2.0, 2.0 * d}) {
      for (int t = 0; t < 5; ++t) {
        const Vec x = fixtures::random_point(d, rng, 0.2, 0.9);
        const CurvaturePoint fd = generalized_ricci(conformal_metric(data), W, x, N);
        CHECK(max_abs(conformal_ricci_N(data, W, N, x) - fd.ric_gmu_N) < 1e-4);
      }
    }
  }
}

TEST_CASE("radial conformal eigenvalues") {
  const int d = 8;
  const double N = -8;
  const double theta = -(d - N) / (2 * N);
  CHECK(theta == doctest::Approx(1.0));
  const RadialEigenvalues ev = radial_conformal_eigenvalues(theta, 0.0, N, d, 2.0);
  CHECK(ev.radial == doctest::Approx(1.0));
  CHECK(ev.radial * 4.0 == doctest::Approx(-d * (d - N) / (4 * N)));
  CHECK(ev.tangential == doctest::Approx(6.0 / 4.0));
  CHECK(ev.radial_exact == doctest::Approx(ev.radial));
  const RadialEigenvalues z = radial_conformal_eigenvalues(0.0, 1e-3, N, d, 1.0);
  CHECK(z.radial == 0.0);
  CHECK(z.tangential == 0.0);

  // The matrix route with V = 0 splits into the same radial / tangential values.
  for (double eps : {1e-3, 0.0}) {
    const double e = eps > 0 ? eps : 1e-14;
    const ConformalMetricData data = radial_conformal(d, theta, e);
    Vec x = Vec::Zero(d);
    x(0) = 0.6;
    const Mat ric = conformal_ricci_N(data, constant_field(d), N, x);
    const RadialEigenvalues r = radial_conformal_eigenvalues(theta, e, N, d, 0.6);
    CHECK(ric(0, 0) == doctest::Approx(r.radial_exact).epsilon(1e-12));
    CHECK(ric(1, 1) == doctest::Approx(r.tangential_exact).epsilon(1e-12));
  }

  // At theta = -(d - N)/(2N) the radial value is -d(d - N)/(4N); the
  // tangential value dominates it exactly when (1/2 - 1/N) d >= 3.
  for (int dd = 3; dd <= 12; ++dd) {
    for (double n : {-0.5, -1.0, -3.0, -double(dd), -20.0}) {
      const double th = -(dd - n) / (2 * n);
      const RadialEigenvalues r = radial_conformal_eigenvalues(th, 0.0, n, dd, 1.0);
      CHECK(r.radial == doctest::Approx(-dd * (dd - n) / (4 * n)));
      CHECK(1 + th * n / (dd - n) >= 0.0);
      const bool dominated = r.tangential >= r.radial - 1e-12;
      const bool small = (0.5 - 1.0 / n) * dd >= 3 - 1e-12;
      CHECK(dominated == small);
    }
  }
}

TEST_CASE("conformal boundary quantities") {
  ConformalMetricData flat;
  flat.phi = constant_field(3);
  const Vec x = (Vec(3) << 1, 0, 0).finished();
  const Vec n = x;
  const Mat II0 = Mat::Identity(3, 3) - n * n.transpose();
  const ConformalBoundary b0 = conformal_boundary(flat, constant_field(3), x, n, II0, 2.0);
  CHECK(max_abs(b0.II - II0) == 0.0);
  CHECK(b0.H == 2.0);
  CHECK(b0.measure_factor == 1.0);

  const int d = 5;
  Vec y = Vec::Zero(d);
  y(1) = 1.0;
  const Mat tan = Mat::Identity(d, d) - y * y.transpose();
  for (double theta : {0.5, 1.0, 1.5}) {
    const ConformalMetricData data = radial_conformal(d, theta, 1e-14);
    const ConformalBoundary b = conformal_boundary(data, constant_field(d), y, y, tan, d - 1.0);
    CHECK(b.H == doctest::Approx(d - 1.0 + theta).epsilon(1e-10));
    const double lo = min_eigenvalue(b.II + y * y.transpose());
    CHECK((lo >= -1e-10) == (theta <= 1.0));
  }
  try {
    conformal_boundary(flat, constant_field(3), x, 2.0 * n, II0, 2.0);
    FAIL("expected NonUnitNormal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonUnitNormal);
  }
}
