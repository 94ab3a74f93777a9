#pragma once

#include "riccikit/fields.hpp"
#include "riccikit/rng.hpp"

#include <cmath>

namespace fixtures {

using riccikit::Mat;
using riccikit::PotentialField;
using riccikit::Vec;

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

inline double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

inline double log_cosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2 * a)) - std::log(2.0);
}

inline Mat random_spd(int d, riccikit::Rng& rng, double floor) {
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.uniform(-0.5, 0.5);
  return a * a.transpose() + floor * Mat::Identity(d, d);
}

/// 1/2 x^T A x + b.x + beta sum log cosh(x_i) + gamma softplus(c.x), all
/// derivatives analytic.
inline PotentialField smooth_convex(int d, std::uint64_t seed, double floor = 0.5) {
  riccikit::Rng rng(seed);
  const Mat A = random_spd(d, rng, floor);
  Vec b(d), c(d);
  for (int i = 0; i < d; ++i) b(i) = rng.uniform(-0.3, 0.3);
  for (int i = 0; i < d; ++i) c(i) = rng.uniform(-1.0, 1.0);
  const double beta = rng.uniform(0.2, 0.8);
  const double gamma = rng.uniform(0.2, 0.8);
  PotentialField f;
  f.dim = d;
  f.convex = true;
  f.value = [=](const Vec& x) {
    double s = 0.5 * x.dot(A * x) + b.dot(x) + gamma * softplus(c.dot(x));
    for (int i = 0; i < d; ++i) s += beta * log_cosh(x(i));
    return s;
  };
  f.grad = [=](const Vec& x) {
    Vec g = A * x + b + gamma * sigmoid(c.dot(x)) * c;
    for (int i = 0; i < d; ++i) g(i) += beta * std::tanh(x(i));
    return g;
  };
  f.hess = [=](const Vec& x) {
    const double s = sigmoid(c.dot(x));
    Mat h = A + gamma * s * (1 - s) * c * c.transpose();
    for (int i = 0; i < d; ++i) {
      const double sech = 1.0 / std::cosh(x(i));
      h(i, i) += beta * sech * sech;
    }
    return h;
  };
  f.third = [=](const Vec& x, int k) {
    const double s = sigmoid(c.dot(x));
    Mat t = gamma * s * (1 - s) * (1 - 2 * s) * c(k) * c * c.transpose();
    const double sech = 1.0 / std::cosh(x(k));
    t(k, k) += -2.0 * beta * sech * sech * std::tanh(x(k));
    return t;
  };
  f.fourth = [=](const Vec& x, int k, int l) {
    const double s = sigmoid(c.dot(x));
    Mat t = gamma * s * (1 - s) * (1 - 6 * s + 6 * s * s) * c(k) * c(l) * c * c.transpose();
    if (k == l) {
      const double sech = 1.0 / std::cosh(x(k));
      const double th = std::tanh(x(k));
      t(k, k) += -2.0 * beta * (std::pow(sech, 4) - 2 * sech * sech * th * th);
    }
    return t;
  };
  return f;
}

/// Smooth non-convex scalar with analytic gradient and Hessian.
inline PotentialField smooth_scalar(int d, std::uint64_t seed) {
  riccikit::Rng rng(seed);
  Vec a(d), w(d);
  for (int i = 0; i < d; ++i) a(i) = rng.uniform(-1, 1);
  for (int i = 0; i < d; ++i) w(i) = rng.uniform(-1, 1);
  PotentialField f;
  f.dim = d;
  f.value = [=](const Vec& x) { return std::sin(w.dot(x)) + 0.5 * a.dot(x) * a.dot(x); };
  f.grad = [=](const Vec& x) { return (std::cos(w.dot(x)) * w + a.dot(x) * a).eval(); };
  f.hess = [=](const Vec& x) { return (-std::sin(w.dot(x)) * w * w.transpose() + a * a.transpose()).eval(); };
  return f;
}

/// Copy of a field with every analytic derivative removed.
inline PotentialField values_only(const PotentialField& f) {
  PotentialField g;
  g.dim = f.dim;
  g.value = f.value;
  g.convex = f.convex;
  return g;
}

inline Vec random_point(int d, riccikit::Rng& rng, double lo, double hi) {
  Vec x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.uniform(lo, hi);
  return x;
}

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace fixtures
