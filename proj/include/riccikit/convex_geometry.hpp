#pragma once

#include "riccikit/common.hpp"
#include "riccikit/numerics.hpp"
#include "riccikit/rng.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace riccikit {

enum class BodyKind { Ball, Box, Simplex, LpBall, Curve2D };

std::string_view to_string(BodyKind kind);

/// Closed planar curve t -> gamma(t), t in [0, 2 pi), star-shaped about the
/// origin and traversed counter-clockwise.
struct PlaneCurve {
  std::function<Eigen::Vector2d(double)> point;
  std::function<Eigen::Vector2d(double)> velocity;
  std::function<Eigen::Vector2d(double)> acceleration;
};

struct GaugeNormal {
  double gauge = 0.0;
  Vec normal;
};

struct BoundaryCurvature {
  /// Second fundamental form on the full space, zero along the normal.
  Mat II;
  double H = 0.0;
};

/// Convex body from a closed catalog. Box is the centered box with the given
/// half widths; Simplex is {x >= 0, sum x <= t}, whose relative boundary is
/// the facet sum x = t; LpBall is {sum |x_i|^p <= r^p}.
class ConvexBody {
 public:
  static ConvexBody ball(int dim, double radius = 1.0);
  static ConvexBody box(const Vec& half_widths);
  static ConvexBody simplex(int dim, double scale = 1.0);
  static ConvexBody lp_ball(int dim, double p, double radius = 1.0);
  static ConvexBody curve(PlaneCurve curve);
  static ConvexBody ellipse(double a, double b);

  BodyKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double radius() const { return radius_; }
  double exponent() const { return p_; }
  const Vec& half_widths() const { return half_; }

  /// Minkowski functional; for the simplex it is defined on the closed orthant.
  double gauge(const Vec& x) const;
  GaugeNormal gauge_and_normal(const Vec& x) const;
  bool contains(const Vec& x) const;
  /// Radial projection x / p(x).
  Vec project(const Vec& x) const;

  BoundaryCurvature boundary_curvature(const Vec& x) const;

  double volume() const;
  double circumradius() const;
  /// Half widths of an axis-aligned box containing the body.
  Vec bounding_box() const;

  /// Uniform points in the body; columns are points. Exact for ball, box,
  /// simplex; rejection from the bounding box otherwise.
  PointSet sample_uniform(Rng& rng, int count, int budget_factor = 1000) const;
  /// Cone measure: uniform points pushed to the boundary by x -> x / p(x).
  PointSet sample_cone(Rng& rng, int count) const;

  /// Angle ||dT|| for T(x) = x / p(x): |x| / (p(x) <x, n(T x)>).
  double polar_map_norm(const Vec& x) const;

 private:
  ConvexBody() = default;
  double curve_angle_parameter(double angle) const;

  BodyKind kind_ = BodyKind::Ball;
  int dim_ = 0;
  double radius_ = 1.0;
  double p_ = 2.0;
  Vec half_;
  std::shared_ptr<const PlaneCurve> curve_;
};

struct DiagonalityBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Empirical inf/sup of <n, e_i>/<n, x> over boundary samples and coordinates.
DiagonalityBounds diagonality_bounds(const ConvexBody& body, const PointSet& boundary_points);

/// Direct sampler of the cone measure on the simplex facet: t times a
/// Dirichlet(1, ..., 1) vector.
PointSet sample_simplex_facet(const ConvexBody& body, Rng& rng, int count);

struct WeightedPoints {
  PointSet points;
  std::vector<double> weights;
};

/// Product quadrature for the cone measure on the simplex facet by stick
/// breaking: x_k = t (1 - s_1)...(1 - s_{k-1}) s_k with s_k ~ Beta(1, d - k).
/// Exact for polynomials of degree < 2 order in each factor.
WeightedPoints simplex_facet_quadrature(const ConvexBody& body, int order);

}  // namespace riccikit
