#include "riccikit/convex_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace riccikit {

namespace {

constexpr double kEdgeMargin = 1e-8;
constexpr double kTwoPi = 2.0 * M_PI;

double wrap_angle(double a) {
  a = std::fmod(a + M_PI, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a - M_PI;
}

double angle_of(const Eigen::Vector2d& v) { return std::atan2(v.y(), v.x()); }

void require_nonzero(const Vec& x) {
  if (x.norm() == 0.0) throw Error(ErrorCode::UndefinedAtOrigin, "gauge normal is undefined at the origin");
}

}  // namespace

std::string_view to_string(BodyKind kind) {
  switch (kind) {
    case BodyKind::Ball: return "ball";
    case BodyKind::Box: return "box";
    case BodyKind::Simplex: return "simplex";
    case BodyKind::LpBall: return "lp_ball";
    case BodyKind::Curve2D: return "curve2d";
  }
  return "unknown";
}

ConvexBody ConvexBody::ball(int dim, double radius) {
  if (dim < 1 || !(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball needs dim >= 1 and radius > 0");
  ConvexBody b;
  b.kind_ = BodyKind::Ball;
  b.dim_ = dim;
  b.radius_ = radius;
  return b;
}

ConvexBody ConvexBody::box(const Vec& half_widths) {
  if (half_widths.size() < 1 || !(half_widths.minCoeff() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "box half widths must be positive");
  }
  ConvexBody b;
  b.kind_ = BodyKind::Box;
  b.dim_ = static_cast<int>(half_widths.size());
  b.half_ = half_widths;
  b.radius_ = half_widths.maxCoeff();
  return b;
}

ConvexBody ConvexBody::simplex(int dim, double scale) {
  if (dim < 1 || !(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "simplex needs dim >= 1 and scale > 0");
  ConvexBody b;
  b.kind_ = BodyKind::Simplex;
  b.dim_ = dim;
  b.radius_ = scale;
  return b;
}

ConvexBody ConvexBody::lp_ball(int dim, double p, double radius) {
  if (dim < 1 || !(p > 1.0) || !(radius > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "lp ball needs dim >= 1, p > 1, radius > 0");
  }
  ConvexBody b;
  b.kind_ = BodyKind::LpBall;
  b.dim_ = dim;
  b.p_ = p;
  b.radius_ = radius;
  return b;
}

ConvexBody ConvexBody::curve(PlaneCurve curve) {
  if (!curve.point || !curve.velocity || !curve.acceleration) {
    throw Error(ErrorCode::InvalidArgument, "curve needs point, velocity and acceleration");
  }
  ConvexBody b;
  b.kind_ = BodyKind::Curve2D;
  b.dim_ = 2;
  b.curve_ = std::make_shared<const PlaneCurve>(std::move(curve));
  Vec half(2);
  half.setZero();
  double rmax = 0.0;
  const int n = 8192;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d g = b.curve_->point(kTwoPi * i / n);
    half(0) = std::max(half(0), std::abs(g.x()));
    half(1) = std::max(half(1), std::abs(g.y()));
    rmax = std::max(rmax, g.norm());
  }
  // The dense scan can miss the extremes by O(h^2); pad generously.
  b.half_ = half * (1.0 + 1e-4);
  b.radius_ = rmax;
  return b;
}

ConvexBody ConvexBody::ellipse(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "ellipse semi-axes must be positive");
  PlaneCurve c;
  c.point = [a, b](double t) { return Eigen::Vector2d(a * std::cos(t), b * std::sin(t)); };
  c.velocity = [a, b](double t) { return Eigen::Vector2d(-a * std::sin(t), b * std::cos(t)); };
  c.acceleration = [a, b](double t) { return Eigen::Vector2d(-a * std::cos(t), -b * std::sin(t)); };
  return curve(std::move(c));
}

double ConvexBody::curve_angle_parameter(double angle) const {
  // The polar angle of a star-shaped counter-clockwise curve is increasing in
  // t; bracket on a coarse grid, then safeguarded Newton.
  const int n = 256;
  auto residual = [&](double t) { return wrap_angle(angle_of(curve_->point(t)) - angle); };
  double lo = 0.0, hi = 0.0;
  double rlo = residual(0.0);
  bool found = false;
  for (int i = 1; i <= n && !found; ++i) {
    const double t = kTwoPi * i / n;
    const double r = residual(t);
    if (rlo <= 0.0 && r >= 0.0 && r - rlo < M_PI) {
      lo = kTwoPi * (i - 1) / n;
      hi = t;
      found = true;
    }
    rlo = r;
  }
  if (!found) throw Error(ErrorCode::InvalidArgument, "curve is not star-shaped about the origin");
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double r = residual(t);
    if (r == 0.0) return t;
    if (r < 0.0) lo = t; else hi = t;
    const Eigen::Vector2d g = curve_->point(t);
    const Eigen::Vector2d v = curve_->velocity(t);
    const double slope = (g.x() * v.y() - g.y() * v.x()) / g.squaredNorm();
    double next = slope > 0.0 ? t - r / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-15 * (1.0 + std::abs(t))) return next;
    t = next;
  }
  return t;
}

double ConvexBody::gauge(const Vec& x) const {
  if (x.size() != dim_) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
  switch (kind_) {
    case BodyKind::Ball: return x.norm() / radius_;
    case BodyKind::Box: return x.cwiseAbs().cwiseQuotient(half_).maxCoeff();
    case BodyKind::Simplex:
      if (x.minCoeff() < 0.0) throw Error(ErrorCode::InvalidArgument, "simplex gauge is defined on the orthant");
      return x.sum() / radius_;
    case BodyKind::LpBall: {
      const double m = x.cwiseAbs().maxCoeff();
      if (m == 0.0) return 0.0;
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += std::pow(std::abs(x(i)) / m, p_);
      return m * std::pow(s, 1.0 / p_) / radius_;
    }
    case BodyKind::Curve2D: {
      const double r = x.norm();
      if (r == 0.0) return 0.0;
      const double t = curve_angle_parameter(std::atan2(x(1), x(0)));
      return r / curve_->point(t).norm();
    }
  }
  return 0.0;
}

bool ConvexBody::contains(const Vec& x) const {
  if (kind_ == BodyKind::Simplex && x.minCoeff() < 0.0) return false;
  return gauge(x) <= 1.0;
}

Vec ConvexBody::project(const Vec& x) const {
  require_nonzero(x);
  return x / gauge(x);
}

GaugeNormal ConvexBody::gauge_and_normal(const Vec& x) const {
  require_nonzero(x);
  GaugeNormal out;
  out.gauge = gauge(x);
  const Vec y = x / out.gauge;
  Vec n = Vec::Zero(dim_);
  switch (kind_) {
    case BodyKind::Ball: n = y.normalized(); break;
    case BodyKind::Box: {
      int k = 0;
      y.cwiseAbs().cwiseQuotient(half_).maxCoeff(&k);
      n(k) = y(k) >= 0.0 ? 1.0 : -1.0;
      break;
    }
    case BodyKind::Simplex: n.setConstant(1.0 / std::sqrt(static_cast<double>(dim_))); break;
    case BodyKind::LpBall: {
      const double m = y.cwiseAbs().maxCoeff();
      for (int i = 0; i < dim_; ++i) {
        const double a = std::abs(y(i)) / m;
        n(i) = (y(i) >= 0.0 ? 1.0 : -1.0) * std::pow(a, p_ - 1.0);
      }
      n.normalize();
      break;
    }
    case BodyKind::Curve2D: {
      const double t = curve_angle_parameter(std::atan2(x(1), x(0)));
      const Eigen::Vector2d v = curve_->velocity(t);
      n(0) = v.y();
      n(1) = -v.x();
      n.normalize();
      break;
    }
  }
  out.normal = n;
  return out;
}

BoundaryCurvature ConvexBody::boundary_curvature(const Vec& x) const {
  require_nonzero(x);
  const double g = gauge(x);
  if (std::abs(g - 1.0) > 1e-8) throw Error(ErrorCode::InvalidArgument, "point is not on the boundary");
  const Vec y = x / g;
  const Mat id = Mat::Identity(dim_, dim_);
  BoundaryCurvature out;
  out.II = Mat::Zero(dim_, dim_);
  switch (kind_) {
    case BodyKind::Ball: {
      const Vec n = y.normalized();
      out.II = (id - n * n.transpose()) / radius_;
      break;
    }
    case BodyKind::Box: {
      const Vec r = y.cwiseAbs().cwiseQuotient(half_);
      int active = 0;
      for (int i = 0; i < dim_; ++i) active += r(i) > 1.0 - kEdgeMargin;
      if (active > 1) throw Error(ErrorCode::NonSmoothBoundaryPoint, "box edge or corner");
      break;
    }
    case BodyKind::Simplex:
      if (y.minCoeff() < kEdgeMargin * radius_) {
        throw Error(ErrorCode::NonSmoothBoundaryPoint, "simplex facet edge");
      }
      break;
    case BodyKind::LpBall: {
      const double scale = radius_;
      Vec grad(dim_), diag(dim_);
      for (int i = 0; i < dim_; ++i) {
        const double a = std::abs(y(i)) / scale;
        if (p_ < 2.0 && a < kEdgeMargin) {
          throw Error(ErrorCode::NonSmoothBoundaryPoint, "lp ball with p < 2 is not twice differentiable on an axis plane");
        }
        grad(i) = (y(i) >= 0.0 ? 1.0 : -1.0) * p_ * std::pow(a, p_ - 1.0) / scale;
        diag(i) = p_ * (p_ - 1.0) * std::pow(a, p_ - 2.0) / (scale * scale);
      }
      const Vec n = grad.normalized();
      const Mat proj = id - n * n.transpose();
      out.II = symmetrize(proj * diag.asDiagonal() * proj / grad.norm());
      break;
    }
    case BodyKind::Curve2D: {
      const double t = curve_angle_parameter(std::atan2(x(1), x(0)));
      const Eigen::Vector2d v = curve_->velocity(t);
      const Eigen::Vector2d a = curve_->acceleration(t);
      const double speed = v.norm();
      const double kappa = (v.x() * a.y() - v.y() * a.x()) / (speed * speed * speed);
      const Vec tau = Vec(v / speed);
      out.II = kappa * tau * tau.transpose();
      break;
    }
  }
  out.H = out.II.trace();
  return out;
}

double ConvexBody::volume() const {
  const double d = dim_;
  switch (kind_) {
    case BodyKind::Ball: return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(radius_, d);
    case BodyKind::Box: return (2.0 * half_).prod();
    case BodyKind::Simplex: return std::pow(radius_, d) / std::tgamma(d + 1.0);
    case BodyKind::LpBall:
      return std::pow(2.0 * std::tgamma(1.0 + 1.0 / p_) * radius_, d) / std::tgamma(1.0 + d / p_);
    case BodyKind::Curve2D: {
      // Shoelace integral; the trapezoid rule is spectrally accurate for
      // periodic integrands.
      const int n = 4096;
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        const double t = kTwoPi * i / n;
        const Eigen::Vector2d g = curve_->point(t);
        const Eigen::Vector2d v = curve_->velocity(t);
        s += g.x() * v.y() - g.y() * v.x();
      }
      return 0.5 * s * kTwoPi / n;
    }
  }
  return 0.0;
}

double ConvexBody::circumradius() const {
  switch (kind_) {
    case BodyKind::Ball: return radius_;
    case BodyKind::Box: return half_.norm();
    case BodyKind::Simplex: return radius_;
    case BodyKind::LpBall: return radius_ * std::pow(static_cast<double>(dim_), std::max(0.0, 0.5 - 1.0 / p_));
    case BodyKind::Curve2D: return radius_;
  }
  return 0.0;
}

Vec ConvexBody::bounding_box() const {
  switch (kind_) {
    case BodyKind::Box:
    case BodyKind::Curve2D: return half_;
    default: return Vec::Constant(dim_, radius_);
  }
}

PointSet ConvexBody::sample_uniform(Rng& rng, int count, int budget_factor) const {
  PointSet out(dim_, count);
  switch (kind_) {
    case BodyKind::Ball:
      for (int j = 0; j < count; ++j) {
        Vec z(dim_);
        for (int i = 0; i < dim_; ++i) z(i) = rng.normal();
        const double r = radius_ * std::pow(rng.uniform(), 1.0 / dim_);
        out.col(j) = r * z.normalized();
      }
      return out;
    case BodyKind::Box:
      for (int j = 0; j < count; ++j) {
        for (int i = 0; i < dim_; ++i) out(i, j) = rng.uniform(-half_(i), half_(i));
      }
      return out;
    case BodyKind::Simplex:
      for (int j = 0; j < count; ++j) {
        Vec e(dim_ + 1);
        for (int i = 0; i <= dim_; ++i) e(i) = rng.exponential();
        out.col(j) = radius_ * e.head(dim_) / e.sum();
      }
      return out;
    case BodyKind::LpBall:
    case BodyKind::Curve2D: {
      const Vec box = bounding_box();
      const long budget = static_cast<long>(budget_factor) * std::max(count, 1);
      long tries = 0;
      Vec z(dim_);
      for (int j = 0; j < count;) {
        if (++tries > budget) {
          throw Error(ErrorCode::RejectionBudgetExceeded, "uniform rejection sampler exceeded its budget");
        }
        for (int i = 0; i < dim_; ++i) z(i) = rng.uniform(-box(i), box(i));
        if (gauge(z) <= 1.0) out.col(j++) = z;
      }
      return out;
    }
  }
  return out;
}

PointSet ConvexBody::sample_cone(Rng& rng, int count) const {
  PointSet pts = sample_uniform(rng, count);
  for (int j = 0; j < count; ++j) pts.col(j) = project(pts.col(j));
  return pts;
}

double ConvexBody::polar_map_norm(const Vec& x) const {
  const GaugeNormal gn = gauge_and_normal(x);
  return x.norm() / (gn.gauge * x.dot(gn.normal));
}

DiagonalityBounds diagonality_bounds(const ConvexBody& body, const PointSet& boundary_points) {
  DiagonalityBounds out{kInfinity, -kInfinity};
  for (Eigen::Index j = 0; j < boundary_points.cols(); ++j) {
    const Vec y = boundary_points.col(j);
    const GaugeNormal gn = body.gauge_and_normal(y);
    const double s = y.dot(gn.normal) / gn.gauge;
    if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveAngle, "<x, n> <= 0 on the boundary");
    out.lower = std::min(out.lower, gn.normal.minCoeff() / s);
    out.upper = std::max(out.upper, gn.normal.maxCoeff() / s);
  }
  return out;
}

PointSet sample_simplex_facet(const ConvexBody& body, Rng& rng, int count) {
  if (body.kind() != BodyKind::Simplex) throw Error(ErrorCode::InvalidArgument, "facet sampler needs a simplex");
  const int d = body.dim();
  PointSet out(d, count);
  for (int j = 0; j < count; ++j) {
    Vec e(d);
    for (int i = 0; i < d; ++i) e(i) = rng.exponential();
    out.col(j) = body.radius() * e / e.sum();
  }
  return out;
}

WeightedPoints simplex_facet_quadrature(const ConvexBody& body, int order) {
  if (body.kind() != BodyKind::Simplex) throw Error(ErrorCode::InvalidArgument, "facet quadrature needs a simplex");
  const int d = body.dim();
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "quadrature order must be positive");
  WeightedPoints out;
  if (d == 1) {
    out.points = PointSet::Constant(1, 1, body.radius());
    out.weights = {1.0};
    return out;
  }
  // Stick k (0-based) has law Beta(1, d - 1 - k): weight (1 - s)^(d - 2 - k).
  std::vector<QuadratureRule> rules;
  for (int k = 0; k + 1 < d; ++k) {
    QuadratureRule r = gauss_jacobi(order, d - 2.0 - k, 0.0, 0.0, 1.0);
    double total = 0.0;
    for (double w : r.weights) total += w;
    for (double& w : r.weights) w /= total;
    rules.push_back(std::move(r));
  }
  long total_points = 1;
  for (int k = 0; k + 1 < d; ++k) total_points *= order;
  out.points.resize(d, total_points);
  out.weights.resize(total_points);
  std::vector<int> idx(d - 1, 0);
  for (long m = 0; m < total_points; ++m) {
    long rest = m;
    for (int k = d - 2; k >= 0; --k) {
      idx[k] = static_cast<int>(rest % order);
      rest /= order;
    }
    double remaining = 1.0, w = 1.0;
    for (int k = 0; k + 1 < d; ++k) {
      const double s = rules[k].nodes[idx[k]];
      out.points(k, m) = body.radius() * remaining * s;
      remaining *= 1.0 - s;
      w *= rules[k].weights[idx[k]];
    }
    out.points(d - 1, m) = body.radius() * remaining;
    out.weights[m] = w;
  }
  return out;
}

}  // namespace riccikit
