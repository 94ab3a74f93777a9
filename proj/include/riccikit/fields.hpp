#pragma once

#include "riccikit/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace riccikit {

/// Riemannian metric in coordinates.
struct MetricField {
  int dim = 0;
  std::function<Mat(const Vec&)> eval;
  /// Optional analytic partial derivative dg/dx_k.
  std::function<Mat(const Vec&, int)> deriv;
  /// Optional domain predicate; stencils leaving the domain raise StepTooLarge.
  std::function<bool(const Vec&)> inside;
};

/// Scalar field with optional analytic derivatives. Missing derivatives are
/// replaced by central differences.
struct PotentialField {
  int dim = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
  /// d/dx_k of the Hessian.
  std::function<Mat(const Vec&, int)> third;
  /// d^2/dx_k dx_l of the Hessian.
  std::function<Mat(const Vec&, int, int)> fourth;
  bool convex = false;
};

using QuadraticFormField = std::function<Mat(const Vec&)>;

/// Scalar potential on an interval with up to four derivatives.
struct Potential1D {
  std::string name;
  double lower = -kInfinity;
  double upper = kInfinity;
  std::function<double(double)> v, d1, d2, d3, d4;
};

/// Default relative steps: 1e-4 (1 + |x|) for first derivatives,
/// 1e-3 (1 + |x|) for second derivatives.
double first_step(const Vec& x);
double second_step(const Vec& x);

Vec gradient_of(const PotentialField& f, const Vec& x);
Mat hessian_of(const PotentialField& f, const Vec& x);
/// d/dx_k of the Hessian; analytic if available, else a central stencil of
/// width h applied to the Hessian.
Mat third_of(const PotentialField& f, const Vec& x, int k, double h);

/// Solves grad f(x) = y for strongly convex f by damped Newton on f - <y, .>.
Vec invert_gradient(const PotentialField& f, const Vec& y, const Vec& start);

PotentialField constant_field(int dim, double c = 0.0);
PotentialField quadratic_field(const Mat& a, const Vec& b = Vec(), double c = 0.0);
/// Separable sum of one-dimensional potentials, one per coordinate.
PotentialField separable_field(const std::vector<Potential1D>& coords);
/// Sum of fields of equal dimension.
PotentialField sum_fields(const PotentialField& a, const PotentialField& b);

MetricField euclidean_metric(int dim);
/// g = D^2 phi; the derivative callback uses phi.third when present.
MetricField hessian_metric(const PotentialField& phi);

namespace potentials {
Potential1D quadratic(double curvature = 1.0, double center = 0.0);
/// c x^q on (0, inf).
Potential1D power(double c, double q);
/// rate * x on (0, inf).
Potential1D exponential(double rate);
/// rate * |x| on the line (smooth away from 0).
Potential1D laplace(double rate);
Potential1D uniform(double a, double b);
/// -log cos(pi x / (2 h)) on (-h, h).
Potential1D cosine(double half_width);
/// rate * x + curvature * x^2 / 2 on (0, inf).
Potential1D exp_quadratic(double rate, double curvature);
/// alpha x^2/2 + beta log cosh(gamma x) + delta x on the line.
Potential1D logcosh_mix(double alpha, double beta, double gamma, double delta);
Potential1D cosh_potential();
/// Even potential whose Legendre transform has second derivative
/// min(1/p, |y|^(p-2)/p), p = q/(q-1); quadratic near 0, ~|x|^q far out.
Potential1D legendre_power_example(double q);
}  // namespace potentials

}  // namespace riccikit
