#pragma once

#include "riccikit/fields.hpp"
#include "riccikit/tensor_core.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace riccikit {

/// g = D^2 phi transporting exp(-V) onto exp(-W) through grad phi. When W is
/// left empty it is the potential implied by the Monge–Ampère equation.
struct HessianMetricData {
  PotentialField phi;
  PotentialField V;
  PotentialField W;
  std::function<Vec(const Vec&)> transport;
  bool allow_stencil = true;
};

struct HessianRicci {
  Mat ric;
  Mat H;
};

/// Derivatives of the target potential implied by
/// W(grad phi(x)) = V(x) + log det D^2 phi(x), evaluated at y = grad phi(x).
struct ImpliedTarget {
  double value = 0.0;
  Vec grad;               ///< grad W(y)
  Mat conjugated_hessian; ///< D^2 phi * D^2 W(y) * D^2 phi
};

std::vector<Mat> hessian_metric_derivatives(const HessianMetricData& data, const Vec& x);
ImpliedTarget implied_target(const PotentialField& phi, const PotentialField& V, const Vec& x);

HessianRicci hessian_ricci(const HessianMetricData& data, const Vec& x);
Mat hessian_H_lower_bound(const HessianMetricData& data, const Vec& x);
Mat refined_Q(const HessianMetricData& data, const Vec& x);

/// Per-coordinate profile u with g_ii = u(x_i)^-2.
struct Profile {
  std::function<double(double)> u, du, d2u;
};

struct ProductMetricData {
  std::vector<Profile> profiles;
};

Profile power_profile(double p);
Profile exp_profile(double rate);
ProductMetricData uniform_product(int dim, const Profile& profile);
MetricField product_metric(const ProductMetricData& data);
Mat product_ricci(const ProductMetricData& data, const PotentialField& V, const Vec& x);

/// One-dimensional generalized Ricci of (g = V'' dx^2, exp(-V) dx).
double ric_1d_exact(const Potential1D& V, double x);

/// 1/4 H + 1/2 D^2V D^2F(grad V) D^2V with F(y) = <y, grad V*(y)> + log det D^2V(grad V*(y)).
Mat entropic_hessian_ricci(const PotentialField& V, const Vec& x);
/// F evaluated at y through a Newton inverse of grad V.
double entropic_F(const PotentialField& V, const Vec& y, const Vec& start);

/// g = exp(2 phi) times the Euclidean metric.
struct ConformalMetricData {
  PotentialField phi;
  bool radial = false;
  double theta = 0.0;
  double eps = 0.0;
};

/// phi = -(theta/2) log(|x|^2 + eps).
ConformalMetricData radial_conformal(int dim, double theta, double eps);
/// Default regularization 1e-6 R^2 for a domain of circumradius R.
double default_radial_eps(double circumradius);

MetricField conformal_metric(const ConformalMetricData& data);
ChristoffelTensor conformal_christoffel(const ConformalMetricData& data, const Vec& x);
Mat conformal_geometric_ricci(const ConformalMetricData& data, const Vec& x);
Mat conformal_hessian(const ConformalMetricData& data, const PotentialField& f, const Vec& x);
/// Closed-form N-dimensional generalized Ricci; V is the log-density against Lebesgue measure.
Mat conformal_ricci_N(const ConformalMetricData& data, const PotentialField& V, double N, const Vec& x);

struct RadialEigenvalues {
  double radial = 0.0;
  double tangential = 0.0;
  double radial_exact = 0.0;
  double tangential_exact = 0.0;
};

RadialEigenvalues radial_conformal_eigenvalues(double theta, double eps, double N, int d, double r);

struct ConformalBoundary {
  Mat II;
  double H = 0.0;
  double measure_factor = 1.0;
};

/// II0 acts on the tangent space; it is returned on the full space with the
/// tangential projector added for the conformal correction.
ConformalBoundary conformal_boundary(const ConformalMetricData& data, const PotentialField& V, const Vec& x,
                                     const Vec& normal, const Mat& II0, double H0);

}  // namespace riccikit
