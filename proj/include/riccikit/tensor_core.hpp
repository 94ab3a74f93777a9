#pragma once

#include "riccikit/fields.hpp"

#include <vector>

namespace riccikit {

/// Gamma^m_{ij} stored as gamma[m](i, j).
struct ChristoffelTensor {
  int dim = 0;
  std::vector<Mat> gamma;
};

struct CurvaturePoint {
  Vec x;
  Mat ric_g;
  Mat ric_gmu;
  Mat ric_gmu_N;
  double N = kInfinity;
};

/// Metric value at x, validated positive definite.
Mat metric_at(const MetricField& metric, const Vec& x);

/// dg/dx_k at x; analytic when available, else a central difference of
/// width h (h <= 0 selects first_step(x)).
Mat metric_derivative(const MetricField& metric, const Vec& x, int k, double h = -1.0);

ChristoffelTensor christoffel(const MetricField& metric, const Vec& x, double h = -1.0);

/// Hess_g f = D^2 f - Gamma^k d_k f.
Mat riemannian_hessian(const MetricField& metric, const PotentialField& f, const Vec& x);

/// Ricci tensor from a five-point stencil of width h on the Christoffel
/// symbols (h <= 0 selects second_step(x)).
Mat geometric_ricci_fd(const MetricField& metric, const Vec& x, double h = -1.0);

/// P = V + 1/2 log det g, so that exp(-P) vol_g = exp(-V) dx.
double lebesgue_to_volume_potential(const MetricField& metric, const PotentialField& V, const Vec& x);
Vec lebesgue_to_volume_gradient(const MetricField& metric, const PotentialField& V, const Vec& x);
Mat lebesgue_to_volume_hessian(const MetricField& metric, const PotentialField& V, const Vec& x);

/// V is the log-density against Lebesgue measure; N = +inf gives ric_gmu_N = ric_gmu.
CurvaturePoint generalized_ricci(const MetricField& metric, const PotentialField& V, const Vec& x, double N = kInfinity);

}  // namespace riccikit
