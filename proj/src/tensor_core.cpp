#include "riccikit/tensor_core.hpp"

#include <cmath>

namespace riccikit {

namespace {

void require_inside(const MetricField& metric, const Vec& p) {
  if (metric.inside && !metric.inside(p)) {
    throw Error(ErrorCode::StepTooLarge, "finite-difference stencil leaves the metric domain");
  }
}

Vec shifted(const Vec& x, int k, double delta) {
  Vec y = x;
  y(k) += delta;
  return y;
}

// Five-point first derivative of a matrix-valued map along e_k.
template <class F>
Mat five_point(F&& f, const Vec& x, int k, double h) {
  const Mat p1 = f(shifted(x, k, h));
  const Mat m1 = f(shifted(x, k, -h));
  const Mat p2 = f(shifted(x, k, 2 * h));
  const Mat m2 = f(shifted(x, k, -2 * h));
  return (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
}

void require_stencil(const MetricField& metric, const Vec& x, double h) {
  for (int k = 0; k < metric.dim; ++k) {
    require_inside(metric, shifted(x, k, 2 * h));
    require_inside(metric, shifted(x, k, -2 * h));
  }
}

ChristoffelTensor christoffel_with(const MetricField& metric, const Vec& x, double h1) {
  const int d = metric.dim;
  const Mat ginv = spd_inverse(metric_at(metric, x));
  std::vector<Mat> dg(d);
  for (int k = 0; k < d; ++k) dg[k] = metric_derivative(metric, x, k, h1);
  ChristoffelTensor out;
  out.dim = d;
  out.gamma.assign(d, Mat::Zero(d, d));
  // Lowered symbols Gamma_{k,ij} = 1/2 (d_j g_ki + d_i g_kj - d_k g_ij).
  std::vector<Mat> lowered(d, Mat::Zero(d, d));
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        const double v = 0.5 * (dg[j](k, i) + dg[i](k, j) - dg[k](i, j));
        lowered[k](i, j) = v;
        lowered[k](j, i) = v;
      }
    }
  }
  for (int m = 0; m < d; ++m) {
    for (int k = 0; k < d; ++k) out.gamma[m] += ginv(m, k) * lowered[k];
  }
  return out;
}

Vec logdet_gradient(const MetricField& metric, const Vec& x, double h1) {
  const Mat ginv = spd_inverse(metric_at(metric, x));
  Vec out(metric.dim);
  for (int k = 0; k < metric.dim; ++k) out(k) = (ginv * metric_derivative(metric, x, k, h1)).trace();
  return out;
}

}  // namespace

Mat metric_at(const MetricField& metric, const Vec& x) {
  require_inside(metric, x);
  return checked_metric(metric.eval(x));
}

Mat metric_derivative(const MetricField& metric, const Vec& x, int k, double h) {
  if (metric.deriv) return symmetrize(metric.deriv(x, k));
  if (h <= 0) h = first_step(x);
  const Vec xp = shifted(x, k, h);
  const Vec xm = shifted(x, k, -h);
  return (metric_at(metric, xp) - metric_at(metric, xm)) / (2.0 * h);
}

ChristoffelTensor christoffel(const MetricField& metric, const Vec& x, double h) {
  if (!metric.deriv) {
    const double h1 = h > 0 ? h : first_step(x);
    for (int k = 0; k < metric.dim; ++k) {
      require_inside(metric, shifted(x, k, h1));
      require_inside(metric, shifted(x, k, -h1));
    }
    return christoffel_with(metric, x, h1);
  }
  return christoffel_with(metric, x, h);
}

Mat riemannian_hessian(const MetricField& metric, const PotentialField& f, const Vec& x) {
  const ChristoffelTensor gam = christoffel(metric, x);
  const Vec df = gradient_of(f, x);
  Mat out = hessian_of(f, x);
  for (int k = 0; k < metric.dim; ++k) out -= df(k) * gam.gamma[k];
  return symmetrize(out);
}

Mat geometric_ricci_fd(const MetricField& metric, const Vec& x, double h) {
  const int d = metric.dim;
  const double h2 = h > 0 ? h : second_step(x);
  const double h1 = first_step(x);
  require_stencil(metric, x, h2 + h1);
  const ChristoffelTensor g0 = christoffel_with(metric, x, h1);
  // dgam[k].gamma[m](i, j) = d_k Gamma^m_ij.
  std::vector<ChristoffelTensor> dgam(d);
  for (int k = 0; k < d; ++k) {
    const ChristoffelTensor p1 = christoffel_with(metric, shifted(x, k, h2), h1);
    const ChristoffelTensor m1 = christoffel_with(metric, shifted(x, k, -h2), h1);
    const ChristoffelTensor p2 = christoffel_with(metric, shifted(x, k, 2 * h2), h1);
    const ChristoffelTensor m2 = christoffel_with(metric, shifted(x, k, -2 * h2), h1);
    dgam[k].dim = d;
    dgam[k].gamma.resize(d);
    for (int m = 0; m < d; ++m) {
      dgam[k].gamma[m] = (8.0 * (p1.gamma[m] - m1.gamma[m]) - (p2.gamma[m] - m2.gamma[m])) / (12.0 * h2);
    }
  }
  Mat ric = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        s += dgam[k].gamma[k](i, j) - dgam[j].gamma[k](i, k);
        for (int l = 0; l < d; ++l) {
          s += g0.gamma[k](k, l) * g0.gamma[l](i, j) - g0.gamma[k](j, l) * g0.gamma[l](i, k);
        }
      }
      ric(i, j) = s;
    }
  }
  return symmetrize(ric);
}

double lebesgue_to_volume_potential(const MetricField& metric, const PotentialField& V, const Vec& x) {
  const Mat g = metric_at(metric, x);
  Eigen::LLT<Mat> llt(g);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return V.value(x) + 0.5 * logdet;
}

Vec lebesgue_to_volume_gradient(const MetricField& metric, const PotentialField& V, const Vec& x) {
  return gradient_of(V, x) + 0.5 * logdet_gradient(metric, x, first_step(x));
}

Mat lebesgue_to_volume_hessian(const MetricField& metric, const PotentialField& V, const Vec& x) {
  const double h2 = second_step(x);
  const double h1 = first_step(x);
  require_stencil(metric, x, h2 + h1);
  Mat d2 = Mat::Zero(metric.dim, metric.dim);
  for (int k = 0; k < metric.dim; ++k) {
    auto col = [&](const Vec& p) -> Mat { return logdet_gradient(metric, p, h1); };
    d2.col(k) = five_point(col, x, k, h2);
  }
  return symmetrize(hessian_of(V, x) + 0.5 * d2);
}

CurvaturePoint generalized_ricci(const MetricField& metric, const PotentialField& V, const Vec& x, double N) {
  validate_dimension_parameter(N, metric.dim);
  CurvaturePoint out;
  out.x = x;
  out.N = N;
  out.ric_g = geometric_ricci_fd(metric, x);
  const ChristoffelTensor gam = christoffel(metric, x);
  const Vec dp = lebesgue_to_volume_gradient(metric, V, x);
  Mat hess = lebesgue_to_volume_hessian(metric, V, x);
  for (int k = 0; k < metric.dim; ++k) hess -= dp(k) * gam.gamma[k];
  out.ric_gmu = symmetrize(out.ric_g + hess);
  out.ric_gmu_N = out.ric_gmu;
  const double inv = inverse_n_minus_d(N, metric.dim);
  if (inv != 0.0) out.ric_gmu_N -= inv * dp * dp.transpose();
  return out;
}

}  // namespace riccikit
