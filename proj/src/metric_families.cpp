#include "riccikit/metric_families.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace riccikit {

namespace {

constexpr double kThirdStencil = 5e-3;
constexpr double kConditionLimit = 1e6;

double condition_number(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(g.rows() - 1);
  return lo > 0 ? hi / lo : kInfinity;
}

std::vector<Mat> phi_third(const PotentialField& phi, const Vec& x, const Mat& g, bool allow_stencil) {
  std::vector<Mat> out(phi.dim);
  if (!phi.third) {
    if (!allow_stencil) {
      throw Error(ErrorCode::MissingThirdDerivatives, "analytic third derivatives required");
    }
    if (condition_number(g) > kConditionLimit) {
      throw Error(ErrorCode::MissingThirdDerivatives, "D^2 phi too ill-conditioned for stencil third derivatives");
    }
  }
  for (int k = 0; k < phi.dim; ++k) out[k] = third_of(phi, x, k, kThirdStencil);
  return out;
}

// d^2/dx_i dx_j of D^2 phi.
Mat phi_fourth(const PotentialField& phi, const Vec& x, int i, int j) {
  if (phi.fourth) return symmetrize(phi.fourth(x, i, j));
  const double h = second_step(x);
  auto at = [&](double t) {
    Vec p = x;
    p(j) += t;
    return third_of(phi, p, i, kThirdStencil);
  };
  return symmetrize((8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h));
}

Mat H_matrix(const Mat& ginv, const std::vector<Mat>& dg) {
  const int d = static_cast<int>(dg.size());
  std::vector<Mat> a(d);
  for (int i = 0; i < d; ++i) a[i] = ginv * dg[i];
  Mat h(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      h(i, j) = h(j, i) = (a[i] * a[j]).trace();
    }
  }
  return h;
}

struct HessianPieces {
  Mat g;
  Mat ginv;
  std::vector<Mat> dg;
  Mat conj;  // D^2 phi D^2 W D^2 phi
  Vec w;     // grad V - D^2 phi grad W
};

HessianPieces hessian_pieces(const HessianMetricData& data, const Vec& x) {
  HessianPieces p;
  p.g = checked_metric(hessian_of(data.phi, x));
  p.ginv = spd_inverse(p.g);
  p.dg = phi_third(data.phi, x, p.g, data.allow_stencil);
  if (data.W.value) {
    const Vec y = data.transport ? data.transport(x) : gradient_of(data.phi, x);
    p.conj = symmetrize(p.g * hessian_of(data.W, y) * p.g);
    p.w = gradient_of(data.V, x) - p.g * gradient_of(data.W, y);
  } else {
    const ImpliedTarget t = implied_target(data.phi, data.V, x);
    p.conj = t.conjugated_hessian;
    p.w = gradient_of(data.V, x) - p.g * t.grad;
  }
  return p;
}

}  // namespace

std::vector<Mat> hessian_metric_derivatives(const HessianMetricData& data, const Vec& x) {
  const Mat g = checked_metric(hessian_of(data.phi, x));
  return phi_third(data.phi, x, g, data.allow_stencil);
}

ImpliedTarget implied_target(const PotentialField& phi, const PotentialField& V, const Vec& x) {
  const int d = phi.dim;
  const Mat g = checked_metric(hessian_of(phi, x));
  const Mat ginv = spd_inverse(g);
  const std::vector<Mat> dg = phi_third(phi, x, g, true);
  Vec dl(d);
  for (int i = 0; i < d; ++i) dl(i) = (ginv * dg[i]).trace();
  const Mat h = H_matrix(ginv, dg);
  Mat d2l(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      d2l(i, j) = d2l(j, i) = (ginv * phi_fourth(phi, x, i, j)).trace() - h(i, j);
    }
  }
  ImpliedTarget out;
  Eigen::LLT<Mat> llt(g);
  out.value = V.value(x) + 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  out.grad = ginv * (gradient_of(V, x) + dl);
  Mat conj = hessian_of(V, x) + d2l;
  for (int m = 0; m < d; ++m) conj -= out.grad(m) * dg[m];
  out.conjugated_hessian = symmetrize(conj);
  return out;
}

HessianRicci hessian_ricci(const HessianMetricData& data, const Vec& x) {
  const HessianPieces p = hessian_pieces(data, x);
  HessianRicci out;
  out.H = H_matrix(p.ginv, p.dg);
  out.ric = symmetrize(0.25 * out.H + 0.5 * (hessian_of(data.V, x) + p.conj));
  return out;
}

Mat hessian_H_lower_bound(const HessianMetricData& data, const Vec& x) {
  const HessianPieces p = hessian_pieces(data, x);
  return p.w * p.w.transpose() / static_cast<double>(data.phi.dim);
}

Mat refined_Q(const HessianMetricData& data, const Vec& x) {
  const HessianPieces p = hessian_pieces(data, x);
  const double d = data.phi.dim;
  return symmetrize(0.5 * hessian_of(data.V, x) + 0.5 * p.conj + p.w * p.w.transpose() / (4.0 * d));
}

Profile power_profile(double p) {
  Profile prof;
  prof.u = [p](double t) { return std::pow(t, p); };
  prof.du = [p](double t) { return p * std::pow(t, p - 1); };
  prof.d2u = [p](double t) { return p * (p - 1) * std::pow(t, p - 2); };
  return prof;
}

Profile exp_profile(double rate) {
  Profile prof;
  prof.u = [rate](double t) { return std::exp(rate * t); };
  prof.du = [rate](double t) { return rate * std::exp(rate * t); };
  prof.d2u = [rate](double t) { return rate * rate * std::exp(rate * t); };
  return prof;
}

ProductMetricData uniform_product(int dim, const Profile& profile) {
  return ProductMetricData{std::vector<Profile>(dim, profile)};
}

MetricField product_metric(const ProductMetricData& data) {
  MetricField m;
  m.dim = static_cast<int>(data.profiles.size());
  auto profiles = data.profiles;
  m.eval = [profiles](const Vec& x) {
    Mat g = Mat::Zero(x.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double u = profiles[i].u(x(i));
      g(i, i) = 1.0 / (u * u);
    }
    return g;
  };
  m.deriv = [profiles](const Vec& x, int k) {
    Mat dg = Mat::Zero(x.size(), x.size());
    const double u = profiles[k].u(x(k));
    dg(k, k) = -2.0 * profiles[k].du(x(k)) / (u * u * u);
    return dg;
  };
  m.inside = [profiles](const Vec& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double u = profiles[i].u(x(i));
      if (!(u > 0.0) || !std::isfinite(u)) return false;
    }
    return true;
  };
  return m;
}

Mat product_ricci(const ProductMetricData& data, const PotentialField& V, const Vec& x) {
  const Vec dv = gradient_of(V, x);
  Mat ric = hessian_of(V, x);
  for (std::size_t i = 0; i < data.profiles.size(); ++i) {
    const Profile& pr = data.profiles[i];
    const double u = pr.u(x(i));
    if (!(u > 0.0) || !std::isfinite(u)) {
      throw Error(ErrorCode::ProfileNotPositive, "profile u_" + std::to_string(i) + " is not positive");
    }
    ric(i, i) += dv(i) * pr.du(x(i)) / u - pr.d2u(x(i)) / u;
  }
  return ric;
}

double ric_1d_exact(const Potential1D& V, double x) {
  const double v2 = V.d2(x);
  if (!(std::abs(v2) > 0.0)) throw Error(ErrorCode::DegenerateHessian, "V'' vanishes");
  const double r3 = V.d3(x) / v2;
  return v2 + 0.5 * V.d4(x) / v2 - 0.75 * r3 * r3 - 0.5 * V.d1(x) * r3;
}

double entropic_F(const PotentialField& V, const Vec& y, const Vec& start) {
  const Vec x = invert_gradient(V, y, start);
  const Mat g = hessian_of(V, x);
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::DegenerateHessian, "D^2 V not positive definite");
  return y.dot(x) + 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Mat entropic_hessian_ricci(const PotentialField& V, const Vec& x) {
  const int d = V.dim;
  const Mat g = hessian_of(V, x);
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::DegenerateHessian, "D^2 V not positive definite");
  const Mat ginv = spd_inverse(g);
  std::vector<Mat> dg(d);
  for (int k = 0; k < d; ++k) dg[k] = third_of(V, x, k, kThirdStencil);
  const Mat h = H_matrix(ginv, dg);

  const Vec y = gradient_of(V, x);
  const double step = 2e-3 * (1.0 + y.norm());
  auto F = [&](const Vec& yy) { return entropic_F(V, yy, x); };
  const double f0 = F(y);
  Mat d2f(d, d);
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e(i) = step;
    d2f(i, i) = (-F(y + 2 * e) + 16 * F(y + e) - 30 * f0 + 16 * F(y - e) - F(y - 2 * e)) / (12 * step * step);
    for (int j = i + 1; j < d; ++j) {
      Vec f = Vec::Zero(d);
      f(j) = step;
      auto mixed = [&](double s) {
        return (F(y + s * (e + f)) - F(y + s * (e - f)) - F(y - s * (e - f)) + F(y - s * (e + f))) /
               (4 * s * s * step * step);
      };
      d2f(i, j) = d2f(j, i) = (4 * mixed(1.0) - mixed(2.0)) / 3.0;
    }
  }
  return symmetrize(0.25 * h + 0.5 * g * d2f * g);
}

ConformalMetricData radial_conformal(int dim, double theta, double eps) {
  ConformalMetricData data;
  data.radial = true;
  data.theta = theta;
  data.eps = eps;
  PotentialField& phi = data.phi;
  phi.dim = dim;
  phi.value = [theta, eps](const Vec& x) { return -0.5 * theta * std::log(x.squaredNorm() + eps); };
  phi.grad = [theta, eps](const Vec& x) { return (-theta / (x.squaredNorm() + eps) * x).eval(); };
  phi.hess = [theta, eps](const Vec& x) {
    const double s = x.squaredNorm() + eps;
    const Eigen::Index d = x.size();
    return (-theta / s * Mat::Identity(d, d) + 2.0 * theta / (s * s) * x * x.transpose()).eval();
  };
  phi.third = [theta, eps](const Vec& x, int k) {
    const double s = x.squaredNorm() + eps;
    const Eigen::Index d = x.size();
    Vec ek = Vec::Zero(d);
    ek(k) = 1.0;
    return (2.0 * theta * x(k) / (s * s) * Mat::Identity(d, d) +
            2.0 * theta / (s * s) * (ek * x.transpose() + x * ek.transpose()) -
            8.0 * theta * x(k) / (s * s * s) * x * x.transpose())
        .eval();
  };
  return data;
}

double default_radial_eps(double circumradius) { return 1e-6 * circumradius * circumradius; }

MetricField conformal_metric(const ConformalMetricData& data) {
  MetricField m;
  m.dim = data.phi.dim;
  const PotentialField phi = data.phi;
  m.eval = [phi](const Vec& x) {
    return (std::exp(2.0 * phi.value(x)) * Mat::Identity(x.size(), x.size())).eval();
  };
  m.deriv = [phi](const Vec& x, int k) {
    const double dk = gradient_of(phi, x)(k);
    return (2.0 * dk * std::exp(2.0 * phi.value(x)) * Mat::Identity(x.size(), x.size())).eval();
  };
  return m;
}

ChristoffelTensor conformal_christoffel(const ConformalMetricData& data, const Vec& x) {
  const int d = data.phi.dim;
  const Vec dphi = gradient_of(data.phi, x);
  ChristoffelTensor out;
  out.dim = d;
  out.gamma.assign(d, Mat::Zero(d, d));
  for (int k = 0; k < d; ++k) {
    Mat& gk = out.gamma[k];
    gk.row(k) += dphi.transpose();
    gk.col(k) += dphi;
    gk.diagonal().array() -= dphi(k);
  }
  return out;
}

Mat conformal_geometric_ricci(const ConformalMetricData& data, const Vec& x) {
  const int d = data.phi.dim;
  const Vec dphi = gradient_of(data.phi, x);
  const Mat d2phi = hessian_of(data.phi, x);
  const Mat id = Mat::Identity(d, d);
  return symmetrize(-(d - 2.0) * (d2phi - dphi * dphi.transpose()) -
                    (d2phi.trace() + (d - 2.0) * dphi.squaredNorm()) * id);
}

Mat conformal_hessian(const ConformalMetricData& data, const PotentialField& f, const Vec& x) {
  const int d = data.phi.dim;
  const Vec dphi = gradient_of(data.phi, x);
  const Vec df = gradient_of(f, x);
  return symmetrize(hessian_of(f, x) - (df * dphi.transpose() + dphi * df.transpose()) +
                    df.dot(dphi) * Mat::Identity(d, d));
}

Mat conformal_ricci_N(const ConformalMetricData& data, const PotentialField& V, double N, const Vec& x) {
  const int d = data.phi.dim;
  validate_dimension_parameter(N, d);
  const double a = -inverse_n_minus_d(N, d);
  const double b = -1.0 + d * a;
  const double c = d * b;
  const Vec dphi = gradient_of(data.phi, x);
  const Mat d2phi = hessian_of(data.phi, x);
  const Vec dv = gradient_of(V, x);
  const Mat id = Mat::Identity(d, d);
  Mat ric = hessian_of(V, x) + dv.dot(dphi) * id + a * dv * dv.transpose() +
            b * (dv * dphi.transpose() + dphi * dv.transpose()) + (c - 2.0) * dphi * dphi.transpose() +
            2.0 * d2phi + (2.0 * dphi.squaredNorm() - d2phi.trace()) * id;
  return symmetrize(ric);
}

RadialEigenvalues radial_conformal_eigenvalues(double theta, double eps, double N, int d, double r) {
  validate_dimension_parameter(N, d);
  const double c = d * (-1.0 + d * -inverse_n_minus_d(N, d));
  RadialEigenvalues out;
  const double r2 = r * r;
  out.tangential = theta * (d + 2.0 * theta - 4.0) / r2;
  out.radial = (d * theta + c * theta * theta) / r2;
  const double s = r2 + eps;
  out.tangential_exact = (theta * (d - 2.0) + 2.0 * theta * (theta - 1.0) * r2 / s) / s;
  out.radial_exact = out.tangential_exact + (theta * theta * (c - 2.0) + 4.0 * theta) * r2 / (s * s);
  return out;
}

ConformalBoundary conformal_boundary(const ConformalMetricData& data, const PotentialField& V, const Vec& x,
                                     const Vec& normal, const Mat& II0, double H0) {
  if (std::abs(normal.norm() - 1.0) > 1e-8) throw Error(ErrorCode::NonUnitNormal, "normal must have unit length");
  const int d = data.phi.dim;
  const double phi = data.phi.value(x);
  const Vec dphi = gradient_of(data.phi, x);
  const Mat tangent = Mat::Identity(d, d) - normal * normal.transpose();
  ConformalBoundary out;
  out.II = std::exp(phi) * (II0 + dphi.dot(normal) * tangent);
  out.H = std::exp(-phi) * (H0 - (dphi + gradient_of(V, x)).dot(normal));
  out.measure_factor = std::exp(-phi);
  return out;
}

}  // namespace riccikit
