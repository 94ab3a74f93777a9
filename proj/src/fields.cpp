#include "riccikit/fields.hpp"

#include <algorithm>
#include <cmath>

namespace riccikit {

double first_step(const Vec& x) { return 1e-4 * (1.0 + x.norm()); }
double second_step(const Vec& x) { return 1e-3 * (1.0 + x.norm()); }

Vec gradient_of(const PotentialField& f, const Vec& x) {
  if (f.grad) return f.grad(x);
  const double h = first_step(x);
  Vec g(x.size());
  Vec xp = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    xp(k) = x(k) + h;
    const double fp = f.value(xp);
    xp(k) = x(k) - h;
    const double fm = f.value(xp);
    xp(k) = x(k);
    g(k) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Mat hessian_of(const PotentialField& f, const Vec& x) {
  if (f.hess) return symmetrize(f.hess(x));
  const Eigen::Index d = x.size();
  const double h = second_step(x);
  Mat out(d, d);
  Vec xp = x;
  if (f.grad) {
    // Five-point stencil on the analytic gradient.
    for (Eigen::Index k = 0; k < d; ++k) {
      xp(k) = x(k) + h;
      const Vec g1 = f.grad(xp);
      xp(k) = x(k) - h;
      const Vec gm1 = f.grad(xp);
      xp(k) = x(k) + 2 * h;
      const Vec g2 = f.grad(xp);
      xp(k) = x(k) - 2 * h;
      const Vec gm2 = f.grad(xp);
      xp(k) = x(k);
      out.col(k) = (8.0 * (g1 - gm1) - (g2 - gm2)) / (12.0 * h);
    }
    return symmetrize(out);
  }
  const double f0 = f.value(x);
  for (Eigen::Index i = 0; i < d; ++i) {
    xp(i) = x(i) + h;
    const double fp = f.value(xp);
    xp(i) = x(i) - h;
    const double fm = f.value(xp);
    xp(i) = x(i);
    out(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      xp(i) += h;
      xp(j) += h;
      const double fpp = f.value(xp);
      xp(j) -= 2 * h;
      const double fpm = f.value(xp);
      xp(i) -= 2 * h;
      const double fmm = f.value(xp);
      xp(j) += 2 * h;
      const double fmp = f.value(xp);
      xp(i) = x(i);
      xp(j) = x(j);
      out(i, j) = out(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return out;
}

Mat third_of(const PotentialField& f, const Vec& x, int k, double h) {
  if (f.third) return symmetrize(f.third(x, k));
  Vec xp = x;
  xp(k) = x(k) + h;
  const Mat hp = hessian_of(f, xp);
  xp(k) = x(k) - h;
  const Mat hm = hessian_of(f, xp);
  xp(k) = x(k) + 2 * h;
  const Mat hp2 = hessian_of(f, xp);
  xp(k) = x(k) - 2 * h;
  const Mat hm2 = hessian_of(f, xp);
  return symmetrize((8.0 * (hp - hm) - (hp2 - hm2)) / (12.0 * h));
}

Vec invert_gradient(const PotentialField& f, const Vec& y, const Vec& start) {
  Vec x = start;
  auto objective = [&](const Vec& z) { return f.value(z) - y.dot(z); };
  double obj = objective(x);
  for (int it = 0; it < 200; ++it) {
    const Vec r = gradient_of(f, x) - y;
    const double scale = 1.0 + y.norm();
    if (r.norm() <= 1e-14 * scale) return x;
    Eigen::LLT<Mat> llt(hessian_of(f, x));
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::NotStronglyConvex, "Hessian not positive definite while inverting gradient");
    }
    const Vec step = llt.solve(r);
    double t = 1.0;
    Vec trial = x - step;
    double trial_obj = objective(trial);
    while (!(std::isfinite(trial_obj) && trial_obj <= obj + 1e-12 * (1.0 + std::abs(obj))) && t > 1e-12) {
      t *= 0.5;
      trial = x - t * step;
      trial_obj = objective(trial);
    }
    if (t <= 1e-12) {
      // Objective stagnates at roundoff level; accept the full step if it
      // still shrinks the residual.
      trial = x - step;
      if ((gradient_of(f, trial) - y).norm() >= r.norm()) return x;
      trial_obj = objective(trial);
    }
    const double moved = (trial - x).norm();
    x = trial;
    obj = trial_obj;
    if (moved <= 1e-15 * (1.0 + x.norm())) return x;
  }
  throw Error(ErrorCode::NoConvergence, "gradient inversion did not converge");
}

PotentialField constant_field(int dim, double c) {
  PotentialField f;
  f.dim = dim;
  f.value = [c](const Vec&) { return c; };
  f.grad = [dim](const Vec&) { return Vec::Zero(dim).eval(); };
  f.hess = [dim](const Vec&) { return Mat::Zero(dim, dim).eval(); };
  f.third = [dim](const Vec&, int) { return Mat::Zero(dim, dim).eval(); };
  f.fourth = [dim](const Vec&, int, int) { return Mat::Zero(dim, dim).eval(); };
  f.convex = true;
  return f;
}

PotentialField quadratic_field(const Mat& a, const Vec& b, double c) {
  const int dim = static_cast<int>(a.rows());
  const Mat s = symmetrize(a);
  const Vec lin = b.size() == 0 ? Vec::Zero(dim).eval() : b;
  PotentialField f;
  f.dim = dim;
  f.value = [s, lin, c](const Vec& x) { return 0.5 * x.dot(s * x) + lin.dot(x) + c; };
  f.grad = [s, lin](const Vec& x) { return (s * x + lin).eval(); };
  f.hess = [s](const Vec&) { return s; };
  f.third = [dim](const Vec&, int) { return Mat::Zero(dim, dim).eval(); };
  f.fourth = [dim](const Vec&, int, int) { return Mat::Zero(dim, dim).eval(); };
  f.convex = min_eigenvalue(s) >= 0.0;
  return f;
}

PotentialField separable_field(const std::vector<Potential1D>& coords) {
  const int dim = static_cast<int>(coords.size());
  PotentialField f;
  f.dim = dim;
  f.value = [coords](const Vec& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) s += coords[i].v(x(i));
    return s;
  };
  f.grad = [coords](const Vec& x) {
    Vec g(x.size());
    for (std::size_t i = 0; i < coords.size(); ++i) g(i) = coords[i].d1(x(i));
    return g;
  };
  f.hess = [coords](const Vec& x) {
    Mat h = Mat::Zero(x.size(), x.size());
    for (std::size_t i = 0; i < coords.size(); ++i) h(i, i) = coords[i].d2(x(i));
    return h;
  };
  const bool has3 = std::all_of(coords.begin(), coords.end(), [](const Potential1D& p) { return bool(p.d3); });
  const bool has4 = std::all_of(coords.begin(), coords.end(), [](const Potential1D& p) { return bool(p.d4); });
  if (has3) {
    f.third = [coords](const Vec& x, int k) {
      Mat t = Mat::Zero(x.size(), x.size());
      t(k, k) = coords[k].d3(x(k));
      return t;
    };
  }
  if (has4) {
    f.fourth = [coords](const Vec& x, int k, int l) {
      Mat t = Mat::Zero(x.size(), x.size());
      if (k == l) t(k, k) = coords[k].d4(x(k));
      return t;
    };
  }
  return f;
}

PotentialField sum_fields(const PotentialField& a, const PotentialField& b) {
  PotentialField f;
  f.dim = a.dim;
  f.value = [a, b](const Vec& x) { return a.value(x) + b.value(x); };
  f.grad = [a, b](const Vec& x) { return (gradient_of(a, x) + gradient_of(b, x)).eval(); };
  f.hess = [a, b](const Vec& x) { return (hessian_of(a, x) + hessian_of(b, x)).eval(); };
  if (a.third && b.third) {
    f.third = [a, b](const Vec& x, int k) { return (a.third(x, k) + b.third(x, k)).eval(); };
  }
  if (a.fourth && b.fourth) {
    f.fourth = [a, b](const Vec& x, int k, int l) { return (a.fourth(x, k, l) + b.fourth(x, k, l)).eval(); };
  }
  f.convex = a.convex && b.convex;
  return f;
}

MetricField euclidean_metric(int dim) {
  MetricField m;
  m.dim = dim;
  m.eval = [dim](const Vec&) { return Mat::Identity(dim, dim).eval(); };
  m.deriv = [dim](const Vec&, int) { return Mat::Zero(dim, dim).eval(); };
  return m;
}

MetricField hessian_metric(const PotentialField& phi) {
  MetricField m;
  m.dim = phi.dim;
  m.eval = [phi](const Vec& x) { return hessian_of(phi, x); };
  if (phi.third) m.deriv = [phi](const Vec& x, int k) { return phi.third(x, k); };
  return m;
}

namespace potentials {

namespace {
double log_cosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}
}  // namespace

Potential1D quadratic(double curvature, double center) {
  Potential1D p;
  p.name = "quadratic";
  p.v = [=](double x) { return 0.5 * curvature * (x - center) * (x - center); };
  p.d1 = [=](double x) { return curvature * (x - center); };
  p.d2 = [=](double) { return curvature; };
  p.d3 = [](double) { return 0.0; };
  p.d4 = [](double) { return 0.0; };
  return p;
}

Potential1D power(double c, double q) {
  Potential1D p;
  p.name = "power";
  p.lower = 0.0;
  p.v = [=](double x) { return c * std::pow(x, q); };
  p.d1 = [=](double x) { return c * q * std::pow(x, q - 1); };
  p.d2 = [=](double x) { return c * q * (q - 1) * std::pow(x, q - 2); };
  p.d3 = [=](double x) { return c * q * (q - 1) * (q - 2) * std::pow(x, q - 3); };
  p.d4 = [=](double x) { return c * q * (q - 1) * (q - 2) * (q - 3) * std::pow(x, q - 4); };
  return p;
}

Potential1D exponential(double rate) {
  Potential1D p;
  p.name = "exponential";
  p.lower = 0.0;
  p.v = [=](double x) { return rate * x; };
  p.d1 = [=](double) { return rate; };
  p.d2 = [](double) { return 0.0; };
  p.d3 = [](double) { return 0.0; };
  p.d4 = [](double) { return 0.0; };
  return p;
}

Potential1D laplace(double rate) {
  Potential1D p;
  p.name = "laplace";
  p.v = [=](double x) { return rate * std::abs(x); };
  p.d1 = [=](double x) { return x > 0 ? rate : (x < 0 ? -rate : 0.0); };
  p.d2 = [](double) { return 0.0; };
  p.d3 = [](double) { return 0.0; };
  p.d4 = [](double) { return 0.0; };
  return p;
}

Potential1D uniform(double a, double b) {
  Potential1D p;
  p.name = "uniform";
  p.lower = a;
  p.upper = b;
  p.v = [](double) { return 0.0; };
  p.d1 = [](double) { return 0.0; };
  p.d2 = [](double) { return 0.0; };
  p.d3 = [](double) { return 0.0; };
  p.d4 = [](double) { return 0.0; };
  return p;
}

Potential1D cosine(double half_width) {
  const double a = M_PI / (2.0 * half_width);
  Potential1D p;
  p.name = "cosine";
  p.lower = -half_width;
  p.upper = half_width;
  p.v = [=](double x) { return -std::log(std::cos(a * x)); };
  p.d1 = [=](double x) { return a * std::tan(a * x); };
  p.d2 = [=](double x) {
    const double s = 1.0 / std::cos(a * x);
    return a * a * s * s;
  };
  p.d3 = [=](double x) {
    const double s = 1.0 / std::cos(a * x);
    return 2.0 * a * a * a * s * s * std::tan(a * x);
  };
  p.d4 = [=](double x) {
    const double s = 1.0 / std::cos(a * x);
    const double t = std::tan(a * x);
    return 2.0 * std::pow(a, 4) * (2.0 * s * s * t * t + std::pow(s, 4));
  };
  return p;
}

Potential1D exp_quadratic(double rate, double curvature) {
  Potential1D p;
  p.name = "exp_quadratic";
  p.lower = 0.0;
  p.v = [=](double x) { return rate * x + 0.5 * curvature * x * x; };
  p.d1 = [=](double x) { return rate + curvature * x; };
  p.d2 = [=](double) { return curvature; };
  p.d3 = [](double) { return 0.0; };
  p.d4 = [](double) { return 0.0; };
  return p;
}

Potential1D logcosh_mix(double alpha, double beta, double gamma, double delta) {
  Potential1D p;
  p.name = "logcosh_mix";
  p.v = [=](double x) { return 0.5 * alpha * x * x + beta * log_cosh(gamma * x) + delta * x; };
  p.d1 = [=](double x) { return alpha * x + beta * gamma * std::tanh(gamma * x) + delta; };
  p.d2 = [=](double x) {
    const double s = 1.0 / std::cosh(gamma * x);
    return alpha + beta * gamma * gamma * s * s;
  };
  p.d3 = [=](double x) {
    const double s = 1.0 / std::cosh(gamma * x);
    return -2.0 * beta * std::pow(gamma, 3) * s * s * std::tanh(gamma * x);
  };
  p.d4 = [=](double x) {
    const double s = 1.0 / std::cosh(gamma * x);
    const double t = std::tanh(gamma * x);
    return -2.0 * beta * std::pow(gamma, 4) * (std::pow(s, 4) - 2.0 * s * s * t * t);
  };
  return p;
}

Potential1D cosh_potential() {
  Potential1D p;
  p.name = "cosh";
  p.v = [](double x) { return std::cosh(x); };
  p.d1 = [](double x) { return std::sinh(x); };
  p.d2 = [](double x) { return std::cosh(x); };
  p.d3 = [](double x) { return std::sinh(x); };
  p.d4 = [](double x) { return std::cosh(x); };
  return p;
}

Potential1D legendre_power_example(double q) {
  const double p = q / (q - 1.0);
  const double knot = 1.0 / p;
  // Beyond the knot, V'(x) = u^(q-1) with u = 1 + (p-1)(p x - 1).
  auto u_of = [=](double a) { return 1.0 + (p - 1.0) * (p * a - 1.0); };
  const double du = p * (p - 1.0);
  Potential1D pot;
  pot.name = "legendre_power_example";
  pot.v = [=](double x) {
    const double a = std::abs(x);
    if (a <= knot) return 0.5 * p * a * a;
    return 0.5 / p + (q - 1.0) * (q - 1.0) * (std::pow(u_of(a), q) - 1.0) / (q * q);
  };
  pot.d1 = [=](double x) {
    const double a = std::abs(x);
    const double s = x < 0 ? -1.0 : 1.0;
    if (a <= knot) return p * x;
    return s * std::pow(u_of(a), q - 1.0);
  };
  pot.d2 = [=](double x) {
    const double a = std::abs(x);
    if (a <= knot) return p;
    return p * std::pow(u_of(a), q - 2.0);
  };
  pot.d3 = [=](double x) {
    const double a = std::abs(x);
    const double s = x < 0 ? -1.0 : 1.0;
    if (a <= knot) return 0.0;
    return s * p * (q - 2.0) * du * std::pow(u_of(a), q - 3.0);
  };
  pot.d4 = [=](double x) {
    const double a = std::abs(x);
    if (a <= knot) return 0.0;
    return p * (q - 2.0) * (q - 3.0) * du * du * std::pow(u_of(a), q - 4.0);
  };
  return pot;
}

}  // namespace potentials

}  // namespace riccikit
