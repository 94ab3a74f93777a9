#include "riccikit/transport_legendre.hpp"

#include "riccikit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace riccikit {

MapValue monotone_map_1d(const Density1D& mu, const Density1D& nu, double x) {
  const double u = mu.cdf(x);
  MapValue out;
  out.T = u <= 0.5 ? nu.quantile(u) : nu.isf(mu.sf(x));
  const double q = nu.pdf(out.T);
  if (!(q > 0.0)) throw Error(ErrorCode::CDFInversionFailure, "target density vanishes at the image point");
  out.dT = mu.pdf(x) / q;
  return out;
}

PotentialField transport_potential(const Density1D& mu, const Density1D& nu) {
  const auto src = std::make_shared<const Density1D>(mu);
  const auto dst = std::make_shared<const Density1D>(nu);
  const double origin = mu.quantile(0.5);
  const QuadratureRule rule = gauss_legendre(32, 0.0, 1.0);
  PotentialField f;
  f.dim = 1;
  f.convex = true;
  f.value = [=](const Vec& x) {
    double s = 0.0;
    const double w = x(0) - origin;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      s += rule.weights[k] * monotone_map_1d(*src, *dst, origin + w * rule.nodes[k]).T;
    }
    return s * w;
  };
  f.grad = [=](const Vec& x) { return Vec::Constant(1, monotone_map_1d(*src, *dst, x(0)).T); };
  f.hess = [=](const Vec& x) { return Mat::Constant(1, 1, monotone_map_1d(*src, *dst, x(0)).dT); };
  return f;
}

double monge_ampere_residual(const PotentialField& phi, const PotentialField& V, const PotentialField& W,
                             const Vec& x) {
  const Mat g = hessian_of(phi, x);
  Eigen::LLT<Mat> llt(symmetrize(g));
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::DegenerateHessian, "D^2 phi is not positive definite");
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return V.value(x) + logdet - W.value(gradient_of(phi, x));
}

PotentialField pushforward_potential(const PotentialField& phi, const PotentialField& V) {
  PotentialField out;
  out.dim = phi.dim;
  out.value = [phi, V](const Vec& x) {
    Eigen::LLT<Mat> llt(hessian_of(phi, x));
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::DegenerateHessian, "D^2 phi is not positive definite");
    return V.value(x) + 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  };
  return out;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
  if (n > 1) out.back() = b;
  return out;
}

namespace {

double solve_gradient(const Potential1D& V, double y, double guess) {
  double lo = V.lower;
  double hi = V.upper;
  double x = std::clamp(guess, std::nextafter(lo, hi), std::nextafter(hi, lo));
  for (int it = 0; it < 300; ++it) {
    const double g = V.d1(x) - y;
    const double h = V.d2(x);
    if (!(h > 0.0)) throw Error(ErrorCode::NotStronglyConvex, "V'' is not positive at x = " + std::to_string(x));
    if (g > 0) hi = std::min(hi, x); else lo = std::max(lo, x);
    if (g == 0.0) return x;
    double next = x - g / h;
    if (!(next > lo && next < hi)) {
      if (std::isfinite(lo) && std::isfinite(hi)) {
        next = 0.5 * (lo + hi);
      } else if (std::isfinite(lo)) {
        next = x + std::max(2.0 * std::abs(x - lo), 1.0);
      } else {
        next = x - std::max(2.0 * std::abs(hi - x), 1.0);
      }
    }
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  throw Error(ErrorCode::NoConvergence, "gradient inversion did not converge");
}

}  // namespace

LegendreData legendre_1d(const Potential1D& V, const std::vector<double>& ygrid) {
  LegendreData out;
  out.y = ygrid;
  const std::size_t n = ygrid.size();
  out.x.resize(n);
  out.conj.resize(n);
  out.dconj.resize(n);
  out.d2conj.resize(n);
  out.F.resize(n);
  double guess = std::isfinite(V.lower) && std::isfinite(V.upper) ? 0.5 * (V.lower + V.upper)
                 : std::isfinite(V.lower)                         ? V.lower + 1.0
                 : std::isfinite(V.upper)                         ? V.upper - 1.0
                                                                  : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = ygrid[i];
    const double x = solve_gradient(V, y, guess);
    const double h = V.d2(x);
    if (!(h > 0.0)) throw Error(ErrorCode::NotStronglyConvex, "V'' vanishes");
    out.x[i] = x;
    out.conj[i] = x * y - V.v(x);
    out.dconj[i] = x;
    out.d2conj[i] = 1.0 / h;
    out.F[i] = x * y + std::log(h);
    guess = x;
  }
  return out;
}

double legendre_biconjugate(const LegendreData& data, double x) {
  const auto& d = data.dconj;
  if (x < d.front() || x > d.back()) throw Error(ErrorCode::InvalidArgument, "x outside the tabulated gradient range");
  std::size_t i = static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), x) - d.begin());
  i = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, d.size() - 2);
  const double y0 = data.y[i], y1 = data.y[i + 1];
  auto grad = [&](double y) { return hermite_cubic(y0, y1, d[i], d[i + 1], data.d2conj[i], data.d2conj[i + 1], y); };
  double lo = y0, hi = y1;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (grad(mid) < x) lo = mid; else hi = mid;
  }
  const double y = 0.5 * (lo + hi);
  const double conj = hermite_cubic(y0, y1, data.conj[i], data.conj[i + 1], d[i], d[i + 1], y);
  return x * y - conj;
}

EntropicCheck entropic_condition_check(const LegendreData& data, double rho, bool include_gradient_term, double tol) {
  EntropicCheck out;
  out.worst_violation = kInfinity;
  const std::size_t n = data.y.size();
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "grid too small");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = data.y[i] - data.y[i - 1];
    const double hr = data.y[i + 1] - data.y[i];
    const double d2f = 2.0 * ((data.F[i + 1] - data.F[i]) / hr - (data.F[i] - data.F[i - 1]) / hl) / (hl + hr);
    double margin = d2f - 2.0 * rho * data.d2conj[i];
    if (include_gradient_term) {
      const double g = (std::log(data.d2conj[i + 1]) - std::log(data.d2conj[i - 1])) / (hl + hr);
      margin += 0.5 * g * g;
    }
    const double roundoff = 8.0 * eps * (std::abs(data.F[i - 1]) + 2 * std::abs(data.F[i]) + std::abs(data.F[i + 1])) /
                            (hl * hr);
    if (margin < out.worst_violation) {
      out.worst_violation = margin;
      out.worst_y = data.y[i];
    }
    if (margin < -(tol + roundoff)) out.convex = false;
  }
  return out;
}

double entropic_rho(const LegendreData& data, bool include_gradient_term, double hi) {
  if (!entropic_condition_check(data, 0.0, include_gradient_term).convex) return 0.0;
  double lo = 0.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (entropic_condition_check(data, mid, include_gradient_term).convex) lo = mid; else hi = mid;
  }
  return lo;
}

namespace {

// Integral over [x_i, x_{i+1}] of a function with values f and slopes df
// (trapezoid with the Hermite end correction).
double cell_integral(double h, double f0, double f1, double d0, double d1) {
  return 0.5 * h * (f0 + f1) + h * h / 12.0 * (d0 - d1);
}

struct GridState {
  std::vector<double> phi, dphi, d2phi;
};

void translate(GridState& s, const std::vector<double>& x, double t) {
  // New Phi(x) = old Phi(x + t).
  const std::size_t n = x.size();
  const double h = x[1] - x[0];
  GridState out = s;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = x[i] + t;
    if (z <= x.front() || z >= x.back()) {
      const std::size_t e = z <= x.front() ? 0 : n - 1;
      const double dz = z - x[e];
      out.phi[i] = s.phi[e] + s.dphi[e] * dz + 0.5 * s.d2phi[e] * dz * dz;
      out.dphi[i] = s.dphi[e] + s.d2phi[e] * dz;
      out.d2phi[i] = s.d2phi[e];
      continue;
    }
    std::size_t j = std::min<std::size_t>(static_cast<std::size_t>((z - x.front()) / h), n - 2);
    out.phi[i] = hermite_cubic(x[j], x[j + 1], s.phi[j], s.phi[j + 1], s.dphi[j], s.dphi[j + 1], z);
    out.dphi[i] = hermite_cubic(x[j], x[j + 1], s.dphi[j], s.dphi[j + 1], s.d2phi[j], s.d2phi[j + 1], z);
    const double w = (z - x[j]) / h;
    out.d2phi[i] = (1 - w) * s.d2phi[j] + w * s.d2phi[j + 1];
  }
  s = std::move(out);
}

double root_of_slope(const std::vector<double>& x, const GridState& s) {
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    if (s.dphi[j] <= 0.0 && s.dphi[j + 1] > 0.0) {
      double lo = x[j], hi = x[j + 1];
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = hermite_cubic(x[j], x[j + 1], s.dphi[j], s.dphi[j + 1], s.d2phi[j], s.d2phi[j + 1], mid);
        if (v <= 0) lo = mid; else hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

PotentialField grid_field(const std::vector<double>& x, const GridState& s) {
  const double h = x[1] - x[0];
  auto locate = [x, h](double z, double& w) {
    const std::size_t n = x.size();
    std::size_t j = z <= x.front() ? 0 : std::min<std::size_t>(static_cast<std::size_t>((z - x.front()) / h), n - 2);
    w = z;
    return j;
  };
  PotentialField f;
  f.dim = 1;
  f.convex = true;
  f.value = [x, s, locate](const Vec& p) {
    double z;
    const std::size_t j = locate(p(0), z);
    return hermite_cubic(x[j], x[j + 1], s.phi[j], s.phi[j + 1], s.dphi[j], s.dphi[j + 1], z);
  };
  f.grad = [x, s, locate](const Vec& p) {
    double z;
    const std::size_t j = locate(p(0), z);
    return Vec::Constant(1, hermite_cubic(x[j], x[j + 1], s.dphi[j], s.dphi[j + 1], s.d2phi[j], s.d2phi[j + 1], z));
  };
  f.hess = [x, s, locate, h](const Vec& p) {
    double z;
    const std::size_t j = locate(p(0), z);
    const double w = std::clamp((z - x[j]) / h, 0.0, 1.0);
    return Mat::Constant(1, 1, (1 - w) * s.d2phi[j] + w * s.d2phi[j + 1]);
  };
  return f;
}

}  // namespace

KESolution ke_solve_1d(const Density1D& target, const KEOptions& opt) {
  if (!target.bounded()) throw Error(ErrorCode::NonCompactTarget, "target support must be bounded");
  const double bary = target.mean();
  if (!opt.recenter && std::abs(bary) > 1e-10) {
    throw Error(ErrorCode::BarycenterNotZero, "target barycenter is " + std::to_string(bary));
  }
  const double shift = opt.recenter ? bary : 0.0;
  const Density1D nu = opt.recenter ? target.shifted(shift) : target;
  const double a = nu.lower(), b = nu.upper();
  if (!(a < 0.0 && b > 0.0)) throw Error(ErrorCode::BarycenterNotZero, "origin is not interior to the support");
  const double L = 34.0 / std::min(-a, b);
  const int n = opt.intervals;
  const std::vector<double> x = linspace(-L, L, n + 1);
  const double h = x[1] - x[0];

  GridState s;
  s.phi.resize(n + 1);
  s.dphi.resize(n + 1);
  s.d2phi.assign(n + 1, 1.0);
  for (int i = 0; i <= n; ++i) {
    s.phi[i] = 0.5 * (x[i] - opt.initial_offset) * (x[i] - opt.initial_offset);
    s.dphi[i] = x[i] - opt.initial_offset;
  }

  std::vector<double> m(n + 1), dm(n + 1), cell(n), left(n + 1), right(n + 1);
  GridState fresh = s;
  KESolution out;
  out.shift = shift;
  double residual = kInfinity;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    for (int i = 0; i <= n; ++i) {
      m[i] = std::exp(-s.phi[i]);
      dm[i] = -s.dphi[i] * m[i];
    }
    for (int i = 0; i < n; ++i) cell[i] = cell_integral(h, m[i], m[i + 1], dm[i], dm[i + 1]);
    left[0] = 0.0;
    for (int i = 0; i < n; ++i) left[i + 1] = left[i] + cell[i];
    right[n] = 0.0;
    for (int i = n; i-- > 0;) right[i] = right[i + 1] + cell[i];
    const double z = left[n];
    residual = std::abs(std::log(z));
    for (int i = 0; i <= n; ++i) {
      const double T = left[i] <= 0.5 * z ? nu.quantile(left[i] / z) : nu.isf(right[i] / z);
      fresh.dphi[i] = T;
      residual = std::max(residual, std::abs(s.dphi[i] - T));
      const double q = nu.pdf(T);
      // End nodes map onto the support boundary, where the ratio is 0/0.
      const bool interior = left[i] > 0.0 && right[i] > 0.0;
      fresh.d2phi[i] = interior && q > 1e-300 ? m[i] / z / q : -1.0;
    }
    for (int i = 0; i <= n; ++i) {
      if (fresh.d2phi[i] < 0.0) {
        // Fall back to a difference quotient where the target density underflows.
        const int lo = std::max(i - 1, 0), hi = std::min(i + 1, n);
        fresh.d2phi[i] = std::max((fresh.dphi[hi] - fresh.dphi[lo]) / (x[hi] - x[lo]), 0.0);
      }
    }
    if (residual < opt.tol) break;
    fresh.phi[0] = 0.0;
    for (int i = 0; i < n; ++i) {
      fresh.phi[i + 1] = fresh.phi[i] + cell_integral(h, fresh.dphi[i], fresh.dphi[i + 1], fresh.d2phi[i], fresh.d2phi[i + 1]);
    }
    const double pmin = *std::min_element(fresh.phi.begin(), fresh.phi.end());
    double znew = 0.0;
    for (int i = 0; i < n; ++i) {
      const double m0 = std::exp(-(fresh.phi[i] - pmin)), m1 = std::exp(-(fresh.phi[i + 1] - pmin));
      znew += cell_integral(h, m0, m1, -fresh.dphi[i] * m0, -fresh.dphi[i + 1] * m1);
    }
    const double level = std::log(znew) - pmin;
    for (int i = 0; i <= n; ++i) {
      fresh.phi[i] += level;
      s.phi[i] = (1 - opt.damping) * s.phi[i] + opt.damping * fresh.phi[i];
      s.dphi[i] = (1 - opt.damping) * s.dphi[i] + opt.damping * fresh.dphi[i];
      s.d2phi[i] = (1 - opt.damping) * s.d2phi[i] + opt.damping * fresh.d2phi[i];
    }
    const double t = root_of_slope(x, s);
    if (std::abs(t) > 1e-14) translate(s, x, t);
  }
  if (!(residual < opt.tol)) {
    throw Error(ErrorCode::NoConvergence, "fixed point stalled at residual " + std::to_string(residual));
  }
  out.x = x;
  out.phi = s.phi;
  out.dphi = s.dphi;
  out.d2phi = fresh.d2phi;
  out.residual = residual;
  out.iterations = it;
  GridState final_state{s.phi, s.dphi, fresh.d2phi};
  out.field = grid_field(x, final_state);
  return out;
}

double ke_residual(const KESolution& sol, const Density1D& target, double floor) {
  const Potential1D W = target.potential();
  const std::size_t n = sol.x.size();
  const double h = sol.x[1] - sol.x[0];
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (std::exp(-sol.phi[i]) < floor) continue;
    const double d2 = (-sol.dphi[i + 2] + 8 * sol.dphi[i + 1] - 8 * sol.dphi[i - 1] + sol.dphi[i - 2]) / (12 * h);
    const double r = -sol.phi[i] - std::log(d2) + W.v(sol.dphi[i] + sol.shift);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace riccikit
