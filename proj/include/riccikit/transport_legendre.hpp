#pragma once

#include "riccikit/density1d.hpp"
#include "riccikit/fields.hpp"

#include <vector>

namespace riccikit {

struct MapValue {
  double T = 0.0;
  double dT = 0.0;
};

/// Monotone rearrangement of mu onto nu evaluated at x.
MapValue monotone_map_1d(const Density1D& mu, const Density1D& nu, double x);

/// One-dimensional potential whose derivative is the monotone map; the value
/// is the integral of T from the median of mu.
PotentialField transport_potential(const Density1D& mu, const Density1D& nu);

/// V + log det D^2 phi - W(grad phi); zero exactly when grad phi pushes
/// exp(-V) onto exp(-W).
double monge_ampere_residual(const PotentialField& phi, const PotentialField& V, const PotentialField& W,
                             const Vec& x);

/// W(grad phi(x)) = V(x) + log det D^2 phi(x), as a function of x.
PotentialField pushforward_potential(const PotentialField& phi, const PotentialField& V);

struct LegendreData {
  std::vector<double> y;
  std::vector<double> x;  ///< maximizer, grad V*(y)
  std::vector<double> conj;
  std::vector<double> dconj;
  std::vector<double> d2conj;
  std::vector<double> F;  ///< <y, x> + log V''(x)
};

/// Legendre transform of a strongly convex potential on the given y grid.
LegendreData legendre_1d(const Potential1D& V, const std::vector<double>& ygrid);

/// Uniform grid helper.
std::vector<double> linspace(double a, double b, int n);

/// V** at x from a Hermite interpolation of the tabulated transform.
double legendre_biconjugate(const LegendreData& data, double x);

struct EntropicCheck {
  bool convex = true;
  double worst_violation = 0.0;  ///< minimum margin over the grid
  double worst_y = 0.0;
};

/// Checks F'' (+ 1/2 ((log V*'')')^2 when requested) >= 2 rho V*'' by second
/// differences on the grid interior.
EntropicCheck entropic_condition_check(const LegendreData& data, double rho, bool include_gradient_term,
                                       double tol = 1e-8);

/// Largest rho passing entropic_condition_check, by bisection on [0, hi].
double entropic_rho(const LegendreData& data, bool include_gradient_term, double hi = 1e3);

struct KESolution {
  std::vector<double> x;
  std::vector<double> phi;
  std::vector<double> dphi;
  std::vector<double> d2phi;
  PotentialField field;
  double residual = 0.0;
  int iterations = 0;
  double shift = 0.0;  ///< translation applied to nu before solving
};

struct KEOptions {
  double tol = 1e-8;
  int max_iter = 500;
  double damping = 0.5;
  int intervals = 8192;
  bool recenter = true;
  double initial_offset = 0.0;  ///< initial guess |x - offset|^2 / 2 + const
};

/// Solves exp(-Phi) = Phi'' exp(-W(Phi')) for a compactly supported target by
/// damped fixed-point iteration on the monotone map.
KESolution ke_solve_1d(const Density1D& nu, const KEOptions& options = {});

/// Pointwise log-residual -Phi - log Phi'' + W(Phi') on grid nodes whose
/// density exceeds `floor`.
double ke_residual(const KESolution& sol, const Density1D& nu, double floor = 1e-12);

}  // namespace riccikit
