#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace riccikit {

/// Runs body(i) for i in [0, count) on up to `workers` threads. Exceptions are
/// rethrown on the caller, lowest index first.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// n-point Gauss–Jacobi rule on [a, b] for the weight (b - x)^alpha (x - a)^beta.
QuadratureRule gauss_jacobi(int n, double alpha, double beta, double a, double b);

/// Hermite cubic on [x0, x1] from values and slopes.
double hermite_cubic(double x0, double x1, double f0, double f1, double d0, double d1, double x);

/// Smallest eigenvalues of a symmetric tridiagonal matrix, ascending.
std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag, const std::vector<double>& off);

}  // namespace riccikit
