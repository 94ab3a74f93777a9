#include "riccikit/numerics.hpp"

#include "riccikit/common.hpp"

#include <Eigen/Eigenvalues>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <thread>

namespace riccikit {

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
  const std::size_t nthreads = std::min<std::size_t>(std::max(workers, 1), count);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n)), &gsl_integration_glfixed_table_free);
  if (!table) throw Error(ErrorCode::InvalidArgument, "Gauss–Legendre table allocation failed");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &rule.nodes[i], &rule.weights[i], table.get());
  }
  return rule;
}

QuadratureRule gauss_jacobi(int n, double alpha, double beta, double a, double b) {
  // GSL's Jacobi weight is (b - x)^alpha (x - a)^beta.
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(gsl_integration_fixed_jacobi, static_cast<std::size_t>(n), a, b, alpha, beta),
      &gsl_integration_fixed_free);
  if (!ws) throw Error(ErrorCode::InvalidArgument, "Gauss–Jacobi workspace allocation failed");
  QuadratureRule rule;
  const double* x = gsl_integration_fixed_nodes(ws.get());
  const double* w = gsl_integration_fixed_weights(ws.get());
  rule.nodes.assign(x, x + n);
  rule.weights.assign(w, w + n);
  return rule;
}

double hermite_cubic(double x0, double x1, double f0, double f1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * d1;
}

std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag, const std::vector<double>& off) {
  Eigen::SelfAdjointEigenSolver<Mat> es;
  Vec d = Eigen::Map<const Vec>(diag.data(), static_cast<Eigen::Index>(diag.size()));
  Vec e = Eigen::Map<const Vec>(off.data(), static_cast<Eigen::Index>(off.size()));
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigensolveFailure, "tridiagonal eigensolve failed");
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

}  // namespace riccikit
