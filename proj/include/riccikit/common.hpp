#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace riccikit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
/// Columns are points; rows are coordinates.
using PointSet = Eigen::MatrixXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class ErrorCode {
  NonPositiveDefiniteMetric,
  StepTooLarge,
  InvalidDimensionParameter,
  MissingThirdDerivatives,
  ProfileNotPositive,
  DegenerateHessian,
  NonUnitNormal,
  CDFInversionFailure,
  NotStronglyConvex,
  NonCompactTarget,
  BarycenterNotZero,
  NoConvergence,
  UndefinedAtOrigin,
  NonSmoothBoundaryPoint,
  RejectionBudgetExceeded,
  NonPositiveAngle,
  HypothesisViolated,
  UnknownId,
  NonNormalizable,
  DegenerateSample,
  BoundaryQuadratureFailure,
  EigensolveFailure,
  SchemaViolation,
  UnknownInequalityId,
  IOFailure,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

Mat symmetrize(const Mat& a);

/// Smallest eigenvalue of the symmetric part of `a`.
double min_eigenvalue(const Mat& a);

/// Validates a metric value. Eigenvalues down to -1e-10 (1 + |g|_F) are
/// treated as roundoff and clamped to that threshold; anything lower throws
/// NonPositiveDefiniteMetric.
Mat checked_metric(const Mat& g);

/// Inverse of a symmetric positive-definite matrix; throws DegenerateHessian
/// if the Cholesky factorization fails.
Mat spd_inverse(const Mat& a);

/// 1/(N - d) with the N = +inf convention 0.
double inverse_n_minus_d(double n, int d);

/// Rejects generalized dimensions outside 1/N in (-inf, 1/d): finite N with
/// 0 < N <= d. N = 0 and N = +inf are admissible.
void validate_dimension_parameter(double n, int d);

}  // namespace riccikit
