#include "riccikit/common.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace riccikit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveDefiniteMetric: return "NonPositiveDefiniteMetric";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::InvalidDimensionParameter: return "InvalidDimensionParameter";
    case ErrorCode::MissingThirdDerivatives: return "MissingThirdDerivatives";
    case ErrorCode::ProfileNotPositive: return "ProfileNotPositive";
    case ErrorCode::DegenerateHessian: return "DegenerateHessian";
    case ErrorCode::NonUnitNormal: return "NonUnitNormal";
    case ErrorCode::CDFInversionFailure: return "CDFInversionFailure";
    case ErrorCode::NotStronglyConvex: return "NotStronglyConvex";
    case ErrorCode::NonCompactTarget: return "NonCompactTarget";
    case ErrorCode::BarycenterNotZero: return "BarycenterNotZero";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UndefinedAtOrigin: return "UndefinedAtOrigin";
    case ErrorCode::NonSmoothBoundaryPoint: return "NonSmoothBoundaryPoint";
    case ErrorCode::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorCode::NonPositiveAngle: return "NonPositiveAngle";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::NonNormalizable: return "NonNormalizable";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::BoundaryQuadratureFailure: return "BoundaryQuadratureFailure";
    case ErrorCode::EigensolveFailure: return "EigensolveFailure";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::UnknownInequalityId: return "UnknownInequalityId";
    case ErrorCode::IOFailure: return "IOFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

double min_eigenvalue(const Mat& a) {
  if (a.rows() == 1) return a(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Mat checked_metric(const Mat& g) {
  if (!g.allFinite()) {
    throw Error(ErrorCode::NonPositiveDefiniteMetric, "metric has non-finite entries");
  }
  Mat s = symmetrize(g);
  const double threshold = -1e-10 * (1.0 + s.norm());
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  const double lo = es.eigenvalues()(0);
  if (lo > 0.0) return s;
  if (lo < threshold) {
    throw Error(ErrorCode::NonPositiveDefiniteMetric,
                "minimum eigenvalue " + std::to_string(lo));
  }
  // Roundoff: lift the offending eigenvalues to the threshold magnitude.
  Vec ev = es.eigenvalues().cwiseMax(-threshold);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Mat spd_inverse(const Mat& a) {
  Eigen::LLT<Mat> llt(symmetrize(a));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::DegenerateHessian, "matrix is not positive definite");
  }
  return symmetrize(llt.solve(Mat::Identity(a.rows(), a.cols())));
}

double inverse_n_minus_d(double n, int d) {
  if (std::isinf(n) && n > 0) return 0.0;
  return 1.0 / (n - static_cast<double>(d));
}

void validate_dimension_parameter(double n, int d) {
  if (std::isnan(n) || (std::isinf(n) && n < 0)) {
    throw Error(ErrorCode::InvalidDimensionParameter, "N must be a real number or +inf");
  }
  if (std::isfinite(n) && n > 0.0 && n <= static_cast<double>(d)) {
    throw Error(ErrorCode::InvalidDimensionParameter,
                "N = " + std::to_string(n) + " lies in (0, d] for d = " + std::to_string(d));
  }
}

}  // namespace riccikit
