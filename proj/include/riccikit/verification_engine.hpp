#pragma once

#include "riccikit/inequality_catalog.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace riccikit {

struct TestFunction {
  std::string id;
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> grad;
  std::optional<double> lipschitz_bound;
  bool vanishes_on_boundary = false;
};

/// Largest |grad - central difference| over the points, scaled by 1 + |grad|.
double gradient_self_test(const TestFunction& f, const PointSet& points, double h = 1e-6);

/// x_i, |x|^2, sum x_i, products x_i x_j (all pairs for d <= 4, neighbours
/// otherwise), cos(pi k u.x) for k = 1, 2 with u = (1, ..., 1)/sqrt(d), and
/// five seeded cubics a.x + (b.x)^2/2 + (c.x)^3/6.
std::vector<TestFunction> default_suite(int dim, std::uint64_t seed);
/// default_suite divided by Lipschitz bounds valid on |x| <= radius.
std::vector<TestFunction> lipschitz_suite(int dim, std::uint64_t seed, double radius);
/// default_suite times 1 - gauge(x)^2, which vanishes on the boundary.
std::vector<TestFunction> dirichlet_suite(const ConvexBody& body, std::uint64_t seed);
/// Suite matching instance.family.
std::vector<TestFunction> suite_for(const InequalityInstance& instance, std::uint64_t seed);

struct Estimate {
  double value = 0.0;
  double stderr = 0.0;
};

/// Points on the boundary carrying cone-measure weights. `group` consecutive
/// points form one resampling unit (antithetic pairs use 2). With `exact`
/// the weights are a quadrature rule and contribute no sampling error.
struct BoundarySample {
  PointSet points;
  std::vector<double> weights;
  int group = 1;
  bool exact = false;
};

struct EngineOptions {
  int samples = 200000;
  int bootstrap = 200;
  double rel_tol = 0.02;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string suite = "default";
  /// Keep only these function ids when non-empty.
  std::vector<std::string> functions;
};

/// Facet quadrature for the simplex, antithetic cone samples for centrally
/// symmetric bodies and plain cone samples otherwise.
BoundarySample boundary_sample(const ConvexBody& body, int n, std::uint64_t seed, int workers = 1);

inline constexpr int kMaxBlocks = 256;

/// Var (unbiased), Ent of f^2 or E f^2 of the values with block-bootstrap
/// stderr. Values are used as given; no recentring.
Estimate estimate_functional(LhsKind kind, const std::vector<double>& values, int bootstrap, std::uint64_t seed);

/// Left side (times instance.lhs_scale) of f on the samples.
Estimate estimate_lhs(const InequalityInstance& instance, const TestFunction& f, const PointSet& samples,
                      const EngineOptions& options = {});
/// Right side: interior term, coordinate moment term and boundary term.
Estimate estimate_rhs(const InequalityInstance& instance, const TestFunction& f, const PointSet& samples,
                      const BoundarySample& boundary, const EngineOptions& options = {});

struct ReportRow {
  std::string suite;
  std::string inequality;
  int dim = 0;
  std::string function;
  double lhs = 0.0;
  double lhs_err = 0.0;
  double rhs = 0.0;
  double rhs_err = 0.0;
  double slack = 0.0;
  std::string status;
  std::uint64_t seed = 0;
  long n = 0;
  std::string message;
  std::vector<HypothesisResult> hypotheses;
};

struct VerificationReport {
  std::vector<ReportRow> rows;
};

/// pass/fail under slack >= -(3 sqrt(lhs_err^2 + rhs_err^2) + rel_tol rhs).
std::string slack_status(double lhs, double lhs_err, double rhs, double rhs_err, double rel_tol);

/// One row per suite function. Rows of instances with unknown constants are
/// report-only. Evaluation errors and hypothesis failures on the samples turn
/// the rows into status "error" instead of throwing.
VerificationReport check_inequality(const InequalityInstance& instance, const EngineOptions& options);

/// 0 when every pass/fail row passes, 1 on any failure, else 3 on any error.
int report_exit_code(const VerificationReport& report);

struct SpectralGap {
  double lambda1 = 0.0;
  double poincare = 0.0;
};

/// First nonzero Neumann eigenvalue of -f'' + V' f' on [a, b] (weight e^{-V}),
/// cell-centred finite volumes on n and 2n cells with Richardson extrapolation.
SpectralGap spectral_gap_1d(const Potential1D& V, double a, double b, int n = 4096);

struct PsdResult {
  double min_eigenvalue = kInfinity;
  Vec location;
};

PsdResult psd_verify(const QuadraticFormField& field, const PointSet& points);

/// max Var(f) / E|grad f|^2 over span{x_i, x_i x_j}: a lower bound for the
/// Poincare constant of the sampled measure.
double rayleigh_lower_bound(const PointSet& samples);

}  // namespace riccikit
