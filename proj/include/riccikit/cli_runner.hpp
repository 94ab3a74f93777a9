#pragma once

#include "riccikit/verification_engine.hpp"

#include <string>
#include <vector>

namespace riccikit {

struct ExperimentConfig {
  std::string suite = "default";
  std::string id;
  /// measure / body / target specs and scalar parameters for instantiate().
  Json params = Json::object();
  std::vector<int> dims;
  int samples = 200000;
  int bootstrap = 200;
  std::uint64_t seed = 0;
  double rel_tol = 0.02;
  std::vector<std::string> functions;
  std::string out;
  std::string format = "csv";
};

struct SuiteConfig {
  std::string name = "default";
  std::vector<ExperimentConfig> experiments;
};

/// Validates one experiment. Errors: SchemaViolation (message starts with the
/// JSON pointer of the offending value) and UnknownInequalityId.
ExperimentConfig parse_config(const Json& document, const std::string& pointer = "");

/// Either a single experiment or {"name": ..., "experiments": [...]}; suite
/// level keys (samples, seed, bootstrap, rel_tol) are defaults for members.
SuiteConfig parse_suite(const Json& document);

Json read_json_file(const std::string& path);

/// Every dimension of the experiment; instantiation errors become rows.
VerificationReport run_config(const ExperimentConfig& config, int workers = 1);
VerificationReport run_suite(const SuiteConfig& suite, int workers = 1);

inline constexpr const char* kCsvHeader = "suite,inequality,dim,function,lhs,lhs_err,rhs,rhs_err,slack,status,seed,n";

std::string report_csv(const VerificationReport& report);
Json report_json(const VerificationReport& report);
VerificationReport report_from_json(const Json& document);

/// Writes csv or json to `path` (stdout when empty). Errors: IOFailure.
void emit_report(const VerificationReport& report, const std::string& format, const std::string& path);

/// Process exit status for an error code: 2 for configuration errors, else 3.
int exit_code_for(ErrorCode code);

}  // namespace riccikit
