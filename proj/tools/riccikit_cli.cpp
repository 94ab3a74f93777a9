#include "riccikit/cli_runner.hpp"
#include "riccikit/density1d.hpp"
#include "riccikit/metric_families.hpp"
#include "riccikit/transport_legendre.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

using namespace riccikit;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::string out;
  std::string format;
  int workers = 1;
};

std::uint64_t resolve_seed(const Flags& flags, std::uint64_t from_config) {
  if (flags.seed) return *flags.seed;
  if (const char* env = std::getenv("RG_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::SchemaViolation, "RG_SEED: expected a non-negative integer");
    }
  }
  return from_config;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IOFailure, "cannot write " + path);
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json mat_json(const Mat& m) {
  Json a = Json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

PointSet points_from(const Json& doc, int dim, const Measure& measure, const Flags& flags) {
  if (doc.contains("points")) {
    const Json& pts = doc["points"];
    if (!pts.is_array()) throw Error(ErrorCode::SchemaViolation, "/points: expected an array of points");
    PointSet x(dim, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (!pts[j].is_array() || static_cast<int>(pts[j].size()) != dim) {
        throw Error(ErrorCode::SchemaViolation, "/points/" + std::to_string(j) + ": expected " + std::to_string(dim) + " numbers");
      }
      for (int i = 0; i < dim; ++i) x(i, static_cast<Eigen::Index>(j)) = pts[j][i].get<double>();
    }
    return x;
  }
  const int n = flags.samples.value_or(integer_at(doc, "samples", 16));
  return sample_measure(measure, n, resolve_seed(flags, doc.value("seed", std::uint64_t{0})), flags.workers);
}

int run_ricci(const Flags& flags) {
  const Json doc = read_json_file(flags.config);
  const int dim = integer_at(doc, "dim", 2);
  if (!doc.contains("measure")) throw Error(ErrorCode::SchemaViolation, "/measure: missing");
  const Measure measure = measure_from_json(doc["measure"], dim, doc.value("body", Json()));
  const Json metric = doc.value("metric", Json{{"kind", "euclidean"}});
  const std::string kind = metric.value("kind", std::string("euclidean"));
  const double N = number_at(doc, "N", kInfinity);
  std::function<Mat(const Vec&)> ricci;
  if (kind == "euclidean") {
    ricci = [&](const Vec& x) {
      const Vec g = gradient_of(measure.potential, x);
      Mat r = hessian_of(measure.potential, x);
      return Mat(r - inverse_n_minus_d(N, dim) * g * g.transpose());
    };
  } else if (kind == "product_power" || kind == "product_exp") {
    const ProductMetricData data = kind == "product_power" ? uniform_product(dim, power_profile(number_at(metric, "p", 0.5)))
                                                           : uniform_product(dim, exp_profile(number_at(metric, "rate", 0.5)));
    ricci = [data, &measure](const Vec& x) { return product_ricci(data, measure.potential, x); };
  } else if (kind == "conformal_radial") {
    const ConformalMetricData data = radial_conformal(dim, number_at(metric, "theta", 0.5), number_at(metric, "eps", 1e-3));
    ricci = [data, &measure, N](const Vec& x) { return conformal_ricci_N(data, measure.potential, N, x); };
  } else {
    throw Error(ErrorCode::SchemaViolation, "/metric/kind: unknown metric '" + kind + "'");
  }
  const PointSet x = points_from(doc, dim, measure, flags);
  Json rows = Json::array();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Mat r = ricci(x.col(j));
    rows.push_back({{"point", vec_json(x.col(j))}, {"ricci", mat_json(r)}, {"min_eigenvalue", min_eigenvalue(r)}});
  }
  write_text(Json{{"metric", kind}, {"N", std::isinf(N) ? Json("inf") : Json(N)}, {"rows", rows}}.dump(2) + "\n", flags.out);
  return 0;
}

int run_check(const Flags& flags) {
  SuiteConfig suite = parse_suite(read_json_file(flags.config));
  for (ExperimentConfig& c : suite.experiments) {
    c.seed = resolve_seed(flags, c.seed);
    if (flags.samples) c.samples = *flags.samples;
  }
  const VerificationReport report = run_suite(suite, flags.workers);
  const ExperimentConfig& first = suite.experiments.front();
  const std::string out = !flags.out.empty() ? flags.out : first.out;
  const std::string format = !flags.format.empty() ? flags.format : first.format;
  emit_report(report, format, out);
  return report_exit_code(report);
}

int run_spectrum(const Flags& flags) {
  const Json doc = read_json_file(flags.config);
  if (!doc.contains("potential")) throw Error(ErrorCode::SchemaViolation, "/potential: missing");
  const Potential1D v = potential_from_json(doc["potential"]);
  double a = v.lower, b = v.upper;
  if (doc.contains("interval")) {
    const Json& iv = doc["interval"];
    if (!iv.is_array() || iv.size() != 2) throw Error(ErrorCode::SchemaViolation, "/interval: expected [a, b]");
    a = iv[0].get<double>();
    b = iv[1].get<double>();
  } else if (!std::isfinite(a) || !std::isfinite(b)) {
    const Density1D density(v);
    a = density.lower();
    b = density.upper();
  }
  const int n = integer_at(doc, "n", 4096);
  const SpectralGap gap = spectral_gap_1d(v, a, b, n);
  write_text(Json{{"potential", v.name}, {"interval", {a, b}}, {"n", n}, {"lambda1", gap.lambda1}, {"poincare", gap.poincare}}
                     .dump(2) + "\n",
             flags.out);
  return 0;
}

int run_transport(const Flags& flags) {
  const Json doc = read_json_file(flags.config);
  for (const char* key : {"source", "target"}) {
    if (!doc.contains(key)) throw Error(ErrorCode::SchemaViolation, std::string("/") + key + ": missing");
  }
  const Density1D mu(potential_from_json(doc["source"]));
  const Density1D nu(potential_from_json(doc["target"]));
  const Potential1D vn = mu.potential(), wn = nu.potential();
  std::vector<double> xs;
  if (doc.contains("points")) {
    xs = doc["points"].get<std::vector<double>>();
  } else {
    const int n = integer_at(doc, "grid", 21);
    // Interior quantiles of the source.
    for (int k = 1; k <= n; ++k) xs.push_back(mu.quantile(double(k) / (n + 1)));
  }
  Json rows = Json::array();
  double worst = 0.0;
  for (double x : xs) {
    const MapValue m = monotone_map_1d(mu, nu, x);
    const double residual = vn.v(x) + std::log(m.dT) - wn.v(m.T);
    worst = std::max(worst, std::abs(residual));
    rows.push_back({{"x", x}, {"T", m.T}, {"dT", m.dT}, {"monge_ampere_residual", residual}});
  }
  Json out = {{"rows", rows}, {"max_abs_residual", worst}};
  if (doc.value("ke", false)) {
    const KESolution ke = ke_solve_1d(nu);
    double top = 0.0;
    for (double h : ke.d2phi) top = std::max(top, h);
    out["ke"] = {{"residual", ke.residual}, {"iterations", ke.iterations}, {"max_hessian", top}, {"shift", ke.shift}};
  }
  write_text(out.dump(2) + "\n", flags.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of curvature-weighted functional inequalities"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "root seed (overrides RG_SEED and the config)");
    sub->add_option("--samples", flags.samples, "sample budget")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "output path (stdout by default)");
    sub->add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", flags.workers, "worker threads")->check(CLI::PositiveNumber);
  };
  CLI::App* ricci = app.add_subcommand("ricci", "generalized Ricci tensor at points");
  CLI::App* check = app.add_subcommand("check", "run inequality suites");
  CLI::App* spectrum = app.add_subcommand("spectrum", "1D spectral gap oracle");
  CLI::App* transport = app.add_subcommand("transport", "1D monotone transport diagnostics");
  for (CLI::App* sub : {ricci, check, spectrum, transport}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ricci) return run_ricci(flags);
    if (*check) return run_check(flags);
    if (*spectrum) return run_spectrum(flags);
    return run_transport(flags);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const Json::exception& e) {
    std::cerr << "error: configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
