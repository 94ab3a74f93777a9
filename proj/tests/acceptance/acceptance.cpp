// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "riccikit/cli_runner.hpp"
#include "riccikit/inequality_catalog.hpp"
#include "riccikit/metric_families.hpp"
#include "riccikit/transport_legendre.hpp"
#include "riccikit/verification_engine.hpp"
#include "support/fixtures.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace riccikit;
using fixtures::max_abs;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Settings {
  int samples = 200000;
  std::uint64_t seed = 20240611;
  int workers = 1;
  int alt_workers = 4;
  std::string csv;
};

Settings settings;
// Every engine report produced by criteria 4-12 and 14, in order.
std::ostringstream engine_log;

struct Outcome {
  bool pass = true;
  std::string detail;
};

ExperimentConfig experiment(const std::string& id, std::vector<int> dims, Json params = Json::object()) {
  ExperimentConfig c;
  c.suite = "acceptance";
  c.id = id;
  c.dims = std::move(dims);
  c.params = std::move(params);
  c.samples = settings.samples;
  c.seed = settings.seed;
  return c;
}

VerificationReport run(const std::vector<ExperimentConfig>& configs, int workers) {
  VerificationReport all;
  for (const ExperimentConfig& c : configs) {
    const VerificationReport r = run_config(c, workers);
    all.rows.insert(all.rows.end(), r.rows.begin(), r.rows.end());
  }
  return all;
}

std::vector<std::vector<ExperimentConfig>> engine_batches;

VerificationReport run_logged(const std::vector<ExperimentConfig>& configs) {
  engine_batches.push_back(configs);
  const VerificationReport r = run(configs, settings.workers);
  engine_log << report_csv(r);
  return r;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

/// Every row must pass the slack rule; report-only rows are not allowed here.
Outcome all_pass(const VerificationReport& r) {
  Outcome o;
  int pass = 0;
  double worst = kInfinity;
  for (const ReportRow& row : r.rows) {
    if (row.status == "pass") {
      ++pass;
      const double scaled = row.slack / std::max(std::abs(row.rhs), 1e-300);
      worst = std::min(worst, scaled);
      continue;
    }
    o.pass = false;
    if (o.detail.size() < 400) {
      o.detail += " [" + row.inequality + " d=" + std::to_string(row.dim) + " " + row.function + " " + row.status +
                  (row.message.empty() ? "" : ": " + row.message) + "]";
    }
  }
  o.detail = std::to_string(pass) + "/" + std::to_string(r.rows.size()) + " rows pass, min slack/rhs " + fmt(worst) +
             o.detail;
  if (r.rows.empty()) {
    o.pass = false;
    o.detail = "no rows";
  }
  return o;
}

const ReportRow* find_row(const VerificationReport& r, const std::string& id, int d, const std::string& fn) {
  for (const ReportRow& row : r.rows) {
    if (row.inequality == id && row.dim == d && row.function == fn) return &row;
  }
  return nullptr;
}

Outcome merge(Outcome a, const Outcome& b) {
  a.pass = a.pass && b.pass;
  a.detail += "; " + b.detail;
  return a;
}

// ---------------------------------------------------------------------------

Outcome tensor_agreement() {
  Rng rng(substream_seed(settings.seed, "tensor"));
  double worst_h = 0.0, worst_p = 0.0, worst_c = 0.0;
  for (int d : {1, 2, 3}) {
    const PotentialField phi = fixtures::smooth_convex(d, 100 + d);
    const PotentialField V = fixtures::smooth_convex(d, 200 + d);
    HessianMetricData data{phi, V, {}, nullptr, true};
    const MetricField g = hessian_metric(phi);
    for (int t = 0; t < 100; ++t) {
      const Vec x = fixtures::random_point(d, rng, -1.0, 1.0);
      worst_h = std::max(worst_h, max_abs(hessian_ricci(data, x).ric - generalized_ricci(g, V, x).ric_gmu));
    }
  }
  for (int d : {2, 4}) {
    const PotentialField V = fixtures::smooth_convex(d, 300 + d);
    for (const ProductMetricData& data : {uniform_product(d, power_profile(0.5)), uniform_product(d, exp_profile(0.7))}) {
      const MetricField g = product_metric(data);
      for (int t = 0; t < 50; ++t) {
        const Vec x = fixtures::random_point(d, rng, 0.3, 2.0);
        worst_p = std::max(worst_p, max_abs(product_ricci(data, V, x) - generalized_ricci(g, V, x).ric_gmu));
      }
    }
  }
  for (int d : {3, 6}) {
    const ConformalMetricData data = radial_conformal(d, 0.7, 1e-2);
    const MetricField g = conformal_metric(data);
    const PotentialField V = fixtures::smooth_convex(d, 400 + d);
    const double N = -2.0;
    for (int t = 0; t < 100; ++t) {
      Vec x = fixtures::random_point(d, rng, -1.0, 1.0);
      x *= rng.uniform(0.2, 0.9) / x.norm();
      worst_c = std::max(worst_c, max_abs(conformal_ricci_N(data, V, N, x) - generalized_ricci(g, V, x, N).ric_gmu_N));
    }
  }
  Outcome o;
  const double worst = std::max({worst_h, worst_p, worst_c});
  o.pass = worst < 1e-4;
  o.detail = "max abs error hessian " + fmt(worst_h) + ", product " + fmt(worst_p) + ", conformal " + fmt(worst_c);
  return o;
}

Outcome product_flatness() {
  Rng rng(substream_seed(settings.seed, "flat"));
  double worst = 0.0;
  for (int d : {2, 3}) {
    for (const ProductMetricData& data : {uniform_product(d, power_profile(0.5)), uniform_product(d, power_profile(0.75)),
                                          uniform_product(d, exp_profile(1.3))}) {
      const MetricField g = product_metric(data);
      for (int t = 0; t < 100; ++t) {
        const Vec x = fixtures::random_point(d, rng, 0.5, 2.0);
        worst = std::max(worst, max_abs(geometric_ricci_fd(g, x)));
      }
    }
  }
  return {worst < 1e-4, "sup |Ric_g| " + fmt(worst)};
}

Outcome one_dim_identity() {
  double worst = 0.0, ratio_margin = kInfinity;
  for (double q : {1.2, 1.5, 2.0, 3.0}) {
    for (double c : {0.5, 1.0, 2.0}) {
      const Potential1D v = potentials::power(c, q);
      for (int k = 0; k < 50; ++k) {
        const double x = 0.1 + 4.9 * k / 49.0;
        const double expected = c * q * q / 2 * std::pow(x, q - 2) + q * (2 - q) / (4 * x * x);
        const double got = ric_1d_exact(v, x);
        worst = std::max(worst, std::abs(got - expected) / std::max(1.0, std::abs(expected)));
        if (q <= 2.0) ratio_margin = std::min(ratio_margin, got / v.d2(x) - q / (2 * (q - 1)));
      }
    }
  }
  return {worst < 1e-10 && ratio_margin >= -1e-9,
          "max rel error " + fmt(worst) + ", min ratio margin " + fmt(ratio_margin)};
}

Outcome poly_product() {
  const Json trunc_gauss = {{"kind", "product"}, {"coord", {{"kind", "quadratic"}, {"lower", 0.0}}}};
  std::vector<ExperimentConfig> cs;
  cs.push_back(experiment("poly_product", {1, 2, 4}, {{"part", 2}}));
  cs.push_back(experiment("poly_product", {1, 2, 4}, {{"part", 2}, {"measure", trunc_gauss}}));
  for (double lambda : {1.0, 2.0}) cs.push_back(experiment("poly_product", {1, 2, 4}, {{"part", 3}, {"lambda", lambda}}));
  for (int part : {4, 5}) {
    for (double p : {0.5, 0.75}) cs.push_back(experiment("poly_product", {1, 2, 4}, {{"part", part}, {"p", p}}));
  }
  return all_pass(run_logged(cs));
}

Outcome exp_product() {
  std::vector<ExperimentConfig> cs;
  cs.push_back(experiment("exp_product", {2, 4}));
  cs.push_back(experiment("exp_product", {2, 4},
                          {{"lambda", 2.0},
                           {"measure",
                            {{"kind", "tilted"},
                             {"base", {{"kind", "product"}, {"coord", {{"kind", "exponential"}, {"rate", 2.0}}}}},
                             {"delta", 0.5},
                             {"kappa", 0.2}}}}));
  return all_pass(run_logged(cs));
}

Outcome cone_variance() {
  const VerificationReport r = run_logged({experiment("cone_variance", {4, 6})});
  Outcome o = all_pass(r);
  const ReportRow* x1 = find_row(r, "cone_variance", 4, "x1");
  if (!x1) return {false, "missing x1 row"};
  const double z = std::abs(x1->lhs - 3.0 / 80.0) / x1->lhs_err;
  o.pass = o.pass && z <= 4.0;
  o.detail += "; Var(x1) d=4 " + fmt(x1->lhs) + " vs 3/80, " + fmt(z) + " stderr";
  return o;
}

Outcome hardy_boundary() {
  std::vector<ExperimentConfig> cs;
  for (double R : {1.0, 2.0}) {
    for (int d : {6, 8}) {
      for (double N : {0.0, -1.0, -double(d)}) {
        cs.push_back(experiment("hardy_boundary", {d}, {{"N", N}, {"body", {{"kind", "ball"}, {"radius", R}}}}));
      }
    }
  }
  Outcome o = all_pass(run_logged(cs));
  // N = 0 against the explicit form, term by term at boundary and interior points.
  double worst = 0.0;
  for (double R : {1.0, 2.0}) {
    for (int d : {6, 8}) {
      const Json body = {{"kind", "ball"}, {"radius", R}};
      const InequalityInstance a = instantiate("hardy_boundary", d, {{"N", 0.0}, {"body", body}}, settings.seed);
      const InequalityInstance b = instantiate("hardy_n0", d, {{"body", body}}, settings.seed);
      const BoundarySample bs = boundary_sample(*a.body, 256, settings.seed);
      const PointSet xs = sample_measure(a.measure, 256, settings.seed);
      for (Eigen::Index j = 0; j < bs.points.cols(); ++j) {
        const Vec y = bs.points.col(j);
        worst = std::max(worst, std::abs(a.boundary->weight(y) - b.boundary->weight(y)));
      }
      for (Eigen::Index j = 0; j < xs.cols(); ++j) {
        const Vec x = xs.col(j);
        worst = std::max(worst, max_abs(a.rhs_constant * a.rhs_weight(x) - b.rhs_constant * b.rhs_weight(x)));
      }
      worst = std::max(worst, std::abs(a.lhs_scale - b.lhs_scale));
    }
  }
  o.pass = o.pass && worst < 1e-10;
  o.detail += "; N=0 term mismatch " + fmt(worst);
  return o;
}

Outcome strong_boundary() {
  std::vector<ExperimentConfig> cs;
  cs.push_back(experiment("strong_boundary", {8, 10}, {{"part", 1}}));
  cs.push_back(experiment("strong_boundary", {8, 10}, {{"part", 2}}));
  const VerificationReport r = run_logged(cs);
  Outcome o = all_pass(r);
  for (int d : {8, 10}) {
    const ReportRow* x1 = nullptr;
    for (const ReportRow& row : r.rows) {
      if (row.dim == d && row.function == "x1") {
        x1 = &row;
        break;  // part 1 rows come first
      }
    }
    if (!x1) return {false, "missing x1 row"};
    const double ratio = x1->lhs / x1->rhs;
    const double err = std::hypot(x1->lhs_err / x1->rhs, x1->lhs * x1->rhs_err / (x1->rhs * x1->rhs));
    const double z = std::abs(ratio - 0.25) / err;
    o.pass = o.pass && z <= 4.0;
    o.detail += "; d=" + std::to_string(d) + " ratio " + fmt(ratio) + " (" + fmt(z) + " stderr)";
  }
  return o;
}

Outcome refined_dominance() {
  Rng rng(substream_seed(settings.seed, "pairs"));
  Outcome o;
  int compared = 0;
  double worst_gap = -kInfinity, worst_eig = kInfinity;
  for (int pair = 0; pair < 5; ++pair) {
    const Json mu = {{"kind", "product"},
                     {"coord",
                      {{"kind", "logcosh_mix"},
                       {"alpha", rng.uniform(0.3, 1.5)},
                       {"beta", rng.uniform(0.0, 1.0)},
                       {"gamma", rng.uniform(0.5, 1.5)},
                       {"delta", rng.uniform(-0.3, 0.3)}}}};
    Json nu_coord;
    switch (pair % 3) {
      case 0: {
        const double a = rng.uniform(0.5, 2.0);
        nu_coord = {{"kind", "uniform"}, {"a", -a}, {"b", a}};
        break;
      }
      case 1:
        nu_coord = {{"kind", "quadratic"}, {"curvature", rng.uniform(0.5, 2.0)}, {"center", rng.uniform(-0.5, 0.5)}};
        break;
      default:
        nu_coord = {{"kind", "logcosh_mix"}, {"alpha", rng.uniform(0.2, 1.0)}, {"beta", rng.uniform(0.0, 1.0)},
                    {"gamma", 1.0}, {"delta", 0.0}};
    }
    const Json nu = {{"kind", "product"}, {"coord", nu_coord}};
    const VerificationReport refined = run_logged({experiment("refined_bl", {1}, {{"measure", mu}, {"target", nu}})});
    const VerificationReport classical = run_logged({experiment("classical_bl", {1}, {{"measure", mu}})});
    o = compared == 0 ? all_pass(refined) : merge(o, all_pass(refined));
    if (refined.rows.size() != classical.rows.size()) return {false, "row count mismatch"};
    for (std::size_t i = 0; i < refined.rows.size(); ++i) {
      const double gap = refined.rows[i].rhs - 2.0 * classical.rows[i].rhs;
      worst_gap = std::max(worst_gap, gap);
      o.pass = o.pass && refined.rows[i].function == classical.rows[i].function && gap <= 1e-8;
      ++compared;
    }
    // D^2V + (1/2d) grad V grad V^T dominates D^2V at every sample point.
    const Measure m = measure_from_json(mu, 1);
    const PointSet xs = sample_measure(m, settings.samples, settings.seed);
    for (Eigen::Index j = 0; j < xs.cols(); ++j) {
      const Vec x = xs.col(j);
      const Vec g = gradient_of(m.potential, x);
      worst_eig = std::min(worst_eig, min_eigenvalue(Mat(0.5 * g * g.transpose())));
    }
  }
  o.pass = o.pass && worst_eig >= 0.0;
  o.detail = "max(refined - 2 classical) " + fmt(worst_gap) + " over " + std::to_string(compared) +
             " rows, min eig of the gradient term " + fmt(worst_eig) + "; " + o.detail;
  return o;
}

Outcome compact_and_pw() {
  Outcome o;
  const std::vector<std::pair<std::string, Json>> targets = {
      {"uniform", {{"kind", "uniform"}, {"a", -0.5}, {"b", 0.5}}},
      {"cosine", {{"kind", "cosine"}, {"half_width", 0.5}}},
  };
  for (const auto& [name, coord] : targets) {
    const Json measure = {{"kind", "product"}, {"coord", coord}};
    const InequalityInstance in = instantiate("compact_bl", 1, {{"measure", measure}}, settings.seed);
    const double residual = in.notes.at("ke_residual");
    const double top = in.notes.at("ke_max_hessian");
    const double R = in.notes.at("R");
    o.pass = o.pass && residual < 1e-8 && top <= 2 * R * R;
    const VerificationReport bl = run_logged({experiment("compact_bl", {1}, {{"measure", measure}})});
    const VerificationReport pw = run_logged({experiment("payne_weinberger", {1}, {{"measure", measure}})});
    const Outcome a = all_pass(bl), b = all_pass(pw);
    double ratio = 0.0;
    for (const ReportRow& row : pw.rows) ratio = std::max(ratio, row.lhs / row.rhs);
    o.pass = o.pass && a.pass && b.pass;
    o.detail += name + ": KE residual " + fmt(residual) + ", max D2phi " + fmt(top) + " <= " + fmt(2 * R * R) +
                ", BL " + a.detail + ", PW " + b.detail + ", PW max ratio " + fmt(ratio) + "; ";
  }
  return o;
}

Outcome entropic() {
  std::vector<ExperimentConfig> cs;
  for (double q : {1.2, 1.5, 2.0}) cs.push_back(experiment("muq_lsi", {1, 2}, {{"q", q}, {"c", 1.0}}));
  for (double q : {1.2, 1.5, 2.0}) cs.push_back(experiment("bakry_t_lsi", {1, 2}, {{"q", q}, {"c", 1.0}}));
  cs.push_back(experiment("entropic_bl", {1}));
  Outcome o = all_pass(run_logged(cs));
  const InequalityInstance ex = instantiate("entropic_bl", 1, Json::object(), settings.seed);
  const double rho = ex.notes.at("rho");
  o.pass = o.pass && rho > 0.0;
  o.detail += "; bisected rho_3 " + fmt(rho);
  return o;
}

Outcome klartag() {
  const Json laplace = {{"kind", "product"}, {"coord", {{"kind", "laplace"}, {"rate", 1.0}}}};
  const Json trunc = {{"kind", "product"}, {"coord", {{"kind", "quadratic"}, {"lower", -2.0}, {"upper", 2.0}}}};
  return all_pass(run_logged({experiment("klartag_transfer", {2, 3}, {{"measure", laplace}}),
                              experiment("klartag_transfer", {2, 3}, {{"measure", trunc}})}));
}

Outcome oracles() {
  const double uni = spectral_gap_1d(potentials::uniform(0.0, 1.0), 0.0, 1.0).lambda1;
  const double gauss = spectral_gap_1d(potentials::quadratic(), -8.0, 8.0).lambda1;
  const LegendreData ch = legendre_1d(potentials::cosh_potential(), linspace(-10, 10, 2001));
  double involution = 0.0;
  for (int k = 0; k <= 500; ++k) {
    const double x = -2.5 + 5.0 * k / 500;
    involution = std::max(involution, std::abs(legendre_biconjugate(ch, x) - std::cosh(x)));
  }
  const Density1D e(potentials::exponential(1.0));
  const Density1D u(potentials::uniform(0.0, 1.0));
  const PotentialField phi = transport_potential(e, u);
  const PotentialField V = separable_field({e.potential()});
  const PotentialField W = separable_field({u.potential()});
  double ma = 0.0;
  for (int k = 1; k < 100; ++k) {
    ma = std::max(ma, std::abs(monge_ampere_residual(phi, V, W, Vec::Constant(1, e.quantile(k / 100.0)))));
  }
  const double e_uni = std::abs(uni - kPi * kPi), e_gauss = std::abs(gauss - 1.0);
  return {e_uni < 1e-4 && e_gauss < 1e-4 && involution < 1e-6 && ma < 1e-6,
          "|gap - pi^2| " + fmt(e_uni) + ", |gap - 1| " + fmt(e_gauss) + ", involution " + fmt(involution) +
              ", Monge-Ampere " + fmt(ma)};
}

Outcome simplex_trends() {
  Outcome o;
  o.detail = "report only:";
  for (int d = 3; d <= 10; ++d) {
    const VerificationReport l1 = run_logged({experiment("l1_type", {d})});
    const VerificationReport lip = run_logged({experiment("one_lip_reduction", {d})});
    const ReportRow* a = find_row(l1, "l1_type", d, "rayleigh_cp");
    const ReportRow* b = find_row(lip, "one_lip_reduction", d, "rayleigh_cp_vs_lipschitz_var");
    if (!a || !b || !std::isfinite(a->lhs / a->rhs) || !std::isfinite(b->lhs / b->rhs)) {
      o.pass = false;
      o.detail += " d=" + std::to_string(d) + " missing";
      continue;
    }
    o.detail += " d=" + std::to_string(d) + " C_P/K " + fmt(a->lhs / a->rhs) + " C_P/supVar " + fmt(b->lhs / b->rhs);
  }
  return o;
}

Outcome determinism() {
  std::ostringstream other;
  for (const auto& batch : engine_batches) other << report_csv(run(batch, settings.alt_workers));
  const std::string first = engine_log.str();
  const std::string second = other.str();
  if (!settings.csv.empty()) std::ofstream(settings.csv, std::ios::binary) << first;
  std::size_t lines = 0;
  for (char ch : first) lines += ch == '\n';
  return {first == second && !first.empty(), std::to_string(lines) + " csv lines, workers " +
                                                 std::to_string(settings.workers) + " vs " +
                                                 std::to_string(settings.alt_workers) +
                                                 (first == second ? " byte-identical" : " differ")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance run"};
  app.add_option("--samples", settings.samples, "samples per instance");
  app.add_option("--seed", settings.seed, "root seed");
  app.add_option("--workers", settings.workers, "worker threads for the main pass");
  app.add_option("--alt-workers", settings.alt_workers, "worker threads for the determinism rerun");
  app.add_option("--csv", settings.csv, "write the engine rows of the main pass here");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form vs finite-difference Ricci", tensor_agreement},
      {"product metric flatness", product_flatness},
      {"one-dimensional Ricci identity", one_dim_identity},
      {"orthant product metric constants", poly_product},
      {"exponential product corollary", exp_product},
      {"simplex cone-measure variance", cone_variance},
      {"Hardy inequality with boundary term", hardy_boundary},
      {"strong boundary convexity, theta 1/2", strong_boundary},
      {"refined BL dominance", refined_dominance},
      {"1D KE map, compact BL and Payne-Weinberger", compact_and_pw},
      {"entropic log-Sobolev criteria", entropic},
      {"unconditional transfer", klartag},
      {"spectral, Legendre and Monge-Ampere oracles", oracles},
      {"simplex Poincare trends", simplex_trends},
      {"determinism across worker counts", determinism},
  };
  const auto start = std::chrono::steady_clock::now();
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("criterion %2zu %s %s (%.1fs): %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("total %.1fs, %d of %zu criteria failed\n", total, failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
