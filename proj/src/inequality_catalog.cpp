#include "riccikit/inequality_catalog.hpp"

#include "riccikit/metric_families.hpp"
#include "riccikit/transport_legendre.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace riccikit {

std::string_view to_string(LhsKind kind) {
  switch (kind) {
    case LhsKind::Variance: return "variance";
    case LhsKind::EntropyOfSquare: return "entropy_of_square";
    case LhsKind::L2Dirichlet: return "l2_dirichlet";
  }
  return "unknown";
}

namespace {

constexpr double kMarginTolerance = 1e-8;
constexpr int kPilotPoints = 1024;

[[noreturn]] void schema(const std::string& message) { throw Error(ErrorCode::SchemaViolation, message); }

Json merged(const CatalogEntry& entry, const Json& params) {
  Json p = entry.parameters;
  if (params.is_object()) {
    for (auto it = params.begin(); it != params.end(); ++it) p[it.key()] = it.value();
  } else if (!params.is_null()) {
    schema("/params: expected an object");
  }
  return p;
}

bool has(const Json& p, const char* key) { return p.contains(key) && !p[key].is_null(); }

Measure measure_param(const Json& p, int dim, const Json& fallback) {
  const Json& body = has(p, "body") ? p["body"] : Json();
  return measure_from_json(has(p, "measure") ? p["measure"] : fallback, dim, body);
}

std::shared_ptr<const ConvexBody> body_param(const Json& p, int dim, const Json& fallback) {
  return std::make_shared<const ConvexBody>(body_from_json(has(p, "body") ? p["body"] : fallback, dim));
}

HypothesisResult static_check(const std::string& name, double margin) {
  HypothesisResult r;
  r.name = name;
  r.margin = margin;
  r.passed = margin >= -kMarginTolerance;
  return r;
}

double min_tangent_eigenvalue(const Mat& form, const Vec& normal) {
  const int d = static_cast<int>(normal.size());
  if (d == 1) return kInfinity;
  Eigen::HouseholderQR<Mat> qr(normal);
  const Mat q = qr.householderQ() * Mat::Identity(d, d);
  const Mat basis = q.rightCols(d - 1);
  return min_eigenvalue(basis.transpose() * form * basis);
}

HypothesisCheck hessian_check(const Measure& m, const std::string& name = "log_concave") {
  const PotentialField v = m.potential;
  return {name, [v](const Vec& x) { return min_eigenvalue(hessian_of(v, x)); }, false};
}

HypothesisCheck slope_check(const Measure& m, double lambda) {
  const PotentialField v = m.potential;
  return {"potential_slope", [v, lambda](const Vec& x) { return gradient_of(v, x).minCoeff() - lambda; }, false};
}

HypothesisResult orthant_support(const Measure& m) {
  if (m.lower.size() != m.dim) return static_check("orthant_support", -1.0);
  return static_check("orthant_support", m.lower.minCoeff());
}

Mat diag_of(const Vec& v) { return v.asDiagonal(); }

void require_products(const Measure& m, const std::string& id) {
  if (m.marginals.empty()) schema("/measure: " + id + " needs a product measure");
}

double barycenter_norm(const Measure& m) {
  if (!m.marginals.empty()) {
    double s = 0.0;
    for (const auto& d : m.marginals) s += d->mean() * d->mean();
    return std::sqrt(s);
  }
  if (m.body && m.body->kind() != BodyKind::Simplex) return 0.0;
  if (m.body) return m.body->radius() / (m.dim + 1.0) * std::sqrt(double(m.dim));
  return kInfinity;
}

double minus_n_over(double N) { return std::isinf(N) ? 1.0 : N / (N - 1.0); }

// Boundary data of a smooth body at a boundary point.
struct BoundaryPoint {
  Vec n;
  double angle = 0.0;  // <x, n>
  BoundaryCurvature curvature;
};

BoundaryPoint boundary_point(const ConvexBody& body, const Vec& y) {
  BoundaryPoint b;
  const GaugeNormal gn = body.gauge_and_normal(y);
  b.n = gn.normal;
  b.angle = y.dot(gn.normal) / gn.gauge;
  b.curvature = body.boundary_curvature(y / gn.gauge);
  return b;
}

void require_smooth_body(const ConvexBody& body, const std::string& id) {
  const bool smooth = body.kind() == BodyKind::Ball || body.kind() == BodyKind::Curve2D ||
                      (body.kind() == BodyKind::LpBall && body.exponent() >= 2.0);
  if (!smooth) schema("/body: " + id + " needs a body with smooth boundary (ball, lp_ball with p >= 2, ellipse)");
}

// ---------------------------------------------------------------------------

InequalityInstance base_instance(const std::string& id, int d, LhsKind kind) {
  InequalityInstance in;
  in.id = id;
  in.dim = d;
  in.lhs_kind = kind;
  return in;
}

InequalityInstance build_classical_bl(int d, const Json& p) {
  InequalityInstance in = base_instance("classical_bl", d, LhsKind::Variance);
  in.measure = measure_param(p, d, Json{{"kind", "gaussian"}});
  const PotentialField v = in.measure.potential;
  in.rhs_weight = [v](const Vec& x) { return spd_inverse(hessian_of(v, x)); };
  in.hypotheses.push_back(hessian_check(in.measure, "hessian_positive"));
  return in;
}

ProductMetricData metric_from_json(const Json& spec, int d) {
  const std::string kind = spec.value("kind", std::string("product_power"));
  if (kind == "product_power") {
    const double pw = number_at(spec, "p", 0.5);
    if (!(pw > 0.0 && pw < 1.0)) schema("/params/metric/p: expected 0 < p < 1");
    return uniform_product(d, power_profile(pw));
  }
  if (kind == "product_exp") return uniform_product(d, exp_profile(number_at(spec, "rate", 0.5)));
  if (kind == "euclidean") return uniform_product(d, power_profile(0.0));
  schema("/params/metric/kind: unknown metric '" + kind + "'");
}

InequalityInstance build_generalized_bl(int d, const Json& p) {
  InequalityInstance in = base_instance("generalized_bl", d, LhsKind::Variance);
  in.measure = measure_param(p, d, p["measure"]);
  const ProductMetricData metric = metric_from_json(p["metric"], d);
  const PotentialField v = in.measure.potential;
  in.rhs_weight = [metric, v](const Vec& x) { return spd_inverse(product_ricci(metric, v, x)); };
  in.hypotheses.push_back(
      {"ricci_positive", [metric, v](const Vec& x) { return min_eigenvalue(product_ricci(metric, v, x)); }, false});
  if (p["metric"].value("kind", std::string("product_power")) != "euclidean") {
    in.static_checks.push_back(orthant_support(in.measure));
  }
  return in;
}

InequalityInstance build_refined_bl(int d, const Json& p) {
  InequalityInstance in = base_instance("refined_bl", d, LhsKind::Variance);
  in.measure = measure_param(p, d, p["measure"]);
  require_products(in.measure, "refined_bl");
  const Measure target = measure_from_json(p["target"], d);
  require_products(target, "refined_bl target");
  auto source = in.measure.marginals;
  auto dest = target.marginals;
  const PotentialField v = in.measure.potential;
  // Q = D^2V + D^2Phi D^2W(grad Phi) D^2Phi + (1/2d) w w^T, w = grad V - D^2Phi grad W(grad Phi).
  auto q_form = [source, dest, v, d](const Vec& x) {
    Vec dphi(d), wp(d), wpp(d);
    for (int i = 0; i < d; ++i) {
      const MapValue mv = monotone_map_1d(*source[i], *dest[i], x(i));
      dphi(i) = mv.dT;
      wp(i) = dest[i]->raw_potential().d1(mv.T);
      wpp(i) = dest[i]->raw_potential().d2(mv.T);
    }
    const Vec w = gradient_of(v, x) - dphi.cwiseProduct(wp);
    Mat q = hessian_of(v, x) + diag_of(dphi.cwiseProduct(dphi).cwiseProduct(wpp)) + (0.5 / d) * w * w.transpose();
    return symmetrize(q);
  };
  in.rhs_weight = [q_form](const Vec& x) { return spd_inverse(q_form(x)); };
  in.rhs_constant = 2.0;
  in.hypotheses.push_back(hessian_check(in.measure, "hessian_positive"));
  in.hypotheses.push_back({"target_convex",
                           [source, dest, d](const Vec& x) {
                             double m = kInfinity;
                             for (int i = 0; i < d; ++i) {
                               const double t = monotone_map_1d(*source[i], *dest[i], x(i)).T;
                               m = std::min(m, dest[i]->raw_potential().d2(t));
                             }
                             return m;
                           },
                           false});
  return in;
}

InequalityInstance build_negdim_bl(int d, const Json& p) {
  InequalityInstance in = base_instance("negdim_bl", d, LhsKind::Variance);
  in.measure = measure_param(p, d, p["measure"]);
  const PotentialField v = in.measure.potential;
  auto form = [v, d](const Vec& x) {
    const Vec g = gradient_of(v, x);
    return Mat(hessian_of(v, x) + (0.5 / d) * g * g.transpose());
  };
  in.rhs_weight = [form](const Vec& x) { return spd_inverse(form(x)); };
  in.rhs_constant = 2.0;
  in.hypotheses.push_back(hessian_check(in.measure));
  in.hypotheses.push_back({"weight_positive", [form](const Vec& x) { return min_eigenvalue(form(x)); }, false});
  return in;
}

InequalityInstance build_compact_bl(int d, const Json& p) {
  InequalityInstance in = base_instance("compact_bl", d, LhsKind::Variance);
  in.measure = measure_param(p, d, p["measure"]);
  require_products(in.measure, "compact_bl");
  const auto nu = in.measure.marginals[0];
  if (!nu->bounded()) throw Error(ErrorCode::NonCompactTarget, "compact_bl needs a compactly supported measure");
  const double R = number_at(p, "R", std::max(std::abs(nu->lower()), std::abs(nu->upper())));
  in.static_checks.push_back(static_check("barycenter", 1e-10 - std::abs(nu->mean())));
  in.static_checks.push_back(static_check("support_radius", R - std::max(std::abs(nu->lower()), std::abs(nu->upper()))));
  const KESolution ke = ke_solve_1d(*nu);
  const double max_d2 = *std::max_element(ke.d2phi.begin(), ke.d2phi.end());
  in.static_checks.push_back(static_check("ke_residual", 1e-8 - ke.residual));
  in.static_checks.push_back(static_check("ke_trace_bound", 2.0 * R * R - max_d2));
  in.notes["R"] = R;
  in.notes["ke_residual"] = ke.residual;
  in.notes["ke_max_hessian"] = max_d2;
  in.notes["ke_iterations"] = ke.iterations;
  const Potential1D w = nu->raw_potential();
  in.rhs_weight = [w, R](const Vec& x) { return Mat::Constant(1, 1, 1.0 / (0.5 / (R * R) + w.d2(x(0)))); };
  in.rhs_constant = 2.0;
  in.hypotheses.push_back({"target_log_concave", [w](const Vec& x) { return w.d2(x(0)); }, false});
  return in;
}

InequalityInstance build_payne_weinberger(int d, const Json& p) {
  InequalityInstance in = base_instance("payne_weinberger", d, LhsKind::Variance);
  in.measure = measure_param(p, d, p["measure"]);
  const double R = number_at(p, "R", in.measure.support_radius);
  if (!std::isfinite(R)) throw Error(ErrorCode::NonCompactTarget, "payne_weinberger needs a bounded support");
  in.static_checks.push_back(static_check("support_radius", R - in.measure.support_radius));
  in.static_checks.push_back(static_check("barycenter", 1e-10 - barycenter_norm(in.measure)));
  in.rhs_weight = [d](const Vec&) { return Mat(Mat::Identity(d, d)); };
  in.rhs_constant = 2.0 * R * R;
  in.notes["R"] = R;
  if (in.measure.potential.hess || in.measure.potential.grad) in.hypotheses.push_back(hessian_check(in.measure));
  return in;
}

InequalityInstance build_bakry_emery(int d, const Json& p) {
  InequalityInstance in = base_instance("bakry_emery_lsi", d, LhsKind::EntropyOfSquare);
  in.measure = measure_param(p, d, p["measure"]);
  const double rho = number_at(p, "rho", 1.0);
  if (!(rho > 0.0)) schema("/params/rho: expected rho > 0");
  const PotentialField v = in.measure.potential;
  in.rhs_weight = [d](const Vec&) { return Mat(Mat::Identity(d, d)); };
  in.rhs_constant = 2.0 / rho;
  in.hypotheses.push_back({"curvature_bound", [v, rho](const Vec& x) { return min_eigenvalue(hessian_of(v, x)) - rho; }, false});
  in.notes["rho"] = rho;
  return in;
}

InequalityInstance build_entropic_bl(int d, const Json& p) {
  InequalityInstance in = base_instance("entropic_bl", d, LhsKind::EntropyOfSquare);
  in.measure = measure_param(p, d, p["measure"]);
  require_products(in.measure, "entropic_bl");
  const auto mu = in.measure.marginals[0];
  const Potential1D v = mu->raw_potential();
  const int n = integer_at(p, "grid", 2001);
  const std::vector<double> ygrid = linspace(v.d1(mu->lower()), v.d1(mu->upper()), n);
  const LegendreData data = legendre_1d(v, ygrid);
  const bool gradient_term = p.value("gradient_term", false);
  const double rho = has(p, "rho") ? number_at(p, "rho", 0.0) : entropic_rho(data, gradient_term);
  const EntropicCheck check = entropic_condition_check(data, rho, gradient_term);
  in.static_checks.push_back(static_check("rho_positive", rho));
  HypothesisResult condition = static_check("entropic_condition", check.worst_violation);
  condition.passed = check.convex;
  in.static_checks.push_back(condition);
  in.notes["rho"] = rho;
  in.rhs_weight = [v](const Vec& x) { return Mat::Constant(1, 1, 1.0 / v.d2(x(0))); };
  in.rhs_constant = 2.0 / std::max(rho, 1e-300);
  in.hypotheses.push_back(hessian_check(in.measure, "hessian_positive"));
  return in;
}

Json power_coord(double c, double q) {
  if (q == 1.0) return Json{{"kind", "exponential"}, {"rate", c}};
  return Json{{"kind", "power"}, {"c", c}, {"q", q}};
}

InequalityInstance build_muq_lsi(int d, const Json& p) {
  InequalityInstance in = base_instance("muq_lsi", d, LhsKind::EntropyOfSquare);
  const double q = number_at(p, "q", 1.5), c = number_at(p, "c", 1.0);
  in.static_checks.push_back(static_check("exponent_range", std::min(q - 1.0, 2.0 - q)));
  in.static_checks.push_back(static_check("scale_positive", c));
  in.measure = measure_param(p, d, Json{{"kind", "product"}, {"coord", power_coord(c, q)}});
  in.static_checks.push_back(orthant_support(in.measure));
  in.rhs_weight = [q, d](const Vec& x) {
    Vec w(d);
    for (int i = 0; i < d; ++i) w(i) = std::pow(x(i), 2.0 - q);
    return diag_of(w);
  };
  in.rhs_constant = 4.0 / (c * q * q);
  return in;
}

InequalityInstance build_bakry_t_lsi(int d, const Json& p) {
  InequalityInstance in = base_instance("bakry_t_lsi", d, LhsKind::EntropyOfSquare);
  const double q = number_at(p, "q", 1.5), c = number_at(p, "c", 1.0);
  in.static_checks.push_back(static_check("exponent_range", std::min(q - 1.0, 2.0 - q)));
  in.static_checks.push_back(static_check("scale_positive", c));
  in.measure = measure_param(p, d, Json{{"kind", "product"}, {"coord", {{"kind", "exponential"}, {"rate", c}}}});
  in.static_checks.push_back(orthant_support(in.measure));
  const std::string form = p.value("form", std::string("derived"));
  if (form == "derived") {
    // Pushing the mu_q inequality through t = x^q: x^(2-q) f'(x)^2 = q^2 t h'(t)^2.
    in.rhs_weight = [](const Vec& t) { return diag_of(t); };
    in.rhs_constant = 4.0 / c;
  } else if (form == "root_weight") {
    in.rhs_weight = [q, d](const Vec& t) {
      Vec w(d);
      for (int i = 0; i < d; ++i) w(i) = std::pow(t(i), 1.0 / q);
      return diag_of(w);
    };
    in.rhs_constant = 4.0 / (c * q);
    in.constant_known = false;
  } else {
    schema("/params/form: expected \"derived\" or \"root_weight\"");
  }
  in.notes["q"] = q;
  return in;
}

InequalityInstance build_qgt2_lsi(int d, const Json& p) {
  InequalityInstance in = base_instance("qgt2_lsi", d, LhsKind::EntropyOfSquare);
  const double q = number_at(p, "q", 3.0);
  in.static_checks.push_back(static_check("exponent_range", q - 2.0));
  in.measure = measure_param(p, d, Json{{"kind", "product"}, {"coord", power_coord(1.0, q)}});
  in.rhs_weight = [q, d](const Vec& x) {
    Vec w(d);
    for (int i = 0; i < d; ++i) w(i) = std::min(1.0, std::pow(x(i), 2.0 - q));
    return diag_of(w);
  };
  in.constant_known = false;
  return in;
}

InequalityInstance build_poly_product(int d, const Json& p) {
  const int part = integer_at(p, "part", 2);
  if (part < 1 || part > 5) schema("/params/part: expected 1..5");
  InequalityInstance in = base_instance("poly_product", d, part >= 4 ? LhsKind::EntropyOfSquare : LhsKind::Variance);
  const double lambda = number_at(p, "lambda", 1.0);
  const double R = number_at(p, "R", 2.0);
  const double pw = number_at(p, "p", part == 5 ? 0.75 : 0.5);
  Json coord = {{"kind", "exponential"}, {"rate", (part == 3 || part == 5) ? lambda : 1.0}};
  if (part == 4) coord["upper"] = R;
  in.measure = measure_param(p, d, Json{{"kind", "product"}, {"coord", coord}});
  in.static_checks.push_back(orthant_support(in.measure));
  in.notes["part"] = part;
  const PotentialField v = in.measure.potential;
  const ProductMetricData metric = uniform_product(d, power_profile(pw));
  switch (part) {
    case 1:
      if (!(pw > 0.0 && pw < 1.0)) schema("/params/p: expected 0 < p < 1");
      in.rhs_weight = [metric, v](const Vec& x) { return spd_inverse(product_ricci(metric, v, x)); };
      in.hypotheses.push_back(
          {"ricci_positive", [metric, v](const Vec& x) { return min_eigenvalue(product_ricci(metric, v, x)); }, false});
      in.notes["p"] = pw;
      break;
    case 2:
      in.rhs_weight = [](const Vec& x) { return diag_of(x.cwiseProduct(x)); };
      in.rhs_constant = 4.0;
      in.hypotheses.push_back(hessian_check(in.measure));
      in.hypotheses.push_back(slope_check(in.measure, 0.0));
      break;
    case 3:
      in.rhs_weight = [](const Vec& x) { return diag_of(x); };
      in.rhs_constant = 1.0 / lambda;
      in.hypotheses.push_back(hessian_check(in.measure));
      in.hypotheses.push_back(slope_check(in.measure, lambda));
      in.notes["lambda"] = lambda;
      break;
    case 4:
    case 5: {
      if (part == 4 && !(pw > 0.0 && pw < 1.0)) schema("/params/p: expected 0 < p < 1");
      if (part == 5 && !(pw >= 0.5 && pw < 1.0)) schema("/params/p: expected 1/2 <= p < 1");
      const double rho = part == 4 ? rho_poly_bounded(pw, R) : rho_poly_monotone(pw, lambda);
      in.rhs_weight = [pw, d](const Vec& x) {
        Vec w(d);
        for (int i = 0; i < d; ++i) w(i) = std::pow(x(i), 2.0 * pw);
        return diag_of(w);
      };
      in.rhs_constant = 2.0 / rho;
      in.hypotheses.push_back(hessian_check(in.measure));
      in.hypotheses.push_back(slope_check(in.measure, part == 4 ? 0.0 : lambda));
      in.hypotheses.push_back({"ricci_lower_bound",
                               [metric, v, pw, rho](const Vec& x) {
                                 const Vec s = x.array().pow(pw).matrix();
                                 const Mat scaled = s.asDiagonal() * product_ricci(metric, v, x) * s.asDiagonal();
                                 return min_eigenvalue(scaled) - rho;
                               },
                               false});
      if (part == 4) {
        const double top = in.measure.upper.size() == d ? in.measure.upper.maxCoeff() : kInfinity;
        in.static_checks.push_back(static_check("support_in_box", R - top));
      }
      in.notes["p"] = pw;
      in.notes["rho"] = rho;
      break;
    }
  }
  return in;
}

InequalityInstance build_exp_product(int d, const Json& p) {
  InequalityInstance in = base_instance("exp_product", d, LhsKind::Variance);
  const double lambda = number_at(p, "lambda", 1.0);
  const bool corollary = p.value("corollary", true);
  Json fallback = {{"kind", "tilted"},
                   {"base", {{"kind", "product"}, {"coord", {{"kind", "exponential"}, {"rate", lambda}}}}},
                   {"delta", 0.2},
                   {"kappa", 0.1}};
  in.measure = measure_param(p, d, fallback);
  in.static_checks.push_back(orthant_support(in.measure));
  in.hypotheses.push_back(hessian_check(in.measure));
  const PotentialField v = in.measure.potential;
  if (corollary) {
    in.rhs_weight = [d](const Vec&) { return Mat(Mat::Identity(d, d)); };
    in.rhs_constant = 4.0 / (lambda * lambda);
    in.hypotheses.push_back(slope_check(in.measure, lambda));
  } else {
    Vec rates = Vec::Constant(d, 0.5 * lambda);
    if (has(p, "rates")) {
      if (!p["rates"].is_array() || static_cast<int>(p["rates"].size()) != d) schema("/params/rates: expected d numbers");
      for (int i = 0; i < d; ++i) rates(i) = p["rates"][i].get<double>();
    }
    in.rhs_weight = [v, rates](const Vec& x) {
      const Vec g = gradient_of(v, x);
      return diag_of((rates.cwiseProduct(g - rates)).cwiseInverse());
    };
    in.hypotheses.push_back(
        {"slope_above_rates", [v, rates](const Vec& x) { return (gradient_of(v, x) - rates).minCoeff(); }, false});
  }
  in.notes["lambda"] = lambda;
  return in;
}

InequalityInstance build_klartag(int d, const Json& p) {
  InequalityInstance in = base_instance("klartag_transfer", d, LhsKind::Variance);
  in.measure = measure_param(p, d, p["measure"]);
  require_products(in.measure, "klartag_transfer");
  const int part = integer_at(p, "orthant_part", 2);
  const double lambda = number_at(p, "lambda", 1.0);
  double asym = 0.0;
  for (const auto& m : in.measure.marginals) {
    const Potential1D& v = m->raw_potential();
    if (std::isfinite(v.lower) || std::isfinite(v.upper)) asym = std::max(asym, std::abs(v.lower + v.upper));
    for (int k = 1; k <= 16; ++k) {
      const double x = 0.25 * k * std::min(1.0, m->upper());
      asym = std::max(asym, std::abs(v.v(x) - v.v(-x)));
    }
  }
  in.static_checks.push_back(static_check("unconditional", -asym));
  in.hypotheses.push_back(hessian_check(in.measure));
  const PotentialField v = in.measure.potential;
  if (part == 2) {
    in.rhs_weight = [](const Vec& x) { return diag_of(x.cwiseProduct(x)); };
    in.rhs_constant = 4.0;
  } else if (part == 3) {
    in.rhs_weight = [](const Vec& x) { return diag_of(x.cwiseAbs()); };
    in.rhs_constant = 1.0 / lambda;
  } else {
    schema("/params/orthant_part: expected 2 or 3");
  }
  const double slope = part == 2 ? 0.0 : lambda;
  in.hypotheses.push_back({"orthant_slope",
                           [v, slope](const Vec& x) {
                             const Vec g = gradient_of(v, x);
                             double m = kInfinity;
                             for (int i = 0; i < x.size(); ++i) m = std::min(m, (x(i) >= 0 ? g(i) : -g(i)) - slope);
                             return m;
                           },
                           false});
  in.coordinate_moment_term = true;
  return in;
}

std::shared_ptr<const ConvexBody> simplex_body(const Json& p, int d, const std::string& id) {
  auto body = body_param(p, d, Json{{"kind", "simplex"}});
  if (body->kind() != BodyKind::Simplex) schema("/body: " + id + " is implemented for the simplex orthant");
  return body;
}

InequalityInstance build_cone_variance(int d, const Json& p) {
  InequalityInstance in = base_instance("cone_variance", d, LhsKind::Variance);
  in.body = simplex_body(p, d, "cone_variance");
  in.measure = cone_measure(*in.body);
  const double lambda = number_at(p, "lambda", 1.0 / in.body->radius());
  in.static_checks.push_back(static_check("diagonality", 1.0 / in.body->radius() - lambda));
  const double coef = 4.0 / (lambda * lambda * (d - 1.0) * (d - 2.0));
  auto body = in.body;
  BoundaryTerm term;
  term.uses_function = false;
  term.free_constant = false;
  term.weight = [body, coef](const Vec& y) {
    const GaugeNormal gn = body->gauge_and_normal(y);
    const double s = y.dot(gn.normal);
    return coef * y.squaredNorm() / (s * s);
  };
  in.boundary = term;
  in.family = FunctionFamily::Lipschitz;
  in.notes["lambda"] = lambda;
  return in;
}

InequalityInstance build_l1_type(int d, const Json& p, bool one_lip) {
  InequalityInstance in = base_instance(one_lip ? "one_lip_reduction" : "l1_type", d, LhsKind::Variance);
  in.body = simplex_body(p, d, in.id);
  in.measure = uniform_measure(*in.body);
  const double t = in.body->radius();
  // Closed forms on t * simplex: E|x|^2 = 2 d t^2 / ((d+1)(d+2)), E_sigma |x|^2/<x,n>^2 = 2d/(d+1), lambda = 1/t.
  const double interior = 2.0 * d * t * t / ((d + 1.0) * (d + 2.0));
  const double boundary = t * t * 2.0 * d / (d + 1.0);
  const int form = integer_at(p, "form", 1);
  const double K = form == 1 ? (interior + boundary) / (double(d) * d)
                             : (1.0 + (d + 2.0)) / (double(d) * d) * interior;
  in.rhs_weight = [d](const Vec&) { return Mat(Mat::Identity(d, d)); };
  in.rhs_constant = one_lip ? 1.0 : K;
  in.constant_known = false;
  in.notes["poincare_rhs"] = K;
  if (one_lip) {
    in.family = FunctionFamily::Lipschitz;
    in.notes["compare_lipschitz"] = 1.0;
  }
  return in;
}

InequalityInstance build_dim_bl_boundary(int d, const Json& p) {
  const int part = integer_at(p, "part", 1);
  if (part < 1 || part > 3) schema("/params/part: expected 1..3");
  InequalityInstance in = base_instance("dim_bl_boundary", d, part == 3 ? LhsKind::L2Dirichlet : LhsKind::Variance);
  in.body = body_param(p, d, Json{{"kind", "ball"}});
  require_smooth_body(*in.body, "dim_bl_boundary");
  in.measure = uniform_measure(*in.body);
  const double N = number_at(p, "N", -double(d));
  validate_dimension_parameter(N, d);
  double theta = number_at(p, "theta", std::nan(""));
  if (std::isnan(theta)) {
    if (!(N < 0.0)) schema("/params/theta: required unless N < 0");
    theta = -(d - N) / (2.0 * N);
  }
  const double eps = number_at(p, "eps", default_radial_eps(in.body->circumradius()));
  const ConformalMetricData data = radial_conformal(d, theta, eps);
  const PotentialField flat = constant_field(d, std::log(in.body->volume()));
  in.lhs_scale = minus_n_over(N);
  in.static_checks.push_back(static_check("lhs_scale_positive", in.lhs_scale));
  auto ric = [data, flat, N](const Vec& x) { return conformal_ricci_N(data, flat, N, x); };
  in.rhs_weight = [ric](const Vec& x) { return spd_inverse(ric(x)); };
  in.hypotheses.push_back({"ricci_N_positive", [ric](const Vec& x) { return min_eigenvalue(ric(x)); }, false});
  auto body = in.body;
  auto boundary_data = [body, data, flat](const Vec& y) {
    const BoundaryPoint b = boundary_point(*body, y);
    return std::make_pair(b, conformal_boundary(data, flat, y, b.n, b.curvature.II, b.curvature.H));
  };
  if (part == 1) {
    BoundaryTerm term;
    term.weight = [boundary_data, d](const Vec& y) {
      const auto [b, cb] = boundary_data(y);
      return (d / b.angle) * cb.measure_factor / cb.H;
    };
    in.boundary = term;
  }
  if (part == 1 || part == 3) {
    in.hypotheses.push_back({"mean_convex", [boundary_data](const Vec& y) { return boundary_data(y).second.H; }, true});
  } else {
    in.hypotheses.push_back({"locally_convex",
                             [boundary_data](const Vec& y) {
                               const auto [b, cb] = boundary_data(y);
                               return min_tangent_eigenvalue(cb.II, b.n);
                             },
                             true});
  }
  if (part == 3) in.family = FunctionFamily::Dirichlet;
  in.notes["N"] = N;
  in.notes["theta"] = theta;
  in.notes["eps"] = eps;
  in.notes["part"] = part;
  return in;
}

std::shared_ptr<const ConvexBody> centered_body(const Json& p, int d, const std::string& id) {
  auto body = body_param(p, d, Json{{"kind", "ball"}});
  require_smooth_body(*body, id);
  return body;
}

InequalityInstance build_hardy_boundary(int d, const Json& p) {
  InequalityInstance in = base_instance("hardy_boundary", d, LhsKind::Variance);
  in.body = centered_body(p, d, "hardy_boundary");
  in.measure = uniform_measure(*in.body);
  const double N = number_at(p, "N", 0.0);
  if (!(N <= 0.0)) schema("/params/N: expected N <= 0");
  in.static_checks.push_back(static_check("small_dimension", small_dimension_condition(N, d) ? 0.0 : -1.0));
  in.lhs_scale = 1.0 / (1.0 - N);
  const double c = 4.0 / (d * (d - N));
  in.rhs_weight = [c, d](const Vec& x) { return Mat(c * x.squaredNorm() * Mat::Identity(d, d)); };
  auto body = in.body;
  auto denom = [body, N, d](const Vec& y, double* angle) {
    const BoundaryPoint b = boundary_point(*body, y);
    *angle = b.angle;
    return 0.5 * (d - N) * b.angle / y.squaredNorm() - N * b.curvature.H;
  };
  BoundaryTerm term;
  term.weight = [denom, d](const Vec& y) {
    double angle = 0.0;
    const double den = denom(y, &angle);
    return (d / angle) / den;
  };
  in.boundary = term;
  in.hypotheses.push_back({"boundary_weight_positive",
                           [denom](const Vec& y) {
                             double angle = 0.0;
                             return denom(y, &angle);
                           },
                           true});
  in.notes["N"] = N;
  return in;
}

InequalityInstance build_hardy_dirichlet(int d, const Json& p) {
  InequalityInstance in = base_instance("hardy_dirichlet", d, LhsKind::L2Dirichlet);
  in.body = body_param(p, d, Json{{"kind", "ball"}});
  in.measure = uniform_measure(*in.body);
  const double c = 4.0 / (double(d) * d);
  in.rhs_weight = [c, d](const Vec& x) { return Mat(c * x.squaredNorm() * Mat::Identity(d, d)); };
  in.family = FunctionFamily::Dirichlet;
  return in;
}

InequalityInstance build_hardy_n0(int d, const Json& p) {
  InequalityInstance in = base_instance("hardy_n0", d, LhsKind::Variance);
  in.body = centered_body(p, d, "hardy_n0");
  in.measure = uniform_measure(*in.body);
  const double c = 4.0 / (double(d) * d);
  in.rhs_weight = [c, d](const Vec& x) { return Mat(c * x.squaredNorm() * Mat::Identity(d, d)); };
  auto body = in.body;
  BoundaryTerm term;
  term.weight = [body, d](const Vec& y) {
    const GaugeNormal gn = body->gauge_and_normal(y);
    const double s = y.dot(gn.normal) / gn.gauge;
    return (d / s) * 2.0 * y.squaredNorm() / (d * s);
  };
  in.boundary = term;
  return in;
}

InequalityInstance build_strong_boundary(int d, const Json& p) {
  const int part = integer_at(p, "part", 1);
  if (part != 1 && part != 2) schema("/params/part: expected 1 (variance) or 2 (entropy)");
  InequalityInstance in = base_instance("strong_boundary", d, part == 1 ? LhsKind::Variance : LhsKind::EntropyOfSquare);
  in.body = centered_body(p, d, "strong_boundary");
  in.measure = uniform_measure(*in.body);
  const double theta = number_at(p, "theta", 0.5);
  in.static_checks.push_back(static_check("theta_range", std::min(theta, 0.5 - theta)));
  const double rmax = in.body->circumradius();
  if (part == 1) {
    in.rhs_weight = [d](const Vec& x) { return Mat(x.squaredNorm() * Mat::Identity(d, d)); };
    in.rhs_constant = 2.0 / (d * theta);
  } else {
    in.rhs_weight = [d, theta](const Vec& x) { return Mat(std::pow(x.squaredNorm(), theta) * Mat::Identity(d, d)); };
    in.rhs_constant = 4.0 * std::pow(rmax, 2.0 * (1.0 - theta)) / (d * theta);
  }
  auto body = in.body;
  in.hypotheses.push_back({"second_fundamental_form",
                           [body, theta](const Vec& y) {
                             const BoundaryPoint b = boundary_point(*body, y);
                             return min_tangent_eigenvalue(b.curvature.II, b.n) - theta * b.angle / y.squaredNorm();
                           },
                           true});
  in.notes["theta"] = theta;
  return in;
}

// ---------------------------------------------------------------------------

Json gaussian() { return Json{{"kind", "gaussian"}}; }
Json product(const Json& coord) { return Json{{"kind", "product"}, {"coord", coord}}; }

std::vector<CatalogEntry> make_catalog() {
  using LK = LhsKind;
  std::vector<CatalogEntry> c;
  c.push_back({"classical_bl", "Var f <= E <(D^2V)^-1 grad f, grad f>", LK::Variance, true,
               Json{{"measure", gaussian()}}});
  c.push_back({"generalized_bl", "Var f <= E <Ric_{g,mu}^-1 grad f, grad f>", LK::Variance, true,
               Json{{"measure", product({{"kind", "exponential"}, {"rate", 1.0}})},
                    {"metric", {{"kind", "product_power"}, {"p", 0.5}}}}});
  c.push_back({"refined_bl", "Var f <= 2 E <(D^2V + Q_W + Q_H)^-1 grad f, grad f>", LK::Variance, true,
               Json{{"measure", product({{"kind", "logcosh_mix"}, {"alpha", 1.0}, {"beta", 0.5}, {"gamma", 1.0}, {"delta", 0.2}})},
                    {"target", product({{"kind", "uniform"}, {"a", -1.0}, {"b", 1.0}})}}});
  c.push_back({"negdim_bl", "Var f <= 2 E <(D^2V + (1/2d) grad V grad V^T)^-1 grad f, grad f>", LK::Variance, true,
               Json{{"measure", product({{"kind", "logcosh_mix"}, {"alpha", 0.05}, {"beta", 1.0}, {"gamma", 1.0}, {"delta", 0.0}})}}});
  c.push_back({"compact_bl", "Var f <= 2 E <(Id/(2R^2) + D^2W)^-1 grad f, grad f>", LK::Variance, true,
               Json{{"measure", product({{"kind", "uniform"}, {"a", -0.5}, {"b", 0.5}})}}, 1, 1});
  c.push_back({"payne_weinberger", "Var f <= 2 R^2 E |grad f|^2", LK::Variance, true,
               Json{{"measure", {{"kind", "uniform"}, {"body", {{"kind", "ball"}, {"radius", 0.5}}}}}}});
  c.push_back({"bakry_emery_lsi", "Ent f^2 <= (2/rho) E |grad f|^2 when D^2V >= rho", LK::EntropyOfSquare, true,
               Json{{"measure", gaussian()}, {"rho", 1.0}}});
  c.push_back({"entropic_bl", "Ent f^2 <= (2/rho) E <(D^2V)^-1 grad f, grad f>", LK::EntropyOfSquare, true,
               Json{{"measure", product({{"kind", "legendre_power"}, {"q", 3.0}})}, {"gradient_term", false}}, 1, 1});
  c.push_back({"muq_lsi", "Ent f^2 <= 4/(c q^2) E sum x_i^(2-q) f_i^2", LK::EntropyOfSquare, true,
               Json{{"q", 1.5}, {"c", 1.0}}});
  c.push_back({"bakry_t_lsi", "Ent f^2 <= (4/c) E sum t_i f_i^2 for the exponential measure", LK::EntropyOfSquare,
               true, Json{{"q", 1.5}, {"c", 1.0}, {"form", "derived"}}});
  c.push_back({"qgt2_lsi", "Ent f^2 <= C_q E sum min(1, x_i^(2-q)) f_i^2", LK::EntropyOfSquare, false,
               Json{{"q", 3.0}}});
  c.push_back({"poly_product", "orthant product metric x^(-2p): parts 1-5", LK::Variance, true,
               Json{{"part", 2}, {"lambda", 1.0}, {"R", 2.0}}});
  c.push_back({"exp_product", "Var f <= E sum f_i^2 / (l_i (V_i - l_i)); corollary 4/l^2", LK::Variance, true,
               Json{{"lambda", 1.0}, {"corollary", true}}});
  c.push_back({"klartag_transfer", "Var f <= E Q(grad f) + max_i E x_i^2 E |grad f|^2", LK::Variance, true,
               Json{{"measure", product({{"kind", "laplace"}, {"rate", 1.0}})}, {"orthant_part", 2}, {"lambda", 1.0}}});
  c.push_back({"cone_variance", "Var_sigma h <= 4/(l^2 (d-1)(d-2)) E_sigma |x|^2/<x,n>^2", LK::Variance, true,
               Json{{"body", {{"kind", "simplex"}, {"scale", 1.0}}}}, 3});
  c.push_back({"l1_type", "C_P <= C/d^2 (E|x|^2 + l^-2 E_sigma |x|^2/<x,n>^2)", LK::Variance, false,
               Json{{"body", {{"kind", "simplex"}, {"scale", 1.0}}}, {"form", 1}}, 3});
  c.push_back({"dim_bl_boundary", "N/(N-1) Var f <= E <Ric_N^-1 grad f, grad f> + boundary 1/H term", LK::Variance, true,
               Json{{"body", {{"kind", "ball"}, {"radius", 1.0}}}, {"part", 1}}, 3});
  c.push_back({"hardy_boundary", "Var f/(1-N) <= 4/(d(d-N)) E|x|^2|grad f|^2 + boundary term", LK::Variance, true,
               Json{{"body", {{"kind", "ball"}, {"radius", 1.0}}}, {"N", 0.0}}, 6});
  c.push_back({"hardy_dirichlet", "E f^2 <= 4/d^2 E |x|^2 |grad f|^2 for f = 0 on the boundary", LK::L2Dirichlet, true,
               Json{{"body", {{"kind", "ball"}, {"radius", 1.0}}}}, 3});
  c.push_back({"hardy_n0", "Var f <= 4/d^2 E|x|^2|grad f|^2 + (2/Vol) min_C int |x|^2/(d<x,n>) (f-C)^2", LK::Variance, true,
               Json{{"body", {{"kind", "ball"}, {"radius", 1.0}}}}, 2});
  c.push_back({"strong_boundary", "Var f <= 2/(d theta) E|x|^2|grad f|^2; entropy form with |x|^(2 theta)", LK::Variance,
               true, Json{{"body", {{"kind", "ball"}, {"radius", 1.0}}}, {"theta", 0.5}, {"part", 1}}, 8});
  c.push_back({"one_lip_reduction", "C_P <= C' sup Var f over 1-Lipschitz f", LK::Variance, false,
               Json{{"body", {{"kind", "simplex"}, {"scale", 1.0}}}}, 2});
  return c;
}

InequalityInstance dispatch(const std::string& id, int d, const Json& p) {
  if (id == "classical_bl") return build_classical_bl(d, p);
  if (id == "generalized_bl") return build_generalized_bl(d, p);
  if (id == "refined_bl") return build_refined_bl(d, p);
  if (id == "negdim_bl") return build_negdim_bl(d, p);
  if (id == "compact_bl") return build_compact_bl(d, p);
  if (id == "payne_weinberger") return build_payne_weinberger(d, p);
  if (id == "bakry_emery_lsi") return build_bakry_emery(d, p);
  if (id == "entropic_bl") return build_entropic_bl(d, p);
  if (id == "muq_lsi") return build_muq_lsi(d, p);
  if (id == "bakry_t_lsi") return build_bakry_t_lsi(d, p);
  if (id == "qgt2_lsi") return build_qgt2_lsi(d, p);
  if (id == "poly_product") return build_poly_product(d, p);
  if (id == "exp_product") return build_exp_product(d, p);
  if (id == "klartag_transfer") return build_klartag(d, p);
  if (id == "cone_variance") return build_cone_variance(d, p);
  if (id == "l1_type") return build_l1_type(d, p, false);
  if (id == "one_lip_reduction") return build_l1_type(d, p, true);
  if (id == "dim_bl_boundary") return build_dim_bl_boundary(d, p);
  if (id == "hardy_boundary") return build_hardy_boundary(d, p);
  if (id == "hardy_dirichlet") return build_hardy_dirichlet(d, p);
  if (id == "hardy_n0") return build_hardy_n0(d, p);
  if (id == "strong_boundary") return build_strong_boundary(d, p);
  throw Error(ErrorCode::UnknownId, "unknown inequality id '" + id + "'");
}

std::string describe(const Vec& x) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ")";
  return os.str();
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = make_catalog();
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& id) {
  for (const CatalogEntry& e : catalog()) {
    if (e.id == id) return e;
  }
  throw Error(ErrorCode::UnknownId, "unknown inequality id '" + id + "'");
}

bool small_dimension_condition(double N, int d) {
  if (N == 0.0) return true;
  return (0.5 - 1.0 / N) * d >= 3.0;
}

double rho_poly_bounded(double p, double R) { return p * (1.0 - p) / std::pow(R, 2.0 - 2.0 * p); }

double rho_poly_monotone(double p, double lambda) {
  const double first = std::pow(lambda * p / (2.0 - 2.0 * p), 2.0 - 2.0 * p);
  // (p(1-p)/(2p-1))^(2p-1) tends to 1 as p -> 1/2.
  const double second = p == 0.5 ? 1.0 : std::pow(p * (1.0 - p) / (2.0 * p - 1.0), 2.0 * p - 1.0);
  return first * second;
}

std::vector<HypothesisResult> hypothesis_margins(const InequalityInstance& instance, const PointSet& points,
                                                 const PointSet& boundary_points) {
  std::vector<HypothesisResult> out = instance.static_checks;
  for (const HypothesisCheck& h : instance.hypotheses) {
    const PointSet& grid = h.on_boundary ? boundary_points : points;
    HypothesisResult r;
    r.name = h.name;
    r.margin = kInfinity;
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
      const Vec x = grid.col(j);
      const double m = h.margin(x);
      if (!(m >= r.margin)) {
        r.margin = m;
        r.location = x;
      }
    }
    r.passed = r.margin >= -kMarginTolerance;
    out.push_back(std::move(r));
  }
  return out;
}

InequalityInstance instantiate(const std::string& id, int dim, const Json& params, std::uint64_t seed) {
  const CatalogEntry& entry = catalog_entry(id);
  if (dim < entry.min_dim || dim > entry.max_dim) {
    schema("/dims: " + id + " requires " + std::to_string(entry.min_dim) + " <= d <= " + std::to_string(entry.max_dim));
  }
  InequalityInstance in = dispatch(id, dim, merged(entry, params));
  in.notes["dim"] = dim;

  PointSet pilot, pilot_boundary;
  bool need_boundary = false;
  for (const HypothesisCheck& h : in.hypotheses) need_boundary |= h.on_boundary;
  if (!in.hypotheses.empty()) pilot = sample_measure(in.measure, kPilotPoints, substream_seed(seed, "pilot"));
  if (need_boundary) {
    Rng rng(substream_seed(seed, "pilot-boundary"));
    pilot_boundary = in.body->sample_cone(rng, kPilotPoints);
  }
  for (const HypothesisResult& r : hypothesis_margins(in, pilot, pilot_boundary)) {
    if (!r.passed) {
      std::ostringstream os;
      os << id << ": hypothesis " << r.name << " fails with margin " << r.margin;
      if (r.location.size()) os << " at " << describe(r.location);
      throw Error(ErrorCode::HypothesisViolated, os.str());
    }
  }
  return in;
}

}  // namespace riccikit
