#include "riccikit/verification_engine.hpp"

#include "riccikit/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace riccikit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kHypothesisPoints = 4096;
constexpr int kRayleighPoints = 20000;
constexpr double kEntropyFloor = 1e-300;

TestFunction make(std::string id, std::function<double(const Vec&)> eval, std::function<Vec(const Vec&)> grad) {
  TestFunction f;
  f.id = std::move(id);
  f.eval = std::move(eval);
  f.grad = std::move(grad);
  return f;
}

// Suite entries together with a Lipschitz bound on |x| <= R.
struct SuiteEntry {
  TestFunction f;
  std::function<double(double)> lipschitz;
};

std::vector<SuiteEntry> suite_entries(int d, std::uint64_t seed) {
  std::vector<SuiteEntry> out;
  for (int i = 0; i < d; ++i) {
    out.push_back({make("x" + std::to_string(i + 1), [i](const Vec& x) { return x(i); },
                        [i, d](const Vec&) { return Vec(Vec::Unit(d, i)); }),
                   [](double) { return 1.0; }});
  }
  out.push_back({make("norm2", [](const Vec& x) { return x.squaredNorm(); }, [](const Vec& x) { return Vec(2.0 * x); }),
                 [](double r) { return 2.0 * r; }});
  out.push_back({make("sum", [](const Vec& x) { return x.sum(); }, [d](const Vec&) { return Vec(Vec::Ones(d)); }),
                 [d](double) { return std::sqrt(double(d)); }});
  std::vector<std::pair<int, int>> pairs;
  if (d <= 4) {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  } else {
    for (int i = 0; i + 1 < d; ++i) pairs.emplace_back(i, i + 1);
  }
  for (auto [i, j] : pairs) {
    out.push_back({make("x" + std::to_string(i + 1) + "x" + std::to_string(j + 1),
                        [i, j](const Vec& x) { return x(i) * x(j); },
                        [i, j, d](const Vec& x) {
                          Vec g = Vec::Zero(d);
                          g(i) = x(j);
                          g(j) = x(i);
                          return g;
                        }),
                   [](double r) { return r; }});
  }
  const Vec u = Vec::Constant(d, 1.0 / std::sqrt(double(d)));
  for (int k = 1; k <= 2; ++k) {
    const double w = kPi * k;
    out.push_back({make("cos" + std::to_string(k), [u, w](const Vec& x) { return std::cos(w * u.dot(x)); },
                        [u, w](const Vec& x) { return Vec(-w * std::sin(w * u.dot(x)) * u); }),
                   [w](double) { return w; }});
  }
  Rng rng(substream_seed(seed, "suite"));
  const double scale = 1.0 / std::sqrt(double(d));
  for (int k = 1; k <= 5; ++k) {
    Vec a(d), b(d), c(d);
    for (int i = 0; i < d; ++i) a(i) = scale * rng.normal();
    for (int i = 0; i < d; ++i) b(i) = scale * rng.normal();
    for (int i = 0; i < d; ++i) c(i) = scale * rng.normal();
    out.push_back({make("cubic" + std::to_string(k),
                        [a, b, c](const Vec& x) {
                          const double s = b.dot(x), t = c.dot(x);
                          return a.dot(x) + 0.5 * s * s + t * t * t / 6.0;
                        },
                        [a, b, c](const Vec& x) {
                          const double s = b.dot(x), t = c.dot(x);
                          return Vec(a + s * b + 0.5 * t * t * c);
                        }),
                   [a, b, c](double r) {
                     return a.norm() + b.squaredNorm() * r + 0.5 * std::pow(c.norm(), 3) * r * r;
                   }});
  }
  return out;
}

double phi_entropy(double h) {
  // h log h - h + 1, accurate near h = 1.
  const double u = h - 1.0;
  if (std::abs(u) < 1e-4) return u * u * (0.5 - u / 6.0 + u * u / 12.0);
  return h * std::log(h) - u;
}

struct Block {
  std::size_t begin = 0, end = 0;
};

std::vector<Block> blocks_of(std::size_t n, std::size_t units = 1) {
  // Contiguous blocks over n / units resampling units.
  const std::size_t count = n / units;
  const std::size_t b = std::min<std::size_t>(count, kMaxBlocks);
  std::vector<Block> out(b);
  for (std::size_t k = 0; k < b; ++k) {
    out[k].begin = (k * count / b) * units;
    out[k].end = ((k + 1) * count / b) * units;
  }
  return out;
}

// Multiplicities of each block in the bootstrap replicates.
std::vector<std::vector<int>> resample_counts(std::size_t blocks, int replicates, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<int>> out(replicates, std::vector<int>(blocks, 0));
  for (auto& counts : out) {
    for (std::size_t k = 0; k < blocks; ++k) ++counts[rng.below(blocks)];
  }
  return out;
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  // Shifted by the first replicate so identical replicates give exactly 0.
  const double ref = xs.front();
  double mean = 0.0;
  for (double x : xs) mean += x - ref;
  mean /= double(xs.size());
  double s = 0.0;
  for (double x : xs) s += (x - ref - mean) * (x - ref - mean);
  return std::sqrt(s / double(xs.size() - 1));
}

// Per-block sums for one function, combined with multiplicities.
struct LhsSums {
  double n = 0, a = 0, b = 0;  // Var: sum f, sum f^2. Ent: sum phi(h), sum h. L2: -, sum f^2.
};

double lhs_value(LhsKind kind, const LhsSums& s, double scale_c) {
  switch (kind) {
    case LhsKind::Variance: {
      const double mean = s.a / s.n;
      return (s.b - s.a * mean) / (s.n - 1.0);
    }
    case LhsKind::EntropyOfSquare:
      return scale_c * (s.a / s.n - phi_entropy(s.b / s.n));
    case LhsKind::L2Dirichlet:
      return s.b / s.n;
  }
  return 0.0;
}

struct RhsSums {
  double n = 0, q = 0, g2 = 0;
};

struct BoundarySums {
  double omega = 0, w = 0, wf = 0, wf2 = 0;
};

double boundary_value(const BoundaryTerm& term, const BoundarySums& s) {
  if (!term.uses_function) return s.w / s.omega;
  if (!term.free_constant) return s.wf2 / s.omega;
  return (s.wf2 - s.wf * s.wf / s.w) / s.omega;
}

struct FunctionResult {
  Estimate lhs, rhs;
};

// Shared evaluation of all functions on one sample set.
std::vector<FunctionResult> evaluate(const InequalityInstance& in, const std::vector<TestFunction>& fs, const PointSet& X,
                                     const BoundarySample* boundary, const EngineOptions& options) {
  const std::size_t n = static_cast<std::size_t>(X.cols());
  if (n < 100) throw Error(ErrorCode::DegenerateSample, "at least 100 samples are required");
  if (in.boundary && !boundary) throw Error(ErrorCode::BoundaryQuadratureFailure, "boundary sample missing");
  const int d = in.dim;
  const std::size_t nf = fs.size();
  const bool recentre = in.family != FunctionFamily::Dirichlet && in.lhs_kind != LhsKind::L2Dirichlet;
  const std::vector<Block> blocks = blocks_of(n);
  const std::size_t nb = blocks.size();

  // Pass A: interior weight and raw moments.
  std::vector<std::vector<RhsSums>> rhs(nb, std::vector<RhsSums>(nf));
  std::vector<std::vector<double>> raw1(nb, std::vector<double>(nf)), raw2(nb, std::vector<double>(nf));
  std::vector<Vec> coord2(nb, Vec::Zero(d));
  parallel_for(nb, options.workers, [&](std::size_t k) {
    for (std::size_t j = blocks[k].begin; j < blocks[k].end; ++j) {
      const Vec x = X.col(static_cast<Eigen::Index>(j));
      Mat w;
      if (in.rhs_weight) w = in.rhs_weight(x);
      if (in.coordinate_moment_term) coord2[k] += x.cwiseProduct(x);
      for (std::size_t i = 0; i < nf; ++i) {
        const double f = fs[i].eval(x);
        raw1[k][i] += f;
        raw2[k][i] += f * f;
        RhsSums& r = rhs[k][i];
        r.n += 1.0;
        if (in.rhs_weight || in.coordinate_moment_term) {
          const Vec g = fs[i].grad(x);
          if (in.rhs_weight) r.q += g.dot(w * g);
          r.g2 += g.squaredNorm();
        }
      }
    }
  });

  std::vector<double> centre(nf, 0.0), scale_c(nf, 1.0);
  for (std::size_t i = 0; i < nf; ++i) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      s1 += raw1[k][i];
      s2 += raw2[k][i];
    }
    const double m = recentre ? s1 / double(n) : 0.0;
    centre[i] = m;
    const double c = s2 / double(n) - 2.0 * m * s1 / double(n) + m * m;
    scale_c[i] = c > 0.0 && std::isfinite(c) ? c : 1.0;
  }

  // Pass B: recentred left-side sums.
  std::vector<std::vector<LhsSums>> lhs(nb, std::vector<LhsSums>(nf));
  parallel_for(nb, options.workers, [&](std::size_t k) {
    for (std::size_t j = blocks[k].begin; j < blocks[k].end; ++j) {
      const Vec x = X.col(static_cast<Eigen::Index>(j));
      for (std::size_t i = 0; i < nf; ++i) {
        const double f = fs[i].eval(x) - centre[i];
        LhsSums& s = lhs[k][i];
        s.n += 1.0;
        if (in.lhs_kind == LhsKind::EntropyOfSquare) {
          const double h = std::max(f * f, kEntropyFloor) / scale_c[i];
          s.a += phi_entropy(h);
          s.b += h;
        } else {
          s.a += f;
          s.b += f * f;
        }
      }
    }
  });

  // Boundary sums per resampling block.
  std::vector<Block> bblocks;
  std::vector<std::vector<BoundarySums>> bsum;
  if (in.boundary) {
    const BoundarySample& b = *boundary;
    const std::size_t nbp = static_cast<std::size_t>(b.points.cols());
    if (nbp == 0) throw Error(ErrorCode::BoundaryQuadratureFailure, "empty boundary sample");
    bblocks = b.exact ? std::vector<Block>{{0, nbp}} : blocks_of(nbp, static_cast<std::size_t>(b.group));
    bsum.assign(bblocks.size(), std::vector<BoundarySums>(nf));
    parallel_for(bblocks.size(), options.workers, [&](std::size_t k) {
      for (std::size_t j = bblocks[k].begin; j < bblocks[k].end; ++j) {
        const Vec y = b.points.col(static_cast<Eigen::Index>(j));
        const double omega = b.weights.empty() ? 1.0 : b.weights[j];
        const double w = in.boundary->weight(y);
        if (!std::isfinite(w)) throw Error(ErrorCode::BoundaryQuadratureFailure, "non-finite boundary weight");
        for (std::size_t i = 0; i < nf; ++i) {
          BoundarySums& s = bsum[k][i];
          s.omega += omega;
          s.w += omega * w;
          if (in.boundary->uses_function) {
            const double f = fs[i].eval(y) - centre[i];
            s.wf += omega * w * f;
            s.wf2 += omega * w * f * f;
          }
        }
      }
    });
  }

  auto combine = [&](const std::vector<int>* ci, const std::vector<int>* cb, std::size_t i) {
    LhsSums l;
    RhsSums r;
    Vec c2 = Vec::Zero(d);
    for (std::size_t k = 0; k < nb; ++k) {
      const double m = ci ? (*ci)[k] : 1.0;
      if (m == 0.0) continue;
      l.n += m * lhs[k][i].n;
      l.a += m * lhs[k][i].a;
      l.b += m * lhs[k][i].b;
      r.n += m * rhs[k][i].n;
      r.q += m * rhs[k][i].q;
      r.g2 += m * rhs[k][i].g2;
      if (in.coordinate_moment_term) c2 += m * coord2[k];
    }
    double right = in.rhs_weight ? in.rhs_constant * r.q / r.n : 0.0;
    if (in.coordinate_moment_term) right += (c2 / r.n).maxCoeff() * r.g2 / r.n;
    if (in.boundary) {
      BoundarySums s;
      for (std::size_t k = 0; k < bblocks.size(); ++k) {
        const double m = cb ? (*cb)[k] : 1.0;
        s.omega += m * bsum[k][i].omega;
        s.w += m * bsum[k][i].w;
        s.wf += m * bsum[k][i].wf;
        s.wf2 += m * bsum[k][i].wf2;
      }
      right += boundary_value(*in.boundary, s);
    }
    return std::make_pair(in.lhs_scale * lhs_value(in.lhs_kind, l, scale_c[i]), right);
  };

  const auto interior_counts = resample_counts(nb, options.bootstrap, substream_seed(options.seed, "bootstrap"));
  std::vector<std::vector<int>> boundary_counts;
  if (in.boundary && !boundary->exact) {
    boundary_counts = resample_counts(bblocks.size(), options.bootstrap, substream_seed(options.seed, "bootstrap-boundary"));
  }

  std::vector<FunctionResult> out(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    const auto [l0, r0] = combine(nullptr, nullptr, i);
    std::vector<double> ls, rs;
    for (int rep = 0; rep < options.bootstrap; ++rep) {
      const auto [l, r] = combine(&interior_counts[rep], boundary_counts.empty() ? nullptr : &boundary_counts[rep], i);
      ls.push_back(l);
      rs.push_back(r);
    }
    out[i].lhs = {l0, sample_sd(ls)};
    out[i].rhs = {r0, sample_sd(rs)};
  }
  return out;
}

bool centrally_symmetric(const ConvexBody& body) {
  return body.kind() == BodyKind::Ball || body.kind() == BodyKind::Box || body.kind() == BodyKind::LpBall;
}

std::string format_margin(const HypothesisResult& r) {
  std::ostringstream os;
  os << "hypothesis " << r.name << " violated on the samples (margin " << r.margin << ")";
  return os.str();
}

bool needs_boundary(const InequalityInstance& in) {
  if (in.boundary) return true;
  for (const HypothesisCheck& h : in.hypotheses) {
    if (h.on_boundary) return true;
  }
  return false;
}

ReportRow base_row(const InequalityInstance& in, const EngineOptions& o, const std::string& function) {
  ReportRow row;
  row.suite = o.suite;
  row.inequality = in.id;
  row.dim = in.dim;
  row.function = function;
  row.seed = o.seed;
  row.n = o.samples;
  return row;
}

void mark_error(ReportRow& row, const std::string& message) {
  const double nan = std::nan("");
  row.lhs = row.lhs_err = row.rhs = row.rhs_err = row.slack = nan;
  row.status = "error";
  row.message = message;
}

}  // namespace

double gradient_self_test(const TestFunction& f, const PointSet& points, double h) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const Vec x = points.col(j);
    const Vec g = f.grad(x);
    for (int i = 0; i < x.size(); ++i) {
      Vec a = x, b = x;
      a(i) += h;
      b(i) -= h;
      const double fd = (f.eval(a) - f.eval(b)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g(i)) / (1.0 + g.norm()));
    }
  }
  return worst;
}

std::vector<TestFunction> default_suite(int dim, std::uint64_t seed) {
  std::vector<TestFunction> out;
  for (auto& e : suite_entries(dim, seed)) out.push_back(std::move(e.f));
  return out;
}

std::vector<TestFunction> lipschitz_suite(int dim, std::uint64_t seed, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidArgument, "Lipschitz normalization needs a bounded support");
  }
  std::vector<TestFunction> out;
  for (auto& e : suite_entries(dim, seed)) {
    const double L = e.lipschitz(radius);
    TestFunction f = e.f;
    auto eval = f.eval;
    auto grad = f.grad;
    f.eval = [eval, L](const Vec& x) { return eval(x) / L; };
    f.grad = [grad, L](const Vec& x) { return Vec(grad(x) / L); };
    f.lipschitz_bound = 1.0;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<TestFunction> dirichlet_suite(const ConvexBody& body, std::uint64_t seed) {
  auto shared = std::make_shared<const ConvexBody>(body);
  // bump = 1 - p^2 with grad p = n / <y, n> at y = x / p(x).
  auto bump = [shared](const Vec& x, Vec* grad) {
    if (x.norm() == 0.0) {
      if (grad) *grad = Vec::Zero(x.size());
      return 1.0;
    }
    const GaugeNormal gn = shared->gauge_and_normal(x);
    if (grad) {
      const double angle = x.dot(gn.normal) / gn.gauge;
      *grad = -2.0 * gn.gauge * gn.normal / angle;
    }
    return 1.0 - gn.gauge * gn.gauge;
  };
  std::vector<TestFunction> out;
  for (auto& e : suite_entries(body.dim(), seed)) {
    TestFunction f = e.f;
    auto eval = f.eval;
    auto grad = f.grad;
    f.eval = [eval, bump](const Vec& x) { return eval(x) * bump(x, nullptr); };
    f.grad = [eval, grad, bump](const Vec& x) {
      Vec gb;
      const double b = bump(x, &gb);
      return Vec(grad(x) * b + eval(x) * gb);
    };
    f.vanishes_on_boundary = true;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<TestFunction> suite_for(const InequalityInstance& instance, std::uint64_t seed) {
  switch (instance.family) {
    case FunctionFamily::Lipschitz:
      return lipschitz_suite(instance.dim, seed, instance.measure.support_radius);
    case FunctionFamily::Dirichlet:
      if (!instance.body) throw Error(ErrorCode::InvalidArgument, "Dirichlet suite needs a body");
      return dirichlet_suite(*instance.body, seed);
    case FunctionFamily::General:
      break;
  }
  return default_suite(instance.dim, seed);
}

BoundarySample boundary_sample(const ConvexBody& body, int n, std::uint64_t seed, int workers) {
  BoundarySample out;
  const int d = body.dim();
  if (body.kind() == BodyKind::Simplex && d >= 2) {
    const int order = std::min(12, std::max(2, static_cast<int>(std::floor(std::pow(2e5, 1.0 / (d - 1))))));
    WeightedPoints q = simplex_facet_quadrature(body, order);
    out.points = std::move(q.points);
    out.weights = std::move(q.weights);
    out.exact = true;
    return out;
  }
  const bool antithetic = centrally_symmetric(body);
  const int half = antithetic ? (n + 1) / 2 : n;
  const int shards = (half + kShardSize - 1) / kShardSize;
  PointSet base(d, half);
  parallel_for(static_cast<std::size_t>(shards), workers, [&](std::size_t k) {
    const int begin = static_cast<int>(k) * kShardSize;
    const int count = std::min(kShardSize, half - begin);
    Rng rng(substream_seed(substream_seed(seed, "boundary"), k));
    base.middleCols(begin, count) = body.sample_cone(rng, count);
  });
  if (!antithetic) {
    out.points = std::move(base);
    return out;
  }
  out.points.resize(d, 2 * half);
  for (int j = 0; j < half; ++j) {
    out.points.col(2 * j) = base.col(j);
    out.points.col(2 * j + 1) = -base.col(j);
  }
  out.group = 2;
  return out;
}

Estimate estimate_functional(LhsKind kind, const std::vector<double>& values, int bootstrap, std::uint64_t seed) {
  const std::size_t n = values.size();
  if (n < 100) throw Error(ErrorCode::DegenerateSample, "at least 100 samples are required");
  double c = 1.0;
  if (kind == LhsKind::EntropyOfSquare) {
    double s = 0.0;
    for (double v : values) s += v * v;
    c = s / double(n) > 0.0 ? s / double(n) : 1.0;
  }
  const std::vector<Block> blocks = blocks_of(n);
  std::vector<LhsSums> sums(blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    for (std::size_t j = blocks[k].begin; j < blocks[k].end; ++j) {
      const double f = values[j];
      sums[k].n += 1.0;
      if (kind == LhsKind::EntropyOfSquare) {
        const double h = std::max(f * f, kEntropyFloor) / c;
        sums[k].a += phi_entropy(h);
        sums[k].b += h;
      } else {
        sums[k].a += f;
        sums[k].b += f * f;
      }
    }
  }
  auto value = [&](const std::vector<int>* counts) {
    LhsSums s;
    for (std::size_t k = 0; k < sums.size(); ++k) {
      const double m = counts ? (*counts)[k] : 1.0;
      s.n += m * sums[k].n;
      s.a += m * sums[k].a;
      s.b += m * sums[k].b;
    }
    return lhs_value(kind, s, c);
  };
  const auto counts = resample_counts(blocks.size(), bootstrap, substream_seed(seed, "bootstrap"));
  std::vector<double> reps;
  for (const auto& cnt : counts) reps.push_back(value(&cnt));
  return {value(nullptr), sample_sd(reps)};
}

Estimate estimate_lhs(const InequalityInstance& instance, const TestFunction& f, const PointSet& samples,
                      const EngineOptions& options) {
  InequalityInstance lhs_only = instance;
  lhs_only.boundary.reset();
  return evaluate(lhs_only, {f}, samples, nullptr, options)[0].lhs;
}

Estimate estimate_rhs(const InequalityInstance& instance, const TestFunction& f, const PointSet& samples,
                      const BoundarySample& boundary, const EngineOptions& options) {
  return evaluate(instance, {f}, samples, &boundary, options)[0].rhs;
}

std::string slack_status(double lhs, double lhs_err, double rhs, double rhs_err, double rel_tol) {
  const double slack = rhs - lhs;
  const double allowance = 3.0 * std::hypot(lhs_err, rhs_err) + rel_tol * std::abs(rhs);
  return slack < -allowance ? "fail" : "pass";
}

VerificationReport check_inequality(const InequalityInstance& instance, const EngineOptions& options) {
  VerificationReport report;
  std::vector<TestFunction> fs;
  try {
    fs = suite_for(instance, options.seed);
  } catch (const Error& e) {
    ReportRow row = base_row(instance, options, "*");
    mark_error(row, e.what());
    report.rows.push_back(row);
    return report;
  }
  if (!options.functions.empty()) {
    std::vector<TestFunction> kept;
    for (const TestFunction& f : fs) {
      if (std::find(options.functions.begin(), options.functions.end(), f.id) != options.functions.end()) kept.push_back(f);
    }
    fs = std::move(kept);
  }

  auto fail_all = [&](const std::string& message, const std::vector<HypothesisResult>& margins) {
    for (const TestFunction& f : fs) {
      ReportRow row = base_row(instance, options, f.id);
      mark_error(row, message);
      row.hypotheses = margins;
      report.rows.push_back(row);
    }
    return report;
  };

  PointSet X;
  BoundarySample boundary;
  std::vector<HypothesisResult> margins;
  std::vector<FunctionResult> results;
  try {
    X = sample_measure(instance.measure, options.samples, substream_seed(options.seed, "interior"), options.workers);
    if (needs_boundary(instance)) {
      if (!instance.body) throw Error(ErrorCode::BoundaryQuadratureFailure, "boundary term without a body");
      boundary = boundary_sample(*instance.body, options.samples, options.seed, options.workers);
    }
    const Eigen::Index hp = std::min<Eigen::Index>(X.cols(), kHypothesisPoints);
    const Eigen::Index hb = std::min<Eigen::Index>(boundary.points.cols(), kHypothesisPoints);
    margins = hypothesis_margins(instance, X.leftCols(hp), boundary.points.leftCols(hb));
    for (const HypothesisResult& r : margins) {
      if (!r.passed) return fail_all(format_margin(r), margins);
    }
    results = evaluate(instance, fs, X, instance.boundary ? &boundary : nullptr, options);
  } catch (const Error& e) {
    return fail_all(e.what(), margins);
  }

  double max_lhs = -kInfinity;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    ReportRow row = base_row(instance, options, fs[i].id);
    row.lhs = results[i].lhs.value;
    row.lhs_err = results[i].lhs.stderr;
    row.rhs = results[i].rhs.value;
    row.rhs_err = results[i].rhs.stderr;
    row.slack = row.rhs - row.lhs;
    row.hypotheses = margins;
    max_lhs = std::max(max_lhs, row.lhs);
    if (!std::isfinite(row.lhs) || !std::isfinite(row.rhs)) {
      mark_error(row, "non-finite estimate");
    } else {
      row.status = instance.constant_known ? slack_status(row.lhs, row.lhs_err, row.rhs, row.rhs_err, options.rel_tol)
                                           : "report-only";
    }
    report.rows.push_back(row);
  }

  // Extra report-only rows comparing with a numerical Poincare lower bound.
  if (instance.notes.count("poincare_rhs")) {
    const double cp = rayleigh_lower_bound(X.leftCols(std::min<Eigen::Index>(X.cols(), kRayleighPoints)));
    ReportRow row = base_row(instance, options, "rayleigh_cp");
    row.lhs = cp;
    row.rhs = instance.notes.at("poincare_rhs");
    if (instance.notes.count("compare_lipschitz")) {
      row.function = "rayleigh_cp_vs_lipschitz_var";
      row.rhs = max_lhs;
    }
    row.slack = row.rhs - row.lhs;
    row.status = "report-only";
    report.rows.push_back(row);
  }
  return report;
}

int report_exit_code(const VerificationReport& report) {
  bool error = false;
  for (const ReportRow& r : report.rows) {
    if (r.status == "fail") return 1;
    error |= r.status == "error";
  }
  return error ? 3 : 0;
}

namespace {

double gap_on_grid(const Potential1D& V, double a, double b, int n) {
  const double h = (b - a) / n;
  std::vector<double> vc(n), vf(n > 0 ? n - 1 : 0);
  double vmin = kInfinity;
  for (int i = 0; i < n; ++i) vmin = std::min(vmin, vc[i] = V.v(a + (i + 0.5) * h));
  for (int i = 0; i + 1 < n; ++i) vmin = std::min(vmin, vf[i] = V.v(a + (i + 1) * h));
  std::vector<double> mass(n), cond(n - 1);
  for (int i = 0; i < n; ++i) mass[i] = std::exp(-(vc[i] - vmin)) * h;
  for (int i = 0; i + 1 < n; ++i) cond[i] = std::exp(-(vf[i] - vmin)) / h;
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    diag[i] += cond[i];
    diag[i + 1] += cond[i];
  }
  for (int i = 0; i < n; ++i) diag[i] /= mass[i];
  for (int i = 0; i + 1 < n; ++i) off[i] = -cond[i] / std::sqrt(mass[i] * mass[i + 1]);
  const std::vector<double> ev = tridiagonal_eigenvalues(diag, off);
  return ev.at(1);
}

}  // namespace

SpectralGap spectral_gap_1d(const Potential1D& V, double a, double b, int n) {
  if (n < 256) throw Error(ErrorCode::InvalidArgument, "spectral_gap_1d needs n >= 256");
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw Error(ErrorCode::InvalidArgument, "bad interval");
  const double coarse = gap_on_grid(V, a, b, n);
  const double fine = gap_on_grid(V, a, b, 2 * n);
  SpectralGap out;
  out.lambda1 = (4.0 * fine - coarse) / 3.0;
  if (!(out.lambda1 > 0.0)) throw Error(ErrorCode::EigensolveFailure, "non-positive spectral gap");
  out.poincare = 1.0 / out.lambda1;
  return out;
}

PsdResult psd_verify(const QuadraticFormField& field, const PointSet& points) {
  PsdResult out;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const Vec x = points.col(j);
    const double m = min_eigenvalue(field(x));
    if (!(m >= out.min_eigenvalue)) {
      out.min_eigenvalue = m;
      out.location = x;
    }
  }
  return out;
}

double rayleigh_lower_bound(const PointSet& samples) {
  const int d = static_cast<int>(samples.rows());
  const Eigen::Index n = samples.cols();
  if (n < 100) throw Error(ErrorCode::DegenerateSample, "at least 100 samples are required");
  std::vector<std::pair<int, int>> quad;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) quad.emplace_back(i, j);
  const int K = d + static_cast<int>(quad.size());
  Mat values(K, n);
  Mat B = Mat::Zero(K, K);
  Mat G(K, d);
  for (Eigen::Index s = 0; s < n; ++s) {
    const Vec x = samples.col(s);
    G.setZero();
    for (int i = 0; i < d; ++i) {
      values(i, s) = x(i);
      G(i, i) = 1.0;
    }
    for (std::size_t k = 0; k < quad.size(); ++k) {
      const auto [i, j] = quad[k];
      const int r = d + static_cast<int>(k);
      values(r, s) = x(i) * x(j);
      G(r, i) += x(j);
      G(r, j) += x(i);
    }
    B.noalias() += G * G.transpose();
  }
  B /= double(n);
  const Vec mean = values.rowwise().mean();
  values.colwise() -= mean;
  const Mat A = values * values.transpose() / double(n - 1);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(A, B, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigensolveFailure, "Rayleigh-Ritz eigensolve failed");
  return es.eigenvalues().maxCoeff();
}

}  // namespace riccikit
