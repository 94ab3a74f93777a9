#include "riccikit/measures.hpp"

#include "riccikit/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace riccikit {

Measure product_measure(const std::vector<Potential1D>& coords) {
  if (coords.empty()) throw Error(ErrorCode::InvalidArgument, "product measure needs at least one coordinate");
  Measure m;
  m.dim = static_cast<int>(coords.size());
  m.name = "product";
  double r2 = 0.0;
  m.lower.resize(m.dim);
  m.upper.resize(m.dim);
  for (const Potential1D& c : coords) {
    m.lower(m.marginals.size()) = c.lower;
    m.upper(m.marginals.size()) = c.upper;
    auto density = std::make_shared<const Density1D>(c);
    const double a = std::max(std::abs(c.lower), std::abs(c.upper));
    r2 += a * a;
    m.marginals.push_back(std::move(density));
  }
  m.support_radius = std::sqrt(r2);
  m.potential = separable_field(coords);
  m.inside = [coords](const Vec& x) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (!(x(i) > coords[i].lower && x(i) < coords[i].upper)) return false;
    }
    return true;
  };
  auto marginals = m.marginals;
  m.draw = [marginals](Rng& rng, int count) {
    const int d = static_cast<int>(marginals.size());
    PointSet out(d, count);
    for (int j = 0; j < count; ++j) {
      for (int i = 0; i < d; ++i) out(i, j) = marginals[i]->sample_quantile(rng.uniform());
    }
    return out;
  };
  return m;
}

Measure gaussian_measure(int dim) {
  Measure m = product_measure(std::vector<Potential1D>(dim, potentials::quadratic()));
  m.name = "gaussian";
  // Box-Muller is exact and avoids the truncated tables.
  m.draw = [dim](Rng& rng, int count) {
    PointSet out(dim, count);
    for (int j = 0; j < count; ++j) {
      for (int i = 0; i < dim; ++i) out(i, j) = rng.normal();
    }
    return out;
  };
  return m;
}

Measure tilted_measure(const Measure& base, const PotentialField& tilt, int budget_factor) {
  if (tilt.dim != base.dim) throw Error(ErrorCode::InvalidArgument, "tilt dimension mismatch");
  Measure m = base;
  m.name = base.name + "+tilt";
  m.marginals.clear();
  m.potential = sum_fields(base.potential, tilt);
  auto draw_base = base.draw;
  auto tilt_value = tilt.value;
  const int d = base.dim;
  m.draw = [draw_base, tilt_value, d, budget_factor](Rng& rng, int count) {
    PointSet out(d, count);
    const long budget = static_cast<long>(budget_factor) * std::max(count, 1);
    long tries = 0;
    for (int j = 0; j < count;) {
      const PointSet proposal = draw_base(rng, 1);
      if (++tries > budget) throw Error(ErrorCode::RejectionBudgetExceeded, "tilted sampler exceeded its budget");
      const double t = tilt_value(proposal.col(0));
      if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "tilt must be non-negative on the base support");
      if (rng.uniform() < std::exp(-t)) out.col(j++) = proposal.col(0);
    }
    return out;
  };
  return m;
}

Measure uniform_measure(const ConvexBody& body) {
  Measure m;
  m.dim = body.dim();
  m.name = std::string("uniform_") + std::string(to_string(body.kind()));
  auto shared = std::make_shared<const ConvexBody>(body);
  m.body = shared;
  m.potential = constant_field(body.dim(), std::log(body.volume()));
  m.inside = [shared](const Vec& x) { return shared->contains(x); };
  m.draw = [shared](Rng& rng, int count) { return shared->sample_uniform(rng, count); };
  m.support_radius = body.circumradius();
  m.upper = body.bounding_box();
  m.lower = body.kind() == BodyKind::Simplex ? Vec::Zero(body.dim()).eval() : (-m.upper).eval();
  return m;
}

Measure cone_measure(const ConvexBody& body) {
  Measure m = uniform_measure(body);
  m.name = std::string("cone_") + std::string(to_string(body.kind()));
  m.on_boundary = true;
  m.potential = PotentialField{};
  m.potential.dim = body.dim();
  auto shared = m.body;
  m.inside = [shared](const Vec& x) { return std::abs(shared->gauge(x) - 1.0) < 1e-10; };
  m.draw = [shared](Rng& rng, int count) { return shared->sample_cone(rng, count); };
  return m;
}

PointSet sample_measure(const Measure& measure, int n, std::uint64_t seed, int workers) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "sample count must be non-negative");
  const int shards = (n + kShardSize - 1) / kShardSize;
  PointSet out(measure.dim, n);
  parallel_for(static_cast<std::size_t>(shards), workers, [&](std::size_t k) {
    const int begin = static_cast<int>(k) * kShardSize;
    const int count = std::min(kShardSize, n - begin);
    Rng rng(substream_seed(seed, static_cast<std::uint64_t>(k)));
    out.middleCols(begin, count) = measure.draw(rng, count);
  });
  return out;
}

}  // namespace riccikit
