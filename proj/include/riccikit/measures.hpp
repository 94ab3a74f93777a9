#pragma once

#include "riccikit/convex_geometry.hpp"
#include "riccikit/density1d.hpp"
#include "riccikit/fields.hpp"
#include "riccikit/rng.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace riccikit {

/// Probability measure exp(-V) dx (up to normalization) with an exact or
/// rejection sampler. Cone measures live on a body's boundary and carry no
/// potential.
struct Measure {
  int dim = 0;
  std::string name;
  PotentialField potential;
  std::function<bool(const Vec&)> inside;
  /// Draws `count` points (columns) from the stream.
  std::function<PointSet(Rng&, int)> draw;
  /// Present for products; one marginal per coordinate.
  std::vector<std::shared_ptr<const Density1D>> marginals;
  std::shared_ptr<const ConvexBody> body;
  bool on_boundary = false;
  /// sup |x| over the support, +inf when unbounded.
  double support_radius = kInfinity;
  /// Coordinate bounding box of the support.
  Vec lower, upper;
};

Measure product_measure(const std::vector<Potential1D>& coords);
Measure gaussian_measure(int dim);
/// Base measure reweighted by exp(-tilt); tilt must be >= 0 on the base
/// support, so exp(-tilt) is the acceptance probability.
Measure tilted_measure(const Measure& base, const PotentialField& tilt, int budget_factor = 1000);
Measure uniform_measure(const ConvexBody& body);
Measure cone_measure(const ConvexBody& body);

inline constexpr int kShardSize = 4096;

/// n points in shards of 4096, shard k drawn from substream(seed, k). The
/// result depends only on (measure, n, seed), never on the worker count.
PointSet sample_measure(const Measure& measure, int n, std::uint64_t seed, int workers = 1);

}  // namespace riccikit
