#pragma once

#include "riccikit/fields.hpp"

#include <functional>
#include <vector>

namespace riccikit {

/// Probability density proportional to exp(-V) on an interval. Infinite ends
/// are truncated where V exceeds its minimum by 45 (mass below 1e-19).
/// Cumulative tables are built once; all queries are const.
class Density1D {
 public:
  explicit Density1D(Potential1D V, int base_cells = 4096);

  double lower() const { return edges_.front(); }
  double upper() const { return edges_.back(); }
  /// Support as declared by the potential (may be infinite).
  double support_lower() const { return V_.lower; }
  double support_upper() const { return V_.upper; }
  bool bounded() const;

  double log_normalizer() const { return log_z_; }
  double pdf(double x) const;
  double cdf(double x) const;
  double sf(double x) const;
  double quantile(double u) const;
  /// Inverse survival function: x with sf(x) = s.
  double isf(double s) const;
  /// Table-driven inverse CDF for sampling (cubic Hermite between cell edges).
  double sample_quantile(double u) const;

  double integrate(const std::function<double(double)>& f) const;
  double mean() const { return mean_; }
  double second_moment() const { return second_; }
  double variance() const { return second_ - mean_ * mean_; }

  /// The raw potential and its normalized version V + log Z.
  const Potential1D& raw_potential() const { return V_; }
  Potential1D potential() const;

  /// Density of X - shift.
  Density1D shifted(double shift) const;

 private:
  double local_mass(double a, double b) const;
  std::size_t cell_of(double x) const;
  double solve_in_cell(std::size_t j, double target, bool from_left) const;

  Potential1D V_;
  int base_cells_;
  double vmin_ = 0.0;
  double log_z_ = 0.0;
  std::vector<double> edges_;
  std::vector<double> left_;   // unnormalized mass left of edge i
  std::vector<double> right_;  // unnormalized mass right of edge i
  std::vector<double> edge_pdf_;
  double total_ = 0.0;
  double mean_ = 0.0;
  double second_ = 0.0;
  bool interior_gap_ = false;
};

}  // namespace riccikit
