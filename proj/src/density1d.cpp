#include "riccikit/density1d.hpp"

#include "riccikit/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace riccikit {

namespace {

constexpr double kTailGap = 45.0;

const QuadratureRule& unit_rule() {
  static const QuadratureRule rule = gauss_legendre(8, 0.0, 1.0);
  return rule;
}

double safe_v(const Potential1D& V, double x) {
  const double v = V.v(x);
  return std::isnan(v) ? kInfinity : v;
}

}  // namespace

Density1D::Density1D(Potential1D V, int base_cells) : V_(std::move(V)), base_cells_(base_cells) {
  const double a = V_.lower;
  const double b = V_.upper;
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "empty support");
  double L = std::isfinite(a) ? a : (std::isfinite(b) ? b - 1.0 : -1.0);
  double R = std::isfinite(b) ? b : (std::isfinite(a) ? a + 1.0 : 1.0);
  const int probe = 2048;
  auto probe_x = [&](int i) { return L + (R - L) * (i + 0.5) / probe; };
  double vmin = kInfinity;
  for (int iter = 0;; ++iter) {
    vmin = kInfinity;
    for (int i = 0; i < probe; ++i) vmin = std::min(vmin, safe_v(V_, probe_x(i)));
    if (!std::isfinite(vmin)) throw Error(ErrorCode::NonNormalizable, "potential is nowhere finite");
    const bool grow_left = !std::isfinite(a) && safe_v(V_, L) - vmin < kTailGap;
    const bool grow_right = !std::isfinite(b) && safe_v(V_, R) - vmin < kTailGap;
    if (!grow_left && !grow_right) break;
    if (iter > 60) throw Error(ErrorCode::NonNormalizable, "tails do not decay");
    const double w = R - L;
    if (grow_left) L -= w;
    if (grow_right) R += w;
  }
  vmin_ = vmin;
  // Trim infinite ends to the level set V - vmin = kTailGap.
  auto trim = [&](double inside, double outside) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (safe_v(V_, mid) - vmin_ < kTailGap) inside = mid; else outside = mid;
    }
    return outside;
  };
  if (!std::isfinite(a)) {
    int i = 0;
    while (i < probe && safe_v(V_, probe_x(i)) - vmin_ >= kTailGap) ++i;
    L = trim(probe_x(i), i == 0 ? L : probe_x(i - 1));
  }
  if (!std::isfinite(b)) {
    int i = probe - 1;
    while (i >= 0 && safe_v(V_, probe_x(i)) - vmin_ >= kTailGap) --i;
    R = trim(probe_x(i), i == probe - 1 ? R : probe_x(i + 1));
  }

  std::vector<double> base(base_cells_ + 1);
  for (int i = 0; i <= base_cells_; ++i) base[i] = L + (R - L) * static_cast<double>(i) / base_cells_;
  base.back() = R;
  std::vector<double> mass(base_cells_);
  double sum = 0.0;
  for (int i = 0; i < base_cells_; ++i) {
    mass[i] = local_mass(base[i], base[i + 1]);
    sum += mass[i];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) throw Error(ErrorCode::NonNormalizable, "density has no finite mass");
  const double avg = sum / base_cells_;
  edges_.push_back(base[0]);
  for (int i = 0; i < base_cells_; ++i) {
    const int pieces = mass[i] > 2.0 * avg ? static_cast<int>(std::ceil(mass[i] / avg)) : 1;
    for (int k = 1; k < pieces; ++k) edges_.push_back(base[i] + (base[i + 1] - base[i]) * k / pieces);
    edges_.push_back(base[i + 1]);
  }
  const std::size_t n = edges_.size() - 1;
  std::vector<double> cell(n);
  for (std::size_t i = 0; i < n; ++i) cell[i] = local_mass(edges_[i], edges_[i + 1]);
  left_.assign(n + 1, 0.0);
  right_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) left_[i + 1] = left_[i] + cell[i];
  for (std::size_t i = n; i-- > 0;) right_[i] = right_[i + 1] + cell[i];
  total_ = left_[n];
  log_z_ = std::log(total_) - vmin_;
  edge_pdf_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) edge_pdf_[i] = std::exp(-(safe_v(V_, edges_[i]) - vmin_));
  std::size_t first = n, last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (cell[i] > 0) {
      first = std::min(first, i);
      last = i;
    }
  }
  for (std::size_t i = first; i < last; ++i) {
    if (cell[i] <= 0) interior_gap_ = true;
  }
  mean_ = integrate([](double x) { return x; });
  second_ = integrate([](double x) { return x * x; });
}

bool Density1D::bounded() const { return std::isfinite(V_.lower) && std::isfinite(V_.upper); }

double Density1D::local_mass(double a, double b) const {
  if (b <= a) return 0.0;
  const QuadratureRule& r = unit_rule();
  double s = 0.0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) {
    const double x = a + (b - a) * r.nodes[k];
    s += r.weights[k] * std::exp(-(safe_v(V_, x) - vmin_));
  }
  return s * (b - a);
}

std::size_t Density1D::cell_of(double x) const {
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  std::size_t j = static_cast<std::size_t>(it - edges_.begin());
  j = j == 0 ? 0 : j - 1;
  return std::min(j, edges_.size() - 2);
}

double Density1D::pdf(double x) const {
  if (x < V_.lower || x > V_.upper) return 0.0;
  return std::exp(-(safe_v(V_, x) - vmin_)) / total_;
}

double Density1D::cdf(double x) const {
  if (x <= lower()) return 0.0;
  if (x >= upper()) return 1.0;
  const std::size_t j = cell_of(x);
  return (left_[j] + local_mass(edges_[j], x)) / total_;
}

double Density1D::sf(double x) const {
  if (x <= lower()) return 1.0;
  if (x >= upper()) return 0.0;
  const std::size_t j = cell_of(x);
  return (right_[j + 1] + local_mass(x, edges_[j + 1])) / total_;
}

double Density1D::solve_in_cell(std::size_t j, double target, bool from_left) const {
  double lo = edges_[j];
  double hi = edges_[j + 1];
  const double cell = from_left ? left_[j + 1] - left_[j] : right_[j] - right_[j + 1];
  double t = cell > 0 ? lo + (hi - lo) * (from_left ? target / cell : 1.0 - target / cell) : 0.5 * (lo + hi);
  t = std::clamp(t, lo, hi);
  for (int it = 0; it < 200; ++it) {
    // g increases with t in both modes.
    const double g = from_left ? local_mass(edges_[j], t) - target : target - local_mass(t, edges_[j + 1]);
    if (g > 0) hi = t; else lo = t;
    const double q = std::exp(-(safe_v(V_, t) - vmin_));
    double next = q > 0 ? t - g / q : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t)) || hi - lo <= 1e-15 * (1.0 + std::abs(t))) return next;
    t = next;
  }
  throw Error(ErrorCode::CDFInversionFailure, "quantile iteration did not converge");
}

double Density1D::quantile(double u) const {
  if (interior_gap_) throw Error(ErrorCode::CDFInversionFailure, "density vanishes inside its support");
  if (u <= 0.0) return lower();
  if (u >= 1.0) return upper();
  if (u > 0.5) return isf(1.0 - u);
  const double target = u * total_;
  auto it = std::upper_bound(left_.begin(), left_.end(), target);
  std::size_t j = static_cast<std::size_t>(it - left_.begin());
  j = std::clamp<std::size_t>(j == 0 ? 0 : j - 1, 0, edges_.size() - 2);
  return solve_in_cell(j, target - left_[j], true);
}

double Density1D::isf(double s) const {
  if (interior_gap_) throw Error(ErrorCode::CDFInversionFailure, "density vanishes inside its support");
  if (s <= 0.0) return upper();
  if (s >= 1.0) return lower();
  if (s > 0.5) return quantile(1.0 - s);
  const double target = s * total_;
  // right_ is non-increasing; find j with right_[j] >= target > right_[j + 1].
  auto it = std::lower_bound(right_.begin(), right_.end(), target, std::greater<double>());
  std::size_t k = static_cast<std::size_t>(it - right_.begin());
  std::size_t j = std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, edges_.size() - 2);
  while (j + 1 < edges_.size() - 1 && right_[j + 1] >= target) ++j;
  return solve_in_cell(j, target - right_[j + 1], false);
}

double Density1D::sample_quantile(double u) const {
  if (interior_gap_) throw Error(ErrorCode::CDFInversionFailure, "density vanishes inside its support");
  const double target = u * total_;
  auto it = std::upper_bound(left_.begin(), left_.end(), target);
  std::size_t j = static_cast<std::size_t>(it - left_.begin());
  j = std::clamp<std::size_t>(j == 0 ? 0 : j - 1, 0, edges_.size() - 2);
  const double c0 = left_[j];
  const double c1 = left_[j + 1];
  const double q0 = edge_pdf_[j];
  const double q1 = edge_pdf_[j + 1];
  if (!(q0 > 0 && q1 > 0 && c1 > c0) || q0 < 1e-200 || q1 < 1e-200) return quantile(u);
  const double x = hermite_cubic(c0, c1, edges_[j], edges_[j + 1], 1.0 / q0, 1.0 / q1, target);
  return std::clamp(x, edges_[j], edges_[j + 1]);
}

double Density1D::integrate(const std::function<double(double)>& f) const {
  const QuadratureRule& r = unit_rule();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
    const double a = edges_[i];
    const double w = edges_[i + 1] - a;
    double c = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      const double x = a + w * r.nodes[k];
      const double q = std::exp(-(safe_v(V_, x) - vmin_));
      if (q > 0) c += r.weights[k] * q * f(x);
    }
    s += c * w;
  }
  return s / total_;
}

Potential1D Density1D::potential() const {
  Potential1D p = V_;
  const double shift = log_z_;
  const auto v = V_.v;
  p.v = [v, shift](double x) { return v(x) + shift; };
  return p;
}

Density1D Density1D::shifted(double shift) const {
  Potential1D p;
  p.name = V_.name;
  p.lower = V_.lower - shift;
  p.upper = V_.upper - shift;
  auto wrap = [shift](const std::function<double(double)>& f) -> std::function<double(double)> {
    if (!f) return nullptr;
    return [f, shift](double y) { return f(y + shift); };
  };
  p.v = wrap(V_.v);
  p.d1 = wrap(V_.d1);
  p.d2 = wrap(V_.d2);
  p.d3 = wrap(V_.d3);
  p.d4 = wrap(V_.d4);
  return Density1D(p, base_cells_);
}

}  // namespace riccikit
