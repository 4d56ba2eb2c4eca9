#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vambreak {

/// A 1D sectional mesh over a truncated size domain. Immutable after
/// construction; every builder returns a fully populated value.
struct Grid {
  enum class Kind { uniform, geometric, locally_uniform, random_jitter, oscillatory };

  std::vector<double> boundaries;  // I+1, strictly increasing
  std::vector<double> pivots;      // I, pivot_i = cell midpoint
  std::vector<double> widths;      // I, all positive
  Kind kind = Kind::uniform;
  std::optional<std::uint64_t> seed;

  int cells() const { return static_cast<int>(pivots.size()); }
  double x_min() const { return boundaries.front(); }
  double x_max() const { return boundaries.back(); }

  double width_ratio() const {
    auto [mn, mx] = std::minmax_element(widths.begin(), widths.end());
    return *mx / *mn;
  }
};

inline const char* to_string(Grid::Kind k) {
  switch (k) {
    case Grid::Kind::uniform: return "uniform";
    case Grid::Kind::geometric: return "geometric";
    case Grid::Kind::locally_uniform: return "locally_uniform";
    case Grid::Kind::random_jitter: return "random";
    case Grid::Kind::oscillatory: return "oscillatory";
  }
  return "?";
}

namespace detail {

inline Grid from_boundaries(std::vector<double> b, Grid::Kind kind,
                            std::optional<std::uint64_t> seed = std::nullopt) {
  if (b.size() < 2) throw std::invalid_argument("grid needs at least one cell");
  for (std::size_t i = 1; i < b.size(); ++i)
    if (!(b[i] > b[i - 1])) throw std::invalid_argument("grid boundaries must be strictly increasing");
  Grid g;
  g.boundaries = std::move(b);
  g.kind = kind;
  g.seed = seed;
  const std::size_t n = g.boundaries.size() - 1;
  g.pivots.resize(n);
  g.widths.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.pivots[i] = 0.5 * (g.boundaries[i] + g.boundaries[i + 1]);
    g.widths[i] = g.boundaries[i + 1] - g.boundaries[i];
  }
  return g;
}

inline void check_domain(double x_min, double x_max, int cells) {
  if (x_min < 0) throw std::invalid_argument("x_min must be nonnegative");
  if (!(x_max > x_min)) throw std::invalid_argument("inverted domain");
  if (cells < 1) throw std::invalid_argument("cell count must be positive");
}

}  // namespace detail

inline Grid build_uniform(double x_min, double x_max, int cells) {
  detail::check_domain(x_min, x_max, cells);
  std::vector<double> b(cells + 1);
  const double dx = (x_max - x_min) / cells;
  for (int i = 0; i <= cells; ++i) b[i] = x_min + i * dx;
  b.back() = x_max;
  return detail::from_boundaries(std::move(b), Grid::Kind::uniform);
}

/// Boundaries x_min * r^i with r = (x_max/x_min)^(1/cells).
inline Grid build_geometric(double x_min, double x_max, int cells) {
  detail::check_domain(x_min, x_max, cells);
  if (x_min <= 0) throw std::invalid_argument("geometric grid requires x_min > 0");
  std::vector<double> b(cells + 1);
  const double lr = (std::log(x_max) - std::log(x_min)) / cells;
  for (int i = 0; i <= cells; ++i) b[i] = x_min * std::exp(i * lr);
  b.front() = x_min;
  b.back() = x_max;
  return detail::from_boundaries(std::move(b), Grid::Kind::geometric);
}

/// Variant that fixes the cell count and ratio and derives x_min = x_max / r^cells.
inline Grid build_geometric_with_ratio(double x_max, double ratio, int cells) {
  if (!(ratio > 1.0)) throw std::invalid_argument("geometric ratio must exceed 1");
  const double x_min = x_max / std::pow(ratio, cells);
  return build_geometric(x_min, x_max, cells);
}

/// Piecewise-uniform segments; each (domain fraction, cell count) pair covers
/// its fraction of [x_min, x_max] with equal-width cells.
inline Grid build_locally_uniform(double x_min, double x_max,
                                  const std::vector<std::pair<double, int>>& segments) {
  if (segments.empty()) throw std::invalid_argument("need at least one segment");
  double total = 0;
  for (const auto& [frac, n] : segments) {
    if (!(frac > 0)) throw std::invalid_argument("segment fractions must be positive");
    if (n < 1) throw std::invalid_argument("each segment needs at least one cell");
    total += frac;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("segment fractions must sum to 1");
  detail::check_domain(x_min, x_max, 1);

  std::vector<double> b{x_min};
  double left = x_min;
  for (const auto& [frac, n] : segments) {
    const double seg_len = frac * (x_max - x_min);
    for (int i = 1; i <= n; ++i) b.push_back(left + seg_len * i / n);
    left += seg_len;
  }
  b.back() = x_max;
  return detail::from_boundaries(std::move(b), Grid::Kind::locally_uniform);
}

/// Seeded bounded-jitter perturbation of the uniform partition, rejection
/// resampled until max(width)/min(width) <= max_ratio.
inline Grid build_random(double x_min, double x_max, int cells, std::uint64_t seed,
                         double max_ratio) {
  detail::check_domain(x_min, x_max, cells);
  if (max_ratio < 1.0) throw std::invalid_argument("max_ratio must be >= 1");
  if (cells == 1)
    return detail::from_boundaries({x_min, x_max}, Grid::Kind::random_jitter, seed);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.45, 0.45);
  const double dx = (x_max - x_min) / cells;
  // every accepted width lies in [lo, hi] with hi/lo <= max_ratio, so the
  // global ratio bound holds by construction; each boundary's jitter is
  // rejection-resampled individually, which scales to large cell counts
  const double lo = std::max(0.1, 2.0 / (1.0 + max_ratio));
  const double hi = std::min(1.9, lo * max_ratio);
  constexpr int budget = 100000;
  int draws = 0;
  std::vector<double> b(cells + 1);
  b.front() = x_min;
  b.back() = x_max;
  double prev = 0.0;  // jitter of the previous boundary (endpoints fixed)
  for (int i = 1; i < cells; ++i) {
    for (;;) {
      if (++draws > budget)
        throw std::runtime_error("random grid: resampling budget exhausted (max_ratio too tight)");
      const double j = jitter(rng);
      const double w = 1.0 + j - prev;                       // width of cell i-1, in units of dx
      const double w_last = i == cells - 1 ? 1.0 - j : 1.0;  // final width when placing the last
      if (w >= lo && w <= hi && w_last >= lo && w_last <= hi) {
        b[i] = x_min + (i + j) * dx;
        prev = j;
        break;
      }
    }
  }
  return detail::from_boundaries(std::move(b), Grid::Kind::random_jitter, seed);
}

/// Widths alternate in the 2:1 pattern (doubling after odd cells, halving
/// after even ones, 1-based), scaled so the boundaries span [x_min, x_max].
inline Grid build_oscillatory(double x_min, double x_max, int cells) {
  detail::check_domain(x_min, x_max, cells);
  std::vector<double> w(cells);
  w[0] = 1.0;
  for (int i = 1; i < cells; ++i) {
    const int prev = i;  // 1-based index of the previous cell
    w[i] = (prev % 2 == 1) ? 2.0 * w[i - 1] : 0.5 * w[i - 1];
  }
  double sum = 0;
  for (double x : w) sum += x;
  const double scale = (x_max - x_min) / sum;
  std::vector<double> b(cells + 1);
  b[0] = x_min;
  for (int i = 0; i < cells; ++i) b[i + 1] = b[i] + w[i] * scale;
  b.back() = x_max;
  return detail::from_boundaries(std::move(b), Grid::Kind::oscillatory);
}

/// Split every cell at its midpoint; the input boundary set is preserved.
inline Grid bisect(const Grid& g) {
  std::vector<double> b;
  b.reserve(2 * g.cells() + 1);
  for (int i = 0; i < g.cells(); ++i) {
    b.push_back(g.boundaries[i]);
    b.push_back(g.pivots[i]);
  }
  b.push_back(g.boundaries.back());
  return detail::from_boundaries(std::move(b), g.kind, g.seed);
}

/// Uniform rescale of all boundaries (keeps the family tag).
inline Grid scaled(const Grid& g, double factor) {
  if (!(factor > 0)) throw std::invalid_argument("scale factor must be positive");
  std::vector<double> b = g.boundaries;
  for (double& x : b) x *= factor;
  return detail::from_boundaries(std::move(b), g.kind, g.seed);
}

/// Rescale so the last pivot lands exactly at `target`. Moment experiments use
/// this to put the monodisperse initial particle on a pivot.
inline Grid aligned_top_pivot(const Grid& g, double target = 1.0) {
  return scaled(g, target / g.pivots.back());
}

/// Tensor-product rectangular mesh.
struct Grid2D {
  Grid axis1;
  Grid axis2;
  int cells1() const { return axis1.cells(); }
  int cells2() const { return axis2.cells(); }
};

}  // namespace vambreak
