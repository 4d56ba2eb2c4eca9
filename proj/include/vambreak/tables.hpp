#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vambreak/grid.hpp"
#include "vambreak/kernels.hpp"

namespace vambreak {

/// Precomputed sub-cell partial integrals of the breakage function:
///   p0(i,j) = int_{lo_i}^{p_j^i} beta(x | x_j; x_k) dx
///   p1(i,j) = same with weight x,
/// where p_j^i is the pivot for i == j and the upper cell boundary otherwise.
/// The first cell's lower limit is 0 rather than the grid's x_min, so the
/// sub-intervals {[lo_i, p_j^i]}_{i<=j} tile [0, x_j] exactly and the
/// telescoped mass identity holds on truncated domains.
struct BetaTable {
  int n = 0;
  bool z_independent = true;
  std::vector<double> p0, p1;  // (i,j) row-major; (i,j,k) when z-dependent

  double at0(int i, int j) const { return p0[static_cast<std::size_t>(i) * n + j]; }
  double at1(int i, int j) const { return p1[static_cast<std::size_t>(i) * n + j]; }
  double at0(int i, int j, int k) const {
    return p0[(static_cast<std::size_t>(i) * n + j) * n + k];
  }
  double at1(int i, int j, int k) const {
    return p1[(static_cast<std::size_t>(i) * n + j) * n + k];
  }
};

namespace detail {

inline double lower_limit(const Grid& g, int i) { return i == 0 ? 0.0 : g.boundaries[i]; }

inline double upper_limit(const Grid& g, int i, int j) {
  return i == j ? g.pivots[i] : g.boundaries[i + 1];
}

inline double partial(const KernelSpec& spec, double a, double b, double y, double z,
                      int weight, int i, int j, int k) {
  try {
    if (weight == 0 && spec.partial0) return spec.partial0(a, b, y, z);
    if (weight == 1 && spec.partial1) return spec.partial1(a, b, y, z);
    return partial_integral_quadrature(spec, a, b, y, z, weight);
  } catch (const std::exception& e) {
    throw std::runtime_error("kernel table entry (i=" + std::to_string(i) +
                             ", j=" + std::to_string(j) + ", k=" + std::to_string(k) +
                             "): " + e.what());
  }
}

}  // namespace detail

inline BetaTable precompute_tables(const Grid& g, const KernelSpec& spec) {
  const int n = g.cells();
  BetaTable t;
  t.n = n;
  t.z_independent = spec.z_independent;
  if (spec.z_independent) {
    t.p0.assign(static_cast<std::size_t>(n) * n, 0.0);
    t.p1.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double a = detail::lower_limit(g, i);
      for (int j = i; j < n; ++j) {
        const double b = detail::upper_limit(g, i, j);
        const double y = g.pivots[j];
        const std::size_t idx = static_cast<std::size_t>(i) * n + j;
        t.p0[idx] = detail::partial(spec, a, b, y, 0.0, 0, i, j, -1);
        t.p1[idx] = detail::partial(spec, a, b, y, 0.0, 1, i, j, -1);
      }
    }
  } else {
    // O(n^3) storage; only materialized for genuinely z-dependent kernels.
    t.p0.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    t.p1.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double a = detail::lower_limit(g, i);
      for (int j = i; j < n; ++j) {
        const double b = detail::upper_limit(g, i, j);
        const double y = g.pivots[j];
        for (int k = 0; k < n; ++k) {
          const double z = g.pivots[k];
          const std::size_t idx = (static_cast<std::size_t>(i) * n + j) * n + k;
          t.p0[idx] = detail::partial(spec, a, b, y, z, 0, i, j, k);
          t.p1[idx] = detail::partial(spec, a, b, y, z, 1, i, j, k);
        }
      }
    }
  }
  return t;
}

/// Two-pivot reallocation weights for the fixed pivot baseline: eta(i,j) is
/// the number fraction of fragments from a breaking particle at pivot x_j
/// assigned to pivot x_i. Fragments between adjacent pivots are split so that
/// each fragment's number and mass are both preserved; fragments below the
/// first pivot are folded onto it mass-preservingly.
struct FptTable {
  int n = 0;
  std::vector<double> eta;  // (i,j) row-major, i <= j
  double at(int i, int j) const { return eta[static_cast<std::size_t>(i) * n + j]; }
};

inline FptTable precompute_fpt(const Grid& g, const KernelSpec& spec) {
  if (!spec.z_independent)
    throw std::invalid_argument("fixed pivot baseline supports z-independent kernels only");
  const int n = g.cells();
  const auto& x = g.pivots;
  FptTable t;
  t.n = n;
  t.eta.assign(static_cast<std::size_t>(n) * n, 0.0);
  auto p0 = [&](double a, double b, double y) {
    return b > a ? detail::partial(spec, a, b, y, 0.0, 0, -1, -1, -1) : 0.0;
  };
  auto p1 = [&](double a, double b, double y) {
    return b > a ? detail::partial(spec, a, b, y, 0.0, 1, -1, -1, -1) : 0.0;
  };
  for (int j = 0; j < n; ++j) {
    const double y = x[j];
    // fragments below the first pivot: count y-weighted so mass is exact
    t.eta[0 * static_cast<std::size_t>(n) + j] += p1(0.0, std::min(x[0], y), y) / x[0];
    for (int i = 0; i + 1 <= j; ++i) {
      // fragments in [x_i, x_{i+1}] capped at the mother size y
      const double a = x[i], b = std::min(x[i + 1], y);
      if (b <= a) continue;
      const double num = p0(a, b, y), mass = p1(a, b, y), h = x[i + 1] - x[i];
      t.eta[static_cast<std::size_t>(i) * n + j] += (x[i + 1] * num - mass) / h;
      t.eta[static_cast<std::size_t>(i + 1) * n + j] += (mass - x[i] * num) / h;
    }
  }
  return t;
}

}  // namespace vambreak
