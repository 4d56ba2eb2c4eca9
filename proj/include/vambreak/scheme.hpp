#pragma once

#include <stdexcept>
#include <vector>

#include "vambreak/grid.hpp"
#include "vambreak/kernels.hpp"
#include "vambreak/tables.hpp"

namespace vambreak {

using State = std::vector<double>;

/// One RHS evaluation's raw sectional rates: birth B_i, death D_i, the birth
/// volume flux V_i, and the per-cell fragment volume average vbar_i = V_i/B_i
/// (defined as the pivot when B_i = 0 so the allocation map stays continuous).
struct RateTerms {
  std::vector<double> birth, death, flux, vbar;
};

/// w_j = sum_k K(x_j, x_k) N_k. Factorizes the quadratic rate sums so birth,
/// flux and death are all O(I^2) overall (O(I) here when K is separable).
inline std::vector<double> collision_weights(const Grid& g, const KernelSpec& kernel,
                                             const State& n) {
  const int I = g.cells();
  if (static_cast<int>(n.size()) != I)
    throw std::invalid_argument("state length does not match grid");
  std::vector<double> w(I, 0.0);
  if (kernel.separable_collision) {
    double s = 0;
    for (int k = 0; k < I; ++k) s += kernel.collision_factor(g.pivots[k]) * n[k];
    for (int j = 0; j < I; ++j) w[j] = kernel.collision_factor(g.pivots[j]) * s;
  } else {
    for (int j = 0; j < I; ++j) {
      double s = 0;
      for (int k = 0; k < I; ++k) s += kernel.collision(g.pivots[j], g.pivots[k]) * n[k];
      w[j] = s;
    }
  }
  return w;
}

inline RateTerms birth_death_flux(const Grid& g, const KernelSpec& kernel,
                                  const BetaTable& table, const State& n) {
  const int I = g.cells();
  if (table.n != I) throw std::invalid_argument("table size does not match grid");
  RateTerms r;
  r.birth.assign(I, 0.0);
  r.death.assign(I, 0.0);
  r.flux.assign(I, 0.0);
  r.vbar.assign(I, 0.0);

  const std::vector<double> w = collision_weights(g, kernel, n);
  if (table.z_independent) {
    for (int i = 0; i < I; ++i) {
      double b = 0, v = 0;
      for (int j = i; j < I; ++j) {
        const double s = w[j] * n[j];
        b += table.at0(i, j) * s;
        v += table.at1(i, j) * s;
      }
      r.birth[i] = b;
      r.flux[i] = v;
    }
  } else {
    for (int i = 0; i < I; ++i) {
      double b = 0, v = 0;
      for (int j = i; j < I; ++j)
        for (int k = 0; k < I; ++k) {
          const double s = kernel.collision(g.pivots[j], g.pivots[k]) * n[j] * n[k];
          b += table.at0(i, j, k) * s;
          v += table.at1(i, j, k) * s;
        }
      r.birth[i] = b;
      r.flux[i] = v;
    }
  }
  for (int i = 0; i < I; ++i) {
    r.death[i] = n[i] * w[i];
    r.vbar[i] = r.birth[i] > 0 ? r.flux[i] / r.birth[i] : g.pivots[i];
  }
  return r;
}

/// Birth counts after the volume-average reallocation, plus the net count
/// discrepancy introduced by boundary clamping. At the boundaries the
/// two-pivot split can target a nonexistent pivot; the clamp deposits the
/// mass-equivalent count on the boundary pivot, so cell volume is preserved
/// exactly everywhere and only the particle count picks up a (logged,
/// physically tiny) localized error.
struct AllocatedBirth {
  std::vector<double> birth;
  double clamp_number_error = 0.0;  // allocated count minus raw count, net
};

inline AllocatedBirth allocate(const Grid& g, const RateTerms& rates) {
  const int I = g.cells();
  const auto& x = g.pivots;
  AllocatedBirth out;
  out.birth.assign(I, 0.0);
  for (int i = 0; i < I; ++i) {
    const double b = rates.birth[i];
    if (b == 0.0) continue;
    const double v = rates.vbar[i];
    // Heaviside gates; the v = x_i tie sends half through each branch, and
    // both stay-fractions are 1 there, so the cell keeps exactly b.
    double hp = 0, hm = 0;
    if (v > x[i]) hp = 1;
    else if (v < x[i]) hm = 1;
    else hp = hm = 0.5;

    if (hp > 0) {
      const double bb = hp * b;
      if (i + 1 < I) {
        out.birth[i] += bb * (v - x[i + 1]) / (x[i] - x[i + 1]);
        out.birth[i + 1] += bb * (v - x[i]) / (x[i + 1] - x[i]);
      } else {
        out.birth[i] += bb * v / x[i];
        out.clamp_number_error += bb * (v / x[i] - 1.0);
      }
    }
    if (hm > 0) {
      const double bb = hm * b;
      if (i > 0) {
        out.birth[i] += bb * (v - x[i - 1]) / (x[i] - x[i - 1]);
        out.birth[i - 1] += bb * (x[i] - v) / (x[i] - x[i - 1]);
      } else {
        // ghost pivot at the origin carries zero volume; its count is dropped
        out.birth[0] += bb * v / x[0];
        out.clamp_number_error -= bb * (1.0 - v / x[0]);
      }
    }
  }
  return out;
}

struct RhsDiagnostics {
  double clamp_number_error = 0.0;
};

inline State rhs_vam(const Grid& g, const KernelSpec& kernel, const BetaTable& table,
                     const State& n, RhsDiagnostics* diag = nullptr) {
  const RateTerms rates = birth_death_flux(g, kernel, table, n);
  const AllocatedBirth alloc = allocate(g, rates);
  if (diag) diag->clamp_number_error += alloc.clamp_number_error;
  State dn(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) dn[i] = alloc.birth[i] - rates.death[i];
  return dn;
}

inline State rhs_midpoint(const Grid& g, const KernelSpec& kernel, const BetaTable& table,
                          const State& n) {
  const RateTerms rates = birth_death_flux(g, kernel, table, n);
  State dn(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) dn[i] = rates.birth[i] - rates.death[i];
  return dn;
}

inline State rhs_fpt(const Grid& g, const KernelSpec& kernel, const FptTable& table,
                     const State& n) {
  const int I = g.cells();
  if (table.n != I) throw std::invalid_argument("table size does not match grid");
  const std::vector<double> w = collision_weights(g, kernel, n);
  State dn(I, 0.0);
  for (int i = 0; i < I; ++i) {
    double b = 0;
    for (int j = i; j < I; ++j) b += table.at(i, j) * w[j] * n[j];
    dn[i] = b - n[i] * w[i];
  }
  return dn;
}

}  // namespace vambreak
