#include "vambreak/scheme.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "vambreak/grid.hpp"
#include "vambreak/kernels.hpp"
#include "vambreak/tables.hpp"

namespace vambreak {
namespace {

const char* kBuiltins[] = {
    "product_xy:binary_2_over_y",       "product_xy:quartic_4x2_over_y3",
    "product_xy:parabolic_12x",         "constant_one:binary_2_over_y",
    "constant_one:quartic_4x2_over_y3", "constant_one:parabolic_12x",
};

State random_state(std::mt19937_64& rng, int n, bool zero_first_cell) {
  std::uniform_real_distribution<double> u(0, 1);
  State s(n);
  for (double& v : s) v = u(rng);
  if (zero_first_cell) s[0] = 0;
  return s;
}

/// Literal triple-loop evaluation of the birth/flux sums and the death term,
/// recomputing every sub-cell limit from scratch.
RateTerms naive_rates(const Grid& g, const KernelSpec& k, const State& n) {
  const int I = g.cells();
  RateTerms r;
  r.birth.assign(I, 0.0);
  r.death.assign(I, 0.0);
  r.flux.assign(I, 0.0);
  r.vbar.assign(I, 0.0);
  for (int i = 0; i < I; ++i) {
    const double a = i == 0 ? 0.0 : g.boundaries[i];
    for (int j = i; j < I; ++j) {
      const double b = i == j ? g.pivots[i] : g.boundaries[i + 1];
      for (int kk = 0; kk < I; ++kk) {
        const double rate = k.collision(g.pivots[j], g.pivots[kk]) * n[j] * n[kk];
        r.birth[i] += k.partial0(a, b, g.pivots[j], g.pivots[kk]) * rate;
        r.flux[i] += k.partial1(a, b, g.pivots[j], g.pivots[kk]) * rate;
      }
    }
    for (int kk = 0; kk < I; ++kk)
      r.death[i] += k.collision(g.pivots[i], g.pivots[kk]) * n[i] * n[kk];
    r.vbar[i] = r.birth[i] > 0 ? r.flux[i] / r.birth[i] : g.pivots[i];
  }
  return r;
}

TEST(CollisionWeights, ConstantAndProduct) {
  const Grid g = build_uniform(0, 1, 4);
  const State n = {1, 2, 3, 4};
  const auto wc = collision_weights(g, builtin("constant_one:binary_2_over_y"), n);
  for (double w : wc) EXPECT_DOUBLE_EQ(w, 10.0);
  const auto wp = collision_weights(g, builtin("product_xy:binary_2_over_y"), n);
  double m1 = 0;
  for (int i = 0; i < 4; ++i) m1 += g.pivots[i] * n[i];
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(wp[i], g.pivots[i] * m1, 1e-15);
}

TEST(CollisionWeights, MatchesNaiveDoubleLoop) {
  std::mt19937_64 rng(3);
  const Grid g = build_geometric(1e-3, 1, 5);
  const KernelSpec k = builtin("product_xy:binary_2_over_y");
  const State n = random_state(rng, 5, false);
  const auto w = collision_weights(g, k, n);
  for (int j = 0; j < 5; ++j) {
    double s = 0;
    for (int kk = 0; kk < 5; ++kk) s += k.collision(g.pivots[j], g.pivots[kk]) * n[kk];
    EXPECT_NEAR(w[j], s, 1e-14 * std::abs(s));
  }
}

TEST(Rates, SingleCellProductKernel) {
  const Grid g = build_uniform(0, 1, 1);
  const KernelSpec k = builtin("product_xy:binary_2_over_y");
  const BetaTable t = precompute_tables(g, k);
  const double x = g.pivots[0], N = 0.7;
  const RateTerms r = birth_death_flux(g, k, t, {N});
  EXPECT_NEAR(r.birth[0], t.at0(0, 0) * x * x * N * N, 1e-15);
  EXPECT_NEAR(r.death[0], x * x * N * N, 1e-15);
}

TEST(Rates, ZeroState) {
  const Grid g = build_geometric(1e-3, 1, 6);
  const KernelSpec k = builtin("constant_one:quartic_4x2_over_y3");
  const BetaTable t = precompute_tables(g, k);
  const RateTerms r = birth_death_flux(g, k, t, State(6, 0.0));
  for (int i = 0; i < 6; ++i) {
    EXPECT_DOUBLE_EQ(r.birth[i], 0.0);
    EXPECT_DOUBLE_EQ(r.death[i], 0.0);
    EXPECT_DOUBLE_EQ(r.vbar[i], g.pivots[i]);
  }
}

TEST(Rates, ThreeCellSingleSourceHandValues) {
  // one source in the top cell of uniform [0,3] with K = 1: rates are the
  // j=3 table rows directly (see the hand integration in tables_test)
  const Grid g = build_uniform(0, 3, 3);
  const KernelSpec k = builtin("constant_one:binary_2_over_y");
  const BetaTable t = precompute_tables(g, k);
  const RateTerms r = birth_death_flux(g, k, t, {0, 0, 1});
  EXPECT_NEAR(r.birth[0], 0.8, 1e-15);
  EXPECT_NEAR(r.birth[1], 0.8, 1e-15);
  EXPECT_NEAR(r.birth[2], 0.4, 1e-15);
  EXPECT_NEAR(r.flux[0], 0.4, 1e-15);
  EXPECT_NEAR(r.flux[1], 1.2, 1e-15);
  EXPECT_NEAR(r.flux[2], 0.9, 1e-15);
  EXPECT_NEAR(r.vbar[0], 0.5, 1e-15);
  EXPECT_NEAR(r.vbar[1], 1.5, 1e-15);
  EXPECT_NEAR(r.vbar[2], 2.25, 1e-15);
  EXPECT_DOUBLE_EQ(r.death[2], 1.0);
}

TEST(Rates, FactorizedMatchesNaiveTripleLoop) {
  std::mt19937_64 rng(17);
  for (const char* name : kBuiltins) {
    const KernelSpec k = builtin(name);
    for (int trial = 0; trial < 20; ++trial) {
      const Grid g = build_random(1e-4, 1, 10, 100 + trial, 4);
      const BetaTable t = precompute_tables(g, k);
      const State n = random_state(rng, 10, false);
      const RateTerms fast = birth_death_flux(g, k, t, n);
      const RateTerms slow = naive_rates(g, k, n);
      for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(fast.birth[i], slow.birth[i], 1e-13 * std::max(1.0, slow.birth[i])) << name;
        EXPECT_NEAR(fast.flux[i], slow.flux[i], 1e-13 * std::max(1.0, slow.flux[i])) << name;
        EXPECT_NEAR(fast.death[i], slow.death[i], 1e-13 * std::max(1.0, slow.death[i])) << name;
      }
    }
  }
}

TEST(Rates, VbarInsideCellWhenBirthPositive) {
  std::mt19937_64 rng(29);
  for (const char* name : kBuiltins) {
    const KernelSpec k = builtin(name);
    const Grid g = build_oscillatory(0, 1, 12);
    const BetaTable t = precompute_tables(g, k);
    const State n = random_state(rng, 12, false);
    const RateTerms r = birth_death_flux(g, k, t, n);
    for (int i = 0; i < 12; ++i)
      if (r.birth[i] > 0) {
        const double lo = i == 0 ? 0.0 : g.boundaries[i];
        EXPECT_GE(r.vbar[i], lo - 1e-14);
        EXPECT_LE(r.vbar[i], g.boundaries[i + 1] + 1e-14);
      }
  }
}

TEST(Allocate, IdentityWhenVbarAtPivots) {
  const Grid g = build_geometric(1e-2, 1, 5);
  RateTerms r;
  r.birth = {0.3, 0.1, 0.7, 0.2, 0.9};
  r.vbar = g.pivots;
  const AllocatedBirth a = allocate(g, r);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(a.birth[i], r.birth[i], 1e-15);
  EXPECT_DOUBLE_EQ(a.clamp_number_error, 0.0);
}

TEST(Allocate, SingleInteriorSourceSplitsNumberAndVolume) {
  const Grid g = build_uniform(0, 1, 6);
  for (double v : {0.42, 0.38}) {  // above and below the pivot of cell 2
    RateTerms r;
    r.birth.assign(6, 0.0);
    r.vbar = g.pivots;
    r.birth[2] = 1.3;
    r.vbar[2] = v;
    const AllocatedBirth a = allocate(g, r);
    double num = 0, vol = 0;
    for (int i = 0; i < 6; ++i) {
      num += a.birth[i];
      vol += g.pivots[i] * a.birth[i];
    }
    EXPECT_NEAR(num, 1.3, 1e-14);
    EXPECT_NEAR(vol, 1.3 * v, 1e-14);
  }
}

TEST(Allocate, MatchesTwoByTwoSolveOnRandomSingleSources) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  const Grid g = build_random(1e-3, 1, 10, 8, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const int i = 1 + static_cast<int>(u(rng) * 8);  // interior cell
    const double B = 0.1 + u(rng);
    const double v = g.pivots[i - 1] + u(rng) * (g.pivots[i + 1] - g.pivots[i - 1]);
    RateTerms r;
    r.birth.assign(10, 0.0);
    r.vbar = g.pivots;
    r.birth[i] = B;
    r.vbar[i] = v;
    const AllocatedBirth a = allocate(g, r);
    // direct solve of [1 1; x_lo x_hi] [p q]^T = [B vB]^T
    const int lo = v >= g.pivots[i] ? i : i - 1;
    const int hi = lo + 1;
    const double det = g.pivots[hi] - g.pivots[lo];
    const double p = (g.pivots[hi] * B - v * B) / det;
    const double q = (v * B - g.pivots[lo] * B) / det;
    for (int c = 0; c < 10; ++c) {
      double expect = 0;
      if (c == lo) expect += p;
      if (c == hi) expect += q;
      EXPECT_NEAR(a.birth[c], expect, 1e-14 * B);
    }
  }
}

TEST(Allocate, ThreeCellExampleMatchesDirectSolve) {
  const Grid g = build_uniform(0, 3, 3);
  RateTerms r;
  r.birth = {0.8, 0.8, 0.4};
  r.vbar = {0.5, 1.5, 2.25};
  const AllocatedBirth a = allocate(g, r);
  // cells 0,1 sit at their pivots; cell 2's birth splits between pivots 1,2:
  // q = 0.4*(2.25-1.5)/1 = 0.3 stays, 0.1 moves down
  EXPECT_NEAR(a.birth[0], 0.8, 1e-15);
  EXPECT_NEAR(a.birth[1], 0.9, 1e-15);
  EXPECT_NEAR(a.birth[2], 0.3, 1e-15);
  EXPECT_DOUBLE_EQ(a.clamp_number_error, 0.0);
}

TEST(RhsVam, ZeroState) {
  const Grid g = build_geometric(1e-3, 1, 6);
  const KernelSpec k = builtin("product_xy:binary_2_over_y");
  const BetaTable t = precompute_tables(g, k);
  const State dn = rhs_vam(g, k, t, State(6, 0.0));
  for (double v : dn) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(RhsVam, MonodisperseNumberProduction) {
  // one count in the top cell with K = yz and binary breakage produces
  // particles at rate x_I^2 (zeta - 1) = x_I^2
  const Grid g = build_uniform(0, 1, 8);
  const KernelSpec k = builtin("product_xy:binary_2_over_y");
  const BetaTable t = precompute_tables(g, k);
  State n(8, 0.0);
  n.back() = 1.0;
  const State dn = rhs_vam(g, k, t, n);
  double total = 0;
  for (double v : dn) total += v;
  const double xI = g.pivots.back();
  EXPECT_NEAR(total, xI * xI, 1e-13);
}

TEST(RhsVam, MassConservedOnAllFamilies) {
  std::mt19937_64 rng(53);
  const std::vector<Grid> grids = {
      build_uniform(1e-9, 1, 14),          build_geometric(1e-9, 1, 14),
      build_locally_uniform(0, 1, {{0.5, 5}, {0.5, 9}}),
      build_random(1e-9, 1, 14, 77, 4),    build_oscillatory(0, 1, 14),
  };
  for (const char* name : kBuiltins) {
    const KernelSpec k = builtin(name);
    for (const Grid& g : grids) {
      const BetaTable t = precompute_tables(g, k);
      const State n = random_state(rng, 14, false);
      const State dn = rhs_vam(g, k, t, n);
      double dm1 = 0, scale = 0;
      for (int i = 0; i < 14; ++i) {
        dm1 += g.pivots[i] * dn[i];
        scale += g.pivots[i] * n[i];
      }
      EXPECT_LE(std::abs(dm1), 1e-12 * scale) << name << " on " << to_string(g.kind);
    }
  }
}

TEST(RhsVam, NumberProductionIdentity) {
  // states with an empty first cell on zero-based grids keep the boundary
  // clamp silent, so the discrete zeta identity is exact
  std::mt19937_64 rng(59);
  const Grid g = build_uniform(0, 1, 12);
  for (const char* name : kBuiltins) {
    const KernelSpec k = builtin(name);
    const BetaTable t = precompute_tables(g, k);
    const State n = random_state(rng, 12, true);
    const State dn = rhs_vam(g, k, t, n);
    double total = 0;
    for (double v : dn) total += v;
    double expect = 0;
    for (int j = 0; j < 12; ++j)
      for (int c = 0; c < 12; ++c)
        expect += k.collision(g.pivots[j], g.pivots[c]) * n[j] * n[c] *
                  (k.fragment_count(g.pivots[j], g.pivots[c]) - 1.0);
    EXPECT_NEAR(total, expect, 1e-12 * std::abs(expect)) << name;
  }
}

TEST(RhsVam, NonnegativeRateAtEmptyCells) {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> cell(0, 11);
  const Grid g = build_random(1e-6, 1, 12, 13, 4);
  const KernelSpec k = builtin("product_xy:binary_2_over_y");
  const BetaTable t = precompute_tables(g, k);
  for (int trial = 0; trial < 200; ++trial) {
    State n = random_state(rng, 12, false);
    const int i = cell(rng);
    n[i] = 0;
    const State dn = rhs_vam(g, k, t, n);
    EXPECT_GE(dn[i], 0.0);
  }
}

TEST(RhsVam, ReallocatedVolumeEqualsVbarWeightedBirth) {
  std::mt19937_64 rng(67);
  const Grid g = build_geometric(1e-6, 1, 10);
  const KernelSpec k = builtin("constant_one:parabolic_12x");
  const BetaTable t = precompute_tables(g, k);
  const State n = random_state(rng, 10, true);
  const RateTerms r = birth_death_flux(g, k, t, n);
  const AllocatedBirth a = allocate(g, r);
  double lhs = 0, rhs = 0;
  for (int i = 0; i < 10; ++i) {
    lhs += g.pivots[i] * a.birth[i];
    rhs += r.vbar[i] * r.birth[i];
  }
  EXPECT_NEAR(lhs, rhs, 1e-14 * std::abs(rhs));
}

TEST(RhsMidpoint, NumberProductionMatchesVam) {
  std::mt19937_64 rng(71);
  const Grid g = build_uniform(0, 1, 10);
  const KernelSpec k = builtin("product_xy:binary_2_over_y");
  const BetaTable t = precompute_tables(g, k);
  const State n = random_state(rng, 10, true);
  const State a = rhs_vam(g, k, t, n);
  const State b = rhs_midpoint(g, k, t, n);
  double sa = 0, sb = 0;
  for (int i = 0; i < 10; ++i) {
    sa += a[i];
    sb += b[i];
  }
  EXPECT_NEAR(sa, sb, 1e-13 * std::abs(sa));
}

TEST(RhsMidpoint, MassDriftsOnNonuniformGrid) {
  std::mt19937_64 rng(73);
  const Grid g = build_geometric(1e-3, 1, 10);
  const KernelSpec k = builtin("product_xy:binary_2_over_y");
  const BetaTable t = precompute_tables(g, k);
  const State n = random_state(rng, 10, false);
  const State dn = rhs_midpoint(g, k, t, n);
  double dm1 = 0;
  for (int i = 0; i < 10; ++i) dm1 += g.pivots[i] * dn[i];
  EXPECT_GT(std::abs(dm1), 1e-6);
}

TEST(RhsFpt, MassConservedOnRandomState) {
  std::mt19937_64 rng(79);
  const Grid g = build_random(1e-6, 1, 12, 19, 4);
  const KernelSpec k = builtin("product_xy:binary_2_over_y");
  const FptTable t = precompute_fpt(g, k);
  const State n = random_state(rng, 12, false);
  const State dn = rhs_fpt(g, k, t, n);
  double dm1 = 0, scale = 0;
  for (int i = 0; i < 12; ++i) {
    dm1 += g.pivots[i] * dn[i];
    scale += g.pivots[i] * n[i];
  }
  EXPECT_LE(std::abs(dm1), 1e-12 * scale);
}

TEST(Rhs, StateSizeMismatchRejected) {
  const Grid g = build_uniform(0, 1, 4);
  const KernelSpec k = builtin("constant_one:binary_2_over_y");
  const BetaTable t = precompute_tables(g, k);
  EXPECT_THROW(rhs_vam(g, k, t, State(3, 1.0)), std::invalid_argument);
}

}  // namespace
}  // namespace vambreak
