#pragma once

#include <stdexcept>
#include <vector>

#include "vambreak/grid.hpp"
#include "vambreak/kernels2d.hpp"
#include "vambreak/tables.hpp"

namespace vambreak {

/// Row-major I1 x I2 particle counts.
struct State2D {
  int n1 = 0, n2 = 0;
  std::vector<double> counts;

  State2D() = default;
  State2D(int i1, int i2) : n1(i1), n2(i2), counts(static_cast<std::size_t>(i1) * i2, 0.0) {}
  double& at(int i, int j) { return counts[static_cast<std::size_t>(i) * n2 + j]; }
  double at(int i, int j) const { return counts[static_cast<std::size_t>(i) * n2 + j]; }
};

/// Rectangle partial integrals of the 2D breakage density. For separable
/// builtins the table is two 1D tables whose products are the rectangle
/// values; the dense path materializes (i,j,q1,q2) via the kernel's rectangle
/// partials (closed form or nested quadrature).
struct BetaTable2D {
  bool separable = false;
  BetaTable axis1, axis2;  // separable path
  int n1 = 0, n2 = 0;
  std::vector<double> p00, p10, p01;  // dense path, ((i*n2+j)*n1+q1)*n2+q2

  std::size_t idx(int i, int j, int q1, int q2) const {
    return ((static_cast<std::size_t>(i) * n2 + j) * n1 + q1) * n2 + q2;
  }
  double at00(int i, int j, int q1, int q2) const {
    return separable ? axis1.at0(i, q1) * axis2.at0(j, q2) : p00[idx(i, j, q1, q2)];
  }
  double at10(int i, int j, int q1, int q2) const {
    return separable ? axis1.at1(i, q1) * axis2.at0(j, q2) : p10[idx(i, j, q1, q2)];
  }
  double at01(int i, int j, int q1, int q2) const {
    return separable ? axis1.at0(i, q1) * axis2.at1(j, q2) : p01[idx(i, j, q1, q2)];
  }
};

inline BetaTable2D precompute_tables2d(const Grid2D& g, const KernelSpec2D& spec) {
  BetaTable2D t;
  t.n1 = g.cells1();
  t.n2 = g.cells2();
  if (spec.separable_breakage) {
    t.separable = true;
    t.axis1 = precompute_tables(g.axis1, spec.axis1);
    t.axis2 = precompute_tables(g.axis2, spec.axis2);
    return t;
  }
  if (!spec.partial00 || !spec.partial10 || !spec.partial01)
    throw std::invalid_argument("non-separable 2d kernel needs rectangle partials");
  const std::size_t total =
      static_cast<std::size_t>(t.n1) * t.n2 * static_cast<std::size_t>(t.n1) * t.n2;
  t.p00.assign(total, 0.0);
  t.p10.assign(total, 0.0);
  t.p01.assign(total, 0.0);
  for (int q1 = 0; q1 < t.n1; ++q1)
    for (int q2 = 0; q2 < t.n2; ++q2) {
      const double y1 = g.axis1.pivots[q1], y2 = g.axis2.pivots[q2];
      for (int i = 0; i <= q1; ++i) {
        const double a1 = detail::lower_limit(g.axis1, i);
        const double b1 = detail::upper_limit(g.axis1, i, q1);
        for (int j = 0; j <= q2; ++j) {
          const double a2 = detail::lower_limit(g.axis2, j);
          const double b2 = detail::upper_limit(g.axis2, j, q2);
          const std::size_t k = t.idx(i, j, q1, q2);
          t.p00[k] = spec.partial00(a1, b1, a2, b2, y1, y2);
          t.p10[k] = spec.partial10(a1, b1, a2, b2, y1, y2);
          t.p01[k] = spec.partial01(a1, b1, a2, b2, y1, y2);
        }
      }
    }
  return t;
}

struct RateTerms2D {
  State2D birth, death, flux1, flux2, vbar1, vbar2;
};

/// w_{q1,q2} = sum_{k1,k2} K((q1,q2),(k1,k2)) N_{k1,k2}.
inline State2D collision_weights2d(const Grid2D& g, const KernelSpec2D& kernel,
                                   const State2D& n) {
  const int I1 = g.cells1(), I2 = g.cells2();
  if (n.n1 != I1 || n.n2 != I2) throw std::invalid_argument("2d state shape mismatch");
  State2D w(I1, I2);
  if (kernel.separable_collision) {
    double s = 0;
    for (int k1 = 0; k1 < I1; ++k1)
      for (int k2 = 0; k2 < I2; ++k2)
        s += kernel.collision_factor(g.axis1.pivots[k1], g.axis2.pivots[k2]) * n.at(k1, k2);
    for (int q1 = 0; q1 < I1; ++q1)
      for (int q2 = 0; q2 < I2; ++q2)
        w.at(q1, q2) = kernel.collision_factor(g.axis1.pivots[q1], g.axis2.pivots[q2]) * s;
  } else {
    for (int q1 = 0; q1 < I1; ++q1)
      for (int q2 = 0; q2 < I2; ++q2) {
        double s = 0;
        for (int k1 = 0; k1 < I1; ++k1)
          for (int k2 = 0; k2 < I2; ++k2)
            s += kernel.collision(g.axis1.pivots[q1], g.axis2.pivots[q2], g.axis1.pivots[k1],
                                  g.axis2.pivots[k2]) *
                 n.at(k1, k2);
        w.at(q1, q2) = s;
      }
  }
  return w;
}

inline RateTerms2D birth_death_flux2d(const Grid2D& g, const KernelSpec2D& kernel,
                                      const BetaTable2D& table, const State2D& n) {
  const int I1 = g.cells1(), I2 = g.cells2();
  RateTerms2D r;
  r.birth = State2D(I1, I2);
  r.death = State2D(I1, I2);
  r.flux1 = State2D(I1, I2);
  r.flux2 = State2D(I1, I2);
  r.vbar1 = State2D(I1, I2);
  r.vbar2 = State2D(I1, I2);

  const State2D w = collision_weights2d(g, kernel, n);
  State2D gsrc(I1, I2);  // per-source rate factor w * N
  for (int q1 = 0; q1 < I1; ++q1)
    for (int q2 = 0; q2 < I2; ++q2) gsrc.at(q1, q2) = w.at(q1, q2) * n.at(q1, q2);

  if (table.separable) {
    // S0[q1][j] = sum_{q2>=j} p0_2(j,q2) gsrc(q1,q2); S1 the x2-weighted twin
    State2D s0(I1, I2), s1(I1, I2);
    for (int q1 = 0; q1 < I1; ++q1)
      for (int j = 0; j < I2; ++j) {
        double a = 0, b = 0;
        for (int q2 = j; q2 < I2; ++q2) {
          const double gq = gsrc.at(q1, q2);
          a += table.axis2.at0(j, q2) * gq;
          b += table.axis2.at1(j, q2) * gq;
        }
        s0.at(q1, j) = a;
        s1.at(q1, j) = b;
      }
    for (int i = 0; i < I1; ++i)
      for (int j = 0; j < I2; ++j) {
        double birth = 0, f1 = 0, f2 = 0;
        for (int q1 = i; q1 < I1; ++q1) {
          const double p0 = table.axis1.at0(i, q1), p1 = table.axis1.at1(i, q1);
          birth += p0 * s0.at(q1, j);
          f1 += p1 * s0.at(q1, j);
          f2 += p0 * s1.at(q1, j);
        }
        r.birth.at(i, j) = birth;
        r.flux1.at(i, j) = f1;
        r.flux2.at(i, j) = f2;
      }
  } else {
    for (int i = 0; i < I1; ++i)
      for (int j = 0; j < I2; ++j) {
        double birth = 0, f1 = 0, f2 = 0;
        for (int q1 = i; q1 < I1; ++q1)
          for (int q2 = j; q2 < I2; ++q2) {
            const double gq = gsrc.at(q1, q2);
            birth += table.at00(i, j, q1, q2) * gq;
            f1 += table.at10(i, j, q1, q2) * gq;
            f2 += table.at01(i, j, q1, q2) * gq;
          }
        r.birth.at(i, j) = birth;
        r.flux1.at(i, j) = f1;
        r.flux2.at(i, j) = f2;
      }
  }

  for (int i = 0; i < I1; ++i)
    for (int j = 0; j < I2; ++j) {
      r.death.at(i, j) = n.at(i, j) * w.at(i, j);
      const double b = r.birth.at(i, j);
      r.vbar1.at(i, j) = b > 0 ? r.flux1.at(i, j) / b : g.axis1.pivots[i];
      r.vbar2.at(i, j) = b > 0 ? r.flux2.at(i, j) / b : g.axis2.pivots[j];
    }
  return r;
}

namespace detail {

struct StencilEntry {
  int index;
  double weight;
};

/// One axis of the four-corner reallocation: up to three (pivot, fraction)
/// targets for a unit birth with axis average v in cell i. Interior fractions
/// sum to 1 and their pivot-weighted sum is v; boundary clamps deposit the
/// mass-equivalent count on the boundary pivot (weights then sum to v/x_i).
inline int axis_stencil(const std::vector<double>& x, int cells, int i, double v,
                        StencilEntry out[3]) {
  int m = 0;
  double hp = 0, hm = 0;
  if (v > x[i]) {
    hp = 1;
  } else if (v < x[i]) {
    hm = 1;
  } else {
    // tie: both half-splits keep the full fraction in cell i
    out[0] = {i, 1.0};
    return 1;
  }

  if (hp > 0) {
    if (i + 1 < cells) {
      out[m++] = {i, hp * (v - x[i + 1]) / (x[i] - x[i + 1])};
      out[m++] = {i + 1, hp * (v - x[i]) / (x[i + 1] - x[i])};
    } else {
      out[m++] = {i, hp * v / x[i]};
    }
  }
  if (hm > 0) {
    if (i > 0) {
      out[m++] = {i, hm * (v - x[i - 1]) / (x[i] - x[i - 1])};
      out[m++] = {i - 1, hm * (x[i] - v) / (x[i] - x[i - 1])};
    } else {
      out[m++] = {0, hm * v / x[0]};
    }
  }
  return m;
}

}  // namespace detail

struct Rhs2DDiagnostics {
  double clamp_number_error = 0.0;
};

inline State2D rhs_vam2d(const Grid2D& g, const KernelSpec2D& kernel, const BetaTable2D& table,
                         const State2D& n, Rhs2DDiagnostics* diag = nullptr) {
  const int I1 = g.cells1(), I2 = g.cells2();
  const RateTerms2D r = birth_death_flux2d(g, kernel, table, n);
  State2D dn(I1, I2);
  double raw_total = 0, alloc_total = 0;
  detail::StencilEntry s1[3], s2[3];
  for (int p = 0; p < I1; ++p)
    for (int q = 0; q < I2; ++q) {
      const double b = r.birth.at(p, q);
      if (b == 0.0) continue;
      raw_total += b;
      const int m1 = detail::axis_stencil(g.axis1.pivots, I1, p, r.vbar1.at(p, q), s1);
      const int m2 = detail::axis_stencil(g.axis2.pivots, I2, q, r.vbar2.at(p, q), s2);
      for (int a = 0; a < m1; ++a)
        for (int c = 0; c < m2; ++c) {
          const double portion = b * s1[a].weight * s2[c].weight;
          dn.at(s1[a].index, s2[c].index) += portion;
          alloc_total += portion;
        }
    }
  if (diag) diag->clamp_number_error += alloc_total - raw_total;
  for (int i = 0; i < I1; ++i)
    for (int j = 0; j < I2; ++j) dn.at(i, j) -= r.death.at(i, j);
  return dn;
}

}  // namespace vambreak
