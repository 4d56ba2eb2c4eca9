#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "vambreak/grid.hpp"
#include "vambreak/kernels.hpp"

namespace vambreak {

/// Closed-form reference for a monodisperse initial condition (count 1 at
/// size l). The density splits into a decaying singular weight at x = l plus
/// a regular part on (0, l); moments without a closed form are integrated
/// from the density on demand.
struct ReferenceSolution {
  std::string id;
  double initial_size = 1.0;
  double t_max = std::numeric_limits<double>::infinity();
  bool has_density = false;

  std::function<double(double)> m0, m1, m2;          // moments of t, null if unknown
  std::function<double(double, double)> density;     // regular part n(x, t)
  std::function<double(double)> singular_weight;     // Dirac weight at x = l
};

namespace refdetail {

/// f(z) = sum_k z^k / (k! (k+1)!), the entire series behind the cascade
/// solution for the quartic breakage function (equals I_1(2 sqrt z)/sqrt z).
inline double cascade_series(double z) {
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < 500; ++k) {
    term *= z / ((k + 1.0) * (k + 2.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace refdetail

/// K = yz with the binary uniform breakage 2/y. The total volume l is
/// conserved, so the system reduces to linear binary breakage with selection
/// rate x*l; the cascade sums to an exponential-polynomial density.
inline ReferenceSolution reference_product_binary(double l = 1.0) {
  if (!(l > 0)) throw std::invalid_argument("initial size must be positive");
  ReferenceSolution r;
  r.id = "product_binary";
  r.initial_size = l;
  r.has_density = true;
  r.m0 = [l](double t) { return 1.0 + l * l * t; };
  r.m1 = [l](double) { return l; };
  r.density = [l](double x, double t) {
    if (x <= 0 || x >= l) return 0.0;
    const double tau = l * t;
    return std::exp(-x * tau) * (2.0 * tau + tau * tau * (l - x));
  };
  r.singular_weight = [l](double t) { return std::exp(-l * l * t); };
  return r;
}

/// K = 1 with the quartic breakage 4x^2/y^3. Fragment count 4/3 gives
/// M0 = 3/(3-t) (blow-up at t = 3); the density is a Bessel-type cascade in
/// the log size ratio.
inline ReferenceSolution reference_constant_quartic(double l = 1.0) {
  if (!(l > 0)) throw std::invalid_argument("initial size must be positive");
  ReferenceSolution r;
  r.id = "constant_quartic";
  r.initial_size = l;
  r.t_max = 3.0;
  r.has_density = true;
  auto tau = [](double t) {
    if (t >= 3.0) throw std::invalid_argument("reference valid for t < 3 only");
    return 3.0 * std::log(3.0 / (3.0 - t));
  };
  r.m0 = [tau](double t) {
    tau(t);
    return 3.0 / (3.0 - t);
  };
  r.m1 = [l](double) { return l; };
  r.m2 = [l, tau](double t) {
    tau(t);
    return l * l * std::pow((3.0 - t) / 3.0, 0.6);
  };
  r.density = [l, tau](double x, double t) {
    if (x <= 0 || x >= l) return 0.0;
    const double tv = tau(t);
    const double z = 4.0 * tv * std::log(l / x);
    return std::exp(-tv) * (4.0 * tv * x * x / (l * l * l)) * refdetail::cascade_series(z);
  };
  r.singular_weight = [tau](double t) { return std::exp(-tau(t)); };
  return r;
}

/// 2D moment references for the product collision kernel y1y2z1z2.
struct ReferenceSolution2D {
  std::string id;
  std::function<double(double)> m00, m10, m01, m11;  // null if not closed
};

inline ReferenceSolution2D reference_product4d_uniform4() {
  ReferenceSolution2D r;
  r.id = "product4d_uniform4";
  // zeta = 4 and the hypervolume flux integral equals y1y2, so M11 is
  // conserved and dM00/dt = 3 M11^2.
  r.m11 = [](double) { return 1.0; };
  r.m00 = [](double t) { return 1.0 + 3.0 * t; };
  return r;
}

inline ReferenceSolution2D reference_product4d_uniform2() {
  ReferenceSolution2D r;
  r.id = "product4d_uniform2";
  // both axis volume flux integrals are conservative; M00 has no closed form
  // (the moment hierarchy does not close) and stays null.
  r.m10 = [](double) { return 1.0; };
  r.m01 = [](double) { return 1.0; };
  return r;
}

/// Lookup by the builtin kernel pair driving the run.
inline ReferenceSolution reference_for_kernel(const std::string& kernel_name, double l = 1.0) {
  if (kernel_name == "product_xy:binary_2_over_y") return reference_product_binary(l);
  if (kernel_name == "constant_one:quartic_4x2_over_y3") return reference_constant_quartic(l);
  throw std::invalid_argument("no analytic reference for kernel " + kernel_name);
}

inline ReferenceSolution2D reference_for_kernel2d(const std::string& kernel_name) {
  if (kernel_name == "product_4d:uniform_4_over_y1y2") return reference_product4d_uniform4();
  if (kernel_name == "product_4d:uniform_2_over_y1y2") return reference_product4d_uniform2();
  throw std::invalid_argument("no 2d reference for kernel " + kernel_name);
}

/// Cell integrals of the regular density (adaptive quadrature, tol 1e-12)
/// plus the singular weight deposited in the cell containing x = l. The first
/// cell integrates from 0 to match the scheme's truncation convention.
inline std::vector<double> project_reference(const Grid& g, const ReferenceSolution& r,
                                             double t) {
  if (!r.has_density) throw std::invalid_argument("reference " + r.id + " has no density");
  const int I = g.cells();
  std::vector<double> n(I, 0.0);
  for (int i = 0; i < I; ++i) {
    const double a = i == 0 ? 0.0 : g.boundaries[i];
    const double b = g.boundaries[i + 1];
    n[i] = quad::integrate([&](double x) { return r.density(x, t); }, a, b);
  }
  const double l = r.initial_size;
  int host = I - 1;
  for (int i = 0; i < I; ++i)
    if (l <= g.boundaries[i + 1]) {
      host = i;
      break;
    }
  n[host] += r.singular_weight(t);
  return n;
}

}  // namespace vambreak
