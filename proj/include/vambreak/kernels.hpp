#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vambreak {

/// Collision kernel K(y,z) plus breakage distribution beta(x|y;z) with exact
/// sub-interval partial integrals. The sectional schemes only ever evaluate
/// beta through partial0/partial1; the pointwise form is kept for validation
/// and quadrature fallback.
struct KernelSpec {
  std::string name;

  std::function<double(double, double)> collision;              // K(y,z)
  std::function<double(double, double, double)> breakage;       // beta(x|y;z)
  std::function<double(double, double, double, double)> partial0;  // int_a^b beta dx
  std::function<double(double, double, double, double)> partial1;  // int_a^b x beta dx
  std::function<double(double, double)> fragment_count;         // zeta(y,z)

  bool z_independent = true;
  bool separable_collision = false;
  std::function<double(double)> collision_factor;  // K(y,z) = f(y)*f(z) when separable
};

namespace quad {

// 15-point Gauss-Legendre nodes/weights on [-1,1] (positive half; symmetric).
inline constexpr std::array<double, 8> kNodes = {
    0.0,
    0.2011940939974345,
    0.3941513470775634,
    0.5709721726085388,
    0.7244177313601701,
    0.8482065834104272,
    0.9372733924007060,
    0.9879925180204854};
inline constexpr std::array<double, 8> kWeights = {
    0.2025782419255613,
    0.1984314853271116,
    0.1861610000155622,
    0.1662692058169939,
    0.1395706779261543,
    0.1071592204671719,
    0.0703660474881081,
    0.0307532419961173};

template <class F>
double gauss15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = kWeights[0] * f(c);
  for (int i = 1; i < 8; ++i)
    s += kWeights[i] * (f(c - h * kNodes[i]) + f(c + h * kNodes[i]));
  return s * h;
}

template <class F>
double adaptive(const F& f, double a, double b, double tol, int depth, int& budget) {
  if (--budget < 0) throw std::runtime_error("quadrature: subdivision budget exhausted");
  const double whole = gauss15(f, a, b);
  const double m = 0.5 * (a + b);
  const double halves = gauss15(f, a, m) + gauss15(f, m, b);
  if (std::abs(halves - whole) <= tol * std::max(1.0, std::abs(halves)) || depth >= 40)
    return halves;
  return adaptive(f, a, m, 0.5 * tol, depth + 1, budget) +
         adaptive(f, m, b, 0.5 * tol, depth + 1, budget);
}

/// Adaptive Gauss-Legendre with combined absolute/relative tolerance.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-12) {
  if (!(b > a)) return 0.0;
  int budget = 200000;
  return adaptive(f, a, b, tol, 0, budget);
}

}  // namespace quad

/// Quadrature fallback for partial integrals of user-supplied kernels;
/// weight 0 integrates beta, weight 1 integrates x*beta.
inline double partial_integral_quadrature(const KernelSpec& spec, double a, double b,
                                          double y, double z, int weight) {
  if (a > b) throw std::invalid_argument("partial integral: a > b");
  if (weight == 0)
    return quad::integrate([&](double x) { return spec.breakage(x, y, z); }, a, b);
  return quad::integrate([&](double x) { return x * spec.breakage(x, y, z); }, a, b);
}

namespace detail {

inline void apply_collision(KernelSpec& s, std::string_view cname) {
  if (cname == "product_xy") {
    s.collision = [](double y, double z) { return y * z; };
    s.separable_collision = true;
    s.collision_factor = [](double y) { return y; };
  } else if (cname == "constant_one") {
    s.collision = [](double, double) { return 1.0; };
    s.separable_collision = true;
    s.collision_factor = [](double) { return 1.0; };
  } else {
    throw std::invalid_argument("unknown collision kernel: " + std::string(cname));
  }
}

inline void apply_breakage(KernelSpec& s, std::string_view bname) {
  if (bname == "binary_2_over_y") {
    s.breakage = [](double x, double y, double) { return x <= y ? 2.0 / y : 0.0; };
    s.partial0 = [](double a, double b, double y, double) { return 2.0 * (b - a) / y; };
    s.partial1 = [](double a, double b, double y, double) { return (b * b - a * a) / y; };
    s.fragment_count = [](double, double) { return 2.0; };
  } else if (bname == "quartic_4x2_over_y3") {
    s.breakage = [](double x, double y, double) {
      return x <= y ? 4.0 * x * x / (y * y * y) : 0.0;
    };
    s.partial0 = [](double a, double b, double y, double) {
      return (4.0 / 3.0) * (b * b * b - a * a * a) / (y * y * y);
    };
    s.partial1 = [](double a, double b, double y, double) {
      const double a2 = a * a, b2 = b * b;
      return (b2 * b2 - a2 * a2) / (y * y * y);
    };
    s.fragment_count = [](double, double) { return 4.0 / 3.0; };
  } else if (bname == "parabolic_12x") {
    // beta = 12 x / y^2 (1 - x/y); vanishes at x = y, so the self-cell
    // leading truncation term drops (the second-order regime).
    s.breakage = [](double x, double y, double) {
      return x <= y ? 12.0 * x / (y * y) * (1.0 - x / y) : 0.0;
    };
    s.partial0 = [](double a, double b, double y, double) {
      const double y2 = y * y, y3 = y2 * y;
      return 6.0 / y2 * (b * b - a * a) - 4.0 / y3 * (b * b * b - a * a * a);
    };
    s.partial1 = [](double a, double b, double y, double) {
      const double y2 = y * y, y3 = y2 * y;
      const double a2 = a * a, b2 = b * b;
      return 4.0 / y2 * (b * b2 - a * a2) - 3.0 / y3 * (b2 * b2 - a2 * a2);
    };
    s.fragment_count = [](double, double) { return 2.0; };
  } else {
    throw std::invalid_argument("unknown breakage function: " + std::string(bname));
  }
  s.z_independent = true;
}

}  // namespace detail

/// Builtins are addressed as "<collision>:<breakage>", e.g.
/// "product_xy:binary_2_over_y".
inline KernelSpec builtin(std::string_view name) {
  const auto sep = name.find(':');
  if (sep == std::string_view::npos)
    throw std::invalid_argument("kernel name must be <collision>:<breakage>, got " +
                                std::string(name));
  KernelSpec s;
  s.name = std::string(name);
  detail::apply_collision(s, name.substr(0, sep));
  detail::apply_breakage(s, name.substr(sep + 1));
  return s;
}

struct ValidationEntry {
  std::string property;
  bool pass = false;
  double max_residual = 0.0;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
};

/// Checks symmetry of K, the mass identity int_0^y x beta dx = y, the
/// fragment-count bounds, and partial-integral additivity on the given
/// sample points. Failures are report entries, not errors.
inline ValidationReport validate(const KernelSpec& spec,
                                 const std::vector<std::pair<double, double>>& samples) {
  ValidationReport rep;
  double sym = 0, mass = 0, frag_lo = 0, add = 0;
  bool frag_finite = true;
  for (const auto& [y, z] : samples) {
    sym = std::max(sym, std::abs(spec.collision(y, z) - spec.collision(z, y)));
    mass = std::max(mass, std::abs(spec.partial1(0.0, y, y, z) - y) / y);
    const double zeta = spec.partial0(0.0, y, y, z);
    if (!std::isfinite(zeta)) frag_finite = false;
    frag_lo = std::max(frag_lo, std::max(0.0, 2.0 - zeta));
    const double mid = 0.5 * y;
    add = std::max(add, std::abs(spec.partial0(0.0, mid, y, z) + spec.partial0(mid, y, y, z) -
                                 spec.partial0(0.0, y, y, z)));
    add = std::max(add, std::abs(spec.partial1(0.0, mid, y, z) + spec.partial1(mid, y, y, z) -
                                 spec.partial1(0.0, y, y, z)));
  }
  rep.entries.push_back({"collision_symmetry", sym <= 1e-12, sym});
  rep.entries.push_back({"mass_identity", mass <= 1e-10, mass});
  rep.entries.push_back({"fragment_count_lower_bound", frag_finite && frag_lo <= 1e-12, frag_lo});
  rep.entries.push_back({"partial_additivity", add <= 1e-12, add});
  return rep;
}

}  // namespace vambreak
