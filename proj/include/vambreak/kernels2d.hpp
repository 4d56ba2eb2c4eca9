#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "vambreak/kernels.hpp"

namespace vambreak {

/// Two-dimensional kernel pair on a rectangular property space. Collision
/// takes the breaking particle (y1,y2) and the catalyst (z1,z2); the breakage
/// density beta(x1,x2 | y1,y2) is catalyst-independent for all builtins.
/// When separable_breakage is set, axis1/axis2 hold 1D factor specs whose
/// product reproduces beta and whose partial integrals tensor into the
/// rectangle partials.
struct KernelSpec2D {
  std::string name;

  std::function<double(double, double, double, double)> collision;  // K(y1,y2,z1,z2)
  bool separable_collision = false;
  std::function<double(double, double)> collision_factor;  // K = f(y)*f(z)

  bool separable_breakage = false;
  KernelSpec axis1, axis2;  // breakage factors (collision fields unused)

  std::function<double(double, double, double, double)> breakage;  // beta(x1,x2|y1,y2)
  // rectangle partials over [a1,b1]x[a2,b2] with weights {1, x1, x2}
  std::function<double(double, double, double, double, double, double)> partial00, partial10,
      partial01;
  std::function<double(double, double)> fragment_count;  // zeta(y1,y2)
};

namespace detail {

inline KernelSpec breakage_factor_1d(double coeff) {
  // beta_f(x|y) = coeff / y on [0, y]
  KernelSpec s;
  s.breakage = [coeff](double x, double y, double) { return x <= y ? coeff / y : 0.0; };
  s.partial0 = [coeff](double a, double b, double y, double) { return coeff * (b - a) / y; };
  s.partial1 = [coeff](double a, double b, double y, double) {
    return 0.5 * coeff * (b * b - a * a) / y;
  };
  s.fragment_count = [coeff](double, double) { return coeff; };
  s.z_independent = true;
  return s;
}

inline void finish_separable(KernelSpec2D& s) {
  const KernelSpec f1 = s.axis1, f2 = s.axis2;
  s.breakage = [f1, f2](double x1, double x2, double y1, double y2) {
    return f1.breakage(x1, y1, 0.0) * f2.breakage(x2, y2, 0.0);
  };
  s.partial00 = [f1, f2](double a1, double b1, double a2, double b2, double y1, double y2) {
    return f1.partial0(a1, b1, y1, 0.0) * f2.partial0(a2, b2, y2, 0.0);
  };
  s.partial10 = [f1, f2](double a1, double b1, double a2, double b2, double y1, double y2) {
    return f1.partial1(a1, b1, y1, 0.0) * f2.partial0(a2, b2, y2, 0.0);
  };
  s.partial01 = [f1, f2](double a1, double b1, double a2, double b2, double y1, double y2) {
    return f1.partial0(a1, b1, y1, 0.0) * f2.partial1(a2, b2, y2, 0.0);
  };
  s.fragment_count = [f1, f2](double y1, double y2) {
    return f1.fragment_count(y1, 0.0) * f2.fragment_count(y2, 0.0);
  };
}

}  // namespace detail

/// Builtins are addressed as "<collision>:<breakage>", e.g.
/// "product_4d:uniform_4_over_y1y2".
inline KernelSpec2D builtin2d(std::string_view name) {
  const auto sep = name.find(':');
  if (sep == std::string_view::npos)
    throw std::invalid_argument("2d kernel name must be <collision>:<breakage>, got " +
                                std::string(name));
  const std::string_view cname = name.substr(0, sep), bname = name.substr(sep + 1);
  KernelSpec2D s;
  s.name = std::string(name);

  if (cname == "product_4d") {
    s.collision = [](double y1, double y2, double z1, double z2) { return y1 * y2 * z1 * z2; };
    s.separable_collision = true;
    s.collision_factor = [](double y1, double y2) { return y1 * y2; };
  } else {
    throw std::invalid_argument("unknown 2d collision kernel: " + std::string(cname));
  }

  if (bname == "uniform_4_over_y1y2") {
    // beta = 4/(y1 y2) = (2/y1)(2/y2); zeta = 4, both axis masses doubled
    s.separable_breakage = true;
    s.axis1 = detail::breakage_factor_1d(2.0);
    s.axis2 = detail::breakage_factor_1d(2.0);
  } else if (bname == "uniform_2_over_y1y2") {
    // beta = 2/(y1 y2) = (2/y1)(1/y2); zeta = 2, both axis masses conserved
    s.separable_breakage = true;
    s.axis1 = detail::breakage_factor_1d(2.0);
    s.axis2 = detail::breakage_factor_1d(1.0);
  } else {
    throw std::invalid_argument("unknown 2d breakage function: " + std::string(bname));
  }
  detail::finish_separable(s);
  return s;
}

}  // namespace vambreak
