#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vambreak {

struct IntegratorConfig {
  enum class Method { rk4_fixed, rk45_adaptive };
  Method method = Method::rk45_adaptive;
  double dt = 0.0;  // rk4_fixed step; must be > 0 for that method
  double rtol = 1e-8;
  double atol = 1e-12;
  double t_end = 1.0;
  double observe_every = 0.1;
  double nonneg_clip = 1e-12;  // clip threshold as a fraction of the L1 norm
};

struct ObservationSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  double clipped_negativity = 0.0;  // total count zeroed by the guard
  long accepted_steps = 0;
  long rejected_steps = 0;
};

namespace detail {

using RhsFn = std::function<std::vector<double>(const std::vector<double>&)>;

inline void clip_negativity(std::vector<double>& y, double clip_fraction, double t,
                            ObservationSeries& out) {
  double norm1 = 0;
  for (double v : y) norm1 += std::abs(v);
  const double floor_val = -clip_fraction * std::max(norm1, 1e-300);
  for (double& v : y) {
    if (v >= 0) continue;
    if (v < floor_val)
      throw std::runtime_error("negativity guard tripped at t=" + std::to_string(t) +
                               " (entry " + std::to_string(v) + ", allowed " +
                               std::to_string(floor_val) + "); reduce the step size");
    out.clipped_negativity += -v;
    v = 0;
  }
}

inline std::vector<double> axpy(const std::vector<double>& y, double h,
                                const std::vector<double>& d) {
  std::vector<double> r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] + h * d[i];
  return r;
}

inline void rk4_span(const RhsFn& rhs, std::vector<double>& y, double t0, double t1, double dt,
                     ObservationSeries& out, double clip) {
  const double span = t1 - t0;
  const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-12)));
  const double h = span / steps;
  for (long s = 0; s < steps; ++s) {
    const auto k1 = rhs(y);
    const auto k2 = rhs(axpy(y, 0.5 * h, k1));
    const auto k3 = rhs(axpy(y, 0.5 * h, k2));
    const auto k4 = rhs(axpy(y, h, k3));
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    clip_negativity(y, clip, t0 + (s + 1) * h, out);
    ++out.accepted_steps;
  }
}

// Dormand-Prince 5(4) embedded pair.
inline void rk45_span(const RhsFn& rhs, std::vector<double>& y, double t0, double t1,
                      double& h, const IntegratorConfig& cfg, ObservationSeries& out) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                          e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                          e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

  const std::size_t m = y.size();
  double t = t0;
  while (t < t1 - 1e-14 * std::max(1.0, t1)) {
    h = std::min(h, t1 - t);
    if (h < 1e-14 * std::max(1.0, t1))
      throw std::runtime_error("adaptive step-size underflow at t=" + std::to_string(t));
    const auto k1 = rhs(y);
    const auto k2 = rhs(axpy(y, h * a21, k1));
    std::vector<double> tmp(m);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const auto k3 = rhs(tmp);
    for (std::size_t i = 0; i < m; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const auto k4 = rhs(tmp);
    for (std::size_t i = 0; i < m; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const auto k5 = rhs(tmp);
    for (std::size_t i = 0; i < m; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const auto k6 = rhs(tmp);
    std::vector<double> ynew(m);
    for (std::size_t i = 0; i < m; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const auto k7 = rhs(ynew);

    double err = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                             e7 * k7[i]);
      const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / m);

    if (err <= 1.0) {
      t += h;
      y = std::move(ynew);
      clip_negativity(y, cfg.nonneg_clip, t, out);
      ++out.accepted_steps;
    } else {
      ++out.rejected_steps;
    }
    const double factor = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
}

}  // namespace detail

/// Advance dy/dt = rhs(y) from a nonnegative initial state, recording
/// snapshots at t = 0, every observe_every, and t_end. Small negative
/// overshoots are clipped to zero and logged; anything worse aborts.
inline ObservationSeries integrate(const detail::RhsFn& rhs, std::vector<double> y0,
                                   const IntegratorConfig& cfg) {
  if (cfg.t_end < 0) throw std::invalid_argument("t_end must be nonnegative");
  if (cfg.method == IntegratorConfig::Method::rk4_fixed && !(cfg.dt > 0))
    throw std::invalid_argument("rk4_fixed requires dt > 0");
  if (!(cfg.rtol > 0) || !(cfg.atol > 0)) throw std::invalid_argument("tolerances must be positive");
  for (double v : y0)
    if (v < 0) throw std::invalid_argument("initial state must be nonnegative");

  ObservationSeries out;
  out.times.push_back(0.0);
  out.states.push_back(y0);
  if (cfg.t_end == 0) return out;

  const double obs = cfg.observe_every > 0 ? cfg.observe_every : cfg.t_end;
  double h = cfg.method == IntegratorConfig::Method::rk4_fixed
                 ? cfg.dt
                 : std::min(obs, cfg.t_end) * 0.1;
  double t = 0;
  while (t < cfg.t_end - 1e-14 * cfg.t_end) {
    const double t_next = std::min(t + obs, cfg.t_end);
    if (cfg.method == IntegratorConfig::Method::rk4_fixed)
      detail::rk4_span(rhs, y0, t, t_next, cfg.dt, out, cfg.nonneg_clip);
    else
      detail::rk45_span(rhs, y0, t, t_next, h, cfg, out);
    t = t_next;
    out.times.push_back(t);
    out.states.push_back(y0);
  }
  return out;
}

}  // namespace vambreak
