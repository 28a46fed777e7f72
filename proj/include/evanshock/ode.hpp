#ifndef EVANSHOCK_ODE_HPP
#define EVANSHOCK_ODE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <sstream>

#include <Eigen/Core>

#include "evanshock/types.hpp"

namespace evanshock {

struct OdeOptions {
  double abs_tol = 1e-6;
  double rel_tol = 1e-8;
  double initial_step = 0.0;  // 0 selects a starting step automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 1000000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  std::deque<double> recent_steps;  // last few accepted step sizes
};

namespace detail {

inline double scaled_error(double err, double y0, double y1, double atol, double rtol) {
  return std::abs(err) / (atol + rtol * std::max(std::abs(y0), std::abs(y1)));
}

template <typename Derived>
double scaled_error(const Eigen::MatrixBase<Derived>& err, const Eigen::MatrixBase<Derived>& y0,
                    const Eigen::MatrixBase<Derived>& y1, double atol, double rtol) {
  const auto scale = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
  return (err.cwiseAbs().array() / scale).maxCoeff();
}

inline double state_norm(double y) { return std::abs(y); }

template <typename Derived>
double state_norm(const Eigen::MatrixBase<Derived>& y) {
  return y.cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(x, y) from x0 to x1
/// (x1 may be smaller than x0). Local extrapolation: the fifth-order solution
/// is propagated, the embedded fourth-order one only steers the step size.
/// `observer(x, y)` is called at x0 and after every accepted step.
template <typename State, typename Rhs, typename Observer>
State integrate_dopri(Rhs&& rhs, double x0, double x1, State y, const OdeOptions& opt,
                      Observer&& observer, OdeStats* stats = nullptr) {
  // Butcher tableau of Dormand & Prince (1980).
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeStats local;
  OdeStats& st = stats ? *stats : local;
  observer(x0, y);
  const double span = x1 - x0;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;
  const double min_step = 16 * std::numeric_limits<double>::epsilon() *
                          std::max(std::abs(x0), std::abs(x1));

  State k1 = rhs(x0, y);
  ++st.evaluations;
  double h = opt.initial_step;
  if (h <= 0.0) {
    // Hairer-Norsett-Wanner style starting guess.
    const double d0 = detail::state_norm(y), d1 = detail::state_norm(k1);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::max(h, 1e-6);
  }
  h = std::min({h, std::abs(span), opt.max_step});

  auto fail = [&](const char* why, double x) {
    std::ostringstream os;
    os << "ODE integration failed (" << why << ") at x=" << x << "; recent steps:";
    for (double s : st.recent_steps) os << ' ' << s;
    throw NumericalError(os.str());
  };

  double x = x0;
  std::size_t steps = 0;
  while (dir * (x1 - x) > 0) {
    if (++steps > opt.max_steps) fail("too many steps", x);
    if (h < min_step) fail("step size underflow", x);
    bool last = false;
    // A sliver left over from rounding is folded into the final step.
    if (h * (1.0 + 1e-6) >= std::abs(x1 - x)) {
      h = std::abs(x1 - x);
      last = true;
    }
    const double hs = dir * h;
    const State k2 = rhs(x + c2 * hs, State(y + hs * (a21 * k1)));
    const State k3 = rhs(x + c3 * hs, State(y + hs * (a31 * k1 + a32 * k2)));
    const State k4 = rhs(x + c4 * hs, State(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 =
        rhs(x + c5 * hs, State(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 = rhs(x + hs, State(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                                                  a65 * k5)));
    const State y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = rhs(x + hs, y_new);
    st.evaluations += 6;
    const State err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err_norm = detail::scaled_error(err, y, y_new, opt.abs_tol, opt.rel_tol);
    if (!std::isfinite(err_norm)) {
      ++st.rejected;
      h *= 0.25;
      continue;
    }
    if (err_norm <= 1.0) {
      x = last ? x1 : x + hs;
      y = y_new;
      k1 = k7;
      ++st.accepted;
      st.recent_steps.push_back(h);
      if (st.recent_steps.size() > 8) st.recent_steps.pop_front();
      observer(x, y);
      const double grow = err_norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err_norm, -0.2));
      h = std::min(h * std::max(grow, 1.0), opt.max_step);
    } else {
      ++st.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
    }
  }
  return y;
}

template <typename State, typename Rhs>
State integrate_dopri(Rhs&& rhs, double x0, double x1, State y, const OdeOptions& opt,
                      OdeStats* stats = nullptr) {
  return integrate_dopri(std::forward<Rhs>(rhs), x0, x1, std::move(y), opt,
                         [](double, const State&) {}, stats);
}

}  // namespace evanshock

#endif  // EVANSHOCK_ODE_HPP
