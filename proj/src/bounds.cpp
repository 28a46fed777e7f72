#include "evanshock/bounds.hpp"

#include <cmath>
#include <cstdint>

#include <boost/math/tools/roots.hpp>

namespace evanshock {

const char* to_string(ConditionKind kind) {
  return kind == ConditionKind::mn_condition ? "MN_condition" : "sharp_condition";
}

ConditionReport mn_condition(const ShockParams& p) {
  const double g = p.gamma;
  const double x = std::pow(p.v_plus, g + 1.0) / (p.a * g);
  const double lhs = x * x + 2.0 * (g - 1.0) * x - (g - 1.0);
  return {lhs, lhs >= 0.0, ConditionKind::mn_condition};
}

double g_bracket(double vhat, const ShockParams& p) {
  const double g = p.gamma, a = p.a, v = vhat;
  const double vg = std::pow(v, g);
  const double sq = (g + 1.0) * v - (a + 1.0) * g;
  return (g + 1.0) * vg * v * v + vg * (g - 1.0) * sq * sq +
         a * g * (g * g - 1.0) * (g + 2.0) * v - a * (a + 1.0) * g * g * (g * g - 1.0);
}

ConditionReport sharp_condition(const ShockParams& p) {
  const double lhs = g_bracket(p.v_plus, p);
  return {lhs, lhs >= 0.0, ConditionKind::sharp_condition};
}

double g_eval(double vhat, const ShockParams& p) {
  if (!(vhat >= p.v_plus && vhat <= 1.0)) throw DomainError("g_eval: vhat outside [v+, 1]");
  if (vhat == p.v_plus || vhat == 1.0) return 0.0;
  const double vx = profile_rhs(vhat, p);
  const double h = h_function(vhat, p);
  return -p.a * vx * std::pow(vhat, p.gamma - 1.0) / (2.0 * h * h * h) * g_bracket(vhat, p);
}

double hf_bound(double gamma) {
  if (!(gamma >= 1.0)) throw DomainError("hf_bound: gamma must be >= 1");
  const double s = std::sqrt(gamma) + 0.5;
  return s * s;
}

StabilityBoundary stability_boundary(double gamma, ConditionKind kind, double tol) {
  if (!(gamma >= 1.0)) throw DomainError("stability_boundary: gamma must be >= 1");
  StabilityBoundary out;
  if (gamma == 1.0) return out;

  auto lhs = [&](double v) {
    const ShockParams p = ShockParams::from_vplus(gamma, v);
    return kind == ConditionKind::mn_condition ? mn_condition(p).lhs_value
                                               : sharp_condition(p).lhs_value;
  };
  constexpr double lo = 1e-12, hi = 1.0 - 1e-9;
  const double f_lo = lhs(lo), f_hi = lhs(hi);
  if (f_lo * f_hi > 0.0 || f_lo == 0.0) return out;

  auto done = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  std::uintmax_t iters = 400;
  const auto root = boost::math::tools::bisect(lhs, lo, hi, done, iters);
  out.exists = true;
  out.v_plus = 0.5 * (root.first + root.second);
  out.mach = ShockParams::from_vplus(gamma, out.v_plus).mach;
  return out;
}

}  // namespace evanshock
