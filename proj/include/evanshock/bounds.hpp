#ifndef EVANSHOCK_BOUNDS_HPP
#define EVANSHOCK_BOUNDS_HPP

#include "evanshock/model.hpp"

namespace evanshock {

enum class ConditionKind { mn_condition, sharp_condition };

const char* to_string(ConditionKind kind);

struct ConditionReport {
  double lhs_value = 0.0;
  bool holds = false;  // lhs_value >= 0
  ConditionKind which = ConditionKind::mn_condition;
};

/// Small-amplitude energy-estimate condition, in x = v+^(gamma+1) / (a gamma):
///   x^2 + 2 (gamma - 1) x - (gamma - 1) >= 0.
ConditionReport mn_condition(const ShockParams& p);

/// Sharp form of the same estimate: the bracket of the closed-form g
/// evaluated at vhat = v+.
ConditionReport sharp_condition(const ShockParams& p);

/// The quartic-type bracket multiplying -a vhat_x vhat^(gamma-1) / (2 h^3) in g.
double g_bracket(double vhat, const ShockParams& p);

/// Energy weight g(vhat) from its factored closed form; zero at the endstates.
/// Throws DomainError for vhat outside [v+, 1].
double g_eval(double vhat, const ShockParams& p);

/// Amplitude-independent bound on Re(lambda) + |Im(lambda)| for unstable
/// eigenvalues: (sqrt(gamma) + 1/2)^2.
double hf_bound(double gamma);

struct StabilityBoundary {
  bool exists = false;  // false for gamma = 1 or when no sign change on the bracket
  double v_plus = 0.0;
  double mach = 0.0;
};

/// Root in v+ of the chosen condition's left-hand side, by bisection on
/// [1e-12, 1 - 1e-9] to absolute tolerance tol.
StabilityBoundary stability_boundary(double gamma, ConditionKind kind, double tol = 1e-12);

}  // namespace evanshock

#endif  // EVANSHOCK_BOUNDS_HPP
