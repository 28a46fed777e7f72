#ifndef EVANSHOCK_MODEL_HPP
#define EVANSHOCK_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "evanshock/types.hpp"

namespace evanshock {

// Rescaled isentropic gas dynamics: left state v- = 1, right state
// 0 < v+ < 1, gamma-law pressure, viscous shock profile solving
//   v' = v (v - 1 + a (v^-gamma - 1)).

struct RhCoefficient {
  double a = 0.0;
  bool weak_shock_limit = false;  // v+ within 1e-12 of 1, a set to 1/gamma
};

/// Rankine-Hugoniot coefficient a = v+^gamma (1 - v+) / (1 - v+^gamma).
RhCoefficient rh_coefficient(double gamma, double v_plus);

/// Immutable description of one shock. Build through from_vplus/from_mach.
struct ShockParams {
  double gamma = 1.0;
  double v_plus = 0.5;
  double a = 0.5;
  double mach = 1.0;
  bool weak_shock_limit = false;

  static ShockParams from_vplus(double gamma, double v_plus);
  static ShockParams from_mach(double gamma, double mach);

  static constexpr double v_minus = 1.0;

  /// Non-fatal remarks (gamma outside the physical range [1, 3]).
  std::vector<std::string> warnings() const;
};

/// M = 1 / sqrt(gamma a).
double mach_number(double gamma, double a);
inline double mach_number(const ShockParams& p) { return mach_number(p.gamma, p.a); }

/// Inverse of mach_number in v+; throws DomainError for M < 1.
double vplus_from_mach(double gamma, double mach);

namespace detail {

// (1 - x^gamma) / (1 - x) given d = 1 - x in [0, 1); equals gamma at d = 0.
template <typename Scalar>
Scalar difference_quotient(Scalar d, Scalar gamma) {
  using std::expm1;
  using std::log1p;
  if (d == Scalar(0)) return gamma;
  return -expm1(gamma * log1p(-d)) / d;
}

// H_rhs factored around v+, given d = v - v+ exactly.
template <typename Scalar>
Scalar profile_rhs_near_plus(Scalar d, const ShockParams& p) {
  const Scalar g = Scalar(p.gamma);
  const Scalar v = Scalar(p.v_plus) + d;
  const Scalar c = Scalar(1) / difference_quotient(Scalar(1) - Scalar(p.v_plus), g);
  return d * (v - c * difference_quotient(d / v, g));
}

// H_rhs factored around 1, given d = 1 - v exactly.
template <typename Scalar>
Scalar profile_rhs_near_minus(Scalar d, const ShockParams& p) {
  using std::pow;
  const Scalar g = Scalar(p.gamma);
  const Scalar v = Scalar(1) - d;
  const Scalar c = Scalar(1) / difference_quotient(Scalar(1) - Scalar(p.v_plus), g);
  return -d * v * (Scalar(1) - pow(Scalar(p.v_plus) / v, g) * c * difference_quotient(d, g));
}

}  // namespace detail

/// Profile right-hand side H_rhs(v) = v (v - 1 + a (v^-gamma - 1)).
/// Evaluated in factored form so that it vanishes exactly at v = 1 and to
/// roundoff relative to v+ at v = v+, keeping its sign inside (v+, 1).
template <typename Scalar>
Scalar profile_rhs(Scalar v, const ShockParams& p) {
  const Scalar vp = Scalar(p.v_plus);
  if (v - vp <= Scalar(1) - v) return detail::profile_rhs_near_plus(v - vp, p);
  return detail::profile_rhs_near_minus(Scalar(1) - v, p);
}

/// h(v) = -v^(gamma+1) + a (gamma - 1) + (a + 1) v^gamma.
template <typename Scalar>
Scalar h_function(Scalar v, const ShockParams& p) {
  using std::pow;
  const Scalar g = Scalar(p.gamma), a = Scalar(p.a);
  return -pow(v, g + Scalar(1)) + a * (g - Scalar(1)) + (a + Scalar(1)) * pow(v, g);
}

/// cap_H(v) = h(v) v^-gamma = -v + a (gamma - 1) v^-gamma + (a + 1).
template <typename Scalar>
Scalar cap_h(Scalar v, const ShockParams& p) {
  using std::pow;
  const Scalar g = Scalar(p.gamma), a = Scalar(p.a);
  return -v + a * (g - Scalar(1)) * pow(v, -g) + (a + Scalar(1));
}

/// f(v) = v - cap_H(v), the (3,3) coefficient of the eigenvalue system at lambda = 0.
template <typename Scalar>
Scalar f_coefficient(Scalar v, const ShockParams& p) {
  return v - cap_h(v, p);
}

template <typename Scalar>
struct CoefficientValues {
  Scalar H_rhs;
  Scalar h;
  Scalar cap_H;
  Scalar f;
};

/// All coefficient functions at v in [v+, 1]; DomainError outside.
template <typename Scalar>
CoefficientValues<Scalar> coefficient_functions(Scalar v, const ShockParams& p) {
  if (!(v >= Scalar(p.v_plus) && v <= Scalar(1)))
    throw DomainError("coefficient_functions: vhat outside [v+, 1]");
  return {profile_rhs(v, p), h_function(v, p), cap_h(v, p), f_coefficient(v, p)};
}

/// Maximum of cap_H on [v+, 1], attained at v+: gamma (1 - v+) / (1 - v+^gamma).
double cap_h_sup(const ShockParams& p);

/// Phase condition vhat(0) for solve_profile.
///   decay_bound: v+ + 1/12 when v+ <= 1/12 (the exponential decay envelopes
///                are stated for this translate), else the midpoint
///   midpoint:    (1 + v+) / 2 always
enum class ProfileCentering { decay_bound, midpoint };

const char* to_string(ProfileCentering c);

double profile_centering(const ShockParams& p,
                         ProfileCentering rule = ProfileCentering::decay_bound);

struct ProfileOptions {
  double tol = 1e-10;
  // Allowed |vhat(+-L) - v+-| relative to the amplitude 1 - v+.
  double endstate_tol = 1e-2;
  // Node spacing cap; keeps the cubic interpolant's derivative error near 1e-9.
  double max_node_spacing = 2.5e-3;
  ProfileCentering centering = ProfileCentering::decay_bound;
};

class DomainTooShort : public NumericalError {
 public:
  DomainTooShort(const std::string& what, double required_length)
      : NumericalError(what), required_length_(required_length) {}
  double required_length() const { return required_length_; }

 private:
  double required_length_;
};

/// Dense monotone representation of vhat on [-L, L]: cubic Hermite
/// interpolation through solver nodes whose slopes are H_rhs(vhat) exactly.
/// Nodes are held as offsets from the endstate each half-line decays to
/// (1 - vhat for x < 0, vhat - v+ for x >= 0), so the tails keep full
/// relative precision.
class ShockProfile {
 public:
  ShockProfile(ShockParams params, double half_length, double centering, std::vector<double> x,
               std::vector<double> tail_offset, bool clamped);

  const ShockParams& params() const { return params_; }
  double half_length() const { return half_length_; }
  double centering() const { return centering_; }
  /// True when the integration overshot an endstate and nodes were clamped.
  bool clamped() const { return clamped_; }
  /// Number of intervals failing the Fritsch-Carlson monotonicity test.
  std::size_t non_monotone_intervals() const { return non_monotone_; }

  /// vhat(x); x outside [-L, L] is clamped to the domain.
  double value(double x) const;
  /// d vhat / dx of the interpolant.
  double derivative(double x) const;
  /// |vhat(x) - endstate| for the endstate on the side of x.
  double tail_offset(double x) const;

  std::span<const double> nodes_x() const { return x_; }
  std::span<const double> nodes_v() const { return v_; }
  std::span<const double> nodes_dv() const { return dv_; }

 private:
  struct Local {
    std::size_t i;
    double h, t;
    bool minus_side;
  };
  Local locate(double x) const;
  // Offset and its x-derivative at node i, measured from the given side's endstate.
  double offset_at(std::size_t i, bool minus_side) const;
  double offset_slope_at(std::size_t i, bool minus_side) const;

  ShockParams params_;
  double half_length_;
  double centering_;
  std::vector<double> x_, offset_, v_, dv_;
  bool clamped_;
  std::size_t non_monotone_ = 0;
};

ShockProfile solve_profile(const ShockParams& params, double half_length,
                           const ProfileOptions& options);

inline ShockProfile solve_profile(const ShockParams& params, double half_length, double tol) {
  ProfileOptions opt;
  opt.tol = tol;
  return solve_profile(params, half_length, opt);
}

struct DecayReport {
  bool applicable = false;  // false unless v+ <= 1/12 with the v+ + 1/12 centering
  bool passed = true;
  double worst_margin = 0.0;  // min over samples of (bound - |vhat - endstate|)
  double worst_x = 0.0;
  std::size_t samples = 0;
  std::vector<double> violations;  // x where margin < -1e-6
};

/// Samples the exponential decay bounds
///   |vhat(x) - v+| <= (1/12) e^{-3x/4}      (x >= 0)
///   |vhat(x) - 1|  <= (1/4)  e^{(x+12)/2}   (x <= 0)
/// at every profile node.
DecayReport validate_profile_decay(const ShockProfile& profile);

}  // namespace evanshock

#endif  // EVANSHOCK_MODEL_HPP
