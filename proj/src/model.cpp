#include "evanshock/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "evanshock/ode.hpp"

namespace evanshock {

RhCoefficient rh_coefficient(double gamma, double v_plus) {
  if (!(gamma >= 1.0)) throw DomainError("rh_coefficient: gamma must be >= 1");
  if (!(v_plus > 0.0 && v_plus < 1.0))
    throw DomainError("rh_coefficient: v+ must lie in (0, 1)");
  if (1.0 - v_plus < 1e-12) return {1.0 / gamma, true};
  if (gamma == 1.0) return {v_plus, false};
  const double c = 1.0 / detail::difference_quotient(1.0 - v_plus, gamma);
  return {std::pow(v_plus, gamma) * c, false};
}

ShockParams ShockParams::from_vplus(double gamma, double v_plus) {
  const RhCoefficient rh = rh_coefficient(gamma, v_plus);
  ShockParams p;
  p.gamma = gamma;
  p.v_plus = v_plus;
  p.a = rh.a;
  p.mach = mach_number(gamma, rh.a);
  p.weak_shock_limit = rh.weak_shock_limit;
  return p;
}

ShockParams ShockParams::from_mach(double gamma, double mach) {
  return from_vplus(gamma, vplus_from_mach(gamma, mach));
}

std::vector<std::string> ShockParams::warnings() const {
  std::vector<std::string> out;
  if (gamma > 3.0) out.emplace_back("gamma > 3 lies outside the physical range [1, 3]");
  if (weak_shock_limit) out.emplace_back("weak-shock limit: a set to 1/gamma");
  return out;
}

double mach_number(double gamma, double a) {
  if (!(gamma >= 1.0) || !(a > 0.0)) throw DomainError("mach_number: invalid parameters");
  return 1.0 / std::sqrt(gamma * a);
}

double vplus_from_mach(double gamma, double mach) {
  if (!(gamma >= 1.0)) throw DomainError("vplus_from_mach: gamma must be >= 1");
  if (!(mach >= 1.0)) throw DomainError("vplus_from_mach: M < 1 admits no shock");
  if (mach == 1.0) return 1.0;

  // v+^gamma / gamma <= a <= v+^gamma brackets the root between
  // (gamma M^2)^(-1/gamma) and (M^2)^(-1/gamma).
  const double log_seed = -(std::log(gamma) + 2.0 * std::log(mach)) / gamma;
  double lo = log_seed - 1e-12;
  double hi = std::min(log_seed + std::log(gamma) / gamma + 1e-12, std::log1p(-1e-15));
  lo = std::min(lo, hi - 1e-12);

  // Residual in log form: log(gamma a(v)) + 2 log M, increasing in v.
  auto residual = [&](double t) {
    const double c = 1.0 / detail::difference_quotient(-std::expm1(t), gamma);
    return std::log(gamma) + gamma * t + std::log(c) + 2.0 * std::log(mach);
  };
  double f_lo = residual(lo), f_hi = residual(hi);
  if (f_hi < 0.0) return std::exp(hi);  // M indistinguishable from 1 at double precision
  if (f_lo > 0.0) throw NumericalError("vplus_from_mach: bracket failed");

  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      residual, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return std::exp(0.5 * (root.first + root.second));
}

double cap_h_sup(const ShockParams& p) {
  return p.gamma / detail::difference_quotient(1.0 - p.v_plus, p.gamma);
}

const char* to_string(ProfileCentering c) {
  return c == ProfileCentering::midpoint ? "midpoint" : "decay_bound";
}

double profile_centering(const ShockParams& p, ProfileCentering rule) {
  if (rule == ProfileCentering::decay_bound && p.v_plus <= 1.0 / 12.0) return p.v_plus + 1.0 / 12.0;
  return 0.5 * (1.0 + p.v_plus);
}

namespace {

// Linearized decay rates of the profile at the two endstates.
double rate_minus(const ShockParams& p) { return 1.0 - p.a * p.gamma; }

double rate_plus(const ShockParams& p) {
  const double c = 1.0 / detail::difference_quotient(1.0 - p.v_plus, p.gamma);
  return -(2.0 * p.v_plus - 1.0 + (1.0 - p.gamma) * c - p.a);
}

}  // namespace

ShockProfile::ShockProfile(ShockParams params, double half_length, double centering,
                           std::vector<double> x, std::vector<double> tail_offset, bool clamped)
    : params_(params),
      half_length_(half_length),
      centering_(centering),
      x_(std::move(x)),
      offset_(std::move(tail_offset)),
      clamped_(clamped) {
  if (x_.size() < 2 || x_.size() != offset_.size())
    throw DomainError("ShockProfile: need at least two nodes");
  v_.resize(x_.size());
  dv_.resize(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) {
    v_[i] = x_[i] < 0.0 ? 1.0 - offset_[i] : params_.v_plus + offset_[i];
    dv_[i] = x_[i] < 0.0 ? detail::profile_rhs_near_minus(offset_[i], params_)
                         : detail::profile_rhs_near_plus(offset_[i], params_);
  }
  for (std::size_t i = 0; i + 1 < v_.size(); ++i) {
    const double secant = (v_[i + 1] - v_[i]) / (x_[i + 1] - x_[i]);
    if (secant == 0.0) {
      if (dv_[i] != 0.0 || dv_[i + 1] != 0.0) ++non_monotone_;
      continue;
    }
    const double alpha = dv_[i] / secant, beta = dv_[i + 1] / secant;
    if (alpha < 0.0 || beta < 0.0 || alpha * alpha + beta * beta > 9.0) ++non_monotone_;
  }
}

ShockProfile::Local ShockProfile::locate(double x) const {
  x = std::clamp(x, x_.front(), x_.back());
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);
  const double h = x_[i + 1] - x_[i];
  return {i, h, (x - x_[i]) / h, x_[i + 1] <= 0.0};
}

double ShockProfile::offset_at(std::size_t i, bool minus_side) const {
  if (minus_side == (x_[i] < 0.0)) return offset_[i];
  return minus_side ? 1.0 - v_[i] : v_[i] - params_.v_plus;
}

double ShockProfile::offset_slope_at(std::size_t i, bool minus_side) const {
  return minus_side ? -dv_[i] : dv_[i];
}

double ShockProfile::tail_offset(double x) const {
  const Local l = locate(x);
  const double t = l.t, t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * offset_at(l.i, l.minus_side) +
         (t3 - 2 * t2 + t) * l.h * offset_slope_at(l.i, l.minus_side) +
         (-2 * t3 + 3 * t2) * offset_at(l.i + 1, l.minus_side) +
         (t3 - t2) * l.h * offset_slope_at(l.i + 1, l.minus_side);
}

double ShockProfile::value(double x) const {
  const double d = tail_offset(x);
  return locate(x).minus_side ? 1.0 - d : params_.v_plus + d;
}

double ShockProfile::derivative(double x) const {
  const Local l = locate(x);
  const double t = l.t, t2 = t * t;
  const double d0 = offset_at(l.i, l.minus_side), d1 = offset_at(l.i + 1, l.minus_side);
  const double slope = (6 * t2 - 6 * t) * (d0 - d1) / l.h +
                       (3 * t2 - 4 * t + 1) * offset_slope_at(l.i, l.minus_side) +
                       (3 * t2 - 2 * t) * offset_slope_at(l.i + 1, l.minus_side);
  return l.minus_side ? -slope : slope;
}

ShockProfile solve_profile(const ShockParams& params, double half_length,
                           const ProfileOptions& options) {
  if (!(half_length > 0.0)) throw DomainError("solve_profile: half_length must be positive");
  if (!(options.tol > 0.0)) throw DomainError("solve_profile: tol must be positive");

  const double vp = params.v_plus;
  const double center = profile_centering(params, options.centering);
  const double amplitude = 1.0 - vp;
  bool clamped = false;

  OdeOptions ode;
  ode.abs_tol = options.tol * amplitude;
  ode.rel_tol = options.tol;
  ode.max_step = options.max_node_spacing;
  ode.initial_step = options.max_node_spacing;

  // Each half-line is integrated in its offset from the endstate it decays to.
  auto sweep = [&](double x_end, double d0, auto&& rhs, std::vector<double>& xs,
                   std::vector<double>& ds) {
    const double top = std::nextafter(amplitude, 0.0);
    integrate_dopri(rhs, 0.0, x_end, d0, ode, [&](double x, double d) {
      if (!(d > 0.0 && d < amplitude)) {
        clamped = true;
        d = std::clamp(d, std::numeric_limits<double>::denorm_min(), top);
      }
      xs.push_back(x);
      ds.push_back(d);
    });
  };

  std::vector<double> xb, db, xf, df;
  sweep(-half_length, 1.0 - center,
        [&](double, double d) { return -detail::profile_rhs_near_minus(d, params); }, xb, db);
  sweep(half_length, center - vp,
        [&](double, double d) { return detail::profile_rhs_near_plus(d, params); }, xf, df);

  // x = 0 carries the plus-side offset.
  std::vector<double> x(xb.rbegin(), xb.rend() - 1), offset(db.rbegin(), db.rend() - 1);
  x.insert(x.end(), xf.begin(), xf.end());
  offset.insert(offset.end(), df.begin(), df.end());

  const double gap_minus = offset.front() / amplitude;
  const double gap_plus = offset.back() / amplitude;
  if (gap_minus > options.endstate_tol || gap_plus > options.endstate_tol) {
    // Extend each side by the linearized decay needed to close its gap.
    const double need_minus =
        gap_minus > options.endstate_tol
            ? half_length + std::log(gap_minus / options.endstate_tol) / rate_minus(params)
            : half_length;
    const double need_plus =
        gap_plus > options.endstate_tol
            ? half_length + std::log(gap_plus / options.endstate_tol) / rate_plus(params)
            : half_length;
    const double required = std::ceil(std::max(need_minus, need_plus));
    std::ostringstream os;
    os << "solve_profile: domain too short (L=" << half_length
       << ", endstate gaps " << gap_minus << " / " << gap_plus << "); need L >= " << required;
    throw DomainTooShort(os.str(), required);
  }

  return ShockProfile(params, half_length, center, std::move(x), std::move(offset), clamped);
}

DecayReport validate_profile_decay(const ShockProfile& profile) {
  DecayReport rep;
  const ShockParams& p = profile.params();
  rep.applicable = p.v_plus <= 1.0 / 12.0 && profile.centering() == p.v_plus + 1.0 / 12.0;
  if (!rep.applicable) return rep;

  rep.worst_margin = std::numeric_limits<double>::infinity();
  const auto xs = profile.nodes_x();
  const auto vs = profile.nodes_v();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    double margin = std::numeric_limits<double>::infinity();
    if (x >= 0.0)
      margin = std::min(margin, std::exp(-0.75 * x) / 12.0 - std::abs(vs[i] - p.v_plus));
    if (x <= 0.0)
      margin = std::min(margin, 0.25 * std::exp(0.5 * (x + 12.0)) - std::abs(vs[i] - 1.0));
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_x = x;
    }
    if (margin < -1e-6) rep.violations.push_back(x);
    ++rep.samples;
  }
  rep.passed = rep.violations.empty();
  return rep;
}

}  // namespace evanshock
