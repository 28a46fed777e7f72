#ifndef EVANSHOCK_WINDING_HPP
#define EVANSHOCK_WINDING_HPP

#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "evanshock/evans.hpp"

namespace evanshock {

/// Closed counterclockwise contour around the right half-disk of radius R,
/// indented into Re lambda > 0 by a quarter circle of radius r0 on each side
/// of the origin. Parametrized by normalized arc length s in [0, 1]: the
/// upper half (s <= 1/2) runs R -> iR -> i r0 -> r0, the lower half is its
/// mirror image, so point(1 - s) = conj(point(s)).
class Contour {
 public:
  Contour(double radius, double indentation_radius, int n_points);

  double radius() const { return radius_; }
  double indentation_radius() const { return r0_; }
  Complex point(double s) const;

  /// Nodes s_k = k / n, k = 0..n; points().front() == points().back().
  std::span<const double> params() const { return s_; }
  std::span<const Complex> points() const { return points_; }

 private:
  double radius_, r0_;
  std::vector<double> s_;
  std::vector<Complex> points_;
};

/// Semicircle of radius safety (sqrt(gamma) + 1/2)^2 with n_points segments.
/// n_points must be even and >= 16; safety >= 1; 0 < r0 < radius.
Contour build_contour(double gamma, int n_points = 60, double safety = 1.1, double r0 = 1e-4);

struct WindingResult {
  int winding = 0;
  double turns = 0.0;  // sum of arg steps / 2 pi
  std::vector<double> params;
  std::vector<Complex> values;
  std::vector<double> arg_steps;
  int refinements = 0;
};

/// Winding of the closed polygon through `values` (front and back the same point
/// up to roundoff). Throws NumericalError when any |D| < near_zero.
WindingResult winding_number(std::span<const Complex> values, double near_zero = 1e-12);

/// Adaptive version: any segment with |arg step| >= max_arg_step is bisected in
/// s through `evaluate` until it passes or max_depth is reached (NumericalError
/// naming the segment).
WindingResult winding_number(std::vector<double> params, std::vector<Complex> values,
                             const std::function<Complex(double)>& evaluate,
                             double max_arg_step = std::numbers::pi / 25, int max_depth = 12,
                             double near_zero = 1e-12);

struct ContourOptions {
  int n_points = 60;
  double safety = 1.1;
  double r0 = 1e-4;
  double max_arg_step = std::numbers::pi / 25;
  int max_depth = 12;
  double near_zero = 1e-12;
  // Evaluate the upper half only and mirror it (D(conj lambda) = conj D(lambda)).
  bool symmetric = true;
};

struct ContourReport {
  Contour contour{1.0, 0.1, 16};
  std::vector<double> params;  // after refinement
  std::vector<Complex> lambdas;
  std::vector<Complex> D_values;
  std::vector<double> arg_steps;
  int winding = 0;
  double turns = 0.0;
  int refinements = 0;
  double max_arg_step = 0.0;
  bool stable = false;  // winding == 0 and |turns - winding| < 0.05
  std::vector<std::string> warnings;
};

/// Evans function around the contour with Kato-continued initial data seeded
/// at lambda = R, refined until every argument step is below max_arg_step.
ContourReport evaluate_contour(const EvansSystem& system, const ContourOptions& options = {});

struct RealAxisScan {
  std::vector<double> lambdas;
  std::vector<Complex> D_values;
  int sign_changes = 0;
  double max_imag_ratio = 0.0;  // max |Im D| / |D|
  std::vector<std::string> warnings;
};

/// D at n_samples real points r0 + (hf_bound - r0) k / n, k = 1..n, continued
/// from the top sample downwards.
RealAxisScan real_axis_scan(const EvansSystem& system, int n_samples = 200, double r0 = 1e-4);

struct SweepOptions {
  std::vector<double> gammas{5.0 / 3.0};
  double mach_min = 1.6;
  double mach_max = 3000.0;
  int n_mach = 10;
  bool log_scale = true;
  double theta = 1e-3;
  double L_cap = 16.0;  // upper limit on both truncation lengths
  unsigned jobs = 1;
  bool analytic_shortcut = false;
  ContourOptions contour;
  EvansOptions evans;
};

struct SweepRow {
  double gamma = 0.0;
  double mach = 0.0;
  double v_plus = 0.0;
  double L_minus = 0.0;
  double L_plus = 0.0;
  int winding = 0;
  double turns = 0.0;
  int refinements = 0;
  double max_arg_step = 0.0;
  bool analytic = false;  // stable by the sharp energy condition, no Evans run
  bool ok = true;
  std::string error;
};

/// Mach numbers of the sweep grid, ascending.
std::vector<double> sweep_machs(const SweepOptions& options);

/// Rows ordered by (gamma as given, Mach ascending) whatever the job count.
std::vector<SweepRow> sweep(const SweepOptions& options);

/// One sweep point; sweep() calls exactly this.
SweepRow sweep_point(double gamma, double mach, const SweepOptions& options);

}  // namespace evanshock

#endif  // EVANSHOCK_WINDING_HPP
