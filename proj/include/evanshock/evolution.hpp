#ifndef EVANSHOCK_EVOLUTION_HPP
#define EVANSHOCK_EVOLUTION_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "evanshock/model.hpp"
#include "evanshock/types.hpp"

namespace evanshock {

/// Uniform grid with nodes x_j = x_left + j dx, j = 0..n+1; nodes 0 and n+1
/// carry the fixed boundary values.
struct Grid1D {
  double x_left = 0.0;
  double x_right = 1.0;
  int n = 0;  // interior nodes
  double dx = 0.0;
  double dt = 0.0;

  static Grid1D uniform(double x_left, double x_right, int n, double dt_ratio);
  double x(int j) const { return x_left + j * dx; }
  Eigen::VectorXd nodes() const;
};

struct EvolutionState {
  Eigen::VectorXd v, u;  // n + 2 values including both boundary nodes
  double time = 0.0;
};

/// Coefficients (v^-gamma-1, 1/v, 1/v^2) of the u equation, evaluated at
/// the old level (lagged, as the scheme is usually written) or at the mean of
/// the old and new levels (centered, second order in time).
enum class CoefficientMode { lagged, centered };
const char* to_string(CoefficientMode mode);

/// Forcing (S_v, S_u) added to the right-hand sides, for manufactured solutions.
using SourceTerm = std::function<Eigen::Vector2d(double x, double t)>;

struct SchemeOptions {
  CoefficientMode coefficients = CoefficientMode::lagged;
  SourceTerm source;  // empty: none
};

/// A candidate with v <= 0 somewhere; Newton backtracks on it.
class NonPositiveVolume : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Crank-Nicolson residuals at the interior nodes j = 1..n (stored at j - 1):
///
///   F_j = (v_j' - v_j)/dt + (Dv' + Dv)/(4dx) - (Du' + Du)/(4dx)
///   G_j = (u_j' - u_j)/dt + (Du' + Du)/(4dx) - a gamma c^(-gamma-1) (Dv' + Dv)/(4dx)
///         - (d2u' + d2u)/(2 dx^2 c) + (Du' + Du)(Dv' + Dv)/(16 dx^2 c^2)
///
/// with D w = w_{j+1} - w_{j-1}, d2 w = w_{j+1} - 2 w_j + w_{j-1}, primes the new
/// level and c = v_j (lagged) or (v_j + v_j')/2 (centered).
struct Residual {
  Eigen::VectorXd F, G;
  double max_norm() const;
};

Residual cn_residual(const EvolutionState& now, const EvolutionState& next, const ShockParams& p,
                     const Grid1D& grid, const SchemeOptions& scheme = {});

/// Block-tridiagonal matrix with 2x2 blocks acting on (v_1, u_1, ..., v_n, u_n).
class BlockTridiagonal {
 public:
  explicit BlockTridiagonal(int n);

  int blocks() const { return static_cast<int>(diag_.size()); }
  Eigen::Matrix2d& lower(int j) { return lower_[j]; }  // couples row j to block j - 1
  Eigen::Matrix2d& diag(int j) { return diag_[j]; }
  Eigen::Matrix2d& upper(int j) { return upper_[j]; }  // couples row j to block j + 1
  const Eigen::Matrix2d& lower(int j) const { return lower_[j]; }
  const Eigen::Matrix2d& diag(int j) const { return diag_[j]; }
  const Eigen::Matrix2d& upper(int j) const { return upper_[j]; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Block Thomas elimination; NumericalError naming the block of a singular pivot.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd dense() const;

 private:
  std::vector<Eigen::Matrix2d> lower_, diag_, upper_;
};

/// Jacobian of (F_j, G_j) with respect to (v_k', u_k') at the interior nodes.
BlockTridiagonal cn_jacobian(const EvolutionState& now, const EvolutionState& next,
                             const ShockParams& p, const Grid1D& grid,
                             const SchemeOptions& scheme = {});

struct NewtonOptions {
  double tol = 1e-10;  // max-norm of the residual
  int max_iters = 25;
  int max_backtracks = 8;
};

struct StepStats {
  int iterations = 0;
  int backtracks = 0;
  double residual = 0.0;
};

/// One time step by damped Newton started from the current level. Throws
/// NumericalError when Newton does not converge.
EvolutionState advance(const EvolutionState& state, const ShockParams& p, const Grid1D& grid,
                       const NewtonOptions& newton = {}, const SchemeOptions& scheme = {},
                       StepStats* stats = nullptr);

/// Gaussian bump amplitude exp(-((x - center)/width)^2) on u, cut off beyond
/// `truncation` widths so that it is compactly supported with positive mass.
struct Perturbation {
  double amplitude = 0.05;
  double width = 2.0;
  double center = -10.0;
  double truncation = 5.0;
  double operator()(double x) const;
};

struct TranslateFit {
  double shift = 0.0;
  double residual = 0.0;  // discrete L2 distance sqrt(dx sum (v - vhat(x - s))^2)
};

/// Best translate of the profile in [-bracket, bracket].
TranslateFit fit_translate(const ShockProfile& profile, const Grid1D& grid,
                           const Eigen::VectorXd& v, double bracket = 20.0);

struct SimulationOptions {
  double T = 50.0;
  std::vector<double> snapshot_times;  // empty: 0, T/10, T/3, T
  double report_interval = 1.0;        // spacing of the fit history
  double fit_bracket = 20.0;
  double profile_tol = 1e-10;
  ProfileCentering centering = ProfileCentering::decay_bound;
  NewtonOptions newton;
  SchemeOptions scheme;
};

struct Snapshot {
  double time = 0.0;
  Eigen::VectorXd v, u;
};

struct SimulationReport {
  Grid1D grid;
  std::vector<Snapshot> snapshots;
  std::vector<double> history_time, history_shift, history_residual;
  double shift = 0.0;
  double final_residual = 0.0;
  double initial_perturbation_norm = 0.0;  // discrete L2 norm of the u perturbation
  int steps = 0;
  int max_newton_iterations = 0;
  double mean_newton_iterations = 0.0;
};

/// Runs the perturbed profile (vhat, uhat = vhat) + (0, perturbation) to time T
/// with the endstate values pinned at both ends. Throws NumericalError on
/// blow-up (|v| or |u| > 1e3, or v <= 0) with the time of failure.
SimulationReport simulate(const ShockParams& p, const Grid1D& grid,
                          const Perturbation& perturbation, const SimulationOptions& options = {});

/// Manufactured solution on [0, 1] used to measure the order of the scheme:
/// v = 1 + 0.2 sin(pi x) cos t, u = 0.3 sin(2 pi x) sin(t + 0.3).
struct ManufacturedSolution {
  ShockParams params;
  double v(double x, double t) const;
  double u(double x, double t) const;
  Eigen::Vector2d source(double x, double t) const;
};

struct OrderStudyRow {
  int n = 0;
  double dx = 0.0;
  double dt = 0.0;
  double error = 0.0;  // max-norm of (v, u) error at the final time
  double ratio = 0.0;  // error of the previous row / this error
};

/// Runs the manufactured solution to time T on grids with n + 1 = n0 + 1,
/// 2 (n0 + 1), ... intervals, dt = dt_ratio dx.
std::vector<OrderStudyRow> order_study(const ShockParams& p, CoefficientMode mode, int n0,
                                       int levels, double dt_ratio = 0.5, double T = 1.0);

}  // namespace evanshock

#endif  // EVANSHOCK_EVOLUTION_HPP
