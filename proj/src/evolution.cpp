#include "evanshock/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

namespace evanshock {

Grid1D Grid1D::uniform(double x_left, double x_right, int n, double dt_ratio) {
  if (!(x_right > x_left)) throw DomainError("Grid1D: need x_left < x_right");
  if (n < 1) throw DomainError("Grid1D: need at least one interior node");
  if (!(dt_ratio > 0.0)) throw DomainError("Grid1D: dt_ratio must be positive");
  Grid1D g;
  g.x_left = x_left;
  g.x_right = x_right;
  g.n = n;
  g.dx = (x_right - x_left) / (n + 1);
  g.dt = dt_ratio * g.dx;
  return g;
}

Eigen::VectorXd Grid1D::nodes() const {
  Eigen::VectorXd x(n + 2);
  for (int j = 0; j < n + 2; ++j) x(j) = this->x(j);
  x(n + 1) = x_right;
  return x;
}

const char* to_string(CoefficientMode mode) {
  return mode == CoefficientMode::centered ? "centered" : "lagged";
}

double Residual::max_norm() const {
  return std::max(F.size() ? F.lpNorm<Eigen::Infinity>() : 0.0,
                  G.size() ? G.lpNorm<Eigen::Infinity>() : 0.0);
}

namespace {

void check_shapes(const EvolutionState& a, const EvolutionState& b, const Grid1D& g) {
  const Eigen::Index m = g.n + 2;
  if (a.v.size() != m || a.u.size() != m || b.v.size() != m || b.u.size() != m)
    throw DomainError("evolution: state size does not match the grid");
}

// Coefficient values at node j and their derivatives with respect to v_j'.
struct Coefficients {
  double pressure, inv, inv2;                 // a gamma c^(-gamma-1), 1/c, 1/c^2
  double d_pressure = 0, d_inv = 0, d_inv2 = 0;
};

Coefficients coefficients(double v_old, double v_new, const ShockParams& p, CoefficientMode mode) {
  const double c = mode == CoefficientMode::centered ? 0.5 * (v_old + v_new) : v_old;
  Coefficients k;
  k.pressure = p.a * p.gamma * std::pow(c, -p.gamma - 1.0);
  k.inv = 1.0 / c;
  k.inv2 = k.inv * k.inv;
  if (mode == CoefficientMode::centered) {
    // dc/dv' = 1/2
    k.d_pressure = -0.5 * (p.gamma + 1.0) * k.pressure / c;
    k.d_inv = -0.5 * k.inv2;
    k.d_inv2 = -k.inv2 * k.inv;
  }
  return k;
}

void check_positive(const EvolutionState& s, const char* which) {
  for (Eigen::Index j = 0; j < s.v.size(); ++j)
    if (!(s.v(j) > 0.0)) {
      std::ostringstream os;
      os << "evolution: " << which << " level has v <= 0 at node " << j;
      throw NonPositiveVolume(os.str());
    }
}

}  // namespace

Residual cn_residual(const EvolutionState& now, const EvolutionState& next, const ShockParams& p,
                     const Grid1D& g, const SchemeOptions& scheme) {
  check_shapes(now, next, g);
  check_positive(now, "old");
  check_positive(next, "candidate");
  const double dt = next.time - now.time;
  if (!(dt > 0.0)) throw DomainError("cn_residual: the new level must lie ahead in time");

  const auto& v0 = now.v;
  const auto& u0 = now.u;
  const auto& v1 = next.v;
  const auto& u1 = next.u;
  const double dx = g.dx;
  Residual r;
  r.F.resize(g.n);
  r.G.resize(g.n);
  for (int j = 1; j <= g.n; ++j) {
    const double Dv = v1(j + 1) - v1(j - 1) + v0(j + 1) - v0(j - 1);
    const double Du = u1(j + 1) - u1(j - 1) + u0(j + 1) - u0(j - 1);
    const double Lu = u1(j + 1) - 2 * u1(j) + u1(j - 1) + u0(j + 1) - 2 * u0(j) + u0(j - 1);
    const Coefficients k = coefficients(v0(j), v1(j), p, scheme.coefficients);
    double F = (v1(j) - v0(j)) / dt + Dv / (4 * dx) - Du / (4 * dx);
    double G = (u1(j) - u0(j)) / dt + Du / (4 * dx) - k.pressure * Dv / (4 * dx) -
               k.inv * Lu / (2 * dx * dx) + k.inv2 * Du * Dv / (16 * dx * dx);
    if (scheme.source) {
      const Eigen::Vector2d s = 0.5 * (scheme.source(g.x(j), now.time) +
                                       scheme.source(g.x(j), next.time));
      F -= s(0);
      G -= s(1);
    }
    r.F(j - 1) = F;
    r.G(j - 1) = G;
  }
  return r;
}

BlockTridiagonal::BlockTridiagonal(int n)
    : lower_(n, Eigen::Matrix2d::Zero()),
      diag_(n, Eigen::Matrix2d::Zero()),
      upper_(n, Eigen::Matrix2d::Zero()) {
  if (n < 1) throw DomainError("BlockTridiagonal: need at least one block");
}

Eigen::VectorXd BlockTridiagonal::apply(const Eigen::VectorXd& x) const {
  const int n = blocks();
  if (x.size() != 2 * n) throw DomainError("BlockTridiagonal::apply: size mismatch");
  Eigen::VectorXd y(2 * n);
  for (int j = 0; j < n; ++j) {
    Eigen::Vector2d yj = diag_[j] * x.segment<2>(2 * j);
    if (j > 0) yj += lower_[j] * x.segment<2>(2 * j - 2);
    if (j + 1 < n) yj += upper_[j] * x.segment<2>(2 * j + 2);
    y.segment<2>(2 * j) = yj;
  }
  return y;
}

Eigen::VectorXd BlockTridiagonal::solve(const Eigen::VectorXd& rhs) const {
  const int n = blocks();
  if (rhs.size() != 2 * n) throw DomainError("BlockTridiagonal::solve: size mismatch");
  std::vector<Eigen::Matrix2d> c(n);
  std::vector<Eigen::Vector2d> d(n);
  for (int j = 0; j < n; ++j) {
    Eigen::Matrix2d pivot = diag_[j];
    Eigen::Vector2d r = rhs.segment<2>(2 * j);
    if (j > 0) {
      pivot -= lower_[j] * c[j - 1];
      r -= lower_[j] * d[j - 1];
    }
    const double scale = pivot.cwiseAbs().maxCoeff();
    if (!(std::abs(pivot.determinant()) > 1e-14 * scale * scale)) {
      std::ostringstream os;
      os << "BlockTridiagonal::solve: singular pivot block at interior node " << j + 1;
      throw NumericalError(os.str());
    }
    const Eigen::Matrix2d inv = pivot.inverse();
    c[j] = inv * upper_[j];
    d[j] = inv * r;
  }
  Eigen::VectorXd x(2 * n);
  x.segment<2>(2 * (n - 1)) = d[n - 1];
  for (int j = n - 2; j >= 0; --j) x.segment<2>(2 * j) = d[j] - c[j] * x.segment<2>(2 * j + 2);
  return x;
}

Eigen::MatrixXd BlockTridiagonal::dense() const {
  const int n = blocks();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    M.block<2, 2>(2 * j, 2 * j) = diag_[j];
    if (j > 0) M.block<2, 2>(2 * j, 2 * j - 2) = lower_[j];
    if (j + 1 < n) M.block<2, 2>(2 * j, 2 * j + 2) = upper_[j];
  }
  return M;
}

BlockTridiagonal cn_jacobian(const EvolutionState& now, const EvolutionState& next,
                             const ShockParams& p, const Grid1D& g, const SchemeOptions& scheme) {
  check_shapes(now, next, g);
  check_positive(now, "old");
  check_positive(next, "candidate");
  const double dt = next.time - now.time;
  if (!(dt > 0.0)) throw DomainError("cn_jacobian: the new level must lie ahead in time");

  const auto& v0 = now.v;
  const auto& u0 = now.u;
  const auto& v1 = next.v;
  const auto& u1 = next.u;
  const double dx = g.dx, q = 1.0 / (4 * dx), q2 = 1.0 / (2 * dx * dx), q16 = 1.0 / (16 * dx * dx);

  // Rows (F, G), columns (v', u') of each block.
  BlockTridiagonal J(g.n);
  for (int j = 1; j <= g.n; ++j) {
    const int b = j - 1;
    const double Dv = v1(j + 1) - v1(j - 1) + v0(j + 1) - v0(j - 1);
    const double Du = u1(j + 1) - u1(j - 1) + u0(j + 1) - u0(j - 1);
    const double Lu = u1(j + 1) - 2 * u1(j) + u1(j - 1) + u0(j + 1) - 2 * u0(j) + u0(j - 1);
    const Coefficients k = coefficients(v0(j), v1(j), p, scheme.coefficients);

    Eigen::Matrix2d& D = J.diag(b);
    D(0, 0) = 1.0 / dt;
    D(0, 1) = 0.0;
    D(1, 0) = -k.d_pressure * Dv * q - k.d_inv * Lu * q2 + k.d_inv2 * Du * Dv * q16;
    D(1, 1) = 1.0 / dt + 2.0 * k.inv * q2;

    // Neighbour j + s, s = +-1.
    auto neighbour = [&](double s) {
      Eigen::Matrix2d N;
      N(0, 0) = s * q;
      N(0, 1) = -s * q;
      N(1, 0) = -s * k.pressure * q + s * k.inv2 * Du * q16;
      N(1, 1) = s * q - k.inv * q2 + s * k.inv2 * Dv * q16;
      return N;
    };
    if (j > 1) J.lower(b) = neighbour(-1.0);
    if (j < g.n) J.upper(b) = neighbour(1.0);
  }
  return J;
}

namespace {

Eigen::VectorXd interleave(const Residual& r) {
  Eigen::VectorXd out(2 * r.F.size());
  for (Eigen::Index j = 0; j < r.F.size(); ++j) {
    out(2 * j) = r.F(j);
    out(2 * j + 1) = r.G(j);
  }
  return out;
}

}  // namespace

EvolutionState advance(const EvolutionState& state, const ShockParams& p, const Grid1D& g,
                       const NewtonOptions& newton, const SchemeOptions& scheme, StepStats* stats) {
  if (!(newton.tol > 0.0)) throw DomainError("advance: newton tol must be positive");
  EvolutionState cur = state;
  cur.time = state.time + g.dt;
  Residual r = cn_residual(state, cur, p, g, scheme);
  double norm = r.max_norm();
  StepStats local;

  for (int it = 0; norm >= newton.tol; ++it) {
    if (it >= newton.max_iters) {
      std::ostringstream os;
      os << "advance: Newton did not converge in " << newton.max_iters
         << " iterations at t=" << cur.time << " (residual " << norm << "); reduce dt";
      throw NumericalError(os.str());
    }
    const Eigen::VectorXd delta = cn_jacobian(state, cur, p, g, scheme).solve(interleave(r));
    double alpha = 1.0;
    bool accepted = false;
    EvolutionState trial = cur;
    for (int bt = 0; bt <= newton.max_backtracks; ++bt, alpha *= 0.5) {
      for (int j = 1; j <= g.n; ++j) {
        trial.v(j) = cur.v(j) - alpha * delta(2 * j - 2);
        trial.u(j) = cur.u(j) - alpha * delta(2 * j - 1);
      }
      try {
        Residual rt = cn_residual(state, trial, p, g, scheme);
        const double nt = rt.max_norm();
        if (nt < norm || bt == newton.max_backtracks) {
          local.backtracks += bt;
          r = std::move(rt);
          norm = nt;
          accepted = std::isfinite(nt);
          break;
        }
      } catch (const NonPositiveVolume&) {
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "advance: Newton line search failed at t=" << cur.time << "; reduce dt";
      throw NumericalError(os.str());
    }
    cur.v = trial.v;
    cur.u = trial.u;
    local.iterations = it + 1;
  }
  local.residual = norm;
  if (stats) *stats = local;
  return cur;
}

double Perturbation::operator()(double x) const {
  const double z = (x - center) / width;
  if (std::abs(z) > truncation) return 0.0;
  return amplitude * std::exp(-z * z);
}

TranslateFit fit_translate(const ShockProfile& profile, const Grid1D& g, const Eigen::VectorXd& v,
                           double bracket) {
  if (v.size() != g.n + 2) throw DomainError("fit_translate: field size does not match the grid");
  auto distance = [&](double s) {
    double sum = 0.0;
    for (int j = 1; j <= g.n; ++j) {
      const double e = v(j) - profile.value(g.x(j) - s);
      sum += e * e;
    }
    return std::sqrt(g.dx * sum);
  };
  // Coarse scan first so that the bracketed search starts in the right basin.
  const int coarse = 80;
  double best = -bracket, best_val = distance(-bracket);
  for (int k = 1; k <= coarse; ++k) {
    const double s = -bracket + 2.0 * bracket * k / coarse;
    const double d = distance(s);
    if (d < best_val) {
      best = s;
      best_val = d;
    }
  }
  const double h = 2.0 * bracket / coarse;
  const auto [s, d] = boost::math::tools::brent_find_minima(
      distance, std::max(-bracket, best - h), std::min(bracket, best + h), 40);
  return d <= best_val ? TranslateFit{s, d} : TranslateFit{best, best_val};
}

namespace {

double l2(const Grid1D& g, const Eigen::VectorXd& w) {
  return std::sqrt(g.dx * w.segment(1, g.n).squaredNorm());
}

}  // namespace

SimulationReport simulate(const ShockParams& p, const Grid1D& grid,
                          const Perturbation& perturbation, const SimulationOptions& o) {
  if (!(o.T > 0.0)) throw DomainError("simulate: T must be positive");
  if (!(o.report_interval > 0.0)) throw DomainError("simulate: report_interval must be positive");

  const double reach = std::max(std::abs(grid.x_left), std::abs(grid.x_right)) + o.fit_bracket;
  const ShockProfile profile =
      solve_profile(p, reach, ProfileOptions{.tol = o.profile_tol, .centering = o.centering});

  SimulationReport rep;
  rep.grid = grid;
  EvolutionState s;
  s.v.resize(grid.n + 2);
  s.u.resize(grid.n + 2);
  Eigen::VectorXd bump(grid.n + 2);
  for (int j = 0; j < grid.n + 2; ++j) {
    const double x = j == grid.n + 1 ? grid.x_right : grid.x(j);
    s.v(j) = profile.value(x);
    bump(j) = (j == 0 || j == grid.n + 1) ? 0.0 : perturbation(x);
    s.u(j) = s.v(j) + bump(j);
  }
  rep.initial_perturbation_norm = l2(grid, bump);

  // Event times: snapshots and fit reports; steps are shortened to land on them.
  std::vector<double> snaps = o.snapshot_times;
  if (snaps.empty()) snaps = {0.0, o.T / 10.0, o.T / 3.0, o.T};
  std::vector<double> events(snaps.begin(), snaps.end());
  for (double t = 0.0; t < o.T; t += o.report_interval) events.push_back(t);
  events.push_back(o.T);
  for (double& t : events) t = std::clamp(t, 0.0, o.T);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               events.end());

  auto is_in = [](const std::vector<double>& list, double t) {
    return std::any_of(list.begin(), list.end(), [&](double x) { return std::abs(x - t) < 1e-12; });
  };
  auto record = [&](double t) {
    if (is_in(snaps, t)) rep.snapshots.push_back({t, s.v, s.u});
    const TranslateFit fit = fit_translate(profile, grid, s.v, o.fit_bracket);
    rep.history_time.push_back(t);
    rep.history_shift.push_back(fit.shift);
    rep.history_residual.push_back(fit.residual);
  };

  const double v_left = s.v(0), v_right = s.v(grid.n + 1);
  const double u_left = s.u(0), u_right = s.u(grid.n + 1);
  long total_iters = 0;
  for (double target : events) {
    while (target - s.time > 1e-12) {
      Grid1D step = grid;
      step.dt = std::min(grid.dt, target - s.time);
      if (target - s.time - step.dt < 1e-9 * grid.dt) step.dt = target - s.time;
      StepStats st;
      try {
        s = advance(s, p, step, o.newton, o.scheme, &st);
      } catch (const NonPositiveVolume&) {
        throw NumericalError("simulate: numerical blow-up (v <= 0) at t=" +
                             std::to_string(s.time));
      }
      if (std::abs(target - s.time) < 1e-9 * grid.dt) s.time = target;
      ++rep.steps;
      total_iters += st.iterations;
      rep.max_newton_iterations = std::max(rep.max_newton_iterations, st.iterations);
      if (!(s.v.cwiseAbs().maxCoeff() <= 1e3 && s.u.cwiseAbs().maxCoeff() <= 1e3) ||
          !(s.v.minCoeff() > 0.0))
        throw NumericalError("simulate: numerical blow-up at t=" + std::to_string(s.time));
    }
    record(target);
  }
  if (s.v(0) != v_left || s.v(grid.n + 1) != v_right || s.u(0) != u_left ||
      s.u(grid.n + 1) != u_right)
    throw NumericalError("simulate: boundary values changed");

  rep.mean_newton_iterations = rep.steps ? double(total_iters) / rep.steps : 0.0;
  rep.shift = rep.history_shift.back();
  rep.final_residual = rep.history_residual.back();
  return rep;
}

double ManufacturedSolution::v(double x, double t) const {
  return 1.0 + 0.2 * std::sin(std::numbers::pi * x) * std::cos(t);
}

double ManufacturedSolution::u(double x, double t) const {
  return 0.3 * std::sin(2.0 * std::numbers::pi * x) * std::sin(t + 0.3);
}

Eigen::Vector2d ManufacturedSolution::source(double x, double t) const {
  const double pi = std::numbers::pi;
  const double V = v(x, t);
  const double Vt = -0.2 * std::sin(pi * x) * std::sin(t);
  const double Vx = 0.2 * pi * std::cos(pi * x) * std::cos(t);
  const double Ut = 0.3 * std::sin(2 * pi * x) * std::cos(t + 0.3);
  const double Ux = 0.6 * pi * std::cos(2 * pi * x) * std::sin(t + 0.3);
  const double Uxx = -1.2 * pi * pi * std::sin(2 * pi * x) * std::sin(t + 0.3);
  const double g = params.gamma;
  return {Vt + Vx - Ux,
          Ut + Ux - params.a * g * std::pow(V, -g - 1) * Vx - Uxx / V + Ux * Vx / (V * V)};
}

std::vector<OrderStudyRow> order_study(const ShockParams& p, CoefficientMode mode, int n0,
                                       int levels, double dt_ratio, double T) {
  if (n0 < 3 || levels < 1) throw DomainError("order_study: need n0 >= 3 and levels >= 1");
  const ManufacturedSolution ms{p};
  SchemeOptions scheme;
  scheme.coefficients = mode;
  scheme.source = [&](double x, double t) { return ms.source(x, t); };

  std::vector<OrderStudyRow> rows;
  for (int l = 0; l < levels; ++l) {
    const int n = (n0 + 1) * (1 << l) - 1;
    Grid1D g = Grid1D::uniform(0.0, 1.0, n, dt_ratio);
    const int steps = static_cast<int>(std::ceil(T / g.dt - 1e-9));
    g.dt = T / steps;

    EvolutionState s;
    s.v.resize(n + 2);
    s.u.resize(n + 2);
    for (int j = 0; j < n + 2; ++j) {
      s.v(j) = ms.v(g.x(j), 0.0);
      s.u(j) = ms.u(g.x(j), 0.0);
    }
    for (int k = 0; k < steps; ++k) {
      s = advance(s, p, g, {}, scheme);
      s.time = T * (k + 1) / steps;
    }
    double err = 0.0;
    for (int j = 1; j <= n; ++j)
      err = std::max({err, std::abs(s.v(j) - ms.v(g.x(j), T)), std::abs(s.u(j) - ms.u(g.x(j), T))});
    OrderStudyRow row{n, g.dx, g.dt, err, 0.0};
    if (!rows.empty()) row.ratio = rows.back().error / err;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace evanshock
