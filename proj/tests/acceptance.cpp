// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Always exits 0; the lines are the result.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "evanshock/bounds.hpp"
#include "evanshock/evolution.hpp"
#include "evanshock/winding.hpp"
#include "oracles.hpp"

using namespace evanshock;

namespace {

int passed = 0, failed = 0;

struct Criterion {
  std::string name;
  double budget_s;
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    ok = ok && cond;
    notes.push_back(std::string(cond ? "ok   " : "MISS ") + what);
  }
  void note(const std::string& what) { notes.push_back("     " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void run(const std::string& name, double budget_s, const std::function<void(Criterion&)>& body) {
  Criterion c{name, budget_s};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("threw: ") + e.what());
  }
  const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(t < budget_s, fmt("runtime %.2f s < %g s", t, budget_s));
  std::printf("%s %s\n", c.ok ? "PASS" : "FAIL", c.name.c_str());
  for (const auto& n : c.notes) std::printf("       %s\n", n.c_str());
  std::fflush(stdout);
  (c.ok ? passed : failed)++;
}

std::pair<double, double> capped_lengths(const ShockParams& p) {
  const DomainLength d = domain_length(1e-3, p);
  return {std::min(d.L_minus, 16.0), std::min(d.L_plus, 16.0)};
}

EvansSystem system_for(const ShockParams& p) {
  const auto [Lm, Lp] = capped_lengths(p);
  return EvansSystem(p, Lm, Lp);
}

}  // namespace

int main() {
  run("Mach cross-checks", 1.0, [](Criterion& c) {
    struct Case {
      double gamma, v_plus, mach;
    };
    for (Case k : {Case{5.0 / 3.0, 1e-4, 1669.0}, Case{1.4, 9e-6, 2877.0}}) {
      const ShockParams p = ShockParams::from_vplus(k.gamma, k.v_plus);
      const double ref = double(oracle::mach(k.gamma, k.v_plus));
      c.require(std::abs(p.mach / k.mach - 1.0) <= 0.01,
                fmt("gamma %.6g, v+ %g: M = %.6f vs %g (1%%)", k.gamma, k.v_plus, p.mach, k.mach));
      c.require(std::abs(p.mach / ref - 1.0) <= 1e-12,
                fmt("agrees with the extended-precision RH oracle (rel %.1e)",
                    std::abs(p.mach / ref - 1.0)));
      const ShockParams back = ShockParams::from_mach(k.gamma, p.mach);
      c.require(std::abs(back.v_plus / k.v_plus - 1.0) <= 1e-9, "from_mach inverts from_vplus");
    }
  });

  run("High-frequency bound", 1.0, [](Criterion& c) {
    for (double g : {1.0, 1.2, 1.4, 5.0 / 3.0, 2.0, 2.5, 3.0}) {
      const double want = (std::sqrt(g) + 0.5) * (std::sqrt(g) + 0.5);
      c.require(hf_bound(g) == want || std::abs(hf_bound(g) - want) <= 1e-15 * want,
                fmt("gamma %.6g: %.15f", g, hf_bound(g)));
    }
    c.require(std::abs(hf_bound(1.0) - 2.25) <= 1e-12, "gamma 1 -> 2.25");
    // The quoted spot values carry four decimals.
    c.require(std::abs(hf_bound(5.0 / 3.0) - 3.2077) < 5e-5,
              fmt("gamma 5/3 -> %.12f (~3.2077)", hf_bound(5.0 / 3.0)));
    c.require(std::abs(hf_bound(3.0) - 4.9821) < 5e-5,
              fmt("gamma 3 -> %.12f (~4.9821)", hf_bound(3.0)));
  });

  run("Small-amplitude condition", 1.0, [](Criterion& c) {
    for (double g : {1.2, 1.4, 5.0 / 3.0, 2.0, 3.0}) {
      const double lhs = mn_condition(ShockParams::from_vplus(g, 1.0 - 1e-6)).lhs_value;
      c.require(std::abs(lhs - g) <= 1e-4, fmt("gamma %.6g: LHS at v+ = 1 - 1e-6 is %.8f", g, lhs));
    }
    const StabilityBoundary sharp = stability_boundary(1.084, ConditionKind::sharp_condition);
    const StabilityBoundary mn = stability_boundary(1.084, ConditionKind::mn_condition);
    c.require(sharp.exists && std::abs(sharp.mach / 2.0 - 1.0) <= 0.05,
              fmt("gamma 1.084 sharp boundary: v+* = %.5f, M* = %.4f (target 2 within 5%%)",
                  sharp.v_plus, sharp.mach));
    c.note(fmt("small-amplitude boundary at gamma 1.084: v+* = %.5f, M* = %.4f", mn.v_plus,
               mn.mach));
  });

  run("g-diagnostic", 10.0, [](Criterion& c) {
    const ShockParams p = ShockParams::from_vplus(2.0, 1e-4);
    double gmin = 0.0, vmin = 0.0;
    for (int k = 1; k < 4000; ++k) {
      const double v = p.v_plus * std::pow(1.0 / p.v_plus, k / 4000.0);
      const double g = g_eval(v, p);
      if (g < gmin) gmin = g, vmin = v;
    }
    c.require(gmin < 0.0, fmt("min g = %.4e at vhat = %.4e", gmin, vmin));
    double worst = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double v = p.v_plus + (1.0 - p.v_plus) * k / 101.0;
      const double ref = double(oracle::g_defining(v, p));
      worst = std::max(worst, std::abs(g_eval(v, p) - ref) / std::abs(ref));
    }
    c.require(worst <= 1e-6, fmt("closed form vs defining derivative: max rel %.2e at 100 points",
                                 worst));
  });

  run("Profile decay", 10.0, [](Criterion& c) {
    for (double g : {1.0, 2.0, 3.0}) {
      const ShockParams p = ShockParams::from_vplus(g, 1e-4);
      const ShockProfile prof = solve_profile(p, 12.0, ProfileOptions{});
      // Independent sampling of the two envelopes on a uniform grid.
      double margin = INFINITY;
      for (int k = 0; k <= 24000; ++k) {
        const double x = -12.0 + 24.0 * k / 24000.0;
        const double v = prof.value(x);
        const double m = x >= 0.0 ? std::exp(-0.75 * x) / 12.0 - std::abs(v - p.v_plus)
                                  : 0.25 * std::exp((x + 12.0) / 2.0) - std::abs(v - 1.0);
        margin = std::min(margin, m);
      }
      const DecayReport rep = validate_profile_decay(prof);
      c.require(margin >= -1e-6 && rep.applicable && rep.passed,
                fmt("gamma %g: sampled margin %.3e, node check margin %.3e", g, margin,
                    rep.worst_margin));
    }
  });

  run("Truncation-error study", 1800.0, [](Criterion& c) {
    const double gammas[] = {1.2, 1.4, 1.666, 1.8};
    const double reference[4][4] = {{1.23e-1, 1.16e-1, 1.08e-1, 1.04e-1},
                                {2.07e-2, 1.46e-2, 1.75e-2, 1.78e-2},
                                {2.00e-3, 1.40e-3, 9.85e-4, 7.20e-4},
                                {6.90e-4, 5.31e-4, 4.73e-4, 4.71e-4}};
    const std::vector<double> Ls{8.0, 10.0, 12.0, 14.0, 16.0};
    for (int j = 0; j < 4; ++j) {
      const ShockParams p = ShockParams::from_vplus(gammas[j], 1e-4);
      const Contour contour = build_contour(p.gamma, 60);
      const auto pts = contour.points().first(60);
      const auto rows = relative_error_study(p, pts, Ls);
      bool decreasing = true, within = true;
      std::string line = fmt("gamma %.4g:", p.gamma);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double e = rows[i].max_relative_error, ref = reference[i][j];
        if (i > 0 && !(e < rows[i - 1].max_relative_error)) decreasing = false;
        if (!(e >= ref / 5.0 && e <= ref * 5.0)) within = false;
        line += fmt(" L=%g %.2e (reference %.2e, x%.3g)", rows[i].L, e, ref, ref / e);
      }
      c.note(line);
      c.require(decreasing, fmt("gamma %.4g: strictly decreasing over L = 8..14", p.gamma));
      c.require(within, fmt("gamma %.4g: every entry within a factor 5 of the reference", p.gamma));
    }
  });

  run("Monatomic strong-shock winding", 300.0, [](Criterion& c) {
    const ShockParams p = ShockParams::from_vplus(5.0 / 3.0, 1e-4);
    const ContourReport rep = evaluate_contour(system_for(p), ContourOptions{});
    double worst = 0.0;
    for (double s : rep.arg_steps) worst = std::max(worst, std::abs(s));
    c.require(rep.winding == 0, fmt("winding %d (turns %.2e), M = %.1f", rep.winding, rep.turns,
                                    p.mach));
    c.require(worst < std::numbers::pi / 25,
              fmt("max |arg step| %.4f < pi/25 after %d refinements", worst, rep.refinements));
  });

  run("Desk-scale sweep", 7200.0, [](Criterion& c) {
    SweepOptions o;
    o.gammas = {1.1, 1.4, 5.0 / 3.0, 2.0, 3.0};
    o.n_mach = 10;
    o.jobs = 0;
    const auto rows = sweep(o);
    SweepOptions fine = o;
    fine.contour.n_points *= 2;
    const auto rows2 = sweep(fine);
    int nonzero = 0, failures = 0, changed = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].ok || !rows2[i].ok) {
        ++failures;
        c.note(fmt("gamma %.4g M %.4g: %s%s", rows[i].gamma, rows[i].mach, rows[i].error.c_str(),
                   rows2[i].error.c_str()));
        continue;
      }
      nonzero += rows[i].winding != 0;
      changed += rows[i].winding != rows2[i].winding;
    }
    c.require(rows.size() == 50 && failures == 0, fmt("%zu points, %d failures", rows.size(),
                                                     failures));
    c.require(nonzero == 0, fmt("%d nonzero windings", nonzero));
    c.require(changed == 0, fmt("%d windings change when the contour mesh is doubled", changed));
  });

  run("Real-axis scan", 300.0, [](Criterion& c) {
    for (auto [g, vp] : {std::pair{5.0 / 3.0, 1e-4}, std::pair{1.4, 0.5}}) {
      const RealAxisScan scan = real_axis_scan(system_for(ShockParams::from_vplus(g, vp)), 200);
      c.require(scan.lambdas.size() == 200 && scan.sign_changes == 0 &&
                    scan.max_imag_ratio <= 1e-6,
                fmt("gamma %.4g, v+ %g: %d sign changes, max |Im D|/|D| = %.1e", g, vp,
                    scan.sign_changes, scan.max_imag_ratio));
    }
  });

  run("Evans property suite", 600.0, [](Criterion& c) {
    const ShockParams p = ShockParams::from_vplus(5.0 / 3.0, 1e-4);
    const EvansSystem sys = system_for(p);
    const Contour contour = build_contour(p.gamma, 60);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> s(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const Complex l = contour.point(s(rng));
      const Complex d1 = evaluate_evans(sys, l).D, d2 = evaluate_evans(sys, std::conj(l)).D;
      worst = std::max(worst, std::abs(d1 - std::conj(d2)) / std::abs(d1));
    }
    c.require(worst <= 1e-8, fmt("conjugate symmetry on 20 random contour points: %.1e", worst));
    ContourOptions base, fine, wide;
    fine.n_points = 120;
    wide.safety = 1.3;
    const int w0 = evaluate_contour(sys, base).winding;
    const int w1 = evaluate_contour(sys, fine).winding;
    const int w2 = evaluate_contour(sys, wide).winding;
    c.require(w0 == w1 && w0 == w2,
              fmt("winding %d, mesh x2 %d, safety 1.3 %d", w0, w1, w2));
  });

  run("Evolution", 1800.0, [](Criterion& c) {
    const ShockParams mms = ShockParams::from_vplus(1.4, 0.5);
    const auto lagged = order_study(mms, CoefficientMode::lagged, 19, 4);
    bool in_range = true;
    std::string line = "error reduction per (dx, dt) halving:";
    for (std::size_t k = 1; k < lagged.size(); ++k) {
      in_range = in_range && lagged[k].ratio >= 3.4 && lagged[k].ratio <= 4.6;
      line += fmt(" %.2f", lagged[k].ratio);
    }
    c.require(in_range, line + " (n+1 = 20..160, in [3.4, 4.6])");
    std::string centered = "coefficients at the midpoint level:";
    for (const auto& r : order_study(mms, CoefficientMode::centered, 19, 4))
      if (r.ratio > 0.0) centered += fmt(" %.2f", r.ratio);
    c.note(centered);

    // Jacobian against central differences of the residual.
    const ShockParams p = ShockParams::from_vplus(1.4, 9e-6);
    {
      const Grid1D g = Grid1D::uniform(-10.0, 10.0, 80, 0.5);
      const ShockProfile prof = solve_profile(p, 11.0, ProfileOptions{});
      EvolutionState now;
      now.v.resize(g.n + 2);
      now.u.resize(g.n + 2);
      for (int j = 0; j < g.n + 2; ++j) now.v(j) = now.u(j) = prof.value(g.x(j));
      EvolutionState next = now;
      next.time = g.dt;
      const Perturbation bump{0.05, 2.0, -2.0, 5.0};
      for (int j = 1; j <= g.n; ++j) next.u(j) += bump(g.x(j));
      std::mt19937 rng(3);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      double worst = 0.0;
      for (CoefficientMode m : {CoefficientMode::lagged, CoefficientMode::centered}) {
        const SchemeOptions scheme{m, {}};
        const BlockTridiagonal J = cn_jacobian(now, next, p, g, scheme);
        Eigen::VectorXd d(2 * g.n);
        for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = u(rng);
        for (int j = 1; j <= g.n; ++j) d(2 * j - 2) *= next.v(j);
        const double eps = 1e-7;
        EvolutionState plus = next, minus = next;
        for (int j = 1; j <= g.n; ++j) {
          plus.v(j) += eps * d(2 * j - 2), minus.v(j) -= eps * d(2 * j - 2);
          plus.u(j) += eps * d(2 * j - 1), minus.u(j) -= eps * d(2 * j - 1);
        }
        const Residual rp = cn_residual(now, plus, p, g, scheme);
        const Residual rm = cn_residual(now, minus, p, g, scheme);
        Eigen::VectorXd fd(2 * g.n);
        for (int j = 0; j < g.n; ++j) {
          fd(2 * j) = (rp.F(j) - rm.F(j)) / (2 * eps);
          fd(2 * j + 1) = (rp.G(j) - rm.G(j)) / (2 * eps);
        }
        const Eigen::VectorXd Jd = J.apply(d);
        worst = std::max(worst, (fd - Jd).norm() / Jd.norm());
      }
      c.require(worst <= 1e-6, fmt("Jacobian vs central differences: rel %.1e", worst));
    }

    const Grid1D grid = Grid1D::uniform(-75.0, 75.0, 2000, 0.5);
    const SimulationReport rep = simulate(p, grid, Perturbation{}, SimulationOptions{});
    const double rel = rep.final_residual / rep.initial_perturbation_norm;
    c.require(rel < 1e-3, fmt("gamma 1.4, v+ 9e-6, n 2000: residual after fit %.3e = %.2e x "
                              "initial perturbation norm %.3e (need < 1e-3)",
                              rep.final_residual, rel, rep.initial_perturbation_norm));
    c.require(std::abs(rep.shift) > 0.0, fmt("|s*| = %.3e > 0", std::abs(rep.shift)));
    const SimulationReport base = simulate(p, grid, Perturbation{0.0}, SimulationOptions{});
    c.note(fmt("unperturbed run: shift %.3e, residual %.3e; the pinned ends conserve the v mass, "
               "so a u-only bump ends at the unperturbed translate",
               base.shift, base.final_residual));
    c.note(fmt("Newton iterations per step: max %d, mean %.2f over %d steps",
               rep.max_newton_iterations, rep.mean_newton_iterations, rep.steps));
  });

  std::printf("\n%d passed, %d failed\n", passed, failed);
  return 0;
}
