#include "evanshock/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "evanshock/artifacts.hpp"
#include "evanshock/bounds.hpp"
#include "evanshock/evolution.hpp"
#include "evanshock/winding.hpp"

namespace evanshock::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
namespace art = evanshock::artifacts;

namespace {

struct ShockArgs {
  double gamma = 0.0;
  std::optional<double> v_plus, mach;

  ShockParams resolve() const {
    if (v_plus) return ShockParams::from_vplus(gamma, *v_plus);
    if (mach) return ShockParams::from_mach(gamma, *mach);
    throw DomainError("one of --vplus or --mach is required");
  }
};

void add_shock_options(CLI::App* sub, ShockArgs& a) {
  sub->add_option("--gamma", a.gamma, "Adiabatic exponent (>= 1)")->required();
  auto* vp = sub->add_option("--vplus", a.v_plus, "Right endstate v+ in (0, 1)");
  auto* m = sub->add_option("--mach", a.mach, "Mach number M > 1");
  vp->excludes(m);
}

struct EvansArgs {
  std::optional<double> L;
  double theta = 1e-3;
  double L_cap = 16.0;
  double abs_tol = 1e-6;
  double rel_tol = 1e-8;
  std::string centering = "decay_bound";
};

const std::map<std::string, ProfileCentering> kCentering{
    {"decay_bound", ProfileCentering::decay_bound}, {"midpoint", ProfileCentering::midpoint}};

void add_evans_options(CLI::App* sub, EvansArgs& e) {
  sub->add_option("--L", e.L, "Truncation length for both ends (overrides --theta)");
  sub->add_option("--theta", e.theta, "Target relative error feeding the length estimate")
      ->capture_default_str();
  sub->add_option("--L-cap", e.L_cap, "Upper limit on the estimated lengths")
      ->capture_default_str();
  sub->add_option("--abs-tol", e.abs_tol, "ODE absolute tolerance")->capture_default_str();
  sub->add_option("--rel-tol", e.rel_tol, "ODE relative tolerance")->capture_default_str();
  sub->add_option("--centering", e.centering, "Profile phase: decay_bound or midpoint")
      ->check(CLI::IsMember({"decay_bound", "midpoint"}))
      ->capture_default_str();
}

EvansOptions evans_options(const EvansArgs& e) {
  EvansOptions o;
  o.abs_tol = e.abs_tol;
  o.rel_tol = e.rel_tol;
  o.centering = kCentering.at(e.centering);
  return o;
}

std::pair<double, double> lengths(const EvansArgs& e, const ShockParams& p) {
  if (e.L) return {*e.L, *e.L};
  const DomainLength d = domain_length(e.theta, p);
  return {std::min(d.L_minus, e.L_cap), std::min(d.L_plus, e.L_cap)};
}

json params_json(const ShockParams& p) {
  return json{{"gamma", p.gamma}, {"v_plus", p.v_plus}, {"a", p.a}, {"mach", p.mach}};
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw DomainError(std::string(what) + " is empty");
  return out;
}

// Output naming: --out gives the primary artifact; siblings share its stem.
struct Outputs {
  fs::path dir;
  fs::path primary;
  std::ostream& log;

  fs::path sibling(const std::string& suffix) const {
    fs::path p = primary;
    return p.replace_filename(p.stem().string() + suffix);
  }
  void write(const fs::path& p, const std::string& text) const {
    art::write_file(p, text);
    log << "wrote " << p.string() << '\n';
  }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- profile

struct ProfileArgs {
  ShockArgs shock;
  double L = 12.0;
  double tol = 1e-10;
  std::string centering = "decay_bound";
  std::string out = "profile.csv";
};

int run_profile(const ProfileArgs& a, const Outputs& o, const std::string& config) {
  const ShockParams p = a.shock.resolve();
  ProfileOptions po;
  po.tol = a.tol;
  po.centering = kCentering.at(a.centering);
  const ShockProfile prof = solve_profile(p, a.L, po);
  const DecayReport decay = validate_profile_decay(prof);

  std::vector<std::vector<double>> rows;
  const auto xs = prof.nodes_x();
  const auto vs = prof.nodes_v();
  const auto ds = prof.nodes_dv();
  for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back({xs[i], vs[i], ds[i]});
  o.write(o.primary, art::csv({"x", "vhat", "vhat_prime"}, rows, config));

  json body = params_json(p);
  body["half_length"] = a.L;
  body["centering"] = to_string(po.centering);
  body["vhat_0"] = prof.centering();
  body["nodes"] = xs.size();
  body["clamped"] = prof.clamped();
  body["non_monotone_intervals"] = prof.non_monotone_intervals();
  body["decay_check"] = json{{"applicable", decay.applicable},
                             {"passed", decay.passed},
                             {"worst_margin", decay.worst_margin},
                             {"worst_x", decay.worst_x},
                             {"violations", decay.violations.size()}};
  body["warnings"] = p.warnings();
  o.write(o.sibling(".json"), dump(art::document(body, config)));
  return kSuccess;
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
  double gamma_min = 1.0;
  double gamma_max = 3.0;
  int n = 41;
  double g_gamma = 2.0;
  double g_vplus = 1e-4;
  int g_points = 400;
  std::string out = "bounds.csv";
};

int run_bounds(const BoundsArgs& a, const Outputs& o, const std::string& config) {
  if (a.n < 2 || !(a.gamma_max > a.gamma_min) || !(a.gamma_min >= 1.0))
    throw DomainError("bounds: need 1 <= gamma-min < gamma-max and n >= 2");
  std::vector<std::vector<double>> rows;
  art::Series mn{"small-amplitude condition", {}, {}}, sharp{"sharp condition", {}, {}};
  std::vector<art::Series> iso;
  for (double M : {2.0, 5.0, 10.0}) iso.push_back({"M = " + art::format_number(M), {}, {}, true});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < a.n; ++i) {
    const double g = a.gamma_min + (a.gamma_max - a.gamma_min) * i / (a.n - 1);
    const StabilityBoundary bm = stability_boundary(g, ConditionKind::mn_condition);
    const StabilityBoundary bs = stability_boundary(g, ConditionKind::sharp_condition);
    rows.push_back({g, bm.exists ? bm.v_plus : nan, bs.exists ? bs.v_plus : nan,
                    bm.exists ? bm.mach : nan, bs.exists ? bs.mach : nan});
    if (bm.exists) mn.x.push_back(g), mn.y.push_back(bm.v_plus);
    if (bs.exists) sharp.x.push_back(g), sharp.y.push_back(bs.v_plus);
    for (std::size_t k = 0; k < iso.size(); ++k) {
      iso[k].x.push_back(g);
      iso[k].y.push_back(vplus_from_mach(g, std::array{2.0, 5.0, 10.0}[k]));
    }
  }
  o.write(o.primary,
          art::csv({"gamma", "vplus_mn", "vplus_sharp", "mach_mn", "mach_sharp"}, rows, config));

  art::Panel map{"Energy-estimate stability boundaries", "gamma", "v+", {mn, sharp}, false, true};
  for (auto& s : iso) map.series.push_back(std::move(s));
  o.write(o.sibling(".svg"), art::emit_svg(art::SvgKind::boundary_map, {map}, config));

  // g along the profile for one shock, on a log-spaced vhat grid.
  const ShockParams p = ShockParams::from_vplus(a.g_gamma, a.g_vplus);
  std::vector<std::vector<double>> grows;
  art::Series gs{"g", {}, {}};
  const double lo = std::log(p.v_plus), hi = std::log(1.0);
  for (int k = 1; k < a.g_points; ++k) {
    const double v = std::exp(lo + (hi - lo) * k / a.g_points);
    const double g = g_eval(v, p);
    grows.push_back({v, g});
    gs.x.push_back(v);
    gs.y.push_back(g);
  }
  o.write(o.sibling("_g_curve.csv"), art::csv({"vhat", "g"}, grows, config));
  art::Panel gp{"g(vhat), gamma = " + art::format_number(p.gamma) +
                    ", v+ = " + art::format_number(p.v_plus),
                "vhat", "g", {gs, {"", {p.v_plus, 1.0}, {0.0, 0.0}, true}}, true, false};
  o.write(o.sibling("_g_curve.svg"), art::emit_svg(art::SvgKind::g_curve, {gp}, config));
  return kSuccess;
}

// ---------------------------------------------------------------- evans

struct EvansCmdArgs {
  ShockArgs shock;
  EvansArgs evans;
  double lambda_re = 1.0;
  double lambda_im = 0.0;
  std::string out = "evans.json";
};

int run_evans(const EvansCmdArgs& a, const Outputs& o, const std::string& config) {
  const ShockParams p = a.shock.resolve();
  const auto [Lm, Lp] = lengths(a.evans, p);
  const EvansSystem sys(p, Lm, Lp, evans_options(a.evans));
  const Complex lambda(a.lambda_re, a.lambda_im);
  const EvansEvaluation ev = evaluate_evans(sys, lambda);
  json body = params_json(p);
  body["lambda"] = complex_json(lambda);
  body["D_re"] = ev.D.real();
  body["D_im"] = ev.D.imag();
  body["L_minus"] = Lm;
  body["L_plus"] = Lp;
  auto warnings = p.warnings();
  warnings.insert(warnings.end(), ev.warnings.begin(), ev.warnings.end());
  body["warnings"] = warnings;
  o.write(o.primary, dump(art::document(body, config)));
  o.log << "D(" << art::format_number(lambda.real()) << (lambda.imag() < 0 ? "" : "+")
        << art::format_number(lambda.imag()) << "i) = " << art::format_number(ev.D.real())
        << (ev.D.imag() < 0 ? "" : "+") << art::format_number(ev.D.imag()) << "i\n";
  return kSuccess;
}

// ---------------------------------------------------------------- winding

struct ContourArgs {
  int points = 60;
  double safety = 1.1;
  double r0 = 1e-4;
  bool full_chain = false;
};

void add_contour_options(CLI::App* sub, ContourArgs& c) {
  sub->add_option("--points", c.points, "Contour nodes (even, >= 16)")->capture_default_str();
  sub->add_option("--safety", c.safety, "Radius factor over the high-frequency bound")
      ->capture_default_str();
  sub->add_option("--r0", c.r0, "Indentation radius around the origin")->capture_default_str();
  sub->add_flag("--full-chain", c.full_chain,
                "Continue around the whole contour instead of mirroring the upper half");
}

ContourOptions contour_options(const ContourArgs& c) {
  ContourOptions o;
  o.n_points = c.points;
  o.safety = c.safety;
  o.r0 = c.r0;
  o.symmetric = !c.full_chain;
  return o;
}

struct WindingArgs {
  ShockArgs shock;
  EvansArgs evans;
  ContourArgs contour;
  std::string out = "winding.json";
};

int run_winding(const WindingArgs& a, const Outputs& o, const std::string& config) {
  const ShockParams p = a.shock.resolve();
  const auto [Lm, Lp] = lengths(a.evans, p);
  const EvansSystem sys(p, Lm, Lp, evans_options(a.evans));
  const ContourReport rep = evaluate_contour(sys, contour_options(a.contour));

  json body = params_json(p);
  body["L_minus"] = Lm;
  body["L_plus"] = Lp;
  body["radius"] = rep.contour.radius();
  body["r0"] = rep.contour.indentation_radius();
  body["n_points"] = a.contour.points;
  body["winding"] = rep.winding;
  body["turns"] = rep.turns;
  body["refinements"] = rep.refinements;
  body["max_arg_step"] = rep.max_arg_step;
  body["stable"] = rep.stable;
  body["warnings"] = rep.warnings;
  json pts = json::array();
  std::vector<std::vector<double>> rows;
  art::Series contour{"contour", {}, {}, false, true}, image{"D", {}, {}, false, true};
  for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
    const Complex l = rep.lambdas[i], d = rep.D_values[i];
    pts.push_back(json{{"s", rep.params[i]},
                       {"lambda_re", l.real()},
                       {"lambda_im", l.imag()},
                       {"D_re", d.real()},
                       {"D_im", d.imag()},
                       {"arg_step", i < rep.arg_steps.size() ? rep.arg_steps[i] : 0.0}});
    rows.push_back({l.real(), l.imag(), d.real(), d.imag()});
    contour.x.push_back(l.real());
    contour.y.push_back(l.imag());
    image.x.push_back(d.real());
    image.y.push_back(d.imag());
  }
  body["points"] = pts;
  o.write(o.primary, dump(art::document(body, config)));
  o.write(o.sibling(".csv"), art::csv({"lambda_re", "lambda_im", "D_re", "D_im"}, rows, config));
  art::Panel left{"Contour in the lambda plane", "Re lambda", "Im lambda", {contour}};
  art::Panel right{"Image under D", "Re D", "Im D",
                   {image, {"origin", {0.0}, {0.0}, false, true}}};
  o.write(o.sibling(".svg"), art::emit_svg(art::SvgKind::contour_pair, {left, right}, config));
  o.log << "winding " << rep.winding << " (turns " << art::format_number(rep.turns) << ", "
        << rep.refinements << " refinements)\n";
  return rep.winding == 0 ? kSuccess : kUnstable;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string gamma_list = "1.1,1.4,1.6666666666666667,2,3";
  double mach_min = 1.6;
  double mach_max = 3000.0;
  int n_mach = 10;
  bool log_scale = false;  // the default; the flag only makes it explicit
  bool linear_scale = false;
  unsigned jobs = 1;
  bool analytic_shortcut = false;
  EvansArgs evans;
  ContourArgs contour;
  std::string out = "sweep.csv";
};

int run_sweep(const SweepArgs& a, const Outputs& o, const std::string& config) {
  SweepOptions so;
  so.gammas = parse_list(a.gamma_list, "--gamma-list");
  so.mach_min = a.mach_min;
  so.mach_max = a.mach_max;
  so.n_mach = a.n_mach;
  so.log_scale = !a.linear_scale;
  so.jobs = a.jobs;
  so.analytic_shortcut = a.analytic_shortcut;
  so.theta = a.evans.theta;
  so.L_cap = a.evans.L ? *a.evans.L : a.evans.L_cap;
  if (a.evans.L) so.theta = 1e-300;  // the lengths then always hit the cap
  so.contour = contour_options(a.contour);
  so.evans = evans_options(a.evans);
  const std::vector<SweepRow> rows = sweep(so);

  std::vector<std::vector<double>> table;
  json list = json::array();
  int code = kSuccess;
  for (const SweepRow& r : rows) {
    table.push_back({r.gamma, r.mach, r.v_plus, r.L_minus, r.L_plus, double(r.winding), r.turns,
                     double(r.refinements), r.max_arg_step, r.analytic ? 1.0 : 0.0,
                     r.ok ? 1.0 : 0.0});
    list.push_back(json{{"gamma", r.gamma}, {"mach", r.mach},      {"v_plus", r.v_plus},
                        {"winding", r.winding}, {"analytic", r.analytic}, {"ok", r.ok},
                        {"error", r.error}});
    if (!r.ok) {
      code = kNumericalFailure;
      o.log << "gamma " << art::format_number(r.gamma) << ", M " << art::format_number(r.mach)
            << ": " << r.error << '\n';
    } else if (r.winding != 0 && code == kSuccess) {
      code = kUnstable;
    }
  }
  o.write(o.primary,
          art::csv({"gamma", "mach", "v_plus", "L_minus", "L_plus", "winding", "turns",
                    "refinements", "max_arg_step", "analytic", "ok"},
                   table, config));
  o.write(o.sibling(".json"), dump(art::document(json{{"rows", list}}, config)));
  std::size_t nonzero = std::count_if(rows.begin(), rows.end(),
                                      [](const SweepRow& r) { return r.ok && r.winding != 0; });
  o.log << rows.size() << " points, " << nonzero << " nonzero windings\n";
  return code;
}

// ---------------------------------------------------------------- evolve

struct EvolveArgs {
  ShockArgs shock;
  double domain = 75.0;
  int n = 2000;
  double dt_ratio = 0.5;
  double T = 50.0;
  double amp = 0.05;
  double width = 2.0;
  double center = -10.0;
  std::string snapshots;
  double report_interval = 1.0;
  std::string coefficients = "lagged";
  double newton_tol = 1e-10;
  std::string out = "evolve.json";
};

int run_evolve(const EvolveArgs& a, const Outputs& o, const std::string& config) {
  const ShockParams p = a.shock.resolve();
  const Grid1D grid = Grid1D::uniform(-a.domain, a.domain, a.n, a.dt_ratio);
  Perturbation pert;
  pert.amplitude = a.amp;
  pert.width = a.width;
  pert.center = a.center;
  SimulationOptions so;
  so.T = a.T;
  if (!a.snapshots.empty()) so.snapshot_times = parse_list(a.snapshots, "--snapshots");
  so.report_interval = a.report_interval;
  so.newton.tol = a.newton_tol;
  so.scheme.coefficients =
      a.coefficients == "centered" ? CoefficientMode::centered : CoefficientMode::lagged;
  const SimulationReport rep = simulate(p, grid, pert, so);

  json body = params_json(p);
  body["grid"] = json{{"x_left", grid.x_left}, {"x_right", grid.x_right}, {"n", grid.n},
                      {"dx", grid.dx},         {"dt", grid.dt}};
  body["shift"] = rep.shift;
  body["final_residual"] = rep.final_residual;
  body["initial_perturbation_norm"] = rep.initial_perturbation_norm;
  body["steps"] = rep.steps;
  body["max_newton_iterations"] = rep.max_newton_iterations;
  body["mean_newton_iterations"] = rep.mean_newton_iterations;
  json hist = json::array();
  for (std::size_t i = 0; i < rep.history_time.size(); ++i)
    hist.push_back(json{{"t", rep.history_time[i]},
                        {"shift", rep.history_shift[i]},
                        {"residual", rep.history_residual[i]}});
  body["residual_history"] = hist;

  const Eigen::VectorXd x = grid.nodes();
  std::vector<art::Panel> panels;
  json files = json::array();
  for (std::size_t k = 0; k < rep.snapshots.size(); ++k) {
    const Snapshot& s = rep.snapshots[k];
    std::vector<std::vector<double>> rows;
    for (Eigen::Index j = 0; j < x.size(); ++j) rows.push_back({x(j), s.v(j), s.u(j)});
    const fs::path path = o.sibling("_snapshot_" + std::to_string(k) + ".csv");
    o.write(path, art::csv({"x", "v", "u"}, rows, config));
    files.push_back(json{{"t", s.time}, {"file", path.filename().string()}});
    std::vector<double> xv(x.data(), x.data() + x.size());
    panels.push_back({"t = " + art::format_number(s.time), "x", "v, u",
                      {{"v", xv, {s.v.data(), s.v.data() + s.v.size()}},
                       {"u", xv, {s.u.data(), s.u.data() + s.u.size()}, true}}});
  }
  body["snapshots"] = files;
  o.write(o.primary, dump(art::document(body, config)));
  if (panels.size() == 4)
    o.write(o.sibling(".svg"), art::emit_svg(art::SvgKind::snapshot_panel, panels, config));
  else
    o.log << "snapshot panel needs exactly 4 snapshots; SVG skipped\n";
  o.log << "shift " << art::format_number(rep.shift) << ", residual after fit "
        << art::format_number(rep.final_residual) << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  ShockArgs shock;
  EvansArgs evans;
  ContourArgs contour;
  int real_samples = 200;
  int conj_samples = 20;
  std::string out = "validate.json";
};

int run_validate(const ValidateArgs& a, const Outputs& o, const std::string& config) {
  const ShockParams p = a.shock.resolve();
  const auto [Lm, Lp] = lengths(a.evans, p);
  const EvansSystem sys(p, Lm, Lp, evans_options(a.evans));
  json checks = json::array();
  bool all = true;
  auto check = [&](const std::string& name, bool ok, json detail) {
    checks.push_back(json{{"name", name}, {"passed", ok}, {"detail", std::move(detail)}});
    all = all && ok;
    o.log << (ok ? "PASS " : "FAIL ") << name << '\n';
  };

  const DecayReport decay = validate_profile_decay(sys.profile());
  check("profile decay envelopes", decay.passed,
        json{{"applicable", decay.applicable}, {"worst_margin", decay.worst_margin}});

  const RealAxisScan scan = real_axis_scan(sys, a.real_samples, a.contour.r0);
  check("real axis: no sign change", scan.sign_changes == 0 && scan.max_imag_ratio <= 1e-6,
        json{{"sign_changes", scan.sign_changes}, {"max_imag_ratio", scan.max_imag_ratio}});

  const ContourOptions base = contour_options(a.contour);
  const ContourReport rep = evaluate_contour(sys, base);
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<std::size_t> pick(0, rep.lambdas.size() - 1);
  double worst = 0.0;
  for (int k = 0; k < a.conj_samples; ++k) {
    const Complex l = rep.lambdas[pick(rng)];
    const Complex d1 = evaluate_evans(sys, l).D, d2 = evaluate_evans(sys, std::conj(l)).D;
    worst = std::max(worst, std::abs(d1 - std::conj(d2)) / std::abs(d1));
  }
  check("conjugate symmetry", worst <= 1e-8, json{{"max_relative_error", worst}});

  ContourOptions fine = base, wide = base;
  fine.n_points *= 2;
  wide.safety = 1.3;
  const int w_fine = evaluate_contour(sys, fine).winding;
  const int w_wide = evaluate_contour(sys, wide).winding;
  check("winding invariant under refinement and radius",
        w_fine == rep.winding && w_wide == rep.winding,
        json{{"winding", rep.winding}, {"mesh_x2", w_fine}, {"safety_1.3", w_wide}});

  json body = params_json(p);
  body["L_minus"] = Lm;
  body["L_plus"] = Lp;
  body["winding"] = rep.winding;
  body["checks"] = checks;
  o.write(o.primary, dump(art::document(body, config)));
  if (rep.winding != 0) return kUnstable;
  return all ? kSuccess : kNumericalFailure;
}

// ---------------------------------------------------------------- dispatch

std::vector<std::string> long_names(const CLI::App& app) {
  std::vector<std::string> names;
  for (const CLI::Option* opt : app.get_options())
    for (const std::string& n : opt->get_lnames()) names.push_back("--" + n);
  for (const CLI::App* sub : app.get_subcommands({})) {
    auto more = long_names(*sub);
    names.insert(names.end(), more.begin(), more.end());
  }
  return names;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::string suggest_option(const std::string& flag, const std::vector<std::string>& known) {
  const std::string key = flag.substr(0, flag.find('='));
  std::string best;
  std::size_t best_d = 4;
  for (const std::string& k : known) {
    const std::size_t d = edit_distance(key, k);
    if (d < best_d) best_d = d, best = k;
  }
  return best;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evans-function stability analysis of viscous shock profiles of the isentropic "
               "p-system",
               "evanshock"};
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file with one section per subcommand");
  app.require_subcommand(1);
  std::string out_dir = ".";
  app.add_option("--out-dir", out_dir, "Directory for all artifacts")->capture_default_str();

  ProfileArgs profile;
  auto* c_profile = app.add_subcommand("profile", "Viscous shock profile on [-L, L]");
  add_shock_options(c_profile, profile.shock);
  c_profile->add_option("--L", profile.L, "Half-length of the domain")->capture_default_str();
  c_profile->add_option("--tol", profile.tol, "Local error tolerance")->capture_default_str();
  c_profile->add_option("--centering", profile.centering, "decay_bound or midpoint")
      ->check(CLI::IsMember({"decay_bound", "midpoint"}))
      ->capture_default_str();
  c_profile->add_option("--out", profile.out, "CSV x,vhat,vhat_prime (JSON alongside)")
      ->capture_default_str();

  BoundsArgs bounds;
  auto* c_bounds = app.add_subcommand("bounds", "Energy-estimate stability boundaries and g");
  c_bounds->add_option("--gamma-min", bounds.gamma_min)->capture_default_str();
  c_bounds->add_option("--gamma-max", bounds.gamma_max)->capture_default_str();
  c_bounds->add_option("--n", bounds.n, "Number of gamma values")->capture_default_str();
  c_bounds->add_option("--g-gamma", bounds.g_gamma, "gamma of the g curve")->capture_default_str();
  c_bounds->add_option("--g-vplus", bounds.g_vplus, "v+ of the g curve")->capture_default_str();
  c_bounds->add_option("--g-points", bounds.g_points)->capture_default_str();
  c_bounds->add_option("--out", bounds.out, "CSV gamma,vplus_mn,vplus_sharp,mach_mn,mach_sharp")
      ->capture_default_str();

  EvansCmdArgs evans;
  auto* c_evans = app.add_subcommand("evans", "Evans function at one lambda");
  add_shock_options(c_evans, evans.shock);
  add_evans_options(c_evans, evans.evans);
  c_evans->add_option("--lambda-re", evans.lambda_re)->capture_default_str();
  c_evans->add_option("--lambda-im", evans.lambda_im)->capture_default_str();
  c_evans->add_option("--out", evans.out)->capture_default_str();

  WindingArgs winding;
  auto* c_winding = app.add_subcommand("winding", "Winding number of D around the contour");
  add_shock_options(c_winding, winding.shock);
  add_evans_options(c_winding, winding.evans);
  add_contour_options(c_winding, winding.contour);
  c_winding->add_option("--out", winding.out, "JSON report (CSV and SVG alongside)")
      ->capture_default_str();

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "Winding numbers over a (gamma, Mach) grid");
  c_sweep->add_option("--gamma-list", sw.gamma_list, "Comma-separated gamma values")
      ->capture_default_str();
  c_sweep->add_option("--mach-min", sw.mach_min)->capture_default_str();
  c_sweep->add_option("--mach-max", sw.mach_max)->capture_default_str();
  c_sweep->add_option("--n-mach", sw.n_mach)->capture_default_str();
  auto* log_flag = c_sweep->add_flag("--log-scale", sw.log_scale, "Log-spaced Mach grid (default)");
  c_sweep->add_flag("--linear-scale", sw.linear_scale, "Evenly spaced Mach grid")
      ->excludes(log_flag);
  auto* jobs = c_sweep->add_option("--jobs", sw.jobs, "Worker threads (0: all cores)")
                   ->capture_default_str();
  c_sweep->add_flag("--analytic-shortcut", sw.analytic_shortcut,
                    "Skip points the sharp energy condition already proves stable");
  add_evans_options(c_sweep, sw.evans);
  add_contour_options(c_sweep, sw.contour);
  c_sweep->add_option("--out", sw.out)->capture_default_str();

  EvolveArgs ev;
  auto* c_evolve = app.add_subcommand("evolve", "Time evolution of a perturbed profile");
  add_shock_options(c_evolve, ev.shock);
  c_evolve->add_option("--domain", ev.domain, "Half-width of [-domain, domain]")
      ->capture_default_str();
  c_evolve->add_option("--n", ev.n, "Interior grid points")->capture_default_str();
  c_evolve->add_option("--dt-ratio", ev.dt_ratio, "dt / dx")->capture_default_str();
  c_evolve->add_option("--T", ev.T, "Final time")->capture_default_str();
  c_evolve->add_option("--perturb-amp", ev.amp)->capture_default_str();
  c_evolve->add_option("--perturb-width", ev.width)->capture_default_str();
  c_evolve->add_option("--perturb-center", ev.center)->capture_default_str();
  c_evolve->add_option("--snapshots", ev.snapshots, "Comma-separated times (default 0,T/10,T/3,T)");
  c_evolve->add_option("--report-interval", ev.report_interval)->capture_default_str();
  c_evolve->add_option("--coefficients", ev.coefficients, "lagged or centered")
      ->check(CLI::IsMember({"lagged", "centered"}))
      ->capture_default_str();
  c_evolve->add_option("--newton-tol", ev.newton_tol)->capture_default_str();
  c_evolve->add_option("--out", ev.out)->capture_default_str();

  ValidateArgs val;
  auto* c_validate = app.add_subcommand("validate", "Property checks for one shock");
  add_shock_options(c_validate, val.shock);
  add_evans_options(c_validate, val.evans);
  add_contour_options(c_validate, val.contour);
  c_validate->add_option("--real-samples", val.real_samples)->capture_default_str();
  c_validate->add_option("--conj-samples", val.conj_samples)->capture_default_str();
  c_validate->add_option("--out", val.out)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "evanshock: " << e.what() << '\n';
    if (const auto* extras = dynamic_cast<const CLI::ExtrasError*>(&e)) {
      (void)extras;
      for (const std::string& a : args)
        if (a.rfind("--", 0) == 0) {
          const auto names = long_names(app);
          if (std::find(names.begin(), names.end(), a.substr(0, a.find('='))) != names.end())
            continue;
          const std::string s = suggest_option(a, names);
          if (!s.empty()) err << "unknown option " << a << "; did you mean " << s << "?\n";
        }
    }
    if (args.empty()) err << app.help();
    else err << "run with --help for usage\n";
    return kUsage;
  }

  if (const char* env = std::getenv("EVANSHOCK_JOBS"); env && *env && c_sweep->parsed()) {
    try {
      sw.jobs = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      err << "evanshock: EVANSHOCK_JOBS must be a non-negative integer\n";
      return kUsage;
    }
    jobs->clear();
    jobs->add_result(env);
  }

  // Effective configuration: global options plus the chosen subcommand's.
  std::string config;
  {
    const std::string active = app.get_subcommands().front()->get_name() + ".";
    std::istringstream all(app.config_to_str(true, false));
    for (std::string line; std::getline(all, line);) {
      const std::size_t eq = line.find('=');
      const std::string key = line.substr(0, eq);
      if (key.find('.') == std::string::npos || key.rfind(active, 0) == 0) config += line + '\n';
    }
  }
  auto outputs = [&](const std::string& name) {
    return Outputs{out_dir, fs::path(out_dir) / name, out};
  };

  try {
    if (c_profile->parsed()) return run_profile(profile, outputs(profile.out), config);
    if (c_bounds->parsed()) return run_bounds(bounds, outputs(bounds.out), config);
    if (c_evans->parsed()) return run_evans(evans, outputs(evans.out), config);
    if (c_winding->parsed()) return run_winding(winding, outputs(winding.out), config);
    if (c_sweep->parsed()) return run_sweep(sw, outputs(sw.out), config);
    if (c_evolve->parsed()) return run_evolve(ev, outputs(ev.out), config);
    if (c_validate->parsed()) return run_validate(val, outputs(val.out), config);
  } catch (const DomainError& e) {
    err << "evanshock: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "evanshock: " << e.what() << '\n';
    return kNumericalFailure;
  }
  err << app.help();
  return kUsage;
}

}  // namespace evanshock::cli
