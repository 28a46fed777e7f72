#include "evanshock/winding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "evanshock/bounds.hpp"

namespace evanshock {

Contour::Contour(double radius, double indentation_radius, int n_points)
    : radius_(radius), r0_(indentation_radius) {
  if (n_points < 16 || n_points % 2 != 0)
    throw DomainError("Contour: n_points must be even and at least 16");
  if (!(indentation_radius > 0.0 && indentation_radius < radius))
    throw DomainError("Contour: need 0 < r0 < R");
  s_.resize(n_points + 1);
  points_.resize(n_points + 1);
  for (int k = 0; k <= n_points; ++k) {
    s_[k] = static_cast<double>(k) / n_points;
    points_[k] = point(s_[k]);
  }
}

Complex Contour::point(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("Contour::point: s outside [0, 1]");
  if (s > 0.5) return std::conj(point(1.0 - s));
  if (s == 0.5) return Complex(r0_, 0.0);
  if (s == 0.0) return Complex(radius_, 0.0);

  const double R = radius_;
  const double arc = 0.5 * std::numbers::pi * R;
  const double axis = R - r0_;
  const double indent = 0.5 * std::numbers::pi * r0_;
  const double t = 2.0 * s * (arc + axis + indent);
  if (t <= arc) return std::polar(R, t / R);
  if (t <= arc + axis) return Complex(0.0, R - (t - arc));
  const double phi = std::max(0.0, 0.5 * std::numbers::pi - (t - arc - axis) / r0_);
  return std::polar(r0_, phi);
}

Contour build_contour(double gamma, int n_points, double safety, double r0) {
  if (!(safety >= 1.0)) throw DomainError("build_contour: safety must be >= 1");
  return Contour(safety * hf_bound(gamma), r0, n_points);
}

namespace {

double arg_step(Complex from, Complex to) { return std::arg(to / from); }

void check_nonzero(Complex d, double s, double near_zero) {
  if (std::abs(d) < near_zero) {
    std::ostringstream os;
    os << "winding: |D| = " << std::abs(d) << " is near zero on the contour at s=" << s
       << "; change the indentation radius or the safety factor";
    throw NumericalError(os.str());
  }
}

WindingResult finish(std::vector<double> params, std::vector<Complex> values, int refinements) {
  WindingResult w;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    w.arg_steps.push_back(arg_step(values[i], values[i + 1]));
    total += w.arg_steps.back();
  }
  w.turns = total / (2.0 * std::numbers::pi);
  w.winding = static_cast<int>(std::lround(w.turns));
  w.params = std::move(params);
  w.values = std::move(values);
  w.refinements = refinements;
  return w;
}

}  // namespace

WindingResult winding_number(std::span<const Complex> values, double near_zero) {
  if (values.size() < 2) throw DomainError("winding_number: need a closed contour");
  std::vector<double> params(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    params[i] = static_cast<double>(i) / (values.size() - 1);
    check_nonzero(values[i], params[i], near_zero);
  }
  return finish(std::move(params), {values.begin(), values.end()}, 0);
}

WindingResult winding_number(std::vector<double> params, std::vector<Complex> values,
                             const std::function<Complex(double)>& evaluate,
                             double max_arg_step, int max_depth, double near_zero) {
  if (params.size() != values.size() || values.size() < 2)
    throw DomainError("winding_number: params and values must describe a closed contour");
  for (std::size_t i = 0; i < values.size(); ++i) check_nonzero(values[i], params[i], near_zero);

  std::vector<double> out_s{params.front()};
  std::vector<Complex> out_d{values.front()};
  int refinements = 0;

  // Depth-first bisection keeps the output ordered.
  std::function<void(double, Complex, double, Complex, int)> refine =
      [&](double sa, Complex da, double sb, Complex db, int depth) {
        if (std::abs(arg_step(da, db)) < max_arg_step) {
          out_s.push_back(sb);
          out_d.push_back(db);
          return;
        }
        if (depth >= max_depth) {
          std::ostringstream os;
          os << "winding: argument step " << arg_step(da, db) << " on segment s in [" << sa
             << ", " << sb << "] still exceeds " << max_arg_step << " after " << max_depth
             << " bisections";
          throw NumericalError(os.str());
        }
        const double sm = 0.5 * (sa + sb);
        const Complex dm = evaluate(sm);
        check_nonzero(dm, sm, near_zero);
        ++refinements;
        refine(sa, da, sm, dm, depth + 1);
        refine(sm, dm, sb, db, depth + 1);
      };
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    refine(params[i], values[i], params[i + 1], values[i + 1], 0);
  return finish(std::move(out_s), std::move(out_d), refinements);
}

ContourReport evaluate_contour(const EvansSystem& system, const ContourOptions& options) {
  const ShockParams& p = system.params();
  ContourReport rep;
  rep.contour = build_contour(p.gamma, options.n_points, options.safety, options.r0);
  const Contour& contour = rep.contour;

  std::map<double, SplitEigen> bases;
  std::map<double, Complex> cache;
  std::set<std::string> warnings;

  auto lookup = [](auto& m, double s) {
    auto it = m.lower_bound(s - 1e-15);
    return it != m.end() && std::abs(it->first - s) <= 1e-15 ? it : m.end();
  };

  // Evaluation along the Kato chain, continued from the nearest known point.
  auto evaluate_chain = [&](double s) -> Complex {
    if (auto it = lookup(cache, s); it != cache.end()) return it->second;
    const Complex lambda = contour.point(s);
    SplitEigen basis = [&] {
      if (bases.empty()) return split_eigen(lambda, p);
      auto hi = bases.lower_bound(s);
      auto near = hi;
      if (hi == bases.end() ||
          (hi != bases.begin() && std::abs(std::prev(hi)->first - s) <= std::abs(hi->first - s)))
        near = std::prev(hi);
      return continue_to(near->second, lambda, p);
    }();
    for (const auto& w : basis.warnings) warnings.insert(w);
    basis.warnings.clear();
    const EvansEvaluation ev = shoot(system, basis);
    for (const auto& w : ev.warnings) warnings.insert(w);
    bases.emplace(s, std::move(basis));
    cache.emplace(s, ev.D);
    return ev.D;
  };

  auto evaluate = [&](double s) -> Complex {
    if (options.symmetric && s > 0.5) return std::conj(evaluate_chain(1.0 - s));
    return evaluate_chain(s);
  };

  const auto s_nodes = contour.params();
  std::vector<double> params(s_nodes.begin(), s_nodes.end());
  std::vector<Complex> values;
  values.reserve(params.size());
  for (double s : params) values.push_back(evaluate(s));

  WindingResult w = winding_number(std::move(params), std::move(values), evaluate,
                                   options.max_arg_step, options.max_depth, options.near_zero);
  rep.params = std::move(w.params);
  rep.D_values = std::move(w.values);
  rep.arg_steps = std::move(w.arg_steps);
  rep.lambdas.reserve(rep.params.size());
  for (double s : rep.params) rep.lambdas.push_back(contour.point(s));
  rep.winding = w.winding;
  rep.turns = w.turns;
  rep.refinements = w.refinements;
  for (double a : rep.arg_steps) rep.max_arg_step = std::max(rep.max_arg_step, std::abs(a));
  const bool closed = std::abs(rep.turns - rep.winding) < 0.05;
  if (!closed)
    rep.warnings.push_back("accumulated argument is not close to an integer (turns = " +
                           std::to_string(rep.turns) + ")");
  rep.stable = rep.winding == 0 && closed;
  rep.warnings.insert(rep.warnings.end(), warnings.begin(), warnings.end());
  return rep;
}

RealAxisScan real_axis_scan(const EvansSystem& system, int n_samples, double r0) {
  if (n_samples < 2) throw DomainError("real_axis_scan: need at least two samples");
  const ShockParams& p = system.params();
  const double top = hf_bound(p.gamma);
  if (!(r0 > 0.0 && r0 < top)) throw DomainError("real_axis_scan: need 0 < r0 < hf_bound");

  RealAxisScan scan;
  scan.lambdas.resize(n_samples);
  scan.D_values.resize(n_samples);
  for (int k = 1; k <= n_samples; ++k)
    scan.lambdas[k - 1] = k == n_samples ? top : r0 + (top - r0) * k / n_samples;

  SplitEigen basis = split_eigen(Complex(top), p);
  std::set<std::string> warnings;
  for (int k = n_samples - 1; k >= 0; --k) {
    basis = continue_to(basis, Complex(scan.lambdas[k]), p);
    const EvansEvaluation ev = shoot(system, basis);
    scan.D_values[k] = ev.D;
    warnings.insert(ev.warnings.begin(), ev.warnings.end());
    basis.warnings.clear();
  }
  for (int k = 0; k < n_samples; ++k) {
    const Complex d = scan.D_values[k];
    scan.max_imag_ratio = std::max(scan.max_imag_ratio, std::abs(d.imag()) / std::abs(d));
    if (k > 0 && (d.real() > 0.0) != (scan.D_values[k - 1].real() > 0.0)) ++scan.sign_changes;
  }
  if (scan.max_imag_ratio > 1e-6)
    scan.warnings.push_back("D is not real on the real axis (max |Im D|/|D| = " +
                            std::to_string(scan.max_imag_ratio) + ")");
  scan.warnings.insert(scan.warnings.end(), warnings.begin(), warnings.end());
  return scan;
}

std::vector<double> sweep_machs(const SweepOptions& o) {
  if (!(o.mach_min >= 1.01 && o.mach_max <= 1e4 && o.mach_min <= o.mach_max))
    throw DomainError("sweep: Mach range must lie within [1.01, 1e4]");
  if (o.n_mach < 1) throw DomainError("sweep: n_mach must be positive");
  std::vector<double> m(o.n_mach);
  for (int i = 0; i < o.n_mach; ++i) {
    if (o.n_mach == 1) {
      m[i] = o.mach_min;
    } else if (o.log_scale) {
      const double t = static_cast<double>(i) / (o.n_mach - 1);
      m[i] = std::exp(std::log(o.mach_min) + t * (std::log(o.mach_max) - std::log(o.mach_min)));
    } else {
      m[i] = o.mach_min + (o.mach_max - o.mach_min) * i / (o.n_mach - 1);
    }
  }
  m.back() = o.n_mach == 1 ? o.mach_min : o.mach_max;
  return m;
}

SweepRow sweep_point(double gamma, double mach, const SweepOptions& options) {
  SweepRow row;
  row.gamma = gamma;
  row.mach = mach;
  try {
    const ShockParams p = ShockParams::from_mach(gamma, mach);
    row.v_plus = p.v_plus;
    if (options.analytic_shortcut && sharp_condition(p).holds) {
      row.analytic = true;
      return row;
    }
    const DomainLength dl = domain_length(options.theta, p);
    row.L_minus = std::min(dl.L_minus, options.L_cap);
    row.L_plus = std::min(dl.L_plus, options.L_cap);
    const EvansSystem system(p, row.L_minus, row.L_plus, options.evans);
    const ContourReport rep = evaluate_contour(system, options.contour);
    row.winding = rep.winding;
    row.turns = rep.turns;
    row.refinements = rep.refinements;
    row.max_arg_step = rep.max_arg_step;
    if (std::abs(rep.turns - rep.winding) >= 0.05) {
      row.ok = false;
      row.error = rep.warnings.front();
    }
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

std::vector<SweepRow> sweep(const SweepOptions& options) {
  const std::vector<double> machs = sweep_machs(options);
  struct Task {
    double gamma, mach;
  };
  std::vector<Task> tasks;
  for (double g : options.gammas)
    for (double m : machs) tasks.push_back({g, m});

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++)
      rows[i] = sweep_point(tasks[i].gamma, tasks[i].mach, options);
  };
  unsigned jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                    : options.jobs;
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(tasks.size(), 1)));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return rows;
}

}  // namespace evanshock
