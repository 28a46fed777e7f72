#include "evanshock/evans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "evanshock/bounds.hpp"

namespace evanshock {

namespace {

// Bilinear cross product (no conjugation).
Vector3c cross(const Vector3c& a, const Vector3c& b) {
  return Vector3c(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

template <typename V>
V largest_cross(const V& x0, const V& x1, const V& x2) {
  const Vector3c c[3] = {cross(x0.transpose(), x1.transpose()),
                         cross(x0.transpose(), x2.transpose()),
                         cross(x1.transpose(), x2.transpose())};
  int best = 0;
  for (int k = 1; k < 3; ++k)
    if (c[k].norm() > c[best].norm()) best = k;
  if constexpr (V::RowsAtCompileTime == 1)
    return c[best].transpose();
  else
    return c[best];
}

// Unit length with the largest-modulus entry real and positive.
template <typename V>
V normalized_seed(const V& x) {
  Eigen::Index k = 0;
  x.cwiseAbs().maxCoeff(&k);
  const Complex phase = std::abs(x(k)) > 0 ? std::conj(x(k)) / std::abs(x(k)) : Complex(1.0);
  return (x * phase / x.norm()).eval();
}

std::string format_complex(Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

std::string format_spectrum(const std::array<Complex, 3>& s) {
  return "{" + format_complex(s[0]) + ", " + format_complex(s[1]) + ", " + format_complex(s[2]) +
         "}";
}

std::array<Complex, 3> endstate_roots(Complex lambda, double vhat, double f) {
  const auto k = characteristic_coefficients<double>(lambda, vhat, f);
  return cubic_roots(k[0], k[1], k[2]);
}

double gap_to_others(const std::array<Complex, 3>& roots, std::size_t i) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < 3; ++j)
    if (j != i) gap = std::min(gap, std::abs(roots[j] - roots[i]));
  return gap;
}

EndstateMode make_mode(const Matrix3c& A, const std::array<Complex, 3>& roots, std::size_t i) {
  EndstateMode m;
  m.mu = roots[i];
  m.right = right_eigenvector(A, m.mu);
  m.left = left_eigenvector(A, m.mu);
  m.projector = spectral_projector(m.right, m.left);
  m.gap = gap_to_others(roots, i);
  return m;
}

// Index of the single root with positive real part.
std::size_t unstable_index(const std::array<Complex, 3>& roots, Complex lambda, const char* side) {
  double scale = 0.0;
  for (const Complex& r : roots) scale = std::max(scale, std::abs(r));
  const double tiny = 1e-13 * std::max(scale, 1.0);
  std::size_t count = 0, index = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (std::abs(roots[i].real()) <= tiny)
      throw SplittingError(std::string("split_eigen: eigenvalue on the imaginary axis at ") + side +
                               " infinity, lambda=" + format_complex(lambda) +
                               ", eigenvalues " + format_spectrum(roots),
                           lambda);
    if (roots[i].real() > 0.0) {
      ++count;
      index = i;
    }
  }
  if (count != 1)
    throw SplittingError(std::string("split_eigen: expected one unstable eigenvalue at ") + side +
                             " infinity, found " + std::to_string(count) +
                             ", lambda=" + format_complex(lambda) + ", eigenvalues " +
                             format_spectrum(roots),
                         lambda);
  return index;
}

// Root nearest to `previous`; rejects ambiguous matches.
std::size_t track(const std::array<Complex, 3>& roots, Complex previous) {
  std::array<double, 3> d;
  for (std::size_t i = 0; i < 3; ++i) d[i] = std::abs(roots[i] - previous);
  const std::size_t best = static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
  for (std::size_t i = 0; i < 3; ++i)
    if (i != best && d[i] < 2.0 * d[best] && d[best] > 1e-14 * (1.0 + std::abs(previous)))
      throw KatoStepTooLarge("kato_continue: eigenvalue tracking is ambiguous");
  return best;
}

}  // namespace

std::array<Complex, 3> cubic_roots(Complex b, Complex c, Complex d) {
  const Complex b3 = b / 3.0;
  const Complex p = c - b * b3;
  const Complex q = 2.0 * b3 * b3 * b3 - b3 * c + d;
  const Complex s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  const Complex w1 = -q / 2.0 + s, w2 = -q / 2.0 - s;
  const Complex w = std::abs(w1) >= std::abs(w2) ? w1 : w2;

  std::array<Complex, 3> t{};
  if (std::abs(w) == 0.0) {
    t.fill(Complex(0.0));
  } else {
    const Complex u = std::pow(w, 1.0 / 3.0);
    const Complex omega(-0.5, std::sqrt(3.0) / 2.0);
    Complex uk = u;
    for (auto& tk : t) {
      tk = uk - p / (3.0 * uk);
      uk *= omega;
    }
  }

  std::array<Complex, 3> roots;
  auto poly = [&](Complex z) { return ((z + b) * z + c) * z + d; };
  auto dpoly = [&](Complex z) { return (3.0 * z + 2.0 * b) * z + c; };
  for (std::size_t k = 0; k < 3; ++k) {
    Complex z = t[k] - b3;
    const Complex dz = dpoly(z);
    if (std::abs(dz) > 0.0) {
      const Complex polished = z - poly(z) / dz;
      if (std::abs(poly(polished)) < std::abs(poly(z))) z = polished;
    }
    roots[k] = z;
  }
  return roots;
}

Vector3c right_eigenvector(const Matrix3c& A, Complex mu) {
  const Matrix3c M = A - mu * Matrix3c::Identity();
  return largest_cross<RowVector3c>(M.row(0), M.row(1), M.row(2)).transpose();
}

RowVector3c left_eigenvector(const Matrix3c& A, Complex mu) {
  const Matrix3c M = A - mu * Matrix3c::Identity();
  return largest_cross<Vector3c>(M.col(0), M.col(1), M.col(2)).transpose();
}

Matrix3c spectral_projector(const Vector3c& right, const RowVector3c& left) {
  const Complex pairing = left * right;
  if (std::abs(pairing) == 0.0) throw NumericalError("spectral_projector: l r = 0");
  return right * left / pairing;
}

double f_minus(const ShockParams& p) { return 1.0 - p.a * p.gamma; }

double f_plus(const ShockParams& p) { return p.v_plus - cap_h_sup(p); }

Matrix3c endstate_matrix_minus(Complex lambda, const ShockParams& p) {
  return evans_matrix<double>(lambda, 1.0, f_minus(p));
}

Matrix3c endstate_matrix_plus(Complex lambda, const ShockParams& p) {
  return evans_matrix<double>(lambda, p.v_plus, f_plus(p));
}

EvansSystem::EvansSystem(const ShockParams& params, double L_minus, double L_plus,
                         EvansOptions options)
    : EvansSystem(solve_profile(params, std::max(L_minus, L_plus),
                                ProfileOptions{.tol = options.profile_tol,
                                               .centering = options.centering}),
                  L_minus, L_plus, options) {}

EvansSystem::EvansSystem(ShockProfile profile, double L_minus, double L_plus,
                         EvansOptions options)
    : profile_(std::move(profile)), L_minus_(L_minus), L_plus_(L_plus), options_(options) {
  if (!(L_minus > 0.0 && L_plus > 0.0))
    throw DomainError("EvansSystem: truncation lengths must be positive");
  if (!(options_.match_point >= -L_minus && options_.match_point <= L_plus))
    throw DomainError("EvansSystem: match point outside [-L_minus, L_plus]");
}

Matrix3c EvansSystem::matrix(double x, Complex lambda) const {
  const double v = profile_.value(x);
  return evans_matrix<double>(lambda, v, f_coefficient(v, params()));
}

Matrix3c EvansSystem::matrix_minus(Complex lambda) const {
  return endstate_matrix_minus(lambda, params());
}

Matrix3c EvansSystem::matrix_plus(Complex lambda) const {
  return endstate_matrix_plus(lambda, params());
}

SplitEigen split_eigen(Complex lambda, const ShockParams& p) {
  if (lambda == Complex(0.0)) throw SplittingError("split_eigen: lambda = 0", lambda);
  if (lambda.real() < 0.0)
    throw SplittingError("split_eigen: Re lambda < 0 at " + format_complex(lambda), lambda);

  SplitEigen s;
  s.lambda = lambda;
  s.spectrum_minus = endstate_roots(lambda, 1.0, f_minus(p));
  s.spectrum_plus = endstate_roots(lambda, p.v_plus, f_plus(p));
  s.minus = make_mode(endstate_matrix_minus(lambda, p), s.spectrum_minus,
                      unstable_index(s.spectrum_minus, lambda, "-"));
  s.plus = make_mode(endstate_matrix_plus(lambda, p), s.spectrum_plus,
                     unstable_index(s.spectrum_plus, lambda, "+"));
  s.minus.right = normalized_seed(s.minus.right);
  s.minus.left = normalized_seed(s.minus.left);
  s.plus.right = normalized_seed(s.plus.right);
  s.plus.left = normalized_seed(s.plus.left);
  for (const EndstateMode* m : {&s.minus, &s.plus})
    if (m->gap < 1e-10)
      s.warnings.push_back("near-defective eigenvalue pair (gap " + std::to_string(m->gap) +
                           ") at lambda=" + format_complex(lambda));
  return s;
}

Vector3c kato_transport(const Matrix3c& P, const Matrix3c& P_next, const Vector3c& r) {
  const Vector3c projected = P_next * r;
  if (projected.norm() < 0.1 * r.norm())
    throw KatoStepTooLarge("kato_transport: projector rotated too far in one step");
  return P_next * (r + 0.5 * (P * (r - projected)));
}

RowVector3c kato_transport(const Matrix3c& P, const Matrix3c& P_next, const RowVector3c& l) {
  const RowVector3c projected = l * P_next;
  if (projected.norm() < 0.1 * l.norm())
    throw KatoStepTooLarge("kato_transport: projector rotated too far in one step");
  return (l + 0.5 * ((l - projected) * P)) * P_next;
}

SplitEigen kato_continue(const SplitEigen& prev, Complex lambda_next, const ShockParams& p) {
  SplitEigen s;
  s.lambda = lambda_next;
  s.spectrum_minus = endstate_roots(lambda_next, 1.0, f_minus(p));
  s.spectrum_plus = endstate_roots(lambda_next, p.v_plus, f_plus(p));
  s.minus = make_mode(endstate_matrix_minus(lambda_next, p), s.spectrum_minus,
                      track(s.spectrum_minus, prev.minus.mu));
  s.plus = make_mode(endstate_matrix_plus(lambda_next, p), s.spectrum_plus,
                     track(s.spectrum_plus, prev.plus.mu));
  s.minus.right = kato_transport(prev.minus.projector, s.minus.projector, prev.minus.right);
  s.plus.left = kato_transport(prev.plus.projector, s.plus.projector, prev.plus.left);
  // The companion vectors only feed the projectors; give them a stable scale.
  s.minus.left /= s.minus.left.norm();
  s.plus.right /= s.plus.right.norm();

  if (lambda_next.real() >= 0.0 && lambda_next != Complex(0.0)) {
    if (s.minus.mu.real() <= 0.0 || s.plus.mu.real() <= 0.0)
      s.warnings.push_back("tracked eigenvalue left the unstable half-plane at lambda=" +
                           format_complex(lambda_next));
  }
  for (const EndstateMode* m : {&s.minus, &s.plus})
    if (m->gap < 1e-10)
      s.warnings.push_back("near-defective eigenvalue pair at lambda=" +
                           format_complex(lambda_next));
  return s;
}

namespace {

SplitEigen step_with_bisection(const SplitEigen& from, Complex to, const ShockParams& p,
                               int depth) {
  try {
    return kato_continue(from, to, p);
  } catch (const KatoStepTooLarge&) {
    if (depth >= 30) throw;
    const Complex mid = 0.5 * (from.lambda + to);
    const SplitEigen half = step_with_bisection(from, mid, p, depth + 1);
    return step_with_bisection(half, to, p, depth + 1);
  }
}

}  // namespace

SplitEigen continue_to(const SplitEigen& prev, Complex target, const ShockParams& p,
                       double max_step) {
  if (!(max_step > 0.0)) throw DomainError("continue_to: max_step must be positive");
  const Complex start = prev.lambda;
  const Complex delta = target - start;
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(delta) / max_step)));
  std::vector<std::string> warnings = prev.warnings;
  SplitEigen cur = prev;
  for (int k = 1; k <= n; ++k) {
    const Complex next = k == n ? target : start + delta * (static_cast<double>(k) / n);
    cur = step_with_bisection(cur, next, p, 0);
    warnings.insert(warnings.end(), cur.warnings.begin(), cur.warnings.end());
  }
  cur.warnings = std::move(warnings);
  return cur;
}

std::vector<SplitEigen> continue_along(std::span<const Complex> points, const ShockParams& p,
                                       double max_step) {
  std::vector<SplitEigen> out;
  if (points.empty()) return out;
  out.reserve(points.size());
  out.push_back(split_eigen(points[0], p));
  for (std::size_t k = 1; k < points.size(); ++k) {
    SplitEigen next = continue_to(out.back(), points[k], p, max_step);
    next.warnings.clear();
    out.push_back(std::move(next));
  }
  return out;
}

EvansEvaluation shoot(const EvansSystem& system, const SplitEigen& basis) {
  const Complex lambda = basis.lambda;
  const EvansOptions& opt = system.options();
  const double xm = opt.match_point;
  OdeOptions ode;
  ode.abs_tol = opt.abs_tol;
  ode.rel_tol = opt.rel_tol;

  EvansEvaluation ev;
  ev.lambda = lambda;
  const Complex mu_minus = basis.minus.mu, mu_plus = basis.plus.mu;

  try {
    const Vector3c V0 = basis.minus.right;
    const double n0 = V0.norm();
    ev.forward = integrate_dopri(
        [&](double x, const Vector3c& V) -> Vector3c {
          return system.matrix(x, lambda) * V - mu_minus * V;
        },
        -system.L_minus(), xm, V0, ode,
        [&](double, const Vector3c& V) {
          const double r = V.norm() / n0;
          ev.growth_minus = std::max(ev.growth_minus, r);
          ev.decay_minus = std::min(ev.decay_minus, r);
        },
        &ev.stats_minus);

    const Vector3c W0 = basis.plus.left.transpose();
    const double m0 = W0.norm();
    const Vector3c W = integrate_dopri(
        [&](double x, const Vector3c& Wc) -> Vector3c {
          return -(system.matrix(x, lambda).transpose() * Wc) + mu_plus * Wc;
        },
        system.L_plus(), xm, W0, ode,
        [&](double, const Vector3c& Wc) {
          const double r = Wc.norm() / m0;
          ev.growth_plus = std::max(ev.growth_plus, r);
          ev.decay_plus = std::min(ev.decay_plus, r);
        },
        &ev.stats_plus);
    ev.adjoint = W.transpose();
  } catch (const NumericalError& e) {
    throw NumericalError("evans: shooting failed at lambda=" + format_complex(lambda) + ": " +
                         e.what());
  }

  const Complex pairing = (ev.adjoint * ev.forward)(0, 0);
  ev.D = xm == 0.0 ? pairing : std::exp((mu_minus - mu_plus) * xm) * pairing;

  if (ev.growth_minus > 1e3 || ev.decay_minus < 1e-3)
    ev.warnings.push_back("forward solution left [1e-3, 1e3] of its initial norm at lambda=" +
                          format_complex(lambda));
  if (ev.growth_plus > 1e3 || ev.decay_plus < 1e-3)
    ev.warnings.push_back("adjoint solution left [1e-3, 1e3] of its initial norm at lambda=" +
                          format_complex(lambda));
  ev.warnings.insert(ev.warnings.end(), basis.warnings.begin(), basis.warnings.end());
  return ev;
}

EvansEvaluation evaluate_evans(const EvansSystem& system, Complex lambda, double seed) {
  if (!(seed > 0.0)) throw DomainError("evaluate_evans: seed must be positive");
  const SplitEigen start = split_eigen(Complex(seed), system.params());
  return shoot(system, continue_to(start, lambda, system.params()));
}

EvansEvaluation evaluate_evans(const EvansSystem& system, Complex lambda) {
  return evaluate_evans(system, lambda, 1.1 * hf_bound(system.params().gamma));
}

DomainLength domain_length(double theta, const ShockParams& p) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("domain_length: theta must lie in (0, 1)");
  const double g = p.gamma;
  const double k_minus = 2.0 * g + 7.0 + 2.0 * g * g * g * (g - 1.0);
  const double k_plus = 2.0 * g + 7.0 + g * g * (g - 1.0) / p.v_plus;

  auto lengths = [&](auto log) {
    const double base = std::abs(log(1e-4)) + std::abs(log(theta));
    return std::array<double, 3>{
        2.0 * (base + std::abs(log(k_minus))) + 12.0,
        4.0 / 3.0 * (base + std::abs(log(k_plus))),
        4.0 / 3.0 * (2.0 * log(p.mach) + 4.0 + base)};
  };
  const auto ln = lengths([](double x) { return std::log(x); });
  const auto lg = lengths([](double x) { return std::log10(x); });

  DomainLength out;
  out.theta = theta;
  out.L_minus = ln[0];
  out.L_plus = ln[1];
  out.L_plus_asymptotic = ln[2];
  out.L_minus_log10 = lg[0];
  out.L_plus_log10 = lg[1];
  out.L_plus_asymptotic_log10 = lg[2];
  out.eta = 1.0 / (2.0 * g);
  out.eta_hat = 1.0 / (4.0 * g);
  if (p.v_plus > 1.0 / 12.0)
    out.notes.push_back("semigroup constants are derived for v+ <= 1/12");
  if (g > 3.0) out.notes.push_back("semigroup constants are derived for gamma in [1, 3]");
  out.notes.push_back(
      "eta = 1/(2 gamma) is the semigroup rate paired with eta_hat = 1/(4 gamma); the "
      "coefficient envelopes decay at 3/4 (x > 0) and 1/2 (x < 0); lengths use the "
      "stated formulas verbatim");
  return out;
}

double coefficient_decay_bound(Complex lambda, double x, const ShockParams& p) {
  const double g = p.gamma, l = std::abs(lambda);
  if (x >= 0.0)
    return (2.0 * l + 1.0 + g * g * (g - 1.0) / p.v_plus) / 12.0 * std::exp(-0.75 * x);
  return (2.0 * l + 1.0 + 2.0 * g * g * g * (g - 1.0)) / 4.0 * std::exp(0.5 * (x + 12.0));
}

std::vector<RelativeErrorRow> relative_error_study(const ShockParams& p,
                                                   std::span<const Complex> points,
                                                   std::span<const double> L_list,
                                                   const EvansOptions& options) {
  for (std::size_t i = 1; i < L_list.size(); ++i)
    if (!(L_list[i] > L_list[i - 1]))
      throw DomainError("relative_error_study: L_list must be ascending");
  const std::vector<SplitEigen> chain = continue_along(points, p);

  std::vector<std::vector<Complex>> values;
  for (double L : L_list) {
    const EvansSystem system(p, L, L, options);
    std::vector<Complex> d;
    d.reserve(chain.size());
    for (const SplitEigen& basis : chain) d.push_back(shoot(system, basis).D);
    values.push_back(std::move(d));
  }

  std::vector<RelativeErrorRow> rows;
  for (std::size_t i = 0; i + 1 < L_list.size(); ++i) {
    RelativeErrorRow row{L_list[i], L_list[i + 1], 0.0};
    for (std::size_t j = 0; j < chain.size(); ++j)
      row.max_relative_error = std::max(
          row.max_relative_error, std::abs(values[i][j] - values[i + 1][j]) / std::abs(values[i + 1][j]));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace evanshock
