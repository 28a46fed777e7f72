#ifndef EVANSHOCK_EVANS_HPP
#define EVANSHOCK_EVANS_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "evanshock/model.hpp"
#include "evanshock/ode.hpp"
#include "evanshock/types.hpp"

namespace evanshock {

// Integrated eigenvalue problem written as W' = A(x, lambda) W with
// W = (u, v, v'):
//
//   A = [ 0         lambda     1            ]
//       [ 0         0          1            ]
//       [ lambda v  lambda v   f(v) - lambda ]
//
// evaluated along the profile v = vhat(x).
template <typename Scalar>
Matrix3<std::complex<Scalar>> evans_matrix(std::complex<Scalar> lambda, Scalar vhat, Scalar f) {
  using C = std::complex<Scalar>;
  Matrix3<C> A;
  A << C(0), lambda, C(1),
       C(0), C(0), C(1),
       lambda * vhat, lambda * vhat, C(f) - lambda;
  return A;
}

/// Coefficients (b, c, d) of det(mu I - A) = mu^3 + b mu^2 + c mu + d.
template <typename Scalar>
std::array<std::complex<Scalar>, 3> characteristic_coefficients(std::complex<Scalar> lambda,
                                                                Scalar vhat, Scalar f) {
  return {lambda - f, Scalar(-2) * lambda * vhat, -lambda * lambda * vhat};
}

/// Roots of mu^3 + b mu^2 + c mu + d by Cardano's formula, each polished
/// with one Newton step on the undepressed cubic.
std::array<Complex, 3> cubic_roots(Complex b, Complex c, Complex d);

/// Null vectors of A - mu I from cross products of its rows (right) or
/// columns (left); the pair with the largest product is used. Not normalized.
Vector3c right_eigenvector(const Matrix3c& A, Complex mu);
RowVector3c left_eigenvector(const Matrix3c& A, Complex mu);

/// Rank-one spectral projector r l / (l r).
Matrix3c spectral_projector(const Vector3c& right, const RowVector3c& left);

struct EvansOptions {
  double abs_tol = 1e-6;
  double rel_tol = 1e-8;
  double profile_tol = 1e-10;
  ProfileCentering centering = ProfileCentering::decay_bound;
  double match_point = 0.0;
};

/// Evans system on the truncated line [-L_minus, L_plus]. Immutable once built.
class EvansSystem {
 public:
  EvansSystem(const ShockParams& params, double L_minus, double L_plus,
              EvansOptions options = {});
  EvansSystem(ShockProfile profile, double L_minus, double L_plus, EvansOptions options = {});

  const ShockParams& params() const { return profile_.params(); }
  const ShockProfile& profile() const { return profile_; }
  double L_minus() const { return L_minus_; }
  double L_plus() const { return L_plus_; }
  const EvansOptions& options() const { return options_; }

  /// A(x, lambda); x outside the profile's domain sees the clamped profile.
  Matrix3c matrix(double x, Complex lambda) const;
  Matrix3c matrix_minus(Complex lambda) const;
  Matrix3c matrix_plus(Complex lambda) const;

 private:
  ShockProfile profile_;
  double L_minus_, L_plus_;
  EvansOptions options_;
};

/// Endstate limits f(1) = 1 - a gamma and f(v+) = v+ - cap_H(v+).
double f_minus(const ShockParams& p);
double f_plus(const ShockParams& p);
Matrix3c endstate_matrix_minus(Complex lambda, const ShockParams& p);
Matrix3c endstate_matrix_plus(Complex lambda, const ShockParams& p);

struct EndstateMode {
  Complex mu;
  Vector3c right;
  RowVector3c left;
  Matrix3c projector;
  double gap = 0.0;  // distance from mu to the other two eigenvalues
};

/// The growing modes at both ends of the line. At -infinity the right
/// eigenvector of the single unstable eigenvalue of A- seeds the forward
/// solution; at +infinity the left eigenvector of the single unstable
/// eigenvalue of A+ seeds the adjoint row solution, which is then
/// orthogonal to both decaying directions.
struct SplitEigen {
  Complex lambda;
  EndstateMode minus;  // minus.right is the initial data for V
  EndstateMode plus;   // plus.left is the initial data for the adjoint row
  std::array<Complex, 3> spectrum_minus, spectrum_plus;
  std::vector<std::string> warnings;
};

class SplittingError : public NumericalError {
 public:
  SplittingError(const std::string& what, Complex lambda) : NumericalError(what), lambda_(lambda) {}
  Complex lambda() const { return lambda_; }

 private:
  Complex lambda_;
};

/// A Kato step rotated the projector too far; the caller should subdivide.
class KatoStepTooLarge : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Fresh classification at lambda (Re lambda >= 0, lambda != 0). Vectors are
/// normalized to unit length with their largest entry real and positive, so
/// split_eigen(conj(lambda)) is the conjugate of split_eigen(lambda).
/// Throws SplittingError when the eigenvalue counts are not 1 unstable at
/// both ends.
SplitEigen split_eigen(Complex lambda, const ShockParams& p);

/// Second-order discrete Kato transport r_next = P_next [I + 1/2 P (I - P_next)] r.
/// Throws KatoStepTooLarge when |P_next r| < 0.1 |r|.
Vector3c kato_transport(const Matrix3c& P, const Matrix3c& P_next, const Vector3c& r);
/// Row version l_next = l [I + 1/2 (I - P_next) P] P_next.
RowVector3c kato_transport(const Matrix3c& P, const Matrix3c& P_next, const RowVector3c& l);

/// One continuation step from prev to lambda_next: the tracked eigenvalues
/// are the roots nearest to the previous ones, the vectors are transported.
SplitEigen kato_continue(const SplitEigen& prev, Complex lambda_next, const ShockParams& p);

/// Continues along the straight segment prev.lambda -> target with steps of
/// at most max_step, bisecting any step Kato rejects.
SplitEigen continue_to(const SplitEigen& prev, Complex target, const ShockParams& p,
                       double max_step = 0.05);

/// Continues through an ordered list of points; element 0 is a fresh seed
/// at points[0].
std::vector<SplitEigen> continue_along(std::span<const Complex> points, const ShockParams& p,
                                       double max_step = 0.05);

struct EvansEvaluation {
  Complex lambda;
  Complex D;
  Vector3c forward;      // V at the match point
  RowVector3c adjoint;   // adjoint row at the match point
  double growth_minus = 1.0;  // max |V| / |V(-L)| over the forward sweep
  double decay_minus = 1.0;   // min of the same ratio
  double growth_plus = 1.0;
  double decay_plus = 1.0;
  OdeStats stats_minus, stats_plus;
  std::vector<std::string> warnings;
};

/// Shoots V' = (A - mu- I) V from -L_minus and the row system
/// W' = -W (A - mu+ I) from +L_plus to the match point x_m and returns
/// D = exp((mu- - mu+) x_m) W(x_m) V(x_m), which is D = W(0) V(0) for x_m = 0.
EvansEvaluation shoot(const EvansSystem& system, const SplitEigen& basis);

/// D(lambda) with the analytic normalization obtained by Kato continuation
/// along the segment from the real seed point.
EvansEvaluation evaluate_evans(const EvansSystem& system, Complex lambda, double seed);
/// Same, seeded at 1.1 (sqrt(gamma) + 1/2)^2.
EvansEvaluation evaluate_evans(const EvansSystem& system, Complex lambda);

/// Truncation lengths from the gap-lemma estimates, natural logarithms.
struct DomainLength {
  double theta = 0.0;
  double L_minus = 0.0;
  double L_plus = 0.0;
  // (4/3)(2 log M + 4 + |log 1e-4| + |log theta|), the large-Mach form.
  double L_plus_asymptotic = 0.0;
  // The same three formulas read with base-10 logarithms.
  double L_minus_log10 = 0.0;
  double L_plus_log10 = 0.0;
  double L_plus_asymptotic_log10 = 0.0;
  // Ingredients of the estimate.
  double C1 = 1e4;
  double eta = 0.0;      // 1 / (2 gamma)
  double eta_hat = 0.0;  // 1 / (4 gamma)
  double coefficient_decay_plus = 0.75;
  double coefficient_decay_minus = 0.5;
  std::vector<std::string> notes;
};

DomainLength domain_length(double theta, const ShockParams& p);

/// Envelope for |A(x, lambda) - A+-(lambda)|_2: for x >= 0
/// ((2|lambda| + 1 + gamma^2 (gamma - 1) / v+) / 12) e^{-3x/4}, for x <= 0
/// ((2|lambda| + 1 + 2 gamma^3 (gamma - 1)) / 4) e^{(x + 12)/2}.
double coefficient_decay_bound(Complex lambda, double x, const ShockParams& p);

struct RelativeErrorRow {
  double L = 0.0;
  double baseline_L = 0.0;
  double max_relative_error = 0.0;
};

/// For each L but the last, max over the points of |D_L - D_next| / |D_next|
/// with L_minus = L_plus = L and the next entry of L_list as baseline.
std::vector<RelativeErrorRow> relative_error_study(const ShockParams& p,
                                                   std::span<const Complex> points,
                                                   std::span<const double> L_list,
                                                   const EvansOptions& options = {});

}  // namespace evanshock

#endif  // EVANSHOCK_EVANS_HPP
