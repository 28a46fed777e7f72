#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "evanshock/bounds.hpp"
#include "evanshock/evans.hpp"

using namespace evanshock;

namespace {

// Eigenvalues by a general-purpose dense solver, as an independent oracle.
std::vector<Complex> dense_eigenvalues(const Matrix3c& A) {
  Eigen::ComplexEigenSolver<Matrix3c> es(A, false);
  return {es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
}

double distance_to_set(Complex z, const std::vector<Complex>& set) {
  double d = INFINITY;
  for (Complex w : set) d = std::min(d, std::abs(z - w));
  return d;
}

std::vector<Complex> half_plane_grid(double radius) {
  std::vector<Complex> out;
  for (double r : {1e-4, 1e-2, 0.3, 1.0, 0.7 * radius, radius})
    for (int k = 0; k <= 12; ++k) {
      const double t = -std::numbers::pi / 2 + std::numbers::pi * k / 12;
      out.push_back(std::polar(r, t));
    }
  return out;
}

const std::vector<std::pair<double, double>> kShocks{
    {1.0, 0.3}, {1.4, 0.5}, {1.4, 1e-3}, {5.0 / 3.0, 1e-4}, {2.0, 0.05}, {3.0, 1e-3}};

}  // namespace

TEST_CASE("cubic_roots agrees with a dense eigenvalue solver on companion matrices") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Complex b(u(rng), u(rng)), c(u(rng), u(rng)), d(u(rng), u(rng));
    Matrix3c comp = Matrix3c::Zero();
    comp(0, 0) = -b;
    comp(0, 1) = -c;
    comp(0, 2) = -d;
    comp(1, 0) = 1.0;
    comp(2, 1) = 1.0;
    const auto oracle = dense_eigenvalues(comp);
    for (Complex r : cubic_roots(b, c, d)) CHECK(distance_to_set(r, oracle) < 1e-10);
  }
  // Triple root at the origin and a real double root.
  for (Complex r : cubic_roots(0.0, 0.0, 0.0)) CHECK(std::abs(r) < 1e-14);
  const auto dbl = cubic_roots(-4.0, 5.0, -2.0);  // (mu - 1)^2 (mu - 2)
  for (Complex r : dbl) CHECK(std::min(std::abs(r - 1.0), std::abs(r - 2.0)) < 1e-7);
}

TEST_CASE("characteristic polynomial matches the matrix spectrum") {
  for (Complex lambda : {Complex(0.5, 0.0), Complex(1.0, 2.0), Complex(1e-3, -3.0)})
    for (double v : {1.0, 0.4, 1e-4}) {
      const double f = -0.7;
      const auto A = evans_matrix<double>(lambda, v, f);
      const auto [b, c, d] = characteristic_coefficients<double>(lambda, v, f);
      CHECK(std::abs(b + A.trace()) < 1e-14);
      CHECK(std::abs(d + A.determinant()) < 1e-12);
      const auto oracle = dense_eigenvalues(A);
      for (Complex r : cubic_roots(b, c, d)) CHECK(distance_to_set(r, oracle) < 1e-10);
    }
}

TEST_CASE("evans_matrix reproduces the integrated eigenvalue equations") {
  // lambda v + v' - u' = 0 and lambda u + u' - h / v^(g+1) v' = u'' / v with
  // W = (u, v, v'), solved for W' and compared with A W.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto [g, vp] : kShocks) {
    const ShockParams p = ShockParams::from_vplus(g, vp);
    for (double t : {0.0, 0.2, 0.5, 0.9, 1.0}) {
      const double vh = p.v_plus + t * (1.0 - p.v_plus);
      for (int k = 0; k < 5; ++k) {
        const Complex lambda(std::abs(u(rng)) * 3, u(rng) * 3);
        const Vector3c W(Complex(u(rng), u(rng)), Complex(u(rng), u(rng)),
                         Complex(u(rng), u(rng)));
        const Complex du = lambda * W(1) + W(2);
        const Complex d2v =
            vh * (lambda * W(0) + du - h_function(vh, p) / std::pow(vh, g + 1) * W(2)) -
            lambda * W(2);
        const Vector3c expect(du, W(2), d2v);
        const Vector3c got = evans_matrix<double>(lambda, vh, f_coefficient(vh, p)) * W;
        CHECK((got - expect).norm() < 1e-10 * (1.0 + expect.norm()));
      }
    }
  }
}

TEST_CASE("endstate matrices carry the profile limits") {
  for (auto [g, vp] : kShocks) {
    const ShockParams p = ShockParams::from_vplus(g, vp);
    const Complex lambda(0.3, 0.4);
    CHECK((endstate_matrix_minus(lambda, p) -
           evans_matrix<double>(lambda, 1.0, f_coefficient(1.0, p))).norm() < 1e-12);
    CHECK((endstate_matrix_plus(lambda, p) -
           evans_matrix<double>(lambda, p.v_plus, f_coefficient(p.v_plus, p))).norm() <
          1e-9 * (1.0 + std::abs(f_plus(p))));
    CHECK(f_minus(p) == doctest::Approx(1.0 - p.a * g));
  }
}

TEST_CASE("split_eigen: one growing mode at each end over the closed right half-plane") {
  for (auto [g, vp] : kShocks) {
    const ShockParams p = ShockParams::from_vplus(g, vp);
    for (Complex lambda : half_plane_grid(1.1 * hf_bound(g))) {
      const SplitEigen s = split_eigen(lambda, p);
      for (const auto& [mode, A] :
           {std::pair{s.minus, endstate_matrix_minus(lambda, p)},
            std::pair{s.plus, endstate_matrix_plus(lambda, p)}}) {
        const auto oracle = dense_eigenvalues(A);
        int unstable = 0;
        for (Complex m : oracle) unstable += m.real() > 0.0;
        CHECK(unstable == 1);
        CHECK(mode.mu.real() > 0.0);
        CHECK(distance_to_set(mode.mu, oracle) < 1e-9 * (1.0 + std::abs(mode.mu)));
        CHECK((A * mode.right - mode.mu * mode.right).norm() < 1e-9 * (1.0 + A.norm()));
        CHECK((mode.left * A - mode.mu * mode.left).norm() < 1e-9 * (1.0 + A.norm()));
        CHECK((mode.projector * mode.projector - mode.projector).norm() <
              1e-8 * mode.projector.norm());
      }
    }
  }
  const ShockParams p = ShockParams::from_vplus(1.4, 0.5);
  CHECK_THROWS_AS(split_eigen(0.0, p), SplittingError);
  CHECK_THROWS_AS(split_eigen(Complex(-0.5, 1.0), p), SplittingError);
}

TEST_CASE("the adjoint seed annihilates the decaying modes at +infinity") {
  for (auto [g, vp] : kShocks) {
    const ShockParams p = ShockParams::from_vplus(g, vp);
    for (Complex lambda : {Complex(0.2, 0.0), Complex(1.0, 1.5), Complex(3.0, -0.5)}) {
      const SplitEigen s = split_eigen(lambda, p);
      Eigen::ComplexEigenSolver<Matrix3c> es(endstate_matrix_plus(lambda, p));
      for (int k = 0; k < 3; ++k) {
        if (es.eigenvalues()(k).real() > 0.0) continue;
        const Vector3c r = es.eigenvectors().col(k);
        CHECK(std::abs((s.plus.left * r)(0, 0)) < 1e-10 * s.plus.left.norm() * r.norm());
      }
    }
  }
}

TEST_CASE("split_eigen is conjugation equivariant") {
  for (auto [g, vp] : kShocks) {
    const ShockParams p = ShockParams::from_vplus(g, vp);
    for (Complex lambda : {Complex(0.4, 0.7), Complex(2.0, 3.0), Complex(1e-3, 1e-2)}) {
      const SplitEigen a = split_eigen(lambda, p), b = split_eigen(std::conj(lambda), p);
      CHECK(std::abs(b.minus.mu - std::conj(a.minus.mu)) < 1e-13 * (1 + std::abs(a.minus.mu)));
      CHECK((b.minus.right - a.minus.right.conjugate()).norm() < 1e-12);
      CHECK((b.plus.left - a.plus.left.conjugate()).norm() < 1e-12);
    }
  }
}

TEST_CASE("kato_transport: fixed projector and rejection") {
  const ShockParams p = ShockParams::from_vplus(1.4, 0.1);
  const SplitEigen s = split_eigen(Complex(1.0, 0.5), p);
  const Matrix3c& P = s.minus.projector;
  CHECK((kato_transport(P, P, s.minus.right) - s.minus.right).norm() < 1e-13);
  CHECK((kato_transport(s.plus.projector, s.plus.projector, s.plus.left) - s.plus.left).norm() <
        1e-13);
  // A vector in the kernel of the next projector cannot be carried over.
  const Matrix3c Q = Matrix3c::Identity() - P;
  CHECK_THROWS_AS(kato_transport(Q, P, (Q * Vector3c(1.0, 2.0, 3.0)).eval()), KatoStepTooLarge);
}

TEST_CASE("Kato continuation converges at least at second order and has trivial monodromy") {
  const ShockParams p = ShockParams::from_vplus(5.0 / 3.0, 1e-3);
  const SplitEigen start = split_eigen(Complex(1.0, 0.0), p);
  const Complex target(1.0, 2.0);

  std::vector<Vector3c> r;
  for (int n : {8, 16, 32, 64, 128})
    r.push_back(continue_to(start, target, p, 2.0 / n + 1e-12).minus.right);
  std::vector<double> diffs;
  for (std::size_t k = 0; k + 1 < r.size(); ++k) diffs.push_back((r[k] - r[k + 1]).norm());
  for (std::size_t k = 0; k + 1 < diffs.size(); ++k) {
    const double ratio = diffs[k] / diffs[k + 1];
    CHECK(ratio > 3.5);
  }

  // Around a closed circle the transported vectors come back to their start.
  std::vector<Complex> circle;
  const int n = 1000;
  for (int k = 0; k <= n; ++k)
    circle.push_back(Complex(1.5, 0.0) + 0.5 * std::polar(1.0, std::numbers::pi + 2 * std::numbers::pi * k / n));
  const auto chain = continue_along(circle, p);
  CHECK((chain.back().minus.right - chain.front().minus.right).norm() < 1e-6);
  CHECK((chain.back().plus.left - chain.front().plus.left).norm() < 1e-6);
}

TEST_CASE("Evans function: real on the real axis and symmetric under conjugation") {
  const ShockParams p = ShockParams::from_vplus(1.4, 0.05);
  const EvansSystem sys(p, 14.0, 14.0);
  for (double x : {0.05, 0.5, 2.0, 5.0}) {
    const Complex D = evaluate_evans(sys, x).D;
    CHECK(std::abs(D.imag()) < 1e-10 * std::abs(D));
    CHECK(std::abs(D) > 0.0);
  }
  for (Complex lambda : {Complex(0.3, 1.0), Complex(2.0, -3.0)}) {
    const Complex a = evaluate_evans(sys, lambda).D, b = evaluate_evans(sys, std::conj(lambda)).D;
    CHECK(std::abs(a - std::conj(b)) < 1e-8 * std::abs(a));
  }
}

TEST_CASE("Evans function satisfies the mean value property") {
  // An analytic D equals the mean of its values on a circle around the point.
  const ShockParams p = ShockParams::from_vplus(5.0 / 3.0, 0.01);
  const EvansSystem sys(p, 12.0, 12.0);
  const Complex center(1.5, 1.0);
  const double rho = 0.5;
  const int n = 64;
  std::vector<Complex> pts{Complex(1.1 * hf_bound(p.gamma))};
  for (int k = 0; k <= n; ++k) pts.push_back(center + rho * std::polar(1.0, 2 * std::numbers::pi * k / n));
  const auto chain = continue_along(pts, p, 0.01);
  Complex mean = 0.0;
  for (int k = 1; k <= n; ++k) mean += shoot(sys, chain[k]).D;
  mean /= double(n);
  const Complex D0 = evaluate_evans(sys, center).D;
  CHECK(std::abs(mean - D0) < 1e-4 * std::abs(D0));
}

TEST_CASE("Evans function does not depend on the match point or the tolerances") {
  const ShockParams p = ShockParams::from_vplus(1.4, 1e-3);
  const Complex lambda(0.8, 1.7);
  EvansOptions tight;
  tight.abs_tol = 1e-11;
  tight.rel_tol = 1e-12;
  tight.profile_tol = 1e-12;
  const Complex Dt = evaluate_evans(EvansSystem(p, 12.0, 12.0, tight), lambda).D;
  const Complex D = evaluate_evans(EvansSystem(p, 12.0, 12.0), lambda).D;
  CHECK(std::abs(Dt - D) < 1e-3 * std::abs(Dt));

  // The pairing of the forward and adjoint solutions is constant in x once
  // the exponential rescalings are undone.
  for (double xm : {-3.0, 2.0}) {
    EvansOptions o = tight;
    o.match_point = xm;
    const Complex Dm = evaluate_evans(EvansSystem(p, 12.0, 12.0, o), lambda).D;
    CHECK(std::abs(Dm - Dt) < 1e-6 * std::abs(Dt));
    o.abs_tol = EvansOptions{}.abs_tol;
    o.rel_tol = EvansOptions{}.rel_tol;
    const Complex Dd = evaluate_evans(EvansSystem(p, 12.0, 12.0, o), lambda).D;
    CHECK(std::abs(Dd - Dt) < 1e-3 * std::abs(Dt));
  }

  const EvansSystem base(p, 12.0, 12.0);
  CHECK_THROWS_AS(EvansSystem(p, 12.0, 12.0, EvansOptions{.match_point = 20.0}), DomainError);
  CHECK_THROWS_AS(evaluate_evans(base, lambda, -1.0), DomainError);
}

TEST_CASE("coefficient_decay_bound dominates |A(x) - A+-| for gamma > 1") {
  for (auto [g, vp] : std::vector<std::pair<double, double>>{
           {1.4, 1e-3}, {1.4, 1.0 / 12.0}, {5.0 / 3.0, 1e-4}, {2.0, 1e-2}, {3.0, 1e-3}}) {
    const ShockParams p = ShockParams::from_vplus(g, vp);
    const EvansSystem sys(p, 16.0, 16.0);
    for (Complex lambda : {Complex(0.1, 0.0), Complex(1.0, 2.0), Complex(0.0, 4.0)})
      for (double x = -16.0; x <= 16.0; x += 0.25) {
        const Matrix3c lim = x >= 0.0 ? sys.matrix_plus(lambda) : sys.matrix_minus(lambda);
        const double diff = (sys.matrix(x, lambda) - lim).jacobiSvd().singularValues()(0);
        CHECK(diff <= coefficient_decay_bound(lambda, x, p) * (1 + 1e-9) + 1e-12);
      }
  }
}

TEST_CASE("at gamma = 1 the plus-side envelope constant is too small") {
  // f'(v) = 2 + a gamma (gamma - 1) v^(-gamma-1) is 2 at gamma = 1, while the
  // envelope only allows 1; the violation shows up near x = 0 for small lambda.
  const ShockParams p = ShockParams::from_vplus(1.0, 1e-2);
  const EvansSystem sys(p, 16.0, 16.0);
  const Complex lambda(0.1, 0.0);
  const double diff = (sys.matrix(0.0, lambda) - sys.matrix_plus(lambda)).norm();
  CHECK(diff > coefficient_decay_bound(lambda, 0.0, p));
  const double dv = std::abs(sys.profile().value(0.0) - p.v_plus);
  CHECK(diff <= (std::sqrt(2.0) * std::abs(lambda) + 2.0) * dv * (1 + 1e-12));
}

TEST_CASE("domain_length formulas") {
  const ShockParams p = ShockParams::from_mach(5.0 / 3.0, 3000.0);
  const DomainLength d = domain_length(1e-3, p);
  CHECK(d.L_plus_asymptotic == doctest::Approx(48.17).epsilon(1e-3));
  const double base = std::log(1e4) + std::log(1e3);
  CHECK(d.L_plus_asymptotic == doctest::Approx(4.0 / 3.0 * (2 * std::log(3000.0) + 4 + base)));
  CHECK(d.L_plus_asymptotic_log10 ==
        doctest::Approx(4.0 / 3.0 * (2 * std::log10(3000.0) + 4 + 7)));
  CHECK(d.eta == doctest::Approx(0.3));
  CHECK(d.eta_hat == doctest::Approx(0.15));

  const DomainLength loose = domain_length(1e-1, p);
  CHECK(loose.L_minus < d.L_minus);
  CHECK(loose.L_plus < d.L_plus);
  CHECK(domain_length(1e-3, ShockParams::from_mach(5.0 / 3.0, 30.0)).L_plus < d.L_plus);
  CHECK(domain_length(1e-3, ShockParams::from_vplus(1.4, 0.5)).notes.size() == 2);
  CHECK_THROWS_AS(domain_length(0.0, p), DomainError);
}

TEST_CASE("relative_error_study: truncation error falls as the line grows") {
  const ShockParams p = ShockParams::from_vplus(1.4, 1e-3);
  std::vector<Complex> pts;
  const double R = 1.1 * hf_bound(p.gamma);
  for (int k = 0; k <= 10; ++k) pts.push_back(std::polar(R, std::numbers::pi / 2 * k / 10));
  for (int k = 1; k <= 10; ++k) pts.push_back(Complex(0.0, R * (1.0 - k / 10.5)));
  const std::vector<double> Ls{8.0, 10.0, 12.0, 14.0};
  const auto rows = relative_error_study(p, pts, Ls);
  REQUIRE(rows.size() == 3);
  for (std::size_t k = 0; k + 1 < rows.size(); ++k)
    CHECK(rows[k + 1].max_relative_error < rows[k].max_relative_error);
  CHECK(rows.back().max_relative_error < 1e-2);
  CHECK_THROWS_AS(relative_error_study(p, pts, std::vector<double>{10.0, 8.0}), DomainError);
}
