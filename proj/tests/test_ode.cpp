#include <cmath>

#include "doctest.h"
#include "evanshock/ode.hpp"

using namespace evanshock;

TEST_CASE("dopri: scalar exponential decay forward and backward") {
  OdeOptions opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-12;
  const double y1 = integrate_dopri([](double, double y) { return -y; }, 0.0, 3.0, 1.0, opt);
  CHECK(y1 == doctest::Approx(std::exp(-3.0)).epsilon(1e-10));

  const double y0 = integrate_dopri([](double, double y) { return -y; }, 3.0, 0.0, y1, opt);
  CHECK(y0 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("dopri: complex vector rotation keeps its norm") {
  using V = Eigen::Vector2cd;
  const Complex i(0.0, 1.0);
  OdeOptions opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-12;
  OdeStats stats;
  const V y = integrate_dopri(
      [&](double, const V& y) -> V { return V(i * 2.0 * y(0), -1.5 * y(1)); }, 0.0, 2.0,
      V(1.0, 1.0), opt, &stats);
  CHECK(std::abs(y(0) - std::exp(i * 4.0)) < 1e-10);
  CHECK(std::abs(y(1) - std::exp(-3.0)) < 1e-10);
  CHECK(stats.accepted > 0);
}

TEST_CASE("dopri: max_step caps every accepted step and the observer sees each one") {
  OdeOptions opt;
  opt.max_step = 0.01;
  int calls = 0;
  double last_x = 0.0;
  integrate_dopri([](double, double y) { return -y; }, 0.0, 1.0, 1.0, opt,
                  [&](double x, double) {
                    CHECK(x - last_x <= 0.01 + 1e-15);
                    last_x = x;
                    ++calls;
                  });
  CHECK(calls >= 101);
  CHECK(last_x == 1.0);
}

TEST_CASE("dopri: non-finite right-hand side reports failure with a step trace") {
  OdeOptions opt;
  opt.max_steps = 50;
  CHECK_THROWS_AS(integrate_dopri([](double, double) { return std::nan(""); }, 0.0, 1.0, 1.0,
                                  opt),
                  NumericalError);
}
