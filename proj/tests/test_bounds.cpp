#include <cmath>
#include <vector>

#include "doctest.h"
#include "evanshock/bounds.hpp"
#include "oracles.hpp"

using namespace evanshock;

TEST_CASE("mn_condition: weak-shock limit approaches gamma") {
  for (double g : {1.2, 1.4, 5.0 / 3.0, 2.0, 3.0}) {
    const auto rep = mn_condition(ShockParams::from_vplus(g, 1.0 - 1e-6));
    CHECK(rep.lhs_value == doctest::Approx(g).epsilon(1e-4));
    CHECK(rep.holds);
  }
}

TEST_CASE("mn_condition: gamma = 1 leaves a square") {
  for (double v : {1e-6, 1e-3, 0.3, 0.9}) {
    const ShockParams p = ShockParams::from_vplus(1.0, v);
    const double x = std::pow(v, 2.0) / p.a;
    CHECK(mn_condition(p).lhs_value == doctest::Approx(x * x));
    CHECK(mn_condition(p).holds);
  }
}

TEST_CASE("mn_condition fails for the strong gamma = 2 shock") {
  CHECK_FALSE(mn_condition(ShockParams::from_vplus(2.0, 1e-4)).holds);
}

TEST_CASE("sharp_condition: gamma = 1 reduces to 2 v+^3") {
  for (double v : {1e-3, 0.2, 0.7}) {
    const auto rep = sharp_condition(ShockParams::from_vplus(1.0, v));
    CHECK(rep.lhs_value == doctest::Approx(2 * v * v * v).epsilon(1e-12));
    CHECK(rep.holds);
    CHECK(rep.which == ConditionKind::sharp_condition);
  }
}

TEST_CASE("mn region is contained in the sharp region on a 100x100 grid") {
  int mn_count = 0, sharp_count = 0;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const double g = 1.0 + 2.0 * i / 99.0;
      const double v = 0.005 + 0.99 * j / 99.0;
      const ShockParams p = ShockParams::from_vplus(g, v);
      const bool mn = mn_condition(p).holds, sharp = sharp_condition(p).holds;
      if (mn) CHECK(sharp);
      mn_count += mn;
      sharp_count += sharp;
    }
  CHECK(sharp_count > mn_count);
}

TEST_CASE("hf_bound") {
  CHECK(hf_bound(1.0) == 2.25);
  CHECK(hf_bound(5.0 / 3.0) == doctest::Approx(3.2077).epsilon(1e-4));
  CHECK(hf_bound(3.0) == doctest::Approx(4.9821).epsilon(1e-4));
  for (double g : {1.0, 1.3, 5.0 / 3.0, 2.2, 3.0}) {
    const double s = std::sqrt(g) + 0.5;
    CHECK(std::abs(hf_bound(g) - s * s) <= 1e-12);
  }
  for (double g = 1.0; g < 3.0; g += 0.01) CHECK(hf_bound(g + 0.01) > hf_bound(g));
}

TEST_CASE("stability boundary at gamma = 1.084") {
  // Reference roots from a 30-digit bisection of the same left-hand sides.
  const auto b = stability_boundary(1.084, ConditionKind::sharp_condition);
  REQUIRE(b.exists);
  CHECK(b.v_plus == doctest::Approx(0.17613232995803862).epsilon(1e-9));
  CHECK(b.mach == doctest::Approx(2.4971913873434).epsilon(1e-9));
  const auto m = stability_boundary(1.084, ConditionKind::mn_condition);
  CHECK(m.v_plus == doctest::Approx(0.2281724837627979).epsilon(1e-9));
  CHECK(m.mach == doctest::Approx(2.1760737418191707).epsilon(1e-9));
  CHECK_FALSE(stability_boundary(1.0, ConditionKind::sharp_condition).exists);
}

TEST_CASE("stability boundary: sharp boundary lies below the small-amplitude boundary") {
  for (double g = 1.05; g <= 3.0 + 1e-12; g += 0.05) {
    const auto mn = stability_boundary(g, ConditionKind::mn_condition);
    const auto sharp = stability_boundary(g, ConditionKind::sharp_condition);
    REQUIRE(mn.exists);
    REQUIRE(sharp.exists);
    CHECK(sharp.v_plus < mn.v_plus);
    CHECK(sharp.mach > mn.mach);
  }
}

TEST_CASE("stability boundary: exits the physical range as gamma -> 1+") {
  double prev = 1.0;
  for (int k = 2; k <= 6; ++k) {
    const auto b = stability_boundary(1.0 + std::pow(10.0, -k), ConditionKind::sharp_condition);
    const double v = b.exists ? b.v_plus : 0.0;
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("g_eval: endstates and strong-shock dip") {
  const ShockParams p = ShockParams::from_vplus(2.0, 1e-4);
  CHECK(g_eval(1.0, p) == 0.0);
  CHECK(g_eval(p.v_plus, p) == 0.0);
  CHECK_THROWS_AS(g_eval(2.0, p), DomainError);
  // The dip sits within a few v+ of the right endstate.
  double gmin = 0.0;
  for (int k = 1; k < 2000; ++k)
    gmin = std::min(gmin, g_eval(p.v_plus * std::pow(1.0 / p.v_plus, k / 2000.0), p));
  CHECK(gmin < 0.0);
}

TEST_CASE("g_eval: nonnegative for a weak diatomic shock") {
  const ShockParams p = ShockParams::from_vplus(1.4, 0.9);
  REQUIRE(mn_condition(p).holds);
  for (int k = 1; k < 5000; ++k) CHECK(g_eval(0.9 + 0.1 * k / 5000.0, p) >= 0.0);
}

TEST_CASE("g_eval closed form matches the defining-derivative oracle") {
  for (double g : {1.4, 2.0, 3.0})
    for (double vp : {1e-4, 0.2, 0.8}) {
      const ShockParams p = ShockParams::from_vplus(g, vp);
      for (int k = 1; k <= 100; ++k) {
        const double v = vp + (1.0 - vp) * k / 101.0;
        const double ref = double(oracle::g_defining(v, p));
        CHECK(std::abs(g_eval(v, p) - ref) <= 1e-6 * std::abs(ref));
      }
    }
}
