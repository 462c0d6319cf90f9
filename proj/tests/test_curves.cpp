#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include "thermoflow/curves.hpp"
#include "thermoflow/sampling.hpp"

using namespace thermoflow;
using namespace tftest;

TEST_CASE("thermal curve is the diagonal") {
  std::mt19937_64 rng(3);
  auto ctx = random_context(4, rng);
  auto curve = build_curve(beta_order(thermal_state(ctx), ctx), ctx);
  for (const auto& k : curve.kinks)
    REQUIRE(k.y == Catch::Approx(k.x).margin(1e-12));
  REQUIRE(evaluate(curve, 0.37) == Catch::Approx(0.37).margin(1e-12));
}

TEST_CASE("Fig. 2 curve kinks are the cumulative sums") {
  auto ctx = trivial_context(6);
  auto curve = build_curve(beta_order(fig2_state(), ctx), ctx);
  REQUIRE(curve.kinks.size() == 7);
  const double ys[] = {0.0, 0.3, 0.55, 0.77, 0.87, 0.94, 1.0};
  for (int k = 0; k <= 6; ++k) {
    REQUIRE(curve.kinks[k].x == Catch::Approx(k / 6.0).margin(1e-12));
    REQUIRE(curve.kinks[k].y == Catch::Approx(ys[k]).margin(1e-12));
  }
  // midpoint of the first segment
  REQUIRE(evaluate(curve, 1.0 / 12) == Catch::Approx(0.15).margin(1e-12));
}

TEST_CASE("three-level curve") {
  auto ctx = three_level_context();
  auto curve = build_curve(beta_order(three_level_state(), ctx), ctx);
  const double xs[] = {0.0, 1.0 / 13, 5.0 / 13, 1.0};
  const double ys[] = {0.0, 0.1, 0.45, 1.0};
  for (int k = 0; k < 4; ++k) {
    REQUIRE(curve.kinks[k].x == Catch::Approx(xs[k]).margin(1e-12));
    REQUIRE(curve.kinks[k].y == Catch::Approx(ys[k]).margin(1e-12));
  }
}

TEST_CASE("curves from beta-ordered states are concave and end at (1,1)") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t d = 2 + trial % 5;
    auto ctx = random_context(d, rng);
    auto curve = build_curve(beta_order(random_state(d, rng), ctx), ctx);
    REQUIRE(curve.kinks.front().x == 0.0);
    REQUIRE(curve.kinks.front().y == 0.0);
    REQUIRE(curve.kinks.back().x == 1.0);
    REQUIRE(curve.kinks.back().y == 1.0);
    double prev_slope = kInf;
    for (std::size_t k = 1; k < curve.kinks.size(); ++k) {
      double dx = curve.kinks[k].x - curve.kinks[k - 1].x;
      double dy = curve.kinks[k].y - curve.kinks[k - 1].y;
      REQUIRE(dx > 0.0);
      REQUIRE(dy >= -1e-15);
      double slope = dy / dx;
      REQUIRE(slope <= prev_slope + 1e-7);
      prev_slope = slope;
    }
  }
}

TEST_CASE("evaluate is exact at kinks and rejects out-of-domain x") {
  auto ctx = trivial_context(6);
  auto curve = build_curve(beta_order(fig2_state(), ctx), ctx);
  for (const auto& k : curve.kinks) REQUIRE(evaluate(curve, k.x) == k.y);
  REQUIRE_THROWS_AS(evaluate(curve, -0.2), OutOfDomain);
  REQUIRE_THROWS_AS(evaluate(curve, 1.2), OutOfDomain);
}

TEST_CASE("unordered polyline matches the curve for the ordering permutation") {
  auto ctx = three_level_context();
  auto st = three_level_state();
  auto ord = beta_order(st, ctx);
  auto c1 = build_curve(ord, ctx);
  auto c2 = build_curve_unordered(st, ord.permutation, ctx);
  REQUIRE(c1.kinks.size() == c2.kinks.size());
  for (std::size_t k = 0; k < c1.kinks.size(); ++k) {
    REQUIRE(c1.kinks[k].x == Catch::Approx(c2.kinks[k].x).margin(1e-15));
    REQUIRE(c1.kinks[k].y == Catch::Approx(c2.kinks[k].y).margin(1e-15));
  }
  REQUIRE_THROWS_AS(build_curve_unordered(st, {0, 0, 1}, ctx), OutOfDomain);
}

TEST_CASE("reversed ordering lies below the beta-ordered curve") {
  auto ctx = three_level_context();
  auto st = three_level_state();
  auto ord = beta_order(st, ctx);
  auto upper = build_curve(ord, ctx);
  auto rev = ord.permutation;
  std::reverse(rev.begin(), rev.end());
  auto lower = build_curve_unordered(st, rev, ctx);
  auto dom = curve_dominates(upper, lower);
  REQUIRE(dom.dominates);
  // strictly below somewhere in the interior
  bool strict = false;
  for (const auto& k : lower.kinks)
    if (k.x > 0.0 && k.x < 1.0 && evaluate(upper, k.x) > k.y + 1e-9)
      strict = true;
  REQUIRE(strict);
}

TEST_CASE("any permutation of the thermal state gives the diagonal") {
  std::mt19937_64 rng(23);
  auto ctx = random_context(5, rng);
  std::vector<std::size_t> perm = {3, 0, 4, 1, 2};
  auto c = build_curve_unordered(thermal_state(ctx), perm, ctx);
  for (const auto& k : c.kinks) REQUIRE(k.y == Catch::Approx(k.x).margin(1e-12));
}

TEST_CASE("Lemma: every permutation's polyline stays below the curve") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t d = 2 + trial % 5;
    auto ctx = random_context(d, rng);
    auto st = random_state(d, rng);
    auto upper = build_curve(beta_order(st, ctx), ctx);
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto lower = build_curve_unordered(st, perm, ctx);
    REQUIRE(curve_dominates(upper, lower, 1e-9).dominates);
  }
}

TEST_CASE("curve_dominates basics and witness") {
  auto ctx = trivial_context(6);
  auto orig = build_curve(beta_order(fig2_state(), ctx), ctx);
  REQUIRE(curve_dominates(orig, orig).dominates);

  auto thermal = build_curve(beta_order(thermal_state(ctx), ctx), ctx);
  REQUIRE(curve_dominates(orig, thermal).dominates);

  BlockDiagonalState fl{{0.225, 0.225, 0.22, 0.11, 0.11, 0.11}};
  auto flat = build_curve(beta_order(fl, ctx), ctx);
  auto dom = curve_dominates(flat, orig);
  REQUIRE_FALSE(dom.dominates);
  // worst violation sits within the flattest state's first (equalized) block
  REQUIRE(dom.worst_x <= 2.0 / 6 + 1e-12);
  REQUIRE(dom.worst_gap == Catch::Approx(-0.1).margin(1e-12));
}

TEST_CASE("domination is a partial order on concave curves") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t d = 2 + trial % 4;
    auto ctx = random_context(d, rng);
    auto a = build_curve(beta_order(random_state(d, rng), ctx), ctx);
    auto b = build_curve(beta_order(random_state(d, rng), ctx), ctx);
    auto c = build_curve(beta_order(random_state(d, rng), ctx), ctx);
    REQUIRE(curve_dominates(a, a).dominates);
    if (curve_dominates(a, b).dominates && curve_dominates(b, a).dominates) {
      for (const auto& k : a.kinks)
        REQUIRE(evaluate(b, k.x) == Catch::Approx(k.y).margin(1e-8));
    }
    if (curve_dominates(a, b).dominates && curve_dominates(b, c).dominates)
      REQUIRE(curve_dominates(a, c, 1e-9).dominates);
  }
}

TEST_CASE("tied beta-orderings give the same curve") {
  // two levels with identical weight p e^{beta E}: swap them freely
  auto ctx = make_context(make_spectrum({0.0, std::log(2.0), 1.0}), 1.0);
  BlockDiagonalState st{{0.4, 0.2, 0.4}};  // weights 0.4, 0.4, 0.4 e
  auto ord = beta_order(st, ctx);
  auto c1 = build_curve(ord, ctx);
  auto swapped = ord.permutation;
  std::swap(swapped[1], swapped[2]);  // the two tied levels
  auto c2 = build_curve_unordered(st, swapped, ctx);
  for (const auto& k : c1.kinks)
    REQUIRE(evaluate(c2, k.x) == Catch::Approx(k.y).margin(1e-12));
  for (const auto& k : c2.kinks)
    REQUIRE(evaluate(c1, k.x) == Catch::Approx(k.y).margin(1e-12));
}

TEST_CASE("epsilon band holds for ball probes") {
  std::mt19937_64 rng(37);
  auto ctx = three_level_context();
  auto st = three_level_state();
  REQUIRE(epsilon_band_check(st, st, 0.1, ctx).max_deviation == 0.0);
  for (int trial = 0; trial < 1000; ++trial) {
    auto probe = ball_sample(st, 0.1, rng);
    auto band = epsilon_band_check(st, probe, 0.1, ctx);
    REQUIRE(band.inside);
    REQUIRE(band.max_deviation <= 0.1 + 1e-9);
  }
  BlockDiagonalState far{{0.0, 0.0, 1.0}};
  REQUIRE_THROWS_AS(epsilon_band_check(st, far, 0.1, ctx), NotInBall);
}

TEST_CASE("band deviation across random centers never exceeds epsilon") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t d = 2 + trial % 5;
    auto ctx = random_context(d, rng);
    auto center = random_state(d, rng);
    double eps = 0.01 + 0.3 * (trial % 7) / 7.0;
    auto probe = ball_sample(center, eps, rng);
    auto band = epsilon_band_check(center, probe, eps, ctx);
    REQUIRE(band.max_deviation <= eps + 1e-9);
  }
}

TEST_CASE("curve CSV format") {
  auto ctx = three_level_context();
  auto c = build_curve(beta_order(three_level_state(), ctx), ctx);
  auto csv = curve_to_csv(c);
  REQUIRE(csv.rfind("x,y\n", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 kinks
  auto banded = curve_to_csv(c, 0.1);
  REQUIRE(banded.rfind("x,y,y_lo,y_hi\n", 0) == 0);
}
