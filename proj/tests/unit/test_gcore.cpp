#include "gctl/gcore.hpp"
#include "gctl/gheat.hpp"
#include "gctl/grid.hpp"
#include "gctl/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gctl;

namespace {

Mat m1(double a) { return Mat::Constant(1, 1, a); }

Mat random_sym(const Philox4x32& gen, std::uint64_t path, std::uint64_t step, int d) {
  Mat a(d, d);
  std::uint32_t c = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = 2.0 * normal_at(gen, path, step, c++);
  return 0.5 * (a + a.transpose());
}

bool near(double a, double b, double rel = 1e-12) {
  return std::abs(a - b) <= rel * (1.0 + std::abs(a) + std::abs(b));
}

}  // namespace

TEST_SUITE("gcore") {

TEST_CASE("g_eval interval examples against a brute-force gamma grid") {
  auto gs = GammaSet::interval(0.5, 1.0);
  CHECK(g_eval(0.0, gs) == 0.0);
  for (double a : {2.0, -2.0, 0.7, -3.3}) {
    auto [best, arg] = oracle::g_grid(a, 0.5, 1.0);
    CHECK(g_eval(a, gs) == doctest::Approx(best).epsilon(1e-12));
    CHECK(g_eval(m1(a), gs) == doctest::Approx(best).epsilon(1e-12));
    CHECK(g_maximizer(m1(a), gs)(0, 0) == doctest::Approx(arg).epsilon(1e-12));
  }
  CHECK(g_eval(2.0, gs) == doctest::Approx(1.0));
  CHECK(g_eval(-2.0, gs) == doctest::Approx(-0.25));
}

TEST_CASE("g_maximizer tie goes to the lowest index") {
  auto gs = GammaSet::interval(0.5, 1.0);
  CHECK(g_maximizer(m1(2.0), gs)(0, 0) == 1.0);
  CHECK(g_maximizer(m1(-2.0), gs)(0, 0) == 0.5);
  CHECK(g_maximizer(m1(0.0), gs)(0, 0) == 0.5);
}

TEST_CASE("g_eval errors") {
  auto gs = GammaSet::interval(0.5, 1.0);
  CHECK_THROWS_AS(g_eval(Mat::Identity(2, 2), gs), DimensionError);
  auto fs = GammaSet::finite({Mat::Identity(2, 2)});
  Mat ns(2, 2);
  ns << 1, 0.5, 0.4, 1;
  CHECK_THROWS_AS(g_eval(ns, fs), DomainError);
  Mat almost(2, 2);
  almost << 1, 0.5, 0.5 + 1e-14, 1;
  CHECK_NOTHROW(g_eval(almost, fs));
  CHECK_THROWS_AS(GammaSet::finite({}), DomainError);
  CHECK_THROWS_AS(GammaSet::interval(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(GammaSet::interval(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(GammaSet::finite({Mat::Identity(2, 2), Mat::Identity(3, 3)}), DimensionError);
}

TEST_CASE("finite set drops duplicates and evaluates the trace formula") {
  auto fs = GammaSet::finite({Mat::Identity(2, 2), 2.0 * Mat::Identity(2, 2), Mat::Identity(2, 2)});
  CHECK(fs.extreme_points().size() == 2);
  Mat a(2, 2);
  a << 1.0, 0.3, 0.3, -2.0;
  // tr(a) = -1: the smaller element wins, 1/2 * 1 * (-1).
  CHECK(g_eval(a, fs) == doctest::Approx(-0.5));
  CHECK(g_maximizer(a, fs).isApprox(Mat::Identity(2, 2)));
  CHECK(fs.lower_variance() == doctest::Approx(1.0));
  CHECK(fs.upper_variance() == doctest::Approx(4.0));
}

TEST_CASE("G axioms on random pairs") {
  const Philox4x32 gen(7);
  auto gs = GammaSet::interval(0.5, 1.0);
  Mat r(2, 2);
  r << 0.3, 1.1, -0.4, 0.8;
  auto fs = GammaSet::finite({Mat::Identity(2, 2), 1.5 * Mat::Identity(2, 2), r});
  int failures = 0;
  for (int s = 0; s < 10000; ++s) {
    for (const GammaSet* g : {&gs, &fs}) {
      const int d = g->dim();
      Mat a = random_sym(gen, s, 0, d), b = random_sym(gen, s, 1, d);
      const double lam = 3.0 * uniform_at(gen, s, 2);
      const double ga = g_eval(a, *g), gb = g_eval(b, *g);
      if (g_eval(Mat(a + b), *g) > ga + gb + 1e-12 * (1 + std::abs(ga) + std::abs(gb))) ++failures;
      if (!near(g_eval(Mat(lam * a), *g), lam * ga)) ++failures;
      // a + p p^T >= a
      Mat p = random_sym(gen, s, 3, d);
      if (g_eval(Mat(a + p * p.transpose()), *g) < ga - 1e-12 * (1 + std::abs(ga))) ++failures;
      Mat gstar = g_maximizer(a, *g);
      if (!near(0.5 * (gstar * gstar.transpose() * a).trace(), ga)) ++failures;
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("non-degeneracy") {
  auto gs = GammaSet::interval(0.5, 1.0);
  auto rep = check_nondegeneracy(gs, 100000, 3);
  CHECK(rep.passed);
  CHECK(rep.sigma_low_sq == doctest::Approx(0.25));
  CHECK(rep.sigma_lb == doctest::Approx(0.125));
  CHECK_FALSE(rep.violation.has_value());

  // The declared sigma_low^2 itself is not a valid constant for G = 1/2 sup tr.
  auto strict = check_nondegeneracy(gs, 1000, 3, 0.25);
  CHECK_FALSE(strict.passed);
  CHECK(strict.violation.has_value());

  auto fs = GammaSet::finite({Mat::Identity(2, 2), 2.0 * Mat::Identity(2, 2)});
  auto frep = check_nondegeneracy(fs, 100000, 5);
  CHECK(frep.passed);
  CHECK(frep.sigma_lb == doctest::Approx(0.5));

  CHECK_THROWS_AS(check_nondegeneracy(gs, 0, 1), DomainError);
}

TEST_CASE("growth check") {
  auto sq = TestFunction::scalar([](double x) { return x * x; }, 1, 1.0);
  CHECK_FALSE(check_growth(sq, 1, 10000, 1).has_value());
  auto cube = TestFunction::scalar([](double x) { return x * x * x; }, 1, 1.0);
  CHECK(check_growth(cube, 1, 10000, 1).has_value());
}

TEST_CASE("G-heat examples") {
  auto gs = GammaSet::interval(0.5, 1.0);
  SpaceTimeGrid grid(-6, 6, 401, 2000, 0, 1);
  auto lin = TestFunction::scalar([](double x) { return x; }, 0, 1.0);
  auto sq = TestFunction::scalar([](double x) { return x * x; }, 1, 1.0);
  auto nsq = TestFunction::scalar([](double x) { return -x * x; }, 1, 1.0);
  const int i0 = grid.nearest(0.0);
  CHECK(std::abs(solve_g_heat(lin, gs, 1.0, grid).v(grid.nt, i0)) <= 1e-12);
  CHECK(solve_g_heat(sq, gs, 1.0, grid).v(grid.nt, i0) == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(solve_g_heat(nsq, gs, 1.0, grid).v(grid.nt, i0) == doctest::Approx(-0.25).epsilon(5e-3));

  auto call = TestFunction::scalar([](double x) { return std::max(x, 0.0); }, 0, 1.0);
  auto one = GammaSet::interval(1.0, 1.0);
  CHECK(std::abs(solve_g_heat(call, one, 1.0, grid).v(grid.nt, i0) - oracle::gauss_call(0, 1, 1)) <=
        1e-3);

  SpaceTimeGrid bad(-6, 6, 401, 10, 0, 1);
  CHECK_THROWS_AS(solve_g_heat(sq, gs, 1.0, bad), CflError);
  SpaceTimeGrid shifted(-6, 6, 401, 2000, 0.5, 1.5);
  CHECK_THROWS(solve_g_heat(sq, gs, 1.0, shifted));
}

TEST_CASE("G-normal scaling composes") {
  // a X + b Xbar ~ sqrt(a^2 + b^2) X: heat at a^2 + b^2 equals heat at a^2 then b^2.
  auto gs = GammaSet::interval(0.5, 1.0);
  const double a2 = 0.36, b2 = 0.64;
  for (double sign : {1.0, -1.0}) {
    auto phi = TestFunction::scalar([sign](double x) { return sign * x * x; }, 1, 1.0);
    SpaceTimeGrid g1(-6, 6, 401, 2000, 0, a2 + b2);
    auto direct = solve_g_heat(phi, gs, a2 + b2, g1);
    SpaceTimeGrid ga(-6, 6, 401, 800, 0, a2);
    auto first = solve_g_heat(phi, gs, a2, ga);
    SpaceTimeGrid gb(-6, 6, 401, 1300, 0, b2);
    auto interp = TestFunction::scalar(
        [&](double x) { return first.interpolate(ga.nt, x); }, 1, 1.0);
    auto second = solve_g_heat(interp, gs, b2, gb);
    const int i0 = g1.nearest(0.0);
    const double exact = sign > 0 ? 1.0 : -0.25;
    CHECK(std::abs(direct.v(g1.nt, i0) - exact) <= 5e-3);
    CHECK(std::abs(second.v(gb.nt, i0) - direct.v(g1.nt, i0)) <= 2 * 5e-3);
  }
}

}  // TEST_SUITE
