#include "gctl/hjb.hpp"
#include "gctl/recursive.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gctl;

namespace {

// X = B (b = h = 0, sigma = 1), generator f(y) = fy(y), terminal phi.
ControlProblem brownian(std::function<double(double)> phi, std::function<double(double)> fy = {},
                        double horizon = 1.0) {
  ControlProblem p;
  p.name = "brownian";
  p.diffusion = [](double, const Vec&, const Vec&) { return Mat::Constant(1, 1, 1.0); };
  p.terminal = [phi](const Vec& x) { return phi(x(0)); };
  if (fy) p.generator = [fy](double, const Vec&, double y, const Vec&, const Vec&) { return fy(y); };
  p.controls = {vec1(0.0)};
  p.horizon = horizon;
  return p;
}

const ControlPath kZero = ControlPath::constant(vec1(0.0));
double sq(double x) { return x * x; }
double zero(double) { return 0.0; }

}  // namespace

TEST_SUITE("recursive") {

TEST_CASE("one-step tree examples") {
  auto gs = GammaSet::interval(0.5, 1.0);
  auto spec = TreeSpec::from_gamma(gs, 1);
  CHECK(spec.branching() == 4);
  CHECK(tree_gbsde_solve(brownian([](double x) { return x; }), kZero, 0, vec1(0), spec).y0 == 0.0);

  const double four_leaves = oracle::tree_value(sq, zero, {0.5, 1.0}, 1, 1.0, 0.0);
  CHECK(four_leaves == 1.0);
  CHECK(tree_gbsde_solve(brownian(sq), kZero, 0, vec1(0), spec).y0 == doctest::Approx(four_leaves).epsilon(1e-12));

  auto with_f = tree_gbsde_solve(brownian(sq, [](double) { return 1.0; }), kZero, 0, vec1(0), spec);
  CHECK(with_f.y0 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("two-step tree matches the 16-leaf recursion") {
  auto gs = GammaSet::interval(0.5, 1.0);
  auto spec = TreeSpec::from_gamma(gs, 2);
  for (double x0 : {0.0, 0.3, -1.2}) {
    auto sol = tree_gbsde_solve(brownian(sq), kZero, 0, vec1(x0), spec);
    CHECK(std::abs(sol.y0 - oracle::tree_value(sq, zero, {0.5, 1.0}, 2, 0.5, x0)) <= 1e-12);
    CHECK(sol.y.back().size() == 16);
    for (std::size_t q = 0; q < 16; ++q) CHECK(sol.y.back()[q] == sq(sol.x.back()[q]));
  }
  auto cosf = [](double x) { return std::cos(2 * x); };
  auto disc = [](double y) { return -0.7 * y; };
  auto sol = tree_gbsde_solve(brownian(cosf, disc), kZero, 0, vec1(0.1), TreeSpec::from_gamma(gs, 3));
  CHECK(std::abs(sol.y0 - oracle::tree_value(cosf, disc, {0.5, 1.0}, 3, 1.0 / 3, 0.1)) <= 1e-12);
}

TEST_CASE("K starts at zero and never increases") {
  auto gs = GammaSet::interval(0.5, 1.0);
  // Convex data: sigma_high is the maximizer everywhere, so K vanishes.
  auto convex = tree_gbsde_solve(brownian(sq), kZero, 0, vec1(0), TreeSpec::from_gamma(gs, 3));
  for (const auto& layer : convex.k)
    for (double k : layer) CHECK(k == 0.0);

  auto mixed = tree_gbsde_solve(brownian([](double x) { return std::cos(3 * x); }), kZero, 0,
                                vec1(0.2), TreeSpec::from_gamma(gs, 4));
  CHECK(mixed.k[0][0] == 0.0);
  bool strictly = false;
  for (std::size_t j = 0; j + 1 < mixed.k.size(); ++j)
    for (std::size_t r = 0; r < mixed.k[j + 1].size(); ++r) {
      CHECK(mixed.k[j + 1][r] <= mixed.k[j][r / 2] + 1e-12);
      if (mixed.k[j + 1][r] < mixed.k[j][r / 2] - 1e-9) strictly = true;
    }
  CHECK(strictly);
}

TEST_CASE("tree comparison and branch enlargement") {
  auto gs = GammaSet::interval(0.5, 1.0);
  auto spec = TreeSpec::from_gamma(gs, 3);
  auto hi = [](double x) { return std::abs(x) + 0.1; };
  auto lo = [](double x) { return std::abs(x) - 0.2 * x * x; };
  CHECK(tree_gbsde_solve(brownian(hi), kZero, 0, vec1(0.2), spec).y0 >=
        tree_gbsde_solve(brownian(lo), kZero, 0, vec1(0.2), spec).y0);

  TreeSpec narrow{3, {0.5}, 0};
  for (auto phi : {+[](double x) { return x * x; }, +[](double x) { return -x * x; },
                   +[](double x) { return std::cos(4 * x); }}) {
    CHECK(tree_gbsde_solve(brownian(phi), kZero, 0, vec1(0.1), spec).y0 >=
          tree_gbsde_solve(brownian(phi), kZero, 0, vec1(0.1), narrow).y0);
  }
}

TEST_CASE("degenerate interval tree is the binomial recursion") {
  auto gs = GammaSet::interval(0.8, 0.8);
  auto spec = TreeSpec::from_gamma(gs, 5);
  CHECK(spec.branching() == 2);
  auto phi = [](double x) { return std::max(x - 0.1, 0.0); };
  auto f = [](double y) { return -0.3 * y; };
  auto sol = tree_gbsde_solve(brownian(phi, f), kZero, 0, vec1(0.0), spec);
  CHECK(std::abs(sol.y0 - oracle::tree_value(phi, f, {0.8}, 5, 0.2, 0.0)) <= 1e-12);
}

TEST_CASE("Z is a difference quotient and vanishes without diffusion") {
  auto gs = GammaSet::interval(1.0, 1.0);
  auto sol = tree_gbsde_solve(brownian([](double x) { return 3 * x; }), kZero, 0, vec1(0),
                              TreeSpec::from_gamma(gs, 2));
  for (const auto& layer : sol.z)
    for (double z : layer) CHECK(z == doctest::Approx(3.0).epsilon(1e-12));

  auto flat = brownian([](double x) { return 3 * x; });
  flat.diffusion = [](double, const Vec&, const Vec&) { return Mat::Zero(1, 1); };
  auto s0 = tree_gbsde_solve(flat, kZero, 0, vec1(0), TreeSpec::from_gamma(gs, 2));
  for (const auto& layer : s0.z)
    for (double z : layer) CHECK(z == 0.0);
}

TEST_CASE("tree errors") {
  auto gs = GammaSet::interval(0.5, 1.0);
  TreeSpec big = TreeSpec::from_gamma(gs, 30);
  CHECK_THROWS_AS(tree_gbsde_solve(brownian(sq), kZero, 0, vec1(0), big), CapacityError);
  CHECK_THROWS_AS(tree_gbsde_solve(brownian(sq), kZero, 0, vec1(0), TreeSpec{0, {1.0}, 0}),
                  DomainError);
  auto blow = brownian([](double x) { return std::exp(x * 1000); });
  CHECK_THROWS_AS(tree_gbsde_solve(blow, kZero, 0, vec1(0), TreeSpec::from_gamma(gs, 1)),
                  NumericalError);
}

TEST_CASE("fixed-measure regression solver") {
  auto lin = bsde_fixed_measure(brownian([](double x) { return 2 * x + 1; }), kZero,
                                ThetaPath::constant(0, 0.25, 4, 0.7), 0, vec1(0.3), 20000, 3, 1);
  CHECK(std::abs(lin.y0 - 1.6) <= 3 * lin.std_error + 1e-12);

  // Y' = y with Y_T = 1: exp(-beta T).
  auto ode = bsde_fixed_measure(brownian([](double) { return 1.0; }, [](double y) { return -y; }),
                                kZero, ThetaPath::constant(0, 1.0 / 200, 200, 1.0), 0, vec1(0),
                                1000, 3, 2);
  CHECK(std::abs(ode.y0 - std::exp(-1.0)) <= 2e-3);

  auto second = bsde_fixed_measure(brownian(sq), kZero, ThetaPath::constant(0, 0.25, 4, 1.0), 0,
                                   vec1(0.5), 50000, 3, 3);
  CHECK(std::abs(second.y0 - 1.25) <= 3 * second.std_error);
  CHECK_FALSE(second.rank_fallback);

  CHECK_THROWS_AS(bsde_fixed_measure(brownian(sq), kZero, ThetaPath::constant(0, 1, 1, 1.0), 0,
                                     vec1(0), 299, 3, 1),
                  DomainError);
}

TEST_CASE("rank-deficient layers fall back to the mean") {
  auto flat = brownian(sq);
  flat.diffusion = [](double, const Vec&, const Vec&) { return Mat::Zero(1, 1); };
  auto r = bsde_fixed_measure(flat, kZero, ThetaPath::constant(0, 0.5, 2, 1.0), 0, vec1(0.5), 1000,
                              3, 1);
  CHECK(r.rank_fallback);
  CHECK(r.y0 == 0.25);
}

TEST_CASE("backward semigroup") {
  auto gs = GammaSet::interval(0.5, 1.0);
  auto p = brownian([](double x) { return std::cos(x); });
  SpaceTimeGrid grid(-6, 6, 121, 400, 0, 1);
  std::vector<double> c(grid.nx, 2.5);
  auto out = backward_semigroup_apply(p, c, vec1(0.0), 0.25, 1.0, gs, grid);
  for (double v : out) CHECK(v == 2.5);

  // Composition over [0.25, 0.5] then [0.5, 1] equals the direct solve.
  auto field = solve_hjb(p, gs, grid);
  auto mid = backward_semigroup_apply(p, field.layer(grid.nt), vec1(0.0), 0.5, 1.0, gs, grid);
  auto start = backward_semigroup_apply(p, mid, vec1(0.0), 0.25, 0.5, gs, grid);
  const int k = grid_time_index(grid, 0.25);
  for (int i = 0; i < grid.nx; ++i) CHECK(start[i] == field.v(k, i));

  auto disc = brownian([](double) { return 1.0; }, [](double y) { return -y; });
  disc.y_lip = 1.0;
  std::vector<double> ones(grid.nx, 1.0);
  auto e = backward_semigroup_apply(disc, ones, vec1(0.0), 0.5, 1.0, gs, grid);
  for (double v : e) CHECK(std::abs(v - std::exp(-0.5)) <= 10 * grid.dt());

  CHECK_THROWS_AS(backward_semigroup_apply(p, c, vec1(0.0), 0.5, 0.5, gs, grid), DomainError);
  CHECK_THROWS_AS(backward_semigroup_apply(p, c, vec1(1.0), 0.25, 0.5, gs, grid), DomainError);
  CHECK_THROWS_AS(backward_semigroup_apply(p, c, vec1(0.0), 0.2501, 0.5, gs, grid), DomainError);
}

}  // TEST_SUITE
