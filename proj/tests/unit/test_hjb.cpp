#include "gctl/hjb.hpp"
#include "gctl/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace gctl;

namespace {

ControlProblem heat(std::function<double(double)> phi) {
  ControlProblem p;
  p.name = "heat";
  p.diffusion = [](double, const Vec&, const Vec&) { return Mat::Constant(1, 1, 1.0); };
  p.terminal = [phi](const Vec& x) { return phi(x(0)); };
  p.controls = {vec1(0.0)};
  return p;
}

// Every coefficient switched on, all of them u-dependent.
ControlProblem busy(std::function<double(double)> phi) {
  ControlProblem p;
  p.name = "busy";
  p.drift = [](double, const Vec& x, const Vec& u) { return vec1(0.3 * std::sin(x(0)) * u(0)); };
  p.qv_drift = [](double, const Vec&, const Vec& u, int, int) { return vec1(-0.2 * u(0)); };
  p.diffusion = [](double, const Vec& x, const Vec& u) {
    return Mat::Constant(1, 1, u(0) * (0.6 + 0.2 * std::cos(x(0))));
  };
  p.generator = [](double, const Vec& x, double y, const Vec&, const Vec& u) {
    return -0.5 * y + 0.1 * u(0) * x(0);
  };
  p.terminal = [phi](const Vec& x) { return phi(x(0)); };
  p.controls = {vec1(0.5), vec1(1.0)};
  p.y_lip = 0.5;
  return p;
}

const GammaSet kGamma = GammaSet::interval(0.5, 1.0);
const SpaceTimeGrid kStd(-6, 6, 401, 2000, 0, 1);

}  // namespace

TEST_SUITE("hjb") {

TEST_CASE("f_matrix examples") {
  const Vec x = vec1(0.0), p0 = vec1(0.0);
  auto h = heat([](double x) { return x; });
  CHECK(f_matrix(0, x, 0, p0, Mat::Constant(1, 1, 2.0), vec1(0.0), h)(0, 0) == 2.0);

  auto su = h;
  su.diffusion = [](double, const Vec&, const Vec& u) { return Mat::Constant(1, 1, u(0)); };
  CHECK(f_matrix(0, x, 0, p0, Mat::Constant(1, 1, 2.0), vec1(0.5), su)(0, 0) == 0.5);

  auto hd = h;
  hd.qv_drift = [](double, const Vec&, const Vec&, int, int) { return vec1(1.0); };
  CHECK(f_matrix(0, x, 0, vec1(3.0), Mat::Zero(1, 1), vec1(0.0), hd)(0, 0) == 6.0);

  // d = 2: F = sigma^T A sigma for h = g = 0.
  ControlProblem two;
  two.n = two.d = 2;
  Mat s(2, 2);
  s << 1.0, 0.5, -0.2, 2.0;
  two.diffusion = [s](double, const Vec&, const Vec&) { return s; };
  two.terminal = [](const Vec&) { return 0.0; };
  two.controls = {vec1(0.0)};
  Mat a(2, 2);
  a << 1.0, 0.3, 0.3, -1.0;
  CHECK(f_matrix(0, Vec::Zero(2), 0, Vec::Zero(2), a, vec1(0.0), two)
            .isApprox(s.transpose() * a * s, 1e-14));
}

TEST_CASE("hamiltonian examples") {
  const Vec x = vec1(0.0);
  auto h = heat([](double x) { return x; });
  CHECK(hamiltonian(0, x, 0, vec1(0.0), Mat::Constant(1, 1, 2.0), vec1(0.0), h, kGamma) ==
        doctest::Approx(oracle::g_grid(2.0, 0.5, 1.0).first).epsilon(1e-12));

  auto hf = h;
  hf.generator = [](double t, const Vec& x, double y, const Vec& z, const Vec&) {
    return 1.0 + t + x(0) + 2 * y + z(0);
  };
  CHECK(hamiltonian(0.5, vec1(0.25), 3.0, vec1(0.0), Mat::Zero(1, 1), vec1(0.0), hf, kGamma) == 7.75);

  auto hb = h;
  hb.drift = [](double, const Vec&, const Vec&) { return vec1(1.0); };
  CHECK(hamiltonian(0, x, 0, vec1(2.0), Mat::Zero(1, 1), vec1(0.0), hb, kGamma) == 2.0);
}

TEST_CASE("step_backward examples") {
  // dx = 1/8 keeps the node coordinates exact.
  SpaceTimeGrid g(-2, 2, 33, 100, 0, 1);
  auto lin = heat([](double x) { return x; });
  std::vector<double> layer(g.nx);
  for (int i = 0; i < g.nx; ++i) layer[i] = g.x(i);
  auto r = step_backward(layer, g.nt - 1, lin, kGamma, g);
  for (int i = 0; i < g.nx; ++i) CHECK(r.layer[i] == layer[i]);

  auto src = lin;
  src.generator = [](double, const Vec&, double, const Vec&, const Vec&) { return 1.0; };
  auto r1 = step_backward(layer, g.nt - 1, src, kGamma, g);
  for (int i = 0; i < g.nx; ++i) CHECK(r1.layer[i] == doctest::Approx(layer[i] + g.dt()).epsilon(1e-14));

  ControlProblem su = heat([](double x) { return x * x; });
  su.diffusion = [](double, const Vec&, const Vec& u) { return Mat::Constant(1, 1, u(0)); };
  su.controls = {vec1(0.5), vec1(1.0)};
  std::vector<double> quad(g.nx);
  for (int i = 0; i < g.nx; ++i) quad[i] = g.x(i) * g.x(i);
  auto rp = step_backward(quad, g.nt - 1, su, GammaSet::interval(1.0, 1.0), g);
  const int i0 = g.nearest(0.0);
  CHECK(su.controls[rp.policy[i0]](0) == 1.0);
  // Hand evaluation of the stencil: A = 2, H(u) = u^2.
  CHECK(rp.layer[i0] == doctest::Approx(quad[i0] + g.dt()).epsilon(1e-14));
}

TEST_CASE("solve_hjb examples") {
  auto call = heat([](double x) { return std::max(x, 0.0); });
  auto one = GammaSet::interval(1.0, 1.0);
  auto fc = solve_hjb(call, one, kStd);
  CHECK(std::abs(fc.v(0, kStd.nearest(0)) - oracle::gauss_call(0, 1, 1)) <= 1e-3);

  auto sq = heat([](double x) { return x * x; });
  auto fs = solve_hjb(sq, kGamma, kStd);
  CHECK(std::abs(fs.v(0, kStd.nearest(0)) - 1.0) <= 5e-3);
  for (int i = 0; i < kStd.nx; ++i) CHECK(fs.v(kStd.nt, i) == kStd.x(i) * kStd.x(i));

  auto disc = sq;
  disc.generator = [](double, const Vec&, double y, const Vec&, const Vec&) { return -y; };
  disc.y_lip = 1.0;
  auto fd = solve_hjb(disc, kGamma, kStd);
  CHECK(std::abs(fd.v(0, kStd.nearest(0)) - std::exp(-1.0)) <= 1e-2);

  auto c = heat([](double) { return 4.0; });
  auto fk = solve_hjb(c, kGamma, SpaceTimeGrid(-3, 3, 61, 200, 0, 1));
  for (double v : fk.values) CHECK(v == 4.0);
}

TEST_CASE("CFL and numerical errors") {
  auto sq = heat([](double x) { return x * x; });
  SpaceTimeGrid coarse(-6, 6, 401, 50, 0, 1);
  const double admissible = max_stable_dt(sq, kGamma, coarse);
  CHECK(admissible == doctest::Approx(coarse.dx() * coarse.dx()).epsilon(1e-12));
  try {
    solve_hjb(sq, kGamma, coarse);
    FAIL("expected a CFL error");
  } catch (const CflError& e) {
    CHECK(e.max_dt() == doctest::Approx(admissible));
    CHECK(std::string(e.what()).find("dt") != std::string::npos);
  }
  auto g = cfl_grid(sq, kGamma, -6, 6, 401, 0, 1, 0.9);
  CHECK_NOTHROW(check_cfl(sq, kGamma, g, 0.9));
  CHECK_THROWS_AS(check_cfl(sq, kGamma, SpaceTimeGrid(-6, 6, 401, g.nt - 1, 0, 1), 0.9), CflError);

  auto nanp = heat([](double x) { return x > 1 ? std::nan("") : 0.0; });
  CHECK_THROWS_AS(solve_hjb(nanp, kGamma, SpaceTimeGrid(-2, 2, 21, 100, 0, 1)), NumericalError);

  ControlProblem two = sq;
  two.n = two.d = 2;
  CHECK_THROWS_AS(solve_hjb(two, kGamma, kStd), DimensionError);
  CHECK_THROWS_AS(SpaceTimeGrid(1, 0, 10, 10, 0, 1).validate(), DomainError);
}

TEST_CASE("pde residual") {
  auto lin = heat([](double x) { return x; });
  SpaceTimeGrid g(-2, 2, 41, 100, 0, 1);
  ValueField exact(g, lin.controls);
  for (int k = 0; k <= g.nt; ++k)
    for (int i = 0; i < g.nx; ++i) exact.v(k, i) = g.x(i);
  CHECK(std::abs(pde_residual(exact, 50, 20, lin, kGamma)) <= 1e-12);

  auto sq = heat([](double x) { return x * x; });
  ValueField q(g, sq.controls);
  for (int k = 0; k <= g.nt; ++k)
    for (int i = 0; i < g.nx; ++i) q.v(k, i) = g.x(i) * g.x(i) + (1 - g.t(k));
  double worst = 0;
  for (int k = 1; k < g.nt; ++k)
    for (int i = 1; i < g.nx - 1; ++i) worst = std::max(worst, std::abs(pde_residual(q, k, i, sq, kGamma)));
  CHECK(worst <= 10 * g.dx() * g.dx());

  auto cs = heat([](double x) { return std::cos(x); });
  double prev = INFINITY;
  for (int nx : {61, 121, 241}) {
    auto grid = cfl_grid(cs, kGamma, -6, 6, nx, 0, 1, 0.9);
    auto f = solve_hjb(cs, kGamma, grid);
    double m = 0;
    for (int k = 1; k < grid.nt; ++k)
      for (int i = grid.nearest(-3); i <= grid.nearest(3); ++i)
        m = std::max(m, std::abs(pde_residual(f, k, i, cs, kGamma)));
    CHECK(m < prev);
    prev = m;
  }
  CHECK_THROWS_AS(pde_residual(exact, 0, 20, lin, kGamma), DomainError);
  CHECK_THROWS_AS(pde_residual(exact, 5, 0, lin, kGamma), DomainError);
}

TEST_CASE("scheme monotonicity under layer perturbation") {
  auto p = busy([](double x) { return std::cos(x); });
  auto g = cfl_grid(p, kGamma, -4, 4, 81, 0, 1, 1.0);
  const Philox4x32 gen(21);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> base(g.nx), bumped(g.nx);
    for (int i = 0; i < g.nx; ++i) {
      base[i] = 3.0 * normal_at(gen, trial, i);
      bumped[i] = base[i] + (uniform_at(gen, trial, i) < 0.3 ? uniform_at(gen, trial, i, 1) : 0.0);
    }
    auto a = step_backward(base, g.nt - 1 - trial % g.nt, p, kGamma, g);
    auto b = step_backward(bumped, g.nt - 1 - trial % g.nt, p, kGamma, g);
    for (int i = 0; i < g.nx; ++i)
      if (b.layer[i] < a.layer[i] - 1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("discrete comparison and uncertainty monotonicity") {
  auto narrow = GammaSet::interval(0.6, 0.9);
  const Philox4x32 gen(33);
  int violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double a = normal_at(gen, trial, 0), b = normal_at(gen, trial, 1);
    const double c = std::abs(normal_at(gen, trial, 2));
    auto phi2 = [a, b](double x) { return std::sin(a * x) + b * std::abs(x - 0.5); };
    auto phi1 = [phi2, c](double x) { return phi2(x) + c * (1 + std::cos(3 * x)); };
    auto p1 = busy(phi1), p2 = busy(phi2);
    auto g = cfl_grid(p1, kGamma, -4, 4, 61, 0, 1, 1.0);
    auto f1 = solve_hjb(p1, kGamma, g), f2 = solve_hjb(p2, kGamma, g);
    auto fn = solve_hjb(p2, narrow, g);
    for (std::size_t n = 0; n < f1.values.size(); ++n) {
      if (f1.values[n] < f2.values[n] - 1e-12) ++violations;
      if (f2.values[n] < fn.values[n] - 1e-12) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("policy is invariant under positive scaling of a u-only generator") {
  ControlProblem p = heat([](double x) { return std::sin(x); });
  p.controls = {vec1(-1.0), vec1(0.5), vec1(2.0)};
  auto scaled = [&](double s) {
    auto q = p;
    q.generator = [s](double, const Vec& x, double, const Vec&, const Vec& u) {
      return s * (u(0) * x(0) - u(0) * u(0));
    };
    return q;
  };
  auto g = SpaceTimeGrid(-3, 3, 61, 600, 0, 1);
  auto a = solve_hjb(scaled(1.0), kGamma, g), b = solve_hjb(scaled(3.0), kGamma, g);
  CHECK(a.policy_index == b.policy_index);
}

TEST_CASE("csv layout") {
  auto sq = heat([](double x) { return x * x; });
  auto f = solve_hjb(sq, kGamma, SpaceTimeGrid(-1, 1, 3, 4, 0, 1));
  std::ostringstream os;
  write_csv(os, f);
  const std::string s = os.str();
  CHECK(s.rfind("t,x,v,policy\n0,-1,", 0) == 0);
  CHECK(s.find("1,1,1,nan\n") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 5 * 3);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

}  // TEST_SUITE
