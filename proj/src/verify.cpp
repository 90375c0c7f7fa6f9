#include "gctl/verify.hpp"

#include "gctl/hjb.hpp"
#include "gctl/measures.hpp"
#include "gctl/recursive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gctl {

DppResidual dpp_residual(const ControlProblem& problem, const GammaSet& gamma,
                         const ValueField& field, int k_t, int k_s) {
  const auto& g = field.grid;
  if (!(0 <= k_t && k_t < k_s && k_s <= g.nt)) throw DomainError("dpp_residual: need k_t < k_s");
  std::vector<double> best(g.nx, -std::numeric_limits<double>::infinity());
  for (std::size_t ui = 0; ui < problem.controls.size(); ++ui) {
    const std::size_t ids[] = {ui};
    const auto w = march_backward(field.layer(k_s), k_s, k_t, problem, gamma, g, ids);
    for (int i = 0; i < g.nx; ++i) best[i] = std::max(best[i], w[i]);
  }
  DppResidual out;
  out.per_node.resize(g.nx);
  out.min_residual = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.nx; ++i) {
    const double r = field.v(k_t, i) - best[i];
    out.per_node[i] = r;
    out.max_residual = std::max(out.max_residual, std::abs(r));
    out.min_residual = std::min(out.min_residual, r);
  }
  return out;
}

double modulus_x(const ValueField& field, int k, double padding) {
  const auto& g = field.grid;
  if (k < 0 || k > g.nt) throw DomainError("modulus_x: layer out of range");
  const double lo = g.x_min + padding, hi = g.x_max - padding;
  double m = 0.0;
  for (int i = 0; i + 1 < g.nx; ++i) {
    if (g.x(i) < lo - 1e-12 || g.x(i + 1) > hi + 1e-12) continue;
    m = std::max(m, std::abs(field.v(k, i + 1) - field.v(k, i)) / g.dx());
  }
  return m;
}

std::pair<double, double> fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

HolderFit modulus_t(const ValueField& field, int i) {
  const auto& g = field.grid;
  if (g.nt < 8) throw DomainError("modulus_t: need nt >= 8");
  if (i < 0 || i >= g.nx) throw DomainError("modulus_t: node out of range");
  std::vector<double> lx, ly;
  for (int k = (g.nt + 1) / 2; k < g.nt; ++k) {
    const double diff = std::abs(field.v(k, i) - field.v(g.nt, i));
    if (diff < 1e-14) continue;
    lx.push_back(std::log(g.t_end - g.t(k)));
    ly.push_back(std::log(diff));
  }
  HolderFit fit;
  if (lx.size() < 2) {
    fit.degenerate = true;
    fit.exponent = std::numeric_limits<double>::infinity();
    return fit;
  }
  const auto [slope, intercept] = fit_line(lx, ly);
  fit.exponent = slope;
  fit.constant = std::exp(intercept);
  return fit;
}

bool AxiomsReport::all_passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const AxiomRow& r) { return r.passed; });
}

AxiomsReport axioms_check(const GammaSet& gamma, double horizon, std::size_t nt, int levels,
                          std::size_t n_paths, std::uint64_t seed,
                          const std::vector<std::pair<NamedFunction, NamedFunction>>& pairs,
                          double lambda, double constant) {
  const SublinearEstimator est(gamma, horizon, nt, levels, n_paths, seed);
  auto e = [&](const TestFunction& f) { return est.estimate(f).estimate; };
  auto tol = [](double a, double b) {
    return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  auto combine = [](const TestFunction& a, const TestFunction& b, auto op) {
    TestFunction out;
    out.eval = [a, b, op](std::span<const double> x) { return op(a(x), b(x)); };
    out.growth_order = std::max(a.growth_order, b.growth_order);
    out.growth_const = a.growth_const + b.growth_const;
    return out;
  };

  AxiomsReport rep;
  for (const auto& [p, q] : pairs) {
    const std::string label = p.name + "|" + q.name;
    const double ep = e(p.fn), eq = e(q.fn);

    const double esum = e(combine(p.fn, q.fn, [](double a, double b) { return a + b; }));
    rep.rows.push_back({"sub-additivity", label, esum, ep + eq, esum <= ep + eq + tol(esum, ep + eq)});

    TestFunction scaled;
    scaled.eval = [f = p.fn, lambda](std::span<const double> x) { return lambda * f(x); };
    const double escaled = e(scaled);
    rep.rows.push_back({"positive-homogeneity", label, escaled, lambda * ep,
                        std::abs(escaled - lambda * ep) <= tol(escaled, lambda * ep)});

    // max(p, q) >= p and >= q pointwise.
    const double emax = e(combine(p.fn, q.fn, [](double a, double b) { return std::max(a, b); }));
    const double lower = std::max(ep, eq);
    rep.rows.push_back({"monotonicity", label, emax, lower, emax >= lower - tol(emax, lower)});
  }
  TestFunction c;
  c.eval = [constant](std::span<const double>) { return constant; };
  const double ec = e(c);
  rep.rows.push_back({"constant-preservation", "c", ec, constant, ec == constant});
  return rep;
}

OracleComparison oracle_compare(const ControlProblem& problem, const GammaSet& gamma, int steps,
                                const SpaceTimeGrid& grid, double x0, const McOptions& mc,
                                double scheme_tol) {
  if (problem.controls.size() != 1)
    throw DomainError("oracle_compare: the control must be fixed (|U| = 1)");
  const ControlPath control = ControlPath::constant(problem.controls.front());
  const double t0 = grid.t0;

  OracleComparison out;
  out.tree_value = tree_gbsde_solve(problem, control, t0, vec1(x0),
                                    TreeSpec::from_gamma(gamma, steps))
                       .y0;
  out.pde_value = solve_hjb(problem, gamma, grid).interpolate(0, x0);

  const double dt = (problem.horizon - t0) / static_cast<double>(mc.nt);
  const auto lattice = build_theta_lattice(gamma, mc.levels, mc.nt, t0, dt);
  out.mc_lower = -std::numeric_limits<double>::infinity();
  for (const auto& th : lattice) {
    const auto r = bsde_fixed_measure(problem, control, th, t0, vec1(x0), mc.n_paths, mc.n_basis,
                                      mc.seed);
    if (r.y0 > out.mc_lower) {
      out.mc_lower = r.y0;
      out.mc_std_error = r.std_error;
    }
  }
  out.tree_pde_gap = out.tree_value - out.pde_value;
  out.mc_pde_gap = out.mc_lower - out.pde_value;
  out.mc_below_pde = out.mc_lower <= out.pde_value + 3.0 * out.mc_std_error + scheme_tol;
  return out;
}

double f0_value(const ControlProblem& problem, const GammaSet& gamma,
                const SmoothTestFunction& phi, double t, double x) {
  if (!phi.value || !phi.dt || !phi.dx || !phi.dxx)
    throw DomainError("f0_expansion_check: test function needs value, dt, dx and dxx");
  if (problem.has_qv_drift() || problem.has_qv_generator())
    throw DomainError("f0_expansion_check: requires h = g = 0");
  const Vec xv = vec1(x);
  const double v = phi.value(t, x), vt = phi.dt(t, x), vx = phi.dx(t, x), vxx = phi.dxx(t, x);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& u : problem.controls) {
    const Mat sig = problem.sigma(t, xv, u);
    const double f1 = vt + problem.b(t, xv, u)(0) * vx +
                      problem.f(t, xv, v, sig.transpose() * vec1(vx), u);
    // 2 G(F2) = G(2 F2) = G(sigma^T phi_xx sigma).
    const Mat twice_f2 = sig.transpose() * Mat::Constant(1, 1, vxx) * sig;
    best = std::max(best, f1 + g_eval(twice_f2, gamma));
  }
  return best;
}

F0Expansion f0_expansion_check(const ControlProblem& problem, const GammaSet& gamma,
                               const SmoothTestFunction& phi, double t, double x,
                               const std::vector<double>& deltas, const ExpansionGrid& eg) {
  if (deltas.size() < 4) throw DomainError("f0_expansion_check: need at least 4 deltas");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || (i > 0 && !(deltas[i] < deltas[i - 1])))
      throw DomainError("f0_expansion_check: deltas must be positive and decreasing");
  }
  F0Expansion out;
  out.f0 = f0_value(problem, gamma, phi, t, x);
  out.deltas = deltas;
  const double base = phi.value(t, x);
  std::vector<double> lx, ly;
  for (double delta : deltas) {
    const SpaceTimeGrid grid =
        cfl_grid(problem, gamma, eg.x_min, eg.x_max, eg.nx, t, t + delta, eg.cfl_factor);
    std::vector<double> terminal(grid.nx);
    for (int i = 0; i < grid.nx; ++i) terminal[i] = phi.value(t + delta, grid.x(i));
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& u : problem.controls) {
      ValueField tmp(grid, {});
      const auto w = backward_semigroup_apply(problem, terminal, u, t, t + delta, gamma, grid);
      std::copy(w.begin(), w.end(), tmp.layer(0).begin());
      best = std::max(best, tmp.interpolate(0, x));
    }
    const double err = std::abs(best - base - delta * out.f0);
    out.errors.push_back(err);
    if (err > 1e-12) {
      lx.push_back(std::log(delta));
      ly.push_back(std::log(err));
    }
  }
  if (lx.size() < 2) {
    out.degenerate = true;
    out.slope = std::numeric_limits<double>::infinity();
  } else {
    out.slope = fit_line(lx, ly).first;
  }
  return out;
}

}  // namespace gctl
