#include "gctl/hjb.hpp"

#include "gctl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gctl {

Mat f_matrix(double t, const Vec& x, double v, const Vec& p, const Mat& a, const Vec& u,
             const ControlProblem& problem) {
  if (x.size() != problem.n || p.size() != problem.n || a.rows() != problem.n ||
      a.cols() != problem.n || u.size() != problem.m) {
    throw DimensionError("f_matrix: argument dimensions do not match the problem");
  }
  const int d = problem.d;
  const Mat sig = problem.sigma(t, x, u);
  const Vec z = sig.transpose() * p;
  Mat out = sig.transpose() * a * sig;
  const bool with_h = problem.has_qv_drift();
  const bool with_g = problem.has_qv_generator();
  if (with_h || with_g) {
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        double extra = 0.0;
        if (with_h) extra += 2.0 * p.dot(problem.h(t, x, u, i, j));
        if (with_g) extra += 2.0 * problem.g(t, x, v, z, u, i, j);
        out(i, j) += extra;
        if (i != j) out(j, i) += extra;
      }
    }
  }
  return 0.5 * (out + out.transpose());
}

double hamiltonian(double t, const Vec& x, double v, const Vec& p, const Mat& a, const Vec& u,
                   const ControlProblem& problem, const GammaSet& gamma) {
  const Mat f = f_matrix(t, x, v, p, a, u, problem);
  const Vec z = problem.sigma(t, x, u).transpose() * p;
  return g_eval(f, gamma) + p.dot(problem.b(t, x, u)) + problem.f(t, x, v, z, u);
}

namespace {

void require_scalar_grid_problem(const ControlProblem& problem, const GammaSet& gamma) {
  if (problem.n != 1 || problem.d != 1 || gamma.dim() != 1) {
    throw DimensionError("grid solver supports n = d = 1 only");
  }
}

std::vector<std::size_t> all_controls(const ControlProblem& problem) {
  std::vector<std::size_t> ids(problem.controls.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return ids;
}

}  // namespace

double max_stable_dt(const ControlProblem& problem, const GammaSet& gamma,
                     const SpaceTimeGrid& grid, double cfl_factor) {
  require_scalar_grid_problem(problem, gamma);
  const double gmax = gamma.upper_variance();
  const double dx = grid.dx();
  constexpr int kTimeSamples = 9;
  double s_max = 0.0, m_max = 0.0;
  for (int ts = 0; ts < kTimeSamples; ++ts) {
    const double t = grid.t0 + (grid.t_end - grid.t0) * ts / (kTimeSamples - 1);
    for (int i = 0; i < grid.nx; ++i) {
      const Vec x = vec1(grid.x(i));
      for (const auto& u : problem.controls) {
        const double s = problem.sigma(t, x, u)(0, 0);
        const double b = problem.b(t, x, u)(0);
        const double h = problem.has_qv_drift() ? problem.h(t, x, u, 0, 0)(0) : 0.0;
        s_max = std::max(s_max, gmax * s * s);
        m_max = std::max(m_max, std::abs(b) + gmax * std::abs(h));
      }
    }
  }
  const double l = problem.y_lip * (1.0 + gmax);
  const double denom = s_max + dx * m_max + l * dx * dx;
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return cfl_factor * dx * dx / denom;
}

void check_cfl(const ControlProblem& problem, const GammaSet& gamma, const SpaceTimeGrid& grid,
               double cfl_factor) {
  const double max_dt = max_stable_dt(problem, gamma, grid, cfl_factor);
  if (grid.dt() > max_dt * (1.0 + 1e-12)) {
    throw CflError("CFL violation: dt = " + format_double(grid.dt()) +
                       " exceeds the monotone bound " + format_double(max_dt) +
                       " (need nt >= " +
                       std::to_string(static_cast<long long>(
                           std::ceil((grid.t_end - grid.t0) / max_dt))) +
                       ")",
                   max_dt);
  }
}

SpaceTimeGrid cfl_grid(const ControlProblem& problem, const GammaSet& gamma, double x_min,
                       double x_max, int nx, double t0, double t_end, double cfl_factor) {
  SpaceTimeGrid probe(x_min, x_max, nx, 1, t0, t_end);
  const double max_dt = max_stable_dt(problem, gamma, probe, cfl_factor);
  int nt = 1;
  if (std::isfinite(max_dt)) nt = std::max(1, static_cast<int>(std::ceil((t_end - t0) / max_dt)));
  return SpaceTimeGrid(x_min, x_max, nx, nt, t0, t_end);
}

double discrete_hamiltonian(std::span<const double> layer, int i, double t,
                            const ControlProblem& problem, const GammaSet& gamma,
                            const SpaceTimeGrid& grid, std::size_t ui) {
  const int nx = grid.nx;
  const double dx = grid.dx();
  const Vec x = vec1(grid.x(i));
  const Vec& u = problem.controls[ui];
  const double v = layer[i];
  const double b = problem.b(t, x, u)(0);
  const double s = problem.sigma(t, x, u)(0, 0);
  const double h = problem.has_qv_drift() ? problem.h(t, x, u, 0, 0)(0) : 0.0;
  const bool left = i == 0, right = i == nx - 1;

  double a = 0.0, fwd = 0.0, bwd = 0.0;
  if (!left && !right) a = (layer[i + 1] - 2.0 * v + layer[i - 1]) / (dx * dx);
  if (!right) fwd = (layer[i + 1] - v) / dx;
  if (!left) bwd = (v - layer[i - 1]) / dx;

  // Per-volatility operator; `side` forces the difference at the upwind
  // switch point (0 = from the sign of mu, 1 = forward, -1 = backward).
  auto candidate = [&](double g2, int side) {
    const double mu = b + g2 * h;
    double p;
    if (left) p = mu > 0.0 ? fwd : 0.0;
    else if (right) p = mu < 0.0 ? bwd : 0.0;
    else if (side != 0) p = side > 0 ? fwd : bwd;
    else p = mu >= 0.0 ? fwd : bwd;
    const Vec z = vec1(s * p);
    double f_entry = s * s * a + 2.0 * p * h;
    if (problem.has_qv_generator()) f_entry += 2.0 * problem.g(t, x, v, z, u, 0, 0);
    return 0.5 * g2 * f_entry + p * b + problem.f(t, x, v, z, u);
  };

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& gm : gamma.extreme_points()) best = std::max(best, candidate(gm(0, 0) * gm(0, 0), 0));
  // On an interval the operator is affine in gamma^2 between upwind switches,
  // so the sup is attained at an endpoint or at the switch b + gamma^2 h = 0.
  if (gamma.kind() == GammaSet::Kind::kInterval && h != 0.0) {
    const double lo2 = gamma.sigma_low() * gamma.sigma_low();
    const double hi2 = gamma.sigma_high() * gamma.sigma_high();
    const double g2 = -b / h;
    if (g2 > lo2 && g2 < hi2) {
      best = std::max(best, candidate(g2, 1));
      best = std::max(best, candidate(g2, -1));
    }
  }
  return best;
}

void step_backward(std::span<const double> next, int k, const ControlProblem& problem,
                   const GammaSet& gamma, const SpaceTimeGrid& grid, std::span<double> out,
                   std::span<int> policy_out, std::span<const std::size_t> control_ids) {
  require_scalar_grid_problem(problem, gamma);
  const int nx = grid.nx;
  if (next.size() != static_cast<std::size_t>(nx) || out.size() != next.size() ||
      policy_out.size() != next.size()) {
    throw DimensionError("step_backward: layer size does not match the grid");
  }
  std::vector<std::size_t> ids_storage;
  if (control_ids.empty()) {
    ids_storage = all_controls(problem);
    control_ids = ids_storage;
  }
  const double t = grid.t(k);
  const double dt = grid.dt();
  std::vector<char> bad(nx, 0);
  parallel_for(nx, [&](std::ptrdiff_t i) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = static_cast<int>(control_ids[0]);
    for (std::size_t ui : control_ids) {
      const double hval =
          discrete_hamiltonian(next, static_cast<int>(i), t, problem, gamma, grid, ui);
      if (hval > best) {
        best = hval;
        arg = static_cast<int>(ui);
      }
    }
    out[i] = next[i] + dt * best;
    policy_out[i] = arg;
    if (!std::isfinite(out[i])) bad[i] = 1;
  });
  for (int i = 0; i < nx; ++i) {
    if (bad[i]) {
      throw NumericalError("step_backward: non-finite value at t = " + format_double(t) +
                           ", x = " + format_double(grid.x(i)));
    }
  }
}

StepResult step_backward(std::span<const double> next, int k, const ControlProblem& problem,
                         const GammaSet& gamma, const SpaceTimeGrid& grid) {
  StepResult r{std::vector<double>(next.size()), std::vector<int>(next.size())};
  step_backward(next, k, problem, gamma, grid, r.layer, r.policy);
  return r;
}

std::vector<double> march_backward(std::span<const double> layer, int k_from, int k_to,
                                   const ControlProblem& problem, const GammaSet& gamma,
                                   const SpaceTimeGrid& grid,
                                   std::span<const std::size_t> control_ids) {
  if (k_to > k_from || k_to < 0 || k_from > grid.nt) {
    throw DomainError("march_backward: need 0 <= k_to <= k_from <= nt");
  }
  check_cfl(problem, gamma, grid);
  std::vector<double> cur(layer.begin(), layer.end()), nxt(layer.size());
  std::vector<int> pol(layer.size());
  for (int k = k_from - 1; k >= k_to; --k) {
    step_backward(cur, k, problem, gamma, grid, nxt, pol, control_ids);
    std::swap(cur, nxt);
  }
  return cur;
}

ValueField solve_hjb(const ControlProblem& problem, const GammaSet& gamma,
                     const SpaceTimeGrid& grid) {
  problem.validate();
  grid.validate();
  require_scalar_grid_problem(problem, gamma);
  check_cfl(problem, gamma, grid);
  ValueField field(grid, problem.controls);
  auto last = field.layer(grid.nt);
  for (int i = 0; i < grid.nx; ++i) last[i] = problem.phi(vec1(grid.x(i)));
  const auto ids = all_controls(problem);
  for (int k = grid.nt - 1; k >= 0; --k) {
    step_backward(field.layer(k + 1), k, problem, gamma, grid, field.layer(k),
                  std::span<int>(field.policy_index.data() + static_cast<std::size_t>(k) * grid.nx,
                                 grid.nx),
                  ids);
  }
  return field;
}

double pde_residual(const ValueField& field, int k, int i, const ControlProblem& problem,
                    const GammaSet& gamma) {
  const auto& g = field.grid;
  if (k < 1 || k > g.nt - 1 || i < 1 || i > g.nx - 2) {
    throw DomainError("pde_residual: (k, i) must be an interior node");
  }
  const double dvdt = (field.v(k + 1, i) - field.v(k - 1, i)) / (2.0 * g.dt());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t ui = 0; ui < problem.controls.size(); ++ui) {
    best = std::max(best, discrete_hamiltonian(field.layer(k), i, g.t(k), problem, gamma, g, ui));
  }
  return dvdt + best;
}

}  // namespace gctl
