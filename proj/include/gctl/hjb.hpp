#pragma once

#include "gctl/gcore.hpp"
#include "gctl/grid.hpp"
#include "gctl/problem.hpp"
#include "gctl/types.hpp"

#include <span>
#include <vector>

namespace gctl {

/// F_ij = <A sigma_i, sigma_j> + 2 <p, h_ij> + 2 g_ij(t, x, v, sigma^T p, u),
/// with sigma_i the i-th column of sigma and h, g symmetrized in (i, j).
Mat f_matrix(double t, const Vec& x, double v, const Vec& p, const Mat& a, const Vec& u,
             const ControlProblem& problem);

/// H = G(F) + <p, b> + f(t, x, v, sigma^T p, u).
double hamiltonian(double t, const Vec& x, double v, const Vec& p, const Mat& a, const Vec& u,
                   const ControlProblem& problem, const GammaSet& gamma);

/// Largest dt keeping the explicit stencil monotone:
///   dt <= cfl dx^2 / (S + dx M + L dx^2)
/// with S = max gamma^2 sigma^2, M = max |b| + gamma^2 |h| and
/// L = y_lip (1 + max gamma^2), maxima taken over sampled grid nodes and U.
double max_stable_dt(const ControlProblem& problem, const GammaSet& gamma,
                     const SpaceTimeGrid& grid, double cfl_factor = 1.0);

/// Throws CflError (carrying the admissible dt) if grid.dt() is too large.
void check_cfl(const ControlProblem& problem, const GammaSet& gamma, const SpaceTimeGrid& grid,
               double cfl_factor = 1.0);

/// Grid with the smallest nt that passes check_cfl at `cfl_factor`.
SpaceTimeGrid cfl_grid(const ControlProblem& problem, const GammaSet& gamma, double x_min,
                       double x_max, int nx, double t0, double t_end, double cfl_factor = 0.9);

/// Discrete Hamiltonian at node i of `layer` for control index `ui`: the sup
/// over Gamma of the per-volatility linear operator, with the first
/// difference upwinded by the sign of b + gamma^2 h. Boundary nodes use zero
/// curvature and the inward one-sided difference (or none).
double discrete_hamiltonian(std::span<const double> layer, int i, double t,
                            const ControlProblem& problem, const GammaSet& gamma,
                            const SpaceTimeGrid& grid, std::size_t ui);

/// One explicit step from layer k + 1 (`next`) to layer k over controls
/// `control_ids` (all of U when empty). Ties in the argmax go to the lowest
/// index. Throws NumericalError on a non-finite update.
void step_backward(std::span<const double> next, int k, const ControlProblem& problem,
                   const GammaSet& gamma, const SpaceTimeGrid& grid, std::span<double> out,
                   std::span<int> policy_out, std::span<const std::size_t> control_ids = {});

struct StepResult {
  std::vector<double> layer;
  std::vector<int> policy;
};
StepResult step_backward(std::span<const double> next, int k, const ControlProblem& problem,
                         const GammaSet& gamma, const SpaceTimeGrid& grid);

/// Marches `layer` (at time index k_from) back to k_to using the controls in
/// `control_ids` (all of U when empty).
std::vector<double> march_backward(std::span<const double> layer, int k_from, int k_to,
                                   const ControlProblem& problem, const GammaSet& gamma,
                                   const SpaceTimeGrid& grid,
                                   std::span<const std::size_t> control_ids = {});

/// Full backward solve from V(T, x) = Phi(x). The grid must pass check_cfl.
ValueField solve_hjb(const ControlProblem& problem, const GammaSet& gamma,
                     const SpaceTimeGrid& grid);

/// Centered time difference plus sup_u of the scheme Hamiltonian at (k, i),
/// for 1 <= k <= nt - 1 and interior i.
double pde_residual(const ValueField& field, int k, int i, const ControlProblem& problem,
                    const GammaSet& gamma);

}  // namespace gctl
