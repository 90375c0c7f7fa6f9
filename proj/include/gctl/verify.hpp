#pragma once

#include "gctl/gcore.hpp"
#include "gctl/grid.hpp"
#include "gctl/problem.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace gctl {

struct DppResidual {
  double max_residual = 0.0;  // max |r_i|
  double min_residual = 0.0;  // min r_i, >= 0 up to scheme tolerance
  std::vector<double> per_node;
};

/// r_i = V(t, x_i) - max_{u in U} G^u_{t,s}[V(s, .)](x_i) with constant
/// controls on [t_{k_t}, t_{k_s}], using the solver's own stencil.
DppResidual dpp_residual(const ControlProblem& problem, const GammaSet& gamma,
                         const ValueField& field, int k_t, int k_s);

/// Largest adjacent-node slope of layer k, ignoring `padding` at both ends.
double modulus_x(const ValueField& field, int k, double padding = 0.0);

struct HolderFit {
  double exponent = 0.0;
  double constant = 0.0;
  bool degenerate = false;  // every |v_k - v_T| below 1e-14; exponent = +inf
};

/// Log-log fit of |v(t_k, x_i) - v(T, x_i)| against T - t_k over the last
/// half of the layers.
HolderFit modulus_t(const ValueField& field, int i);

struct NamedFunction {
  std::string name;
  TestFunction fn;
};

struct AxiomRow {
  std::string axiom;
  std::string pair;
  double lhs = 0.0;
  double rhs = 0.0;
  bool passed = false;
};

struct AxiomsReport {
  std::vector<AxiomRow> rows;
  bool all_passed() const;
};

/// Sub-additivity, positive homogeneity, monotonicity and constant
/// preservation of the common-random-number lattice estimator, checked to
/// 1e-12 (relative) for each pair.
AxiomsReport axioms_check(const GammaSet& gamma, double horizon, std::size_t nt, int levels,
                          std::size_t n_paths, std::uint64_t seed,
                          const std::vector<std::pair<NamedFunction, NamedFunction>>& pairs,
                          double lambda = 2.5, double constant = 7.0);

struct McOptions {
  std::size_t n_paths = 20000;
  int levels = 2;
  std::size_t nt = 2;
  int n_basis = 3;
  std::uint64_t seed = 1;
};

struct OracleComparison {
  double tree_value = 0.0;
  double pde_value = 0.0;
  double mc_lower = 0.0;
  double mc_std_error = 0.0;
  double tree_pde_gap = 0.0;  // tree - pde
  double mc_pde_gap = 0.0;    // mc - pde
  bool mc_below_pde = false;  // mc <= pde + 3 se + scheme_tol
};

/// Tree recursion, PDE value and theta-lattice Monte-Carlo lower bound for a
/// single-control problem at (t0 of grid, x0).
OracleComparison oracle_compare(const ControlProblem& problem, const GammaSet& gamma, int steps,
                                const SpaceTimeGrid& grid, double x0, const McOptions& mc,
                                double scheme_tol = 5e-3);

/// phi(t, x) with its derivatives, used by the short-time expansion check.
struct SmoothTestFunction {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dt;
  std::function<double(double, double)> dx;
  std::function<double(double, double)> dxx;
};

struct F0Expansion {
  double f0 = 0.0;
  std::vector<double> deltas;
  std::vector<double> errors;
  double slope = 0.0;
  bool degenerate = false;  // every error below 1e-12; slope = +inf
};

struct ExpansionGrid {
  double x_min = -6.0;
  double x_max = 6.0;
  int nx = 401;
  double cfl_factor = 0.9;
};

/// F1 = phi_t + <b, phi_x> + f(t, x, phi, phi_x sigma, u),
/// F2 = 1/2 sigma^T phi_xx sigma, F0 = max_u [F1 + 2 G(F2)].
double f0_value(const ControlProblem& problem, const GammaSet& gamma,
                const SmoothTestFunction& phi, double t, double x);

/// E(delta) = |max_u G^u_{t,t+delta}[phi(t+delta, .)](x) - phi(t, x) - delta F0|
/// and the log-log slope of E against delta. Requires h = g = 0.
F0Expansion f0_expansion_check(const ControlProblem& problem, const GammaSet& gamma,
                               const SmoothTestFunction& phi, double t, double x,
                               const std::vector<double>& deltas,
                               const ExpansionGrid& grid = {});

/// Ordinary least squares slope and intercept of ys against xs.
std::pair<double, double> fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace gctl
