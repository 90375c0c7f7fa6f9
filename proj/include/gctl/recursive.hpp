#pragma once

#include "gctl/dynamics.hpp"
#include "gctl/gcore.hpp"
#include "gctl/grid.hpp"
#include "gctl/measures.hpp"
#include "gctl/problem.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gctl {

/// Non-recombining tree: every node branches over the Gamma extreme points
/// and a binomial driver step +/- sqrt(dt).
struct TreeSpec {
  int steps = 1;
  std::vector<double> theta_branch;
  /// Branch used as the reference measure for K (default: largest volatility).
  std::size_t reference_branch = 0;
  std::size_t node_cap = std::size_t{1} << 24;

  static TreeSpec from_gamma(const GammaSet& gamma, int steps);
  std::size_t branching() const { return 2 * theta_branch.size(); }
  void validate() const;
};

/// Discrete (Y, Z, K) on the tree. Layer j of `x`, `y`, `z` holds one entry
/// per tree node; child (theta index a, driver sign s) of node q sits at
/// q * branching + 2a + s with s = 0 for +sqrt(dt). Layer j of `k` follows the
/// reference-branch subtree only (2^j nodes, same child rule with a fixed).
struct BsdeSolution {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> k;
  std::vector<std::vector<int>> theta_argmax;
  double y0 = 0.0;
};

/// Conditional G-expectation recursion: at each node the max over theta of
/// the binomial mean of Y_next plus the generator terms, explicit in y.
BsdeSolution tree_gbsde_solve(const ControlProblem& problem, const ControlPath& control, double t0,
                              const Vec& x0, const TreeSpec& spec);

struct FixedMeasureResult {
  double y0 = 0.0;
  /// Standard error of the pathwise values Phi(X_T) + sum of generator terms.
  double std_error = 0.0;
  /// Set when some layer's regression was rank deficient and fell back to
  /// the layer mean.
  bool rank_fallback = false;
};

/// Least-squares Monte-Carlo backward induction for (Y, Z) under the single
/// measure P_theta (no K term). Polynomial basis in the state, n = d = 1.
FixedMeasureResult bsde_fixed_measure(const ControlProblem& problem, const ControlPath& control,
                                      const ThetaPath& theta, double t0, const Vec& x0,
                                      std::size_t n_paths, int n_basis, std::uint64_t seed);

/// Fixed-control backward semigroup on [t, s] for Markov terminal data
/// given on the grid at time s. t and s must be grid times with t < s.
std::vector<double> backward_semigroup_apply(const ControlProblem& problem,
                                             std::span<const double> terminal_layer,
                                             const Vec& u_fixed, double t, double s,
                                             const GammaSet& gamma, const SpaceTimeGrid& grid);

/// Grid time index of t; throws DomainError if t is not a grid time.
int grid_time_index(const SpaceTimeGrid& grid, double t);

}  // namespace gctl
