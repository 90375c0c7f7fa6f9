#include "gctl/recursive.hpp"

#include "gctl/hjb.hpp"
#include "gctl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gctl {

TreeSpec TreeSpec::from_gamma(const GammaSet& gamma, int steps) {
  TreeSpec spec;
  spec.steps = steps;
  spec.theta_branch = gamma.scalar_extremes();
  spec.reference_branch = static_cast<std::size_t>(
      std::max_element(spec.theta_branch.begin(), spec.theta_branch.end()) -
      spec.theta_branch.begin());
  return spec;
}

void TreeSpec::validate() const {
  if (steps < 1) throw DomainError("TreeSpec: steps must be >= 1");
  if (theta_branch.empty()) throw DomainError("TreeSpec: no theta branches");
  if (reference_branch >= theta_branch.size())
    throw DomainError("TreeSpec: reference branch out of range");
  std::size_t layer = 1, total = 1;
  for (int j = 0; j < steps; ++j) {
    if (layer > node_cap / branching()) throw CapacityError("TreeSpec: tree exceeds the node cap");
    layer *= branching();
    total += layer;
    if (total > node_cap) throw CapacityError("TreeSpec: tree exceeds the node cap");
  }
}

BsdeSolution tree_gbsde_solve(const ControlProblem& problem, const ControlPath& control, double t0,
                              const Vec& x0, const TreeSpec& spec) {
  problem.validate();
  spec.validate();
  if (problem.n != 1 || problem.d != 1) throw DimensionError("tree solver supports n = d = 1");
  if (!(t0 < problem.horizon)) throw DomainError("tree solver: t0 must be before the horizon");
  const int steps = spec.steps;
  const std::size_t nb = spec.branching();
  const std::size_t na = spec.theta_branch.size();
  const double dt = (problem.horizon - t0) / steps;
  const double sq = std::sqrt(dt);

  BsdeSolution sol;
  sol.x.resize(steps + 1);
  sol.y.resize(steps + 1);
  sol.z.resize(steps);
  sol.theta_argmax.resize(steps);
  sol.x[0] = {x0(0)};

  auto time = [&](int j) { return t0 + j * dt; };
  auto check = [](double v, const char* what) {
    if (!std::isfinite(v)) throw NumericalError(std::string("tree solver: non-finite ") + what);
  };

  for (int j = 0; j < steps; ++j) {
    const auto& cur = sol.x[j];
    auto& nxt = sol.x[j + 1];
    nxt.resize(cur.size() * nb);
    parallel_for(static_cast<std::ptrdiff_t>(cur.size()), [&](std::ptrdiff_t q) {
      const Vec x = vec1(cur[q]);
      const Vec& u = control.at(j, time(j), x);
      for (std::size_t a = 0; a < na; ++a) {
        const double th = spec.theta_branch[a];
        const Mat dqv = Mat::Constant(1, 1, th * th * dt);
        for (int s = 0; s < 2; ++s) {
          const Vec db = vec1(th * (s == 0 ? sq : -sq));
          nxt[q * nb + 2 * a + s] = euler_step(problem, time(j), x, u, dt, db, dqv)(0);
        }
      }
    });
  }

  sol.y[steps].resize(sol.x[steps].size());
  for (std::size_t q = 0; q < sol.x[steps].size(); ++q) {
    sol.y[steps][q] = problem.phi(vec1(sol.x[steps][q]));
    check(sol.y[steps][q], "terminal value");
  }

  // Candidate value under the reference branch at every node, for K.
  std::vector<std::vector<double>> ref_value(steps);
  for (int j = steps - 1; j >= 0; --j) {
    const auto& xs = sol.x[j];
    const auto& ynext = sol.y[j + 1];
    auto& y = sol.y[j];
    auto& z = sol.z[j];
    auto& arg = sol.theta_argmax[j];
    y.resize(xs.size());
    z.resize(xs.size());
    arg.resize(xs.size());
    ref_value[j].resize(xs.size());
    const double t = time(j);
    parallel_for(static_cast<std::ptrdiff_t>(xs.size()), [&](std::ptrdiff_t q) {
      const Vec x = vec1(xs[q]);
      const Vec& u = control.at(j, t, x);
      const bool diffusive = problem.sigma(t, x, u)(0, 0) != 0.0;
      double best = -std::numeric_limits<double>::infinity();
      double best_z = 0.0;
      int best_a = 0;
      for (std::size_t a = 0; a < na; ++a) {
        const double th = spec.theta_branch[a];
        const double up = ynext[q * nb + 2 * a];
        const double down = ynext[q * nb + 2 * a + 1];
        const double mean = 0.5 * (up + down);
        const double zq = diffusive && th != 0.0 ? (up - down) / (2.0 * th * sq) : 0.0;
        const Vec zv = vec1(zq);
        double cand = mean + problem.f(t, x, mean, zv, u) * dt;
        if (problem.has_qv_generator()) cand += problem.g(t, x, mean, zv, u, 0, 0) * th * th * dt;
        if (a == spec.reference_branch) ref_value[j][q] = cand;
        if (cand > best) {
          best = cand;
          best_z = zq;
          best_a = static_cast<int>(a);
        }
      }
      y[q] = best;
      z[q] = best_z;
      arg[q] = best_a;
    });
    for (double v : y) check(v, "node value");
  }
  sol.y0 = sol.y[0][0];

  // K along the reference subtree: K_0 = 0, increments E_ref[...] - Y <= 0.
  sol.k.resize(steps + 1);
  sol.k[0] = {0.0};
  std::vector<std::size_t> nodes{0};
  for (int j = 0; j < steps; ++j) {
    std::vector<std::size_t> next_nodes;
    std::vector<double> next_k;
    next_nodes.reserve(nodes.size() * 2);
    next_k.reserve(nodes.size() * 2);
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      const std::size_t q = nodes[r];
      const double inc = ref_value[j][q] - sol.y[j][q];
      for (int s = 0; s < 2; ++s) {
        next_nodes.push_back(q * nb + 2 * spec.reference_branch + s);
        next_k.push_back(sol.k[j][r] + inc);
      }
    }
    nodes = std::move(next_nodes);
    sol.k[j + 1] = std::move(next_k);
  }
  return sol;
}

namespace {

// Least-squares fit of `target` on the polynomial basis of `xs`. Returns the
// fitted values; sets `deficient` when the design matrix is rank deficient.
std::vector<double> regress(const std::vector<double>& xs, const std::vector<double>& target,
                            int n_basis, bool& deficient) {
  const std::size_t n = xs.size();
  std::vector<double> fitted(n);
  double mean = pairwise_mean(xs);
  std::vector<double> sq(n);
  for (std::size_t p = 0; p < n; ++p) sq[p] = (xs[p] - mean) * (xs[p] - mean);
  const double sd = std::sqrt(pairwise_mean(sq));
  deficient = false;
  if (n_basis > 1 && sd > 0.0) {
    Mat design(static_cast<Eigen::Index>(n), n_basis);
    for (std::size_t p = 0; p < n; ++p) {
      const double s = (xs[p] - mean) / sd;
      double pw = 1.0;
      for (int c = 0; c < n_basis; ++c) {
        design(static_cast<Eigen::Index>(p), c) = pw;
        pw *= s;
      }
    }
    Eigen::ColPivHouseholderQR<Mat> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() == n_basis) {
      const Vec coef = qr.solve(Eigen::Map<const Vec>(target.data(), static_cast<Eigen::Index>(n)));
      const Vec fit = design * coef;
      for (std::size_t p = 0; p < n; ++p) fitted[p] = fit(static_cast<Eigen::Index>(p));
      return fitted;
    }
  }
  deficient = n_basis > 1;
  std::fill(fitted.begin(), fitted.end(), pairwise_mean(target));
  return fitted;
}

}  // namespace

FixedMeasureResult bsde_fixed_measure(const ControlProblem& problem, const ControlPath& control,
                                      const ThetaPath& theta, double t0, const Vec& x0,
                                      std::size_t n_paths, int n_basis, std::uint64_t seed) {
  problem.validate();
  if (problem.n != 1 || problem.d != 1) throw DimensionError("bsde_fixed_measure: n = d = 1");
  if (n_basis < 1) throw DomainError("bsde_fixed_measure: n_basis must be >= 1");
  if (n_paths < 100 * static_cast<std::size_t>(n_basis))
    throw DomainError("bsde_fixed_measure: need n_paths >= 100 * n_basis");
  const std::size_t nt = theta.steps();
  if (nt == 0) throw DomainError("bsde_fixed_measure: empty theta path");
  const double dt = theta.dt;

  const DriverBatch batch = sample_driver(nt, dt, n_paths, seed, 1);
  // states[k][p], increments db[k][p]
  std::vector<std::vector<double>> states(nt + 1, std::vector<double>(n_paths));
  std::vector<std::vector<double>> db(nt, std::vector<double>(n_paths));
  parallel_for(static_cast<std::ptrdiff_t>(n_paths), [&](std::ptrdiff_t p) {
    const PathBundle bundle = distort(batch.path(p), theta, seed);
    const auto xs = euler_forward(problem, control, bundle, t0, x0);
    for (std::size_t k = 0; k <= nt; ++k) states[k][p] = xs[k](0);
    for (std::size_t k = 0; k < nt; ++k) db[k][p] = bundle.b[k + 1](0) - bundle.b[k](0);
  });

  FixedMeasureResult res;
  std::vector<double> y(n_paths), target(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) y[p] = problem.phi(vec1(states[nt][p]));
  // Terminal value plus generator increments along each path, for the error bar.
  std::vector<double> pathwise = y;

  for (std::size_t kk = nt; kk-- > 0;) {
    const double t = t0 + static_cast<double>(kk) * dt;
    const double th2 = theta.scalar(kk) * theta.scalar(kk);
    bool deficient = false;
    const auto ycond = regress(states[kk], y, n_basis, deficient);
    if (deficient && kk > 0) res.rank_fallback = true;
    std::vector<double> zcond(n_paths, 0.0);
    if (th2 > 0.0) {
      for (std::size_t p = 0; p < n_paths; ++p) target[p] = y[p] * db[kk][p] / (th2 * dt);
      bool zdef = false;
      zcond = regress(states[kk], target, n_basis, zdef);
      if (zdef && kk > 0) res.rank_fallback = true;
    }
    for (std::size_t p = 0; p < n_paths; ++p) {
      const Vec x = vec1(states[kk][p]);
      const Vec& u = control.at(kk, t, x);
      const Vec z = vec1(zcond[p]);
      double v = ycond[p] + problem.f(t, x, ycond[p], z, u) * dt;
      if (problem.has_qv_generator()) v += problem.g(t, x, ycond[p], z, u, 0, 0) * th2 * dt;
      pathwise[p] += v - ycond[p];
      y[p] = v;
    }
  }
  res.y0 = pairwise_mean(y);
  std::vector<double> sq(n_paths);
  const double m = pairwise_mean(pathwise);
  for (std::size_t p = 0; p < n_paths; ++p) sq[p] = (pathwise[p] - m) * (pathwise[p] - m);
  res.std_error = std::sqrt(pairwise_sum(sq) / static_cast<double>(n_paths - 1) / n_paths);
  return res;
}

int grid_time_index(const SpaceTimeGrid& grid, double t) {
  const double r = std::round((t - grid.t0) / grid.dt());
  if (r < 0 || r > grid.nt) throw DomainError("time " + format_double(t) + " is outside the grid");
  const int k = static_cast<int>(r);
  if (std::abs(grid.t(k) - t) > 1e-9 * std::max(1.0, std::abs(t)))
    throw DomainError("time " + format_double(t) + " is not a grid time");
  return k;
}

std::vector<double> backward_semigroup_apply(const ControlProblem& problem,
                                             std::span<const double> terminal_layer,
                                             const Vec& u_fixed, double t, double s,
                                             const GammaSet& gamma, const SpaceTimeGrid& grid) {
  if (!(t < s)) throw DomainError("backward_semigroup_apply: need t < s");
  const auto it = std::find_if(problem.controls.begin(), problem.controls.end(),
                               [&](const Vec& c) { return c.size() == u_fixed.size() && c == u_fixed; });
  if (it == problem.controls.end()) throw DomainError("backward_semigroup_apply: u not in U");
  const std::size_t ids[] = {static_cast<std::size_t>(it - problem.controls.begin())};
  return march_backward(terminal_layer, grid_time_index(grid, s), grid_time_index(grid, t),
                        problem, gamma, grid, ids);
}

}  // namespace gctl
