#pragma once

#include "gctl/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace gctl {

/// Uniform space-time grid on [x_min, x_max] x [t0, t_end] for n = d = 1.
struct SpaceTimeGrid {
  double x_min = -1.0;
  double x_max = 1.0;
  int nx = 3;
  int nt = 1;
  double t0 = 0.0;
  double t_end = 1.0;

  SpaceTimeGrid() = default;
  SpaceTimeGrid(double x_min, double x_max, int nx, int nt, double t0, double t_end);

  double dx() const { return (x_max - x_min) / (nx - 1); }
  double dt() const { return (t_end - t0) / nt; }
  double x(int i) const { return i + 1 == nx ? x_max : x_min + i * dx(); }
  double t(int k) const { return k == nt ? t_end : t0 + k * dt(); }

  /// Index of the node nearest to x, clamped into the grid.
  int nearest(double x) const;
  /// Index k with t(k) <= t < t(k+1), clamped into [0, nt - 1].
  int step_index(double t) const;

  /// Throws DomainError on violated invariants.
  void validate() const;
};

/// Value function and argmax policy on a grid. Layers are time-major:
/// v(k, i) = V(t_k, x_i); policy(k, i) indexes `controls` for k < nt.
struct ValueField {
  SpaceTimeGrid grid;
  std::vector<double> values;
  std::vector<int> policy_index;
  std::vector<Vec> controls;

  ValueField() = default;
  ValueField(SpaceTimeGrid g, std::vector<Vec> controls);

  double& v(int k, int i) { return values[static_cast<std::size_t>(k) * grid.nx + i]; }
  double v(int k, int i) const { return values[static_cast<std::size_t>(k) * grid.nx + i]; }
  int& policy(int k, int i) { return policy_index[static_cast<std::size_t>(k) * grid.nx + i]; }
  int policy(int k, int i) const {
    return policy_index[static_cast<std::size_t>(k) * grid.nx + i];
  }
  const Vec& policy_control(int k, int i) const { return controls.at(policy(k, i)); }

  std::span<double> layer(int k) {
    return {values.data() + static_cast<std::size_t>(k) * grid.nx,
            static_cast<std::size_t>(grid.nx)};
  }
  std::span<const double> layer(int k) const {
    return {values.data() + static_cast<std::size_t>(k) * grid.nx,
            static_cast<std::size_t>(grid.nx)};
  }

  /// Linear interpolation of layer k at x (clamped to the grid).
  double interpolate(int k, double x) const;

  /// Field with layers (and policy rows) in reverse time order.
  ValueField time_reversed() const;
};

/// CSV with header `t,x,v,policy`, one row per node in time-major order and
/// 17 significant digits. The policy column holds the first control component
/// and is `nan` on the terminal layer.
void write_csv(std::ostream& os, const ValueField& field);

/// Shortest-round-trip-safe text for a double (17 significant digits).
std::string format_double(double x);

}  // namespace gctl
