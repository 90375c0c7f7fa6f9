#pragma once

#include "gctl/grid.hpp"
#include "gctl/measures.hpp"
#include "gctl/problem.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace gctl {

/// Admissible control at desk scale: a constant in U, an open-loop sequence
/// (one value per step), or a feedback policy read off an HJB value field.
class ControlPath {
 public:
  static ControlPath constant(Vec u);
  static ControlPath open_loop(std::vector<Vec> per_step);
  /// Piecewise constant in time, nearest grid node in space.
  static ControlPath feedback(std::shared_ptr<const ValueField> field);

  /// Control in force on step k, which starts at time t in state x.
  const Vec& at(std::size_t k, double t, const Vec& x) const;

  /// Throws DomainError if a value is not an element of `controls`.
  void validate(const std::vector<Vec>& controls) const;

 private:
  struct Constant { Vec u; };
  struct OpenLoop { std::vector<Vec> us; };
  struct Feedback { std::shared_ptr<const ValueField> field; };
  std::variant<Constant, OpenLoop, Feedback> kind_;

  explicit ControlPath(std::variant<Constant, OpenLoop, Feedback> k) : kind_(std::move(k)) {}
};

inline constexpr double kStateExplosionBound = 1e6;

/// Euler scheme for dX = b dt + h_ij d<B^i,B^j> + sigma dB on the bundle's
/// step grid, coefficients frozen at the left end of each step. Returns the
/// nt + 1 states. Throws NumericalError once |X_k| exceeds 1e6.
std::vector<Vec> euler_forward(const ControlProblem& problem, const ControlPath& control,
                               const PathBundle& bundle, double t0, const Vec& x0);

/// One Euler step with explicit increments (used by the tree solver).
Vec euler_step(const ControlProblem& problem, double t, const Vec& x, const Vec& u, double dt,
               const Vec& db, const Mat& dqv);

}  // namespace gctl
