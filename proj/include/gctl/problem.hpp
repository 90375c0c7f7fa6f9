#pragma once

#include "gctl/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gctl {

/// Coefficients of a controlled forward-backward system driven by a
/// d-dimensional G-Brownian motion:
///
///   dX = b dt + h_ij d<B^i,B^j> + sigma dB,                X_t = x
///  -dY = f dt + g_ij d<B^i,B^j> - Z dB - dK,               Y_T = Phi(X_T)
///
/// Empty optional coefficients are treated as identically zero.
struct ControlProblem {
  using DriftFn = std::function<Vec(double t, const Vec& x, const Vec& u)>;
  using QvDriftFn = std::function<Vec(double t, const Vec& x, const Vec& u, int i, int j)>;
  using DiffusionFn = std::function<Mat(double t, const Vec& x, const Vec& u)>;
  using GeneratorFn =
      std::function<double(double t, const Vec& x, double y, const Vec& z, const Vec& u)>;
  using QvGeneratorFn = std::function<double(double t, const Vec& x, double y, const Vec& z,
                                             const Vec& u, int i, int j)>;
  using TerminalFn = std::function<double(const Vec& x)>;

  std::string name;
  int n = 1;  // state dimension
  int d = 1;  // driver dimension
  int m = 1;  // control dimension

  DriftFn drift;            // b, R^n
  QvDriftFn qv_drift;       // h_ij, R^n
  DiffusionFn diffusion;    // sigma, n x d
  GeneratorFn generator;    // f
  QvGeneratorFn qv_generator;  // g_ij
  TerminalFn terminal;      // Phi

  std::vector<Vec> controls;  // finite U
  double horizon = 1.0;
  double lip_const = 1.0;
  /// Lipschitz constant of f and g in y; used by the grid's contraction check.
  double y_lip = 0.0;

  Vec b(double t, const Vec& x, const Vec& u) const;
  /// (h_ij + h_ji) / 2.
  Vec h(double t, const Vec& x, const Vec& u, int i, int j) const;
  Mat sigma(double t, const Vec& x, const Vec& u) const;
  double f(double t, const Vec& x, double y, const Vec& z, const Vec& u) const;
  /// (g_ij + g_ji) / 2.
  double g(double t, const Vec& x, double y, const Vec& z, const Vec& u, int i, int j) const;
  double phi(const Vec& x) const { return terminal(x); }

  bool has_qv_drift() const { return static_cast<bool>(qv_drift); }
  bool has_qv_generator() const { return static_cast<bool>(qv_generator); }

  /// Throws on missing mandatory coefficients or an empty control set.
  void validate() const;

  /// Copy with the control set replaced.
  ControlProblem with_controls(std::vector<Vec> us) const;
};

/// Spot-checks the declared Lipschitz constant on sampled pairs inside the
/// box |x|_inf <= radius. Returns a description of the first violation.
std::optional<std::string> check_lipschitz(const ControlProblem& problem, double radius,
                                           int n_samples, std::uint64_t seed);

/// Scalar helpers for the one-dimensional case.
inline Vec vec1(double x) { return Vec::Constant(1, x); }

}  // namespace gctl
