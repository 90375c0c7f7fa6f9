#pragma once

#include "gctl/gcore.hpp"
#include "gctl/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gctl {

/// Piecewise-constant volatility selection with values in Gamma.
struct ThetaPath {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<Mat> values;

  std::size_t steps() const { return values.size(); }
  /// Scalar value at step k (d = 1).
  double scalar(std::size_t k) const { return values[k](0, 0); }

  static ThetaPath constant(double t0, double dt, std::size_t nt, const Mat& value);
  static ThetaPath constant(double t0, double dt, std::size_t nt, double value);
  /// Throws DomainError if some value is outside gamma or the path is empty.
  void validate(const GammaSet& gamma) const;
};

/// Gaussian driver increments for a batch of paths, laid out path-major.
struct DriverBatch {
  std::size_t n_paths = 0;
  std::size_t nt = 0;
  int dim = 1;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> data;

  std::span<const double> path(std::size_t p) const {
    return {data.data() + p * nt * dim, nt * static_cast<std::size_t>(dim)};
  }
  double at(std::size_t p, std::size_t k, int c = 0) const { return data[(p * nt + k) * dim + c]; }
};

/// I.i.d. N(0, dt) increments. Draw (p, k, c) depends only on (seed, p, k, c).
DriverBatch sample_driver(std::size_t nt, double dt, std::size_t n_paths, std::uint64_t seed,
                          int dim = 1);

/// Driver, distorted path and quadratic variation for one sample.
struct PathBundle {
  std::vector<Vec> w;   // nt increments
  std::vector<Vec> b;   // nt + 1 points, b[0] = 0
  std::vector<Mat> qv;  // nt + 1 matrices, qv[0] = 0
  ThetaPath theta;
  std::uint64_t seed = 0;

  std::size_t steps() const { return w.size(); }
};

/// b_{k+1} = b_k + theta_k dw_k and qv_{k+1} = qv_k + theta_k theta_k^T dt.
/// `w` holds nt * d increments in step-major order.
PathBundle distort(std::span<const double> w, const ThetaPath& theta, std::uint64_t seed = 0);

inline constexpr std::size_t kDefaultLatticeCap = 1'000'000;

/// All piecewise-constant selections on the level grid of Gamma, in
/// lexicographic order (step 0 most significant).
std::vector<ThetaPath> build_theta_lattice(const GammaSet& gamma, int levels, std::size_t nt,
                                           double t0 = 0.0, double dt = 1.0,
                                           std::size_t cap = kDefaultLatticeCap);

/// Number of lattice elements without building them; throws past `cap`.
std::size_t theta_lattice_size(const GammaSet& gamma, int levels, std::size_t nt,
                               std::size_t cap = kDefaultLatticeCap);

struct SublinearEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  ThetaPath argmax_theta;
  std::size_t argmax_index = 0;
};

/// Lower estimate of the sublinear expectation of phi(B_T): the maximum over
/// a theta-lattice of classical Monte-Carlo means. All lattice members share
/// one driver batch (common random numbers).
class SublinearEstimator {
 public:
  SublinearEstimator(GammaSet gamma, double horizon, std::size_t nt, int levels,
                     std::size_t n_paths, std::uint64_t seed,
                     std::size_t cap = kDefaultLatticeCap);

  SublinearEstimate estimate(const TestFunction& phi) const;
  /// Classical mean of phi(B_T) under lattice member `index`.
  double mean_under(const TestFunction& phi, std::size_t index, double* std_error = nullptr) const;

  const std::vector<ThetaPath>& lattice() const { return lattice_; }
  const DriverBatch& driver() const { return driver_; }

 private:
  GammaSet gamma_;
  std::vector<ThetaPath> lattice_;
  DriverBatch driver_;
};

SublinearEstimate mc_sublinear_expectation(const TestFunction& phi, const GammaSet& gamma,
                                           double horizon, std::size_t nt, int levels,
                                           std::size_t n_paths, std::uint64_t seed);

}  // namespace gctl
