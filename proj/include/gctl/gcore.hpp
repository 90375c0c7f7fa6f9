#pragma once

#include "gctl/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace gctl {

/// The volatility uncertainty set. In one dimension it is an interval of
/// scalar volatilities; in higher dimension a finite set of d x d matrices.
class GammaSet {
 public:
  enum class Kind { kInterval, kFinite };

  /// Throws DomainError unless 0 < sigma_low <= sigma_high (both finite).
  static GammaSet interval(double sigma_low, double sigma_high);
  /// Throws DomainError on an empty set, mixed shapes or non-finite entries.
  /// Exact duplicates are dropped, first occurrence wins.
  static GammaSet finite(std::vector<Mat> gammas);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double sigma_low() const { return sigma_low_; }
  double sigma_high() const { return sigma_high_; }

  /// Candidate maximizers in enumeration order: {sigma_low, sigma_high} as 1x1
  /// matrices for an interval, the stored elements otherwise.
  const std::vector<Mat>& extreme_points() const { return extremes_; }

  /// Scalar volatilities of the extreme points (d = 1 only).
  std::vector<double> scalar_extremes() const;

  /// min over extreme points of lambda_min(gamma gamma^T). For an interval
  /// this is sigma_low^2.
  double lower_variance() const;
  /// max over extreme points of lambda_max(gamma gamma^T).
  double upper_variance() const;

 private:
  GammaSet() = default;

  Kind kind_ = Kind::kInterval;
  int dim_ = 1;
  double sigma_low_ = 0.0;
  double sigma_high_ = 0.0;
  std::vector<Mat> extremes_;
};

/// G(A) = 1/2 sup_{gamma} tr(gamma gamma^T A). A is symmetrized after a
/// 1e-12 symmetry check.
double g_eval(const Mat& a, const GammaSet& gamma);
double g_eval(double a, const GammaSet& gamma);

/// Element of the extreme-point enumeration attaining g_eval. Ties go to the
/// lowest index.
Mat g_maximizer(const Mat& a, const GammaSet& gamma);

struct NondegeneracyReport {
  bool passed = true;
  /// Constant c actually verified in G(A) - G(B) >= c tr(A - B).
  double sigma_lb = 0.0;
  /// Declared lower variance (sigma_low^2 for an interval).
  double sigma_low_sq = 0.0;
  std::optional<std::pair<Mat, Mat>> violation;
};

/// Samples A >= B via B = A - P P^T and checks the non-degeneracy inequality
/// with c = lower_variance() / 2, the sharp constant for G = 1/2 sup tr(...).
NondegeneracyReport check_nondegeneracy(const GammaSet& gamma, int n_samples, std::uint64_t seed);
/// Same check against a caller-supplied constant.
NondegeneracyReport check_nondegeneracy(const GammaSet& gamma, int n_samples, std::uint64_t seed,
                                        double constant);

/// A locally Lipschitz test function with declared polynomial growth:
/// |phi(x) - phi(y)| <= C (1 + |x|^k + |y|^k) |x - y|.
struct TestFunction {
  std::function<double(std::span<const double>)> eval;
  int growth_order = 0;
  double growth_const = 1.0;

  double operator()(double x) const { return eval(std::span<const double>(&x, 1)); }
  double operator()(std::span<const double> x) const { return eval(x); }

  /// Wraps a scalar function of one variable.
  static TestFunction scalar(std::function<double(double)> fn, int growth_order,
                             double growth_const);
};

/// Returns the first sampled pair (x, y) violating the growth bound, if any.
std::optional<std::pair<Vec, Vec>> check_growth(const TestFunction& phi, int dim, int n_samples,
                                                std::uint64_t seed, double radius = 10.0);

}  // namespace gctl
