#include "gctl/gcore.hpp"

#include "gctl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gctl {

namespace {

constexpr double kSymmetryTol = 1e-12;

Mat symmetrized(const Mat& a, const GammaSet& gamma) {
  if (a.rows() != gamma.dim() || a.cols() != gamma.dim()) {
    throw DimensionError("G: matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected dimension " +
                         std::to_string(gamma.dim()));
  }
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw DomainError("G: argument is not symmetric");
  }
  return 0.5 * (a + a.transpose());
}

double half_trace(const Mat& g, const Mat& a) { return 0.5 * (g * g.transpose() * a).trace(); }

}  // namespace

GammaSet GammaSet::interval(double sigma_low, double sigma_high) {
  if (!std::isfinite(sigma_low) || !std::isfinite(sigma_high) || !(sigma_low > 0.0) ||
      sigma_low > sigma_high) {
    throw DomainError("GammaSet: interval requires 0 < sigma_low <= sigma_high");
  }
  GammaSet s;
  s.kind_ = Kind::kInterval;
  s.dim_ = 1;
  s.sigma_low_ = sigma_low;
  s.sigma_high_ = sigma_high;
  s.extremes_ = {Mat::Constant(1, 1, sigma_low)};
  if (sigma_high != sigma_low) s.extremes_.push_back(Mat::Constant(1, 1, sigma_high));
  return s;
}

GammaSet GammaSet::finite(std::vector<Mat> gammas) {
  if (gammas.empty()) throw DomainError("GammaSet: empty set");
  const auto d = gammas.front().rows();
  if (d < 1) throw DimensionError("GammaSet: zero-sized matrix");
  GammaSet s;
  s.kind_ = Kind::kFinite;
  s.dim_ = static_cast<int>(d);
  for (auto& g : gammas) {
    if (g.rows() != d || g.cols() != d) throw DimensionError("GammaSet: mixed matrix shapes");
    if (!g.allFinite()) throw DomainError("GammaSet: non-finite entry");
    const bool seen = std::any_of(s.extremes_.begin(), s.extremes_.end(),
                                  [&](const Mat& e) { return e == g; });
    if (!seen) s.extremes_.push_back(std::move(g));
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& g : s.extremes_) {
    const double n = g.norm();
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  s.sigma_low_ = lo;
  s.sigma_high_ = hi;
  return s;
}

std::vector<double> GammaSet::scalar_extremes() const {
  if (dim_ != 1) throw DimensionError("GammaSet: scalar extremes need d = 1");
  std::vector<double> out;
  out.reserve(extremes_.size());
  for (const auto& g : extremes_) out.push_back(g(0, 0));
  return out;
}

double GammaSet::lower_variance() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& g : extremes_) {
    Eigen::SelfAdjointEigenSolver<Mat> es(g * g.transpose(), Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return std::max(lo, 0.0);
}

double GammaSet::upper_variance() const {
  double hi = 0.0;
  for (const auto& g : extremes_) {
    Eigen::SelfAdjointEigenSolver<Mat> es(g * g.transpose(), Eigen::EigenvaluesOnly);
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  }
  return hi;
}

double g_eval(double a, const GammaSet& gamma) {
  if (gamma.dim() != 1) throw DimensionError("G: scalar argument needs d = 1");
  if (gamma.kind() == GammaSet::Kind::kInterval) {
    const double lo = gamma.sigma_low(), hi = gamma.sigma_high();
    return 0.5 * (hi * hi * std::max(a, 0.0) - lo * lo * std::max(-a, 0.0));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& g : gamma.extreme_points()) best = std::max(best, 0.5 * g(0, 0) * g(0, 0) * a);
  return best;
}

double g_eval(const Mat& a, const GammaSet& gamma) {
  const Mat s = symmetrized(a, gamma);
  if (gamma.kind() == GammaSet::Kind::kInterval) return g_eval(s(0, 0), gamma);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& g : gamma.extreme_points()) best = std::max(best, half_trace(g, s));
  return best;
}

Mat g_maximizer(const Mat& a, const GammaSet& gamma) {
  const Mat s = symmetrized(a, gamma);
  const auto& pts = gamma.extreme_points();
  std::size_t arg = 0;
  double best = half_trace(pts[0], s);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double v = half_trace(pts[i], s);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return pts[arg];
}

NondegeneracyReport check_nondegeneracy(const GammaSet& gamma, int n_samples, std::uint64_t seed) {
  return check_nondegeneracy(gamma, n_samples, seed, 0.5 * gamma.lower_variance());
}

NondegeneracyReport check_nondegeneracy(const GammaSet& gamma, int n_samples, std::uint64_t seed,
                                        double constant) {
  if (n_samples < 1) throw DomainError("check_nondegeneracy: n_samples must be >= 1");
  const int d = gamma.dim();
  const Philox4x32 gen(seed);
  NondegeneracyReport rep;
  rep.sigma_lb = constant;
  rep.sigma_low_sq = gamma.lower_variance();
  for (int s = 0; s < n_samples; ++s) {
    Mat m(d, d), p(d, d);
    std::uint32_t c = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        m(i, j) = 3.0 * normal_at(gen, s, 0, c);
        p(i, j) = normal_at(gen, s, 1, c);
        ++c;
      }
    const Mat a = 0.5 * (m + m.transpose());
    const Mat b = a - p * p.transpose();
    const double lhs = g_eval(a, gamma) - g_eval(b, gamma);
    const double rhs = constant * (a - b).trace();
    if (lhs < rhs - 1e-12 * std::max(1.0, std::abs(rhs))) {
      rep.passed = false;
      rep.violation = std::make_pair(a, b);
      break;
    }
  }
  return rep;
}

TestFunction TestFunction::scalar(std::function<double(double)> fn, int growth_order,
                                  double growth_const) {
  TestFunction t;
  t.eval = [fn = std::move(fn)](std::span<const double> x) { return fn(x[0]); };
  t.growth_order = growth_order;
  t.growth_const = growth_const;
  return t;
}

std::optional<std::pair<Vec, Vec>> check_growth(const TestFunction& phi, int dim, int n_samples,
                                                std::uint64_t seed, double radius) {
  const Philox4x32 gen(seed);
  for (int s = 0; s < n_samples; ++s) {
    Vec x(dim), y(dim);
    for (int i = 0; i < dim; ++i) {
      x[i] = radius * (2.0 * uniform_at(gen, s, 0, i) - 1.0);
      y[i] = radius * (2.0 * uniform_at(gen, s, 1, i) - 1.0);
    }
    const double k = phi.growth_order;
    const double bound = phi.growth_const *
                         (1.0 + std::pow(x.norm(), k) + std::pow(y.norm(), k)) * (x - y).norm();
    const double diff = std::abs(phi(std::span<const double>(x.data(), dim)) -
                                 phi(std::span<const double>(y.data(), dim)));
    if (diff > bound * (1.0 + 1e-12)) return std::make_pair(x, y);
  }
  return std::nullopt;
}

}  // namespace gctl
