#include "gctl/measures.hpp"

#include "gctl/parallel.hpp"
#include "gctl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gctl {

ThetaPath ThetaPath::constant(double t0, double dt, std::size_t nt, const Mat& value) {
  return ThetaPath{t0, dt, std::vector<Mat>(nt, value)};
}

ThetaPath ThetaPath::constant(double t0, double dt, std::size_t nt, double value) {
  return constant(t0, dt, nt, Mat::Constant(1, 1, value));
}

void ThetaPath::validate(const GammaSet& gamma) const {
  if (values.empty()) throw DomainError("ThetaPath: no steps");
  if (!(dt > 0.0)) throw DomainError("ThetaPath: dt must be positive");
  for (const auto& v : values) {
    if (v.rows() != gamma.dim() || v.cols() != gamma.dim())
      throw DimensionError("ThetaPath: value shape does not match Gamma");
    if (gamma.kind() == GammaSet::Kind::kInterval) {
      const double s = v(0, 0);
      if (s < gamma.sigma_low() || s > gamma.sigma_high())
        throw DomainError("ThetaPath: value outside [sigma_low, sigma_high]");
    } else {
      const auto& pts = gamma.extreme_points();
      if (std::none_of(pts.begin(), pts.end(), [&](const Mat& g) { return g == v; }))
        throw DomainError("ThetaPath: value not in Gamma");
    }
  }
}

DriverBatch sample_driver(std::size_t nt, double dt, std::size_t n_paths, std::uint64_t seed,
                          int dim) {
  if (nt < 1 || n_paths < 1 || dim < 1) throw DomainError("sample_driver: sizes must be >= 1");
  if (!(dt > 0.0)) throw DomainError("sample_driver: dt must be positive");
  DriverBatch batch{n_paths, nt, dim, dt, seed, std::vector<double>(n_paths * nt * dim)};
  const Philox4x32 gen(seed);
  const double scale = std::sqrt(dt);
  parallel_for(static_cast<std::ptrdiff_t>(n_paths), [&](std::ptrdiff_t p) {
    double* out = batch.data.data() + static_cast<std::size_t>(p) * nt * dim;
    for (std::size_t k = 0; k < nt; ++k)
      for (int c = 0; c < dim; ++c) *out++ = scale * normal_at(gen, p, k, c);
  });
  return batch;
}

PathBundle distort(std::span<const double> w, const ThetaPath& theta, std::uint64_t seed) {
  const std::size_t nt = theta.steps();
  if (nt == 0) throw DomainError("distort: empty theta path");
  const auto d = theta.values.front().rows();
  if (w.size() != nt * static_cast<std::size_t>(d))
    throw DimensionError("distort: driver has " + std::to_string(w.size()) +
                         " entries, expected " + std::to_string(nt * d));
  PathBundle out;
  out.theta = theta;
  out.seed = seed;
  out.w.reserve(nt);
  out.b.reserve(nt + 1);
  out.qv.reserve(nt + 1);
  out.b.push_back(Vec::Zero(d));
  out.qv.push_back(Mat::Zero(d, d));
  for (std::size_t k = 0; k < nt; ++k) {
    const Mat& th = theta.values[k];
    Vec dw = Eigen::Map<const Vec>(w.data() + k * d, d);
    out.b.push_back(out.b.back() + th * dw);
    out.qv.push_back(out.qv.back() + th * th.transpose() * theta.dt);
    out.w.push_back(std::move(dw));
  }
  return out;
}

namespace {

std::vector<Mat> level_values(const GammaSet& gamma, int levels) {
  if (gamma.kind() == GammaSet::Kind::kFinite) return gamma.extreme_points();
  if (levels < 2) throw DomainError("theta lattice: levels must be >= 2 for an interval");
  const double lo = gamma.sigma_low(), hi = gamma.sigma_high();
  if (lo == hi) return {Mat::Constant(1, 1, lo)};
  std::vector<Mat> out;
  for (int i = 0; i < levels; ++i) {
    const double s = i + 1 == levels ? hi : lo + (hi - lo) * i / (levels - 1);
    out.push_back(Mat::Constant(1, 1, s));
  }
  return out;
}

}  // namespace

std::size_t theta_lattice_size(const GammaSet& gamma, int levels, std::size_t nt,
                               std::size_t cap) {
  if (nt < 1) throw DomainError("theta lattice: nt must be >= 1");
  const std::size_t base = level_values(gamma, levels).size();
  std::size_t size = 1;
  for (std::size_t k = 0; k < nt; ++k) {
    if (size > cap / base) {
      throw CapacityError("theta lattice: " + std::to_string(base) + "^" + std::to_string(nt) +
                          " paths exceeds the cap of " + std::to_string(cap));
    }
    size *= base;
  }
  return size;
}

std::vector<ThetaPath> build_theta_lattice(const GammaSet& gamma, int levels, std::size_t nt,
                                           double t0, double dt, std::size_t cap) {
  const std::size_t size = theta_lattice_size(gamma, levels, nt, cap);
  const auto values = level_values(gamma, levels);
  const std::size_t base = values.size();
  std::vector<ThetaPath> out;
  out.reserve(size);
  std::vector<std::size_t> digits(nt, 0);
  for (std::size_t n = 0; n < size; ++n) {
    ThetaPath th{t0, dt, {}};
    th.values.reserve(nt);
    for (std::size_t k = 0; k < nt; ++k) th.values.push_back(values[digits[k]]);
    out.push_back(std::move(th));
    for (std::size_t k = nt; k-- > 0;) {
      if (++digits[k] < base) break;
      digits[k] = 0;
    }
  }
  return out;
}

SublinearEstimator::SublinearEstimator(GammaSet gamma, double horizon, std::size_t nt, int levels,
                                       std::size_t n_paths, std::uint64_t seed, std::size_t cap)
    : gamma_(std::move(gamma)) {
  if (n_paths < 100) throw DomainError("mc estimator: n_paths must be >= 100");
  if (!(horizon > 0.0)) throw DomainError("mc estimator: horizon must be positive");
  const double dt = horizon / static_cast<double>(nt);
  lattice_ = build_theta_lattice(gamma_, levels, nt, 0.0, dt, cap);
  driver_ = sample_driver(nt, dt, n_paths, seed, gamma_.dim());
}

double SublinearEstimator::mean_under(const TestFunction& phi, std::size_t index,
                                      double* std_error) const {
  const ThetaPath& th = lattice_.at(index);
  const int d = gamma_.dim();
  const std::size_t n = driver_.n_paths;
  std::vector<double> vals(n);
  parallel_for(static_cast<std::ptrdiff_t>(n), [&](std::ptrdiff_t p) {
    Vec b = Vec::Zero(d);
    const auto w = driver_.path(p);
    for (std::size_t k = 0; k < driver_.nt; ++k)
      b.noalias() += th.values[k] * Eigen::Map<const Vec>(w.data() + k * d, d);
    vals[p] = phi(std::span<const double>(b.data(), d));
  });
  const double mean = pairwise_mean(vals);
  if (std_error) {
    std::vector<double> sq(n);
    for (std::size_t p = 0; p < n; ++p) sq[p] = (vals[p] - mean) * (vals[p] - mean);
    const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
    *std_error = std::sqrt(var / static_cast<double>(n));
  }
  return mean;
}

SublinearEstimate SublinearEstimator::estimate(const TestFunction& phi) const {
  SublinearEstimate best;
  best.estimate = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lattice_.size(); ++i) {
    double se = 0.0;
    const double m = mean_under(phi, i, &se);
    if (m > best.estimate) {
      best.estimate = m;
      best.std_error = se;
      best.argmax_index = i;
    }
  }
  best.argmax_theta = lattice_[best.argmax_index];
  return best;
}

SublinearEstimate mc_sublinear_expectation(const TestFunction& phi, const GammaSet& gamma,
                                           double horizon, std::size_t nt, int levels,
                                           std::size_t n_paths, std::uint64_t seed) {
  return SublinearEstimator(gamma, horizon, nt, levels, n_paths, seed).estimate(phi);
}

}  // namespace gctl
