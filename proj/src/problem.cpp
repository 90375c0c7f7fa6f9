#include "gctl/problem.hpp"

#include "gctl/rng.hpp"

#include <cmath>

namespace gctl {

Vec ControlProblem::b(double t, const Vec& x, const Vec& u) const {
  if (!drift) return Vec::Zero(n);
  return drift(t, x, u);
}

Vec ControlProblem::h(double t, const Vec& x, const Vec& u, int i, int j) const {
  if (!qv_drift) return Vec::Zero(n);
  if (i == j) return qv_drift(t, x, u, i, j);
  return 0.5 * (qv_drift(t, x, u, i, j) + qv_drift(t, x, u, j, i));
}

Mat ControlProblem::sigma(double t, const Vec& x, const Vec& u) const {
  if (!diffusion) return Mat::Zero(n, d);
  return diffusion(t, x, u);
}

double ControlProblem::f(double t, const Vec& x, double y, const Vec& z, const Vec& u) const {
  if (!generator) return 0.0;
  return generator(t, x, y, z, u);
}

double ControlProblem::g(double t, const Vec& x, double y, const Vec& z, const Vec& u, int i,
                         int j) const {
  if (!qv_generator) return 0.0;
  if (i == j) return qv_generator(t, x, y, z, u, i, j);
  return 0.5 * (qv_generator(t, x, y, z, u, i, j) + qv_generator(t, x, y, z, u, j, i));
}

void ControlProblem::validate() const {
  if (n < 1 || d < 1 || m < 1) throw DimensionError("ControlProblem: dimensions must be >= 1");
  if (!terminal) throw DomainError("ControlProblem: terminal function is required");
  if (controls.empty()) throw DomainError("ControlProblem: control set is empty");
  for (const auto& u : controls) {
    if (u.size() != m) throw DimensionError("ControlProblem: control of wrong dimension");
    if (!u.allFinite()) throw DomainError("ControlProblem: non-finite control");
  }
  if (!(horizon > 0.0)) throw DomainError("ControlProblem: horizon must be positive");
  if (!(lip_const > 0.0)) throw DomainError("ControlProblem: Lipschitz constant must be positive");
}

ControlProblem ControlProblem::with_controls(std::vector<Vec> us) const {
  ControlProblem p = *this;
  p.controls = std::move(us);
  return p;
}

std::optional<std::string> check_lipschitz(const ControlProblem& p, double radius, int n_samples,
                                           std::uint64_t seed) {
  const Philox4x32 gen(seed);
  auto uni = [&](int s, int k, int c) { return radius * (2.0 * uniform_at(gen, s, k, c) - 1.0); };
  const double c = p.lip_const * (1.0 + 1e-9);
  for (int s = 0; s < n_samples; ++s) {
    Vec x1(p.n), x2(p.n), z1(p.d), z2(p.d);
    for (int i = 0; i < p.n; ++i) {
      x1[i] = uni(s, 0, i);
      x2[i] = uni(s, 1, i);
    }
    for (int i = 0; i < p.d; ++i) {
      z1[i] = uni(s, 2, i);
      z2[i] = uni(s, 3, i);
    }
    const double y1 = uni(s, 4, 0), y2 = uni(s, 5, 0);
    const double t = p.horizon * uniform_at(gen, s, 6, 0);
    const auto ui = static_cast<std::size_t>(uniform_at(gen, s, 7, 0) * p.controls.size());
    const auto vi = static_cast<std::size_t>(uniform_at(gen, s, 8, 0) * p.controls.size());
    const Vec& u = p.controls[ui];
    const Vec& v = p.controls[vi];
    const double dxu = (x1 - x2).norm() + (u - v).norm();

    double lhs = (p.b(t, x1, u) - p.b(t, x2, v)).norm() +
                 (p.sigma(t, x1, u) - p.sigma(t, x2, v)).norm();
    for (int i = 0; i < p.d; ++i)
      for (int j = 0; j < p.d; ++j) lhs += (p.h(t, x1, u, i, j) - p.h(t, x2, v, i, j)).norm();
    if (lhs > c * dxu) return "forward coefficients exceed the declared Lipschitz constant";

    const double dall = dxu + std::abs(y1 - y2) + (z1 - z2).norm();
    if (std::abs(p.f(t, x1, y1, z1, u) - p.f(t, x2, y2, z2, v)) > c * dall)
      return "generator f exceeds the declared Lipschitz constant";
    for (int i = 0; i < p.d; ++i)
      for (int j = 0; j < p.d; ++j)
        if (std::abs(p.g(t, x1, y1, z1, u, i, j) - p.g(t, x2, y2, z2, v, i, j)) > c * dall)
          return "generator g exceeds the declared Lipschitz constant";
    if (std::abs(p.phi(x1) - p.phi(x2)) > c * (x1 - x2).norm())
      return "terminal function exceeds the declared Lipschitz constant";
  }
  return std::nullopt;
}

}  // namespace gctl
