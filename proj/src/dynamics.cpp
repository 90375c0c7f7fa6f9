#include "gctl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gctl {

ControlPath ControlPath::constant(Vec u) { return ControlPath(Constant{std::move(u)}); }

ControlPath ControlPath::open_loop(std::vector<Vec> per_step) {
  if (per_step.empty()) throw DomainError("ControlPath: empty open-loop sequence");
  return ControlPath(OpenLoop{std::move(per_step)});
}

ControlPath ControlPath::feedback(std::shared_ptr<const ValueField> field) {
  if (!field || field->controls.empty()) throw DomainError("ControlPath: feedback needs a field");
  return ControlPath(Feedback{std::move(field)});
}

const Vec& ControlPath::at(std::size_t k, double t, const Vec& x) const {
  if (const auto* c = std::get_if<Constant>(&kind_)) return c->u;
  if (const auto* o = std::get_if<OpenLoop>(&kind_)) {
    if (k >= o->us.size()) throw DomainError("ControlPath: open-loop sequence too short");
    return o->us[k];
  }
  const auto& f = *std::get<Feedback>(kind_).field;
  return f.policy_control(f.grid.step_index(t), f.grid.nearest(x(0)));
}

void ControlPath::validate(const std::vector<Vec>& controls) const {
  auto in_u = [&](const Vec& u) {
    return std::any_of(controls.begin(), controls.end(),
                       [&](const Vec& c) { return c.size() == u.size() && c == u; });
  };
  if (const auto* c = std::get_if<Constant>(&kind_)) {
    if (!in_u(c->u)) throw DomainError("ControlPath: constant control not in U");
  } else if (const auto* o = std::get_if<OpenLoop>(&kind_)) {
    for (const auto& u : o->us)
      if (!in_u(u)) throw DomainError("ControlPath: open-loop value not in U");
  } else {
    for (const auto& u : std::get<Feedback>(kind_).field->controls)
      if (!in_u(u)) throw DomainError("ControlPath: policy value not in U");
  }
}

Vec euler_step(const ControlProblem& problem, double t, const Vec& x, const Vec& u, double dt,
               const Vec& db, const Mat& dqv) {
  Vec next = x + problem.b(t, x, u) * dt + problem.sigma(t, x, u) * db;
  if (problem.has_qv_drift()) {
    for (int i = 0; i < problem.d; ++i)
      for (int j = 0; j < problem.d; ++j) next += problem.h(t, x, u, i, j) * dqv(i, j);
  }
  return next;
}

std::vector<Vec> euler_forward(const ControlProblem& problem, const ControlPath& control,
                               const PathBundle& bundle, double t0, const Vec& x0) {
  if (x0.size() != problem.n) throw DimensionError("euler_forward: x0 has wrong dimension");
  if (!x0.allFinite()) throw DomainError("euler_forward: x0 is not finite");
  const std::size_t nt = bundle.steps();
  if (nt == 0 || bundle.b.size() != nt + 1 || bundle.qv.size() != nt + 1)
    throw DimensionError("euler_forward: malformed path bundle");
  if (bundle.b.front().size() != problem.d)
    throw DimensionError("euler_forward: bundle dimension does not match the problem");
  const double dt = bundle.theta.dt;
  std::vector<Vec> xs;
  xs.reserve(nt + 1);
  xs.push_back(x0);
  for (std::size_t k = 0; k < nt; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    const Vec& x = xs.back();
    const Vec& u = control.at(k, t, x);
    Vec next = euler_step(problem, t, x, u, dt, bundle.b[k + 1] - bundle.b[k],
                          bundle.qv[k + 1] - bundle.qv[k]);
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kStateExplosionBound) {
      throw NumericalError("euler_forward: state left |x| <= 1e6 at step " +
                           std::to_string(k + 1) + " (t = " + std::to_string(t + dt) + ")");
    }
    xs.push_back(std::move(next));
  }
  return xs;
}

}  // namespace gctl
