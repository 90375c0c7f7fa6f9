#include "gctl/gheat.hpp"

#include "gctl/hjb.hpp"

namespace gctl {

ControlProblem g_heat_problem(const TestFunction& phi, double horizon) {
  ControlProblem p;
  p.name = "g-heat";
  p.diffusion = [](double, const Vec&, const Vec&) { return Mat::Identity(1, 1); };
  p.terminal = [phi](const Vec& x) { return phi(std::span<const double>(x.data(), x.size())); };
  p.controls = {vec1(0.0)};
  p.horizon = horizon;
  return p;
}

ValueField solve_g_heat(const TestFunction& phi, const GammaSet& gamma, double horizon,
                        const SpaceTimeGrid& grid) {
  if (gamma.dim() != 1) throw DimensionError("solve_g_heat: d = 1 only");
  if (grid.t0 != 0.0 || grid.t_end != horizon) {
    throw DomainError("solve_g_heat: grid must span [0, horizon]");
  }
  return solve_hjb(g_heat_problem(phi, horizon), gamma, grid).time_reversed();
}

}  // namespace gctl
