#pragma once

#include "gctl/gcore.hpp"
#include "gctl/grid.hpp"
#include "gctl/problem.hpp"

namespace gctl {

/// Control problem whose HJB equation is the backward G-heat equation with
/// terminal data phi: b = h = f = g = 0, sigma = 1, a single control.
ControlProblem g_heat_problem(const TestFunction& phi, double horizon);

/// Solves d_t u - G(u_xx) = 0, u(0, x) = phi(x) on [0, horizon] (d = 1).
/// Layer k of the result is heat time t_k = k * dt; `grid` is read with
/// t0 = 0, t_end = horizon.
ValueField solve_g_heat(const TestFunction& phi, const GammaSet& gamma, double horizon,
                        const SpaceTimeGrid& grid);

}  // namespace gctl
