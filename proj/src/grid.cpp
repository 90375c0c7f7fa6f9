#include "gctl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

namespace gctl {

SpaceTimeGrid::SpaceTimeGrid(double x_min_, double x_max_, int nx_, int nt_, double t0_,
                             double t_end_)
    : x_min(x_min_), x_max(x_max_), nx(nx_), nt(nt_), t0(t0_), t_end(t_end_) {
  validate();
}

void SpaceTimeGrid::validate() const {
  if (!(x_min < x_max)) throw DomainError("grid: x_min must be < x_max");
  if (nx < 3) throw DomainError("grid: nx must be >= 3");
  if (nt < 1) throw DomainError("grid: nt must be >= 1");
  if (!(t0 < t_end)) throw DomainError("grid: t0 must be < t_end");
}

int SpaceTimeGrid::nearest(double xq) const {
  const double r = std::round((xq - x_min) / dx());
  return static_cast<int>(std::clamp(r, 0.0, static_cast<double>(nx - 1)));
}

int SpaceTimeGrid::step_index(double tq) const {
  const double r = std::floor((tq - t0) / dt() + 1e-9);
  return static_cast<int>(std::clamp(r, 0.0, static_cast<double>(nt - 1)));
}

ValueField::ValueField(SpaceTimeGrid g, std::vector<Vec> us)
    : grid(g),
      values(static_cast<std::size_t>(g.nt + 1) * g.nx, 0.0),
      policy_index(static_cast<std::size_t>(g.nt) * g.nx, 0),
      controls(std::move(us)) {}

double ValueField::interpolate(int k, double xq) const {
  const double s = std::clamp((xq - grid.x_min) / grid.dx(), 0.0, grid.nx - 1.0);
  const int i = std::min(static_cast<int>(s), grid.nx - 2);
  const double w = s - i;
  if (w == 0.0) return v(k, i);
  return (1.0 - w) * v(k, i) + w * v(k, i + 1);
}

ValueField ValueField::time_reversed() const {
  ValueField out(grid, controls);
  for (int k = 0; k <= grid.nt; ++k) {
    const auto src = layer(grid.nt - k);
    std::copy(src.begin(), src.end(), out.layer(k).begin());
  }
  for (int k = 0; k < grid.nt; ++k)
    for (int i = 0; i < grid.nx; ++i) out.policy(k, i) = policy(grid.nt - 1 - k, i);
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& os, const ValueField& field) {
  const auto& g = field.grid;
  os << "t,x,v,policy\n";
  for (int k = 0; k <= g.nt; ++k) {
    const std::string t = format_double(g.t(k));
    for (int i = 0; i < g.nx; ++i) {
      const double pol = k < g.nt && !field.controls.empty()
                             ? field.policy_control(k, i)(0)
                             : std::numeric_limits<double>::quiet_NaN();
      os << t << ',' << format_double(g.x(i)) << ',' << format_double(field.v(k, i)) << ','
         << format_double(pol) << '\n';
    }
  }
}

}  // namespace gctl
