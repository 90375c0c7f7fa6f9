#include "gctl/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gctl {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bachelier_call(double x, double strike, double s, double tau) {
  if (tau <= 0.0 || s == 0.0) return std::max(x - strike, 0.0);
  const double sd = s * std::sqrt(tau);
  const double d = (x - strike) / sd;
  return (x - strike) * normal_cdf(d) + sd * normal_pdf(d);
}

Terminal make_terminal(const std::string& name, double strike) {
  if (name == "linear")
    return {name, [](double x) { return x; }, [](double) { return 1.0; },
            [](double) { return 0.0; }};
  if (name == "square")
    return {name, [](double x) { return x * x; }, [](double x) { return 2.0 * x; },
            [](double) { return 2.0; }};
  if (name == "neg-square")
    return {name, [](double x) { return -x * x; }, [](double x) { return -2.0 * x; },
            [](double) { return -2.0; }};
  if (name == "cosine")
    return {name, [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); },
            [](double x) { return -std::cos(x); }};
  if (name == "call")
    return {name, [strike](double x) { return std::max(x - strike, 0.0); }, {}, {}};
  if (name == "abs") return {name, [](double x) { return std::abs(x); }, {}, {}};
  throw DomainError("unknown terminal '" + name + "'");
}

std::vector<std::string> catalog_ids() {
  return {"linear",     "gheat-square",   "call-payoff", "recursive-discount",
          "two-control", "single-control", "h-drift"};
}

namespace {

// Lipschitz constant of the terminal on the grid box (square-type payoffs
// are only locally Lipschitz).
double terminal_lipschitz(const Terminal& term, double radius) {
  if (term.name == "square" || term.name == "neg-square") return std::max(1.0, 2.0 * radius);
  return 1.0;
}

}  // namespace

CatalogEntry build_catalog_entry(const ExperimentConfig& cfg) {
  const auto ids = catalog_ids();
  const std::string& id = cfg.problem_id;
  if (std::find(ids.begin(), ids.end(), id) == ids.end())
    throw DomainError("unknown problem id '" + id + "'");

  std::string term_name = cfg.terminal;
  if (term_name.empty()) {
    if (id == "linear" || id == "h-drift") term_name = "linear";
    else if (id == "call-payoff") term_name = "call";
    else if (id == "two-control" || id == "single-control") term_name = "cosine";
    else term_name = "square";
  }

  CatalogEntry e{id, {}, GammaSet::interval(cfg.sigma_low, cfg.sigma_high),
                 make_terminal(term_name, cfg.strike), {}};
  ControlProblem& p = e.problem;
  p.name = id;
  p.horizon = cfg.horizon;
  p.terminal = [v = e.terminal.value](const Vec& x) { return v(x(0)); };
  p.diffusion = [](double, const Vec&, const Vec&) { return Mat::Identity(1, 1); };
  p.controls = {vec1(0.0)};

  const double radius = std::max(std::abs(cfg.x_min), std::abs(cfg.x_max));
  double lip = terminal_lipschitz(e.terminal, radius);
  const double T = cfg.horizon;
  const double lo2 = cfg.sigma_low * cfg.sigma_low, hi2 = cfg.sigma_high * cfg.sigma_high;

  // Value of the pure G-heat problem for the chosen terminal, where known.
  auto heat_oracle = [&](double scale2_hi,
                         double scale2_lo) -> std::function<double(double, double)> {
    if (term_name == "linear") return [](double, double x) { return x; };
    if (term_name == "square")
      return [T, scale2_hi](double t, double x) { return x * x + scale2_hi * (T - t); };
    if (term_name == "neg-square")
      return [T, scale2_lo](double t, double x) { return -x * x - scale2_lo * (T - t); };
    if (term_name == "call") {
      // Convex data: the upper volatility is active everywhere.
      const double k = cfg.strike;
      return [T, k, s = std::sqrt(scale2_hi)](double t, double x) {
        return bachelier_call(x, k, s, T - t);
      };
    }
    if (term_name == "cosine" && scale2_hi == scale2_lo)
      return [T, scale2_hi](double t, double x) {
        return std::exp(-0.5 * scale2_hi * (T - t)) * std::cos(x);
      };
    return {};
  };

  if (id == "linear" || id == "gheat-square" || id == "call-payoff") {
    e.oracle = heat_oracle(hi2, lo2);
  } else if (id == "recursive-discount") {
    const double beta = cfg.beta;
    p.generator = [beta](double, const Vec&, double y, const Vec&, const Vec&) { return -beta * y; };
    p.y_lip = std::abs(beta);
    lip = std::max(lip, std::abs(beta));
    // V = e^{-beta (T - t)} u by positive homogeneity of G.
    if (auto heat = heat_oracle(hi2, lo2))
      e.oracle = [heat, beta, T](double t, double x) {
        return std::exp(-beta * (T - t)) * heat(t, x);
      };
  } else if (id == "two-control" || id == "single-control") {
    std::vector<double> us = cfg.controls;
    if (us.empty()) us = id == "two-control" ? std::vector<double>{0.5, 1.0} : std::vector<double>{1.0};
    if (id == "single-control") us.resize(1);
    p.controls.clear();
    for (double u : us) p.controls.push_back(vec1(u));
    p.m = 1;
    p.diffusion = [](double, const Vec&, const Vec& u) { return Mat::Constant(1, 1, u(0)); };
    const double umax = *std::max_element(us.begin(), us.end(),
                                          [](double a, double b) { return std::abs(a) < std::abs(b); });
    lip = std::max(lip, 1.0);
    if (term_name == "square" || term_name == "call" || term_name == "linear" ||
        us.size() == 1) {
      // Convex or linear data, or no choice: the largest diffusion is optimal.
      e.oracle = heat_oracle(hi2 * umax * umax, lo2 * umax * umax);
      if (term_name == "neg-square") {
        const double umin = *std::min_element(us.begin(), us.end(), [](double a, double b) {
          return std::abs(a) < std::abs(b);
        });
        e.oracle = us.size() == 1 ? heat_oracle(hi2 * umax * umax, lo2 * umax * umax)
                                  : heat_oracle(hi2 * umin * umin, lo2 * umin * umin);
      }
    }
  } else if (id == "h-drift") {
    const double eta = cfg.eta;
    p.qv_drift = [eta](double, const Vec&, const Vec&, int, int) { return vec1(eta); };
    lip = std::max(lip, std::abs(eta));
    if (term_name == "linear") {
      const double rate = eta >= 0.0 ? eta * hi2 : eta * lo2;  // G(2 eta)
      e.oracle = [rate, T](double t, double x) { return x + rate * (T - t); };
    }
  }
  p.lip_const = lip;
  p.validate();
  return e;
}

}  // namespace gctl
