#pragma once

#include "gctl/config.hpp"
#include "gctl/gcore.hpp"
#include "gctl/problem.hpp"
#include "gctl/verify.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gctl {

/// Named terminal functions shared by the catalog and the CLI checks.
/// Known names: linear, square, neg-square, call, cosine, abs.
struct Terminal {
  std::string name;
  std::function<double(double)> value;
  /// Empty for payoffs without a second derivative (call, abs).
  std::function<double(double)> dx;
  std::function<double(double)> dxx;
};

Terminal make_terminal(const std::string& name, double strike = 0.0);

/// Catalog problem with its uncertainty set and, where one exists, the
/// closed-form value V(t, x).
struct CatalogEntry {
  std::string id;
  ControlProblem problem;
  GammaSet gamma;
  Terminal terminal;
  std::function<double(double t, double x)> oracle;
};

/// Catalog ids: linear, gheat-square, call-payoff, recursive-discount,
/// two-control, single-control, h-drift.
std::vector<std::string> catalog_ids();

/// Throws DomainError on an unknown id or terminal.
CatalogEntry build_catalog_entry(const ExperimentConfig& cfg);

/// Standard normal density and distribution function.
double normal_pdf(double x);
double normal_cdf(double x);

/// E[max(x + s W_tau - K, 0)] for W_tau ~ N(0, tau).
double bachelier_call(double x, double strike, double s, double tau);

}  // namespace gctl
