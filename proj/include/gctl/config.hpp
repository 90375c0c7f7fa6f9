#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gctl {

/// Experiment description read from a flat `key = value` file:
///
///   # comment
///   [problem]
///   id = gheat-square
///   sigma_low = 0.5
///   controls = 0.5, 1.0
///
/// Keys are addressed as `section.key`. Unknown keys are errors.
struct ExperimentConfig {
  // [problem]
  std::string problem_id = "gheat-square";
  double sigma_low = 0.5;
  double sigma_high = 1.0;
  double horizon = 1.0;
  double beta = 1.0;
  double strike = 0.0;
  double eta = 0.5;
  std::vector<double> controls;  // catalog default when empty
  double x0 = 0.0;
  std::string terminal;  // catalog default when empty

  // [grid]
  double x_min = -6.0;
  double x_max = 6.0;
  int nx = 401;
  int nt = 0;  // 0 = smallest CFL-valid nt
  double cfl_factor = 0.9;

  // [mc]
  std::size_t n_paths = 100000;
  int levels = 2;
  std::size_t mc_nt = 1;
  int n_basis = 3;
  std::uint64_t seed = 1;

  // [tree]
  int tree_steps = 2;

  // [check]
  double tolerance = 5e-3;
  double tree_tolerance = 5e-2;
  double dpp_t = 0.0;
  std::vector<double> dpp_windows{0.1, 0.05};
  double dpp_decay = 1.3;
  std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
  double f0_slope = 1.3;
  std::vector<int> nx_list{101, 201, 401};
  double padding = -1.0;  // < 0: 4 sigma_high sqrt(T)

  // [output]
  std::filesystem::path output_dir = "out";
  int threads = 0;
};

/// Throws gctl::DomainError with the offending line on malformed input or an
/// unknown key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace gctl
