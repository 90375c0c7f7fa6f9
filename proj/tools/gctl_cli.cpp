// Command-line runner for the catalog experiments.

#include "gctl/config.hpp"
#include "gctl/runner.hpp"
#include "gctl/types.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
  CLI::App app{"Value functions of recursive control problems under volatility uncertainty"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  for (const auto& name : gctl::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--output", output_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
    sub->add_option("--threads", threads, "worker threads, 0 = auto");
  }
  CLI11_PARSE(app, argc, argv);

  gctl::ExperimentConfig cfg;
  try {
    cfg = gctl::load_config(config_path);
  } catch (const gctl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;

  return gctl::run(app.get_subcommands().front()->get_name(), cfg, std::cout);
}
