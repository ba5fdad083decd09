// smlab: command-line front end for the semi-Markov laboratory.
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "smlab/cli.hpp"
#include "smlab/config.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-Markov simulation and verification laboratory"};
  app.set_help_all_flag("--help-all");

  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
  std::optional<std::string> suites;
  std::optional<double> lambda;
  std::optional<std::size_t> reps;
  std::optional<std::string> grid;

  app.add_option("command", command, "validate | analyze | simulate | verify | telegraph")
      ->required()
      ->check(CLI::IsMember({"validate", "analyze", "simulate", "verify", "telegraph"}));
  app.add_option("--config", config_path, "YAML run configuration")->required();
  app.add_option("--seed", seed, "master seed (u64)");
  app.add_option("--workers", workers, "worker threads, 0 = available parallelism");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--suites", suites, "comma-separated verification suites");
  app.add_option("--lambda", lambda, "scaling parameter");
  app.add_option("--reps", reps, "replications for the CLT suite");
  app.add_option("--grid", grid, "time grid as start:stop:step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return smlab::kExitUsage;
  }

  smlab::RunConfig config;
  try {
    config = smlab::load_config(config_path);
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    if (out_dir) config.out_dir = *out_dir;
    if (suites) config.suites = split_list(*suites);
    if (lambda) config.lambda = *lambda;
    if (reps) config.reps = *reps;
    if (grid) config.grid = smlab::parse_grid(*grid);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return smlab::kExitUsage;
  }
  return smlab::dispatch(config, command, std::cout, std::cerr);
}
