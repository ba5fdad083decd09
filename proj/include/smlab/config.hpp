#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smlab/kernel.hpp"
#include "smlab/parallel.hpp"
#include "smlab/regen.hpp"
#include "smlab/telegraph.hpp"

namespace smlab {

/// Everything a laboratory run needs. Loaded from YAML; see README for the
/// grammar. Either `kernel` or `telegraph` (or both) must be present.
struct RunConfig {
  std::optional<SemiMarkovKernel> kernel;
  std::optional<TelegraphSpec> telegraph;

  double lambda = 400.0;
  std::size_t reps = 20000;
  double tol = 1e-10;
  std::uint64_t seed = 42;
  unsigned workers = kAutoWorkers;

  std::size_t v0 = 0;
  std::size_t initial = 0;
  StepFunction f = StepFunction::X;
  std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> t_points = {0.5, 1.0};
  std::vector<std::size_t> n_values = {100, 1000, 10000};
  std::size_t n_steps = 1000000;
  std::size_t n_cycles = 100000;
  double horizon = 1e5;
  double t = 1.0;
  int n_max = 20;
  std::vector<std::string> suites;  // empty: every applicable suite

  std::string out_dir = ".";

  /// The kernel block if given, otherwise the telegraph kernel.
  SemiMarkovKernel effective_kernel() const;

  bool operator==(const RunConfig& other) const;
};

/// Parses YAML text. Throws ParseError (with line/column) on malformed text
/// and SchemaError naming the field on semantically invalid content.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// Canonical YAML form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// FNV-1a 64 of the canonical serialization (ignoring workers and output
/// directory), as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// "start:stop:step" (stop inclusive) into a grid.
std::vector<double> parse_grid(const std::string& spec);

/// Suite names in canonical order; a suite's seed is derived from its
/// position here so it does not depend on which suites are requested.
const std::vector<std::string>& known_suites();

}  // namespace smlab
