#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "smlab/config.hpp"
#include "smlab/limits.hpp"
#include "smlab/verify.hpp"

namespace smlab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (validate, analyze, simulate, verify, telegraph),
/// writing its files under config.out_dir and a summary to `out`. Errors are
/// reported on `err` and mapped to kExitUsage.
int dispatch(const RunConfig& config, const std::string& subcommand, std::ostream& out, std::ostream& err);

/// The limit parameters `analyze` reports; `verify` uses the same record.
LimitParameters analyze_limits(const RunConfig& config);

/// Runs the requested suites (all applicable ones when none are named).
std::vector<VerificationReport> run_suites(const RunConfig& config);

// Output formatting shared by the subcommands.

/// "# config_hash=<hex> seed=<u64>"
std::string provenance_line(const RunConfig& config);

/// 17 significant digits, '.' decimal point.
std::string format_double(double x);

std::string trajectory_csv(const RunConfig& config, const Trajectory& traj);
std::string path_csv(const RunConfig& config, const std::vector<double>& grid, const std::vector<double>& values);
std::string cycles_csv(const RunConfig& config, const std::vector<CycleSummary>& cycles);

nlohmann::ordered_json provenance_json(const RunConfig& config);

}  // namespace smlab
