#include "smlab/cli.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "smlab/errors.hpp"
#include "smlab/simulate.hpp"
#include "smlab/telegraph.hpp"

namespace smlab {

namespace fs = std::filesystem;

namespace {

void write_file(const RunConfig& config, const std::string& name, const std::string& contents, std::ostream& out) {
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  const auto path = dir / name;
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorKind::InvalidArgument, "cannot write " + path.string());
  file << contents;
  out << "wrote " << path.string() << "\n";
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

nlohmann::ordered_json vector_json(const Eigen::VectorXd& v) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

std::size_t suite_index(const std::string& name) {
  const auto& all = known_suites();
  return static_cast<std::size_t>(std::find(all.begin(), all.end(), name) - all.begin());
}

int run_validate(const RunConfig& config, std::ostream& out) {
  const auto structure = validate_kernel(config.effective_kernel());
  auto j = provenance_json(config);
  j["irreducible"] = structure.irreducible;
  j["period"] = structure.period;
  j["pi"] = vector_json(structure.pi);
  j["slem"] = structure.slem;
  out << dump(j);
  write_file(config, "structure.json", dump(j), out);
  return kExitPass;
}

int run_analyze(const RunConfig& config, std::ostream& out) {
  const auto kernel = config.effective_kernel();
  const auto structure = validate_kernel(kernel);
  const auto params = analyze_limits(config);
  auto j = provenance_json(config);
  j["theta"] = params.theta;
  j["mu"] = params.mu;
  j["gamma2"] = params.gamma2;
  j["diffusion"] = params.diffusion;
  j["method"] = to_string(params.method);
  if (params.method == LimitMethod::Cycle) j["gamma2_std_error"] = params.gamma2_std_error;
  j["slem"] = structure.slem;
  j["pi"] = vector_json(structure.pi);
  out << dump(j);
  write_file(config, "analyze.json", dump(j), out);
  return kExitPass;
}

int run_simulate(const RunConfig& config, std::ostream& out) {
  const auto kernel = config.effective_kernel();
  const auto params = analyze_limits(config);
  if (config.grid.empty()) fail(ErrorKind::InvalidArgument, "simulate needs a non-empty grid");
  const double t_max = *std::max_element(config.grid.begin(), config.grid.end());
  const TransitionSampler sampler(kernel);
  Rng rng = Rng::child(config.seed, 0);
  const SampleMode mode = t_max > 0.0 ? SampleMode{UntilTime{config.lambda * t_max}} : SampleMode{NSteps{0}};
  const auto traj = sample_markov_renewal(sampler, InitialLaw{config.initial}, mode, rng);
  const auto path = scaled_path(traj, config.lambda, params.theta, config.grid);
  const auto cycles = summarize_cycles(split_cycles(traj, config.v0), traj.values, params.theta);
  write_file(config, "path.csv", path_csv(config, config.grid, path), out);
  write_file(config, "trajectory.csv", trajectory_csv(config, traj), out);
  write_file(config, "cycles.csv", cycles_csv(config, cycles), out);
  return kExitPass;
}

int run_verify(const RunConfig& config, std::ostream& out) {
  const auto reports = run_suites(config);
  bool all_passed = true;
  auto j = provenance_json(config);
  auto list = nlohmann::ordered_json::array();
  std::string text = provenance_line(config) + "\n";
  for (const auto& report : reports) {
    all_passed = all_passed && report.passed;
    list.push_back(to_json(report));
    text += to_text(report);
  }
  j["passed"] = all_passed;
  j["reports"] = std::move(list);
  out << text;
  write_file(config, "reports.json", dump(j), out);
  write_file(config, "reports.txt", text, out);
  return all_passed ? kExitPass : kExitVerificationFailed;
}

int run_telegraph(const RunConfig& config, std::ostream& out) {
  if (!config.telegraph) throw SchemaError("telegraph", "the telegraph command needs a telegraph block");
  const auto& spec = *config.telegraph;
  const auto limit = telegraph_limit(spec);
  auto j = provenance_json(config);
  j["v1"] = spec.v1;
  j["v2"] = spec.v2;
  j["lambda1"] = spec.lambda1;
  j["lambda2"] = spec.lambda2;
  j["p"] = spec.p;
  j["drift"] = limit.drift;
  j["diffusion"] = limit.diffusion;
  j["stationary_p_v1"] = spec.lambda2 / (spec.lambda1 + spec.lambda2);
  out << dump(j);
  write_file(config, "telegraph.json", dump(j), out);

  std::string pmf = provenance_line(config) + "\nn,probability\n";
  for (int n = 0; n <= config.n_max; ++n)
    pmf += fmt::format("{},{}\n", n, format_double(alternating_poisson_pmf(spec.lambda1, spec.lambda2, config.t, n)));
  write_file(config, "pmf.csv", pmf, out);

  std::string law = provenance_line(config) + "\nt,p_v1\n";
  for (const double t : config.grid) law += format_double(t) + "," + format_double(telegraph_state_law(spec, t)) + "\n";
  write_file(config, "state_law.csv", law, out);
  return kExitPass;
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string provenance_line(const RunConfig& config) {
  return fmt::format("# config_hash={} seed={}", config_hash(config), config.seed);
}

nlohmann::ordered_json provenance_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["provenance"] = {{"config_hash", config_hash(config)}, {"seed", config.seed}};
  return j;
}

std::string trajectory_csv(const RunConfig& config, const Trajectory& traj) {
  std::string out = provenance_line(config) + "\nk,state,xi,S\n";
  out += fmt::format("0,{},,{}\n", traj.states[0], format_double(traj.arrivals[0]));
  for (std::size_t k = 1; k < traj.states.size(); ++k)
    out += fmt::format("{},{},{},{}\n", k, traj.states[k], format_double(traj.sojourns[k - 1]),
                       format_double(traj.arrivals[k]));
  return out;
}

std::string path_csv(const RunConfig& config, const std::vector<double>& grid, const std::vector<double>& values) {
  std::string out = provenance_line(config) + "\nt,X_lambda\n";
  for (std::size_t i = 0; i < grid.size(); ++i) out += format_double(grid[i]) + "," + format_double(values[i]) + "\n";
  return out;
}

std::string cycles_csv(const RunConfig& config, const std::vector<CycleSummary>& cycles) {
  std::string out = provenance_line(config) + "\ncycle_index,length,cycle_sum,cycle_sum_sq\n";
  for (const auto& c : cycles)
    out += fmt::format("{},{},{},{}\n", c.index, c.length, format_double(c.sum), format_double(c.sum_sq));
  return out;
}

LimitParameters analyze_limits(const RunConfig& config) {
  return limit_parameters(config.effective_kernel(), config.tol,
                          CycleFallback{config.n_cycles, child_key(config.seed, known_suites().size()), config.workers});
}

std::vector<VerificationReport> run_suites(const RunConfig& config) {
  const auto kernel = config.effective_kernel();
  const auto structure = validate_kernel(kernel);
  std::vector<std::string> names = config.suites;
  if (names.empty()) {
    for (const auto& name : known_suites())
      if (structure.period == 1 || (name != "gamma2" && name != "mixing")) names.push_back(name);
  }

  std::vector<VerificationReport> reports;
  for (const auto& name : names) {
    const auto seed = child_key(config.seed, suite_index(name));
    if (name == "clt") {
      reports.push_back(clt_suite(kernel, analyze_limits(config),
                                  CltOptions{config.lambda, config.t_points, config.reps, seed, config.workers}));
    } else if (name == "renewal") {
      RenewalOptions options;
      options.n_values = config.n_values;
      options.seed = seed;
      options.workers = config.workers;
      reports.push_back(renewal_suite(kernel, options));
    } else if (name == "ergodic") {
      reports.push_back(ergodic_suite(kernel, ErgodicOptions{config.f, config.n_steps, 0.01, seed}));
    } else if (name == "residual") {
      ResidualOptions options;
      options.n_values = config.n_values;
      options.seed = seed;
      options.workers = config.workers;
      reports.push_back(residual_suite(kernel, options));
    } else if (name == "occupancy") {
      reports.push_back(occupancy_suite(kernel, OccupancyOptions{config.horizon, 0.01, 0.01, seed}));
    } else if (name == "wald") {
      reports.push_back(wald_suite(kernel, WaldOptions{config.v0, config.n_cycles, seed, config.workers}));
    } else if (name == "gamma2") {
      reports.push_back(gamma2_suite(kernel, Gamma2Options{config.n_cycles, config.tol, seed, config.workers}));
    } else if (name == "mixing") {
      reports.push_back(mixing_suite(kernel));
    } else {
      throw SchemaError("suites", "unknown suite '" + name + "'");
    }
  }
  return reports;
}

int dispatch(const RunConfig& config, const std::string& subcommand, std::ostream& out, std::ostream& err) {
  try {
    if (subcommand == "validate") return run_validate(config, out);
    if (subcommand == "analyze") return run_analyze(config, out);
    if (subcommand == "simulate") return run_simulate(config, out);
    if (subcommand == "verify") return run_verify(config, out);
    if (subcommand == "telegraph") return run_telegraph(config, out);
    err << "unknown subcommand '" << subcommand << "'\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace smlab
