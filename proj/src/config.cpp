#include "smlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "smlab/errors.hpp"

namespace smlab {

namespace {

std::string where(const YAML::Node& node) {
  const auto mark = node.Mark();
  if (mark.is_null()) return "";
  return fmt::format(" (line {}, column {})", mark.line + 1, mark.column + 1);
}

template <typename T>
T get(const YAML::Node& node, const std::string& field, const char* expected) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw SchemaError(field, std::string("expected ") + expected + where(node));
  }
}

double get_double(const YAML::Node& node, const std::string& field) {
  const double x = get<double>(node, field, "a number");
  if (!std::isfinite(x)) throw SchemaError(field, "must be finite" + where(node));
  return x;
}

std::size_t get_count(const YAML::Node& node, const std::string& field) {
  const auto x = get<long long>(node, field, "a non-negative integer");
  if (x < 0) throw SchemaError(field, "must be non-negative" + where(node));
  return static_cast<std::size_t>(x);
}

std::vector<double> get_doubles(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) throw SchemaError(field, "expected a list of numbers" + where(node));
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(get_double(node[i], fmt::format("{}[{}]", field, i)));
  return out;
}

void reject_unknown_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& context) {
  for (const auto& entry : map) {
    const auto key = entry.first.as<std::string>();
    if (!allowed.contains(key))
      throw SchemaError(context.empty() ? key : context + "." + key, "unknown key" + where(entry.first));
  }
}

SojournLaw parse_law(const YAML::Node& node, const std::string& field) {
  const auto family = get<std::string>(node["family"], field + ".family", "a family name");
  auto param = [&](const char* name) {
    const auto child = node[name];
    if (!child) throw SchemaError(field + "." + name, "missing parameter for family " + family + where(node));
    return get_double(child, field + "." + name);
  };
  SojournLaw law;
  if (family == "exponential") {
    reject_unknown_keys(node, {"from", "to", "family", "rate"}, field);
    law = Exponential{param("rate")};
  } else if (family == "gamma") {
    reject_unknown_keys(node, {"from", "to", "family", "shape", "rate"}, field);
    law = GammaLaw{param("shape"), param("rate")};
  } else if (family == "uniform") {
    reject_unknown_keys(node, {"from", "to", "family", "a", "b"}, field);
    law = Uniform{param("a"), param("b")};
  } else if (family == "deterministic") {
    reject_unknown_keys(node, {"from", "to", "family", "c"}, field);
    law = Deterministic{param("c")};
  } else {
    throw SchemaError(field + ".family",
                      "unsupported family '" + family +
                          "' (expected exponential, gamma, uniform or deterministic; sojourns need a finite second moment)" +
                          where(node));
  }
  try {
    check_law(law);
  } catch (const Error& e) {
    throw SchemaError(field, e.what() + where(node));
  }
  return law;
}

SemiMarkovKernel parse_kernel(const YAML::Node& node) {
  if (!node.IsMap()) throw SchemaError("kernel", "expected a table" + where(node));
  reject_unknown_keys(node, {"states", "P", "sojourn"}, "kernel");
  if (!node["states"]) throw SchemaError("kernel.states", "missing");
  if (!node["P"]) throw SchemaError("kernel.P", "missing");
  if (!node["sojourn"]) throw SchemaError("kernel.sojourn", "missing");

  SemiMarkovKernel kernel;
  kernel.states = get_doubles(node["states"], "kernel.states");
  const auto m = kernel.states.size();
  if (m < 2) throw SchemaError("kernel.states", "need at least two states");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (kernel.states[i] == kernel.states[j])
        throw SchemaError(fmt::format("kernel.states[{}]", i), "duplicate velocity label");

  const auto rows = node["P"];
  if (!rows.IsSequence() || rows.size() != m)
    throw SchemaError("P", fmt::format("expected {} rows", m) + where(rows));
  kernel.P.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t v = 0; v < m; ++v) {
    const auto row = get_doubles(rows[v], fmt::format("P row {}", v));
    if (row.size() != m) throw SchemaError(fmt::format("P row {}", v), fmt::format("expected {} entries", m));
    double sum = 0.0;
    for (std::size_t w = 0; w < m; ++w) {
      if (row[w] < 0.0) throw SchemaError(fmt::format("P row {}", v), "negative entry" + where(rows[v]));
      kernel.P(v, w) = row[w];
      sum += row[w];
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw SchemaError(fmt::format("P row {}", v), fmt::format("sums to {} instead of 1", sum) + where(rows[v]));
  }

  kernel.laws.assign(m * m, std::nullopt);
  const auto table = node["sojourn"];
  if (!table.IsSequence()) throw SchemaError("kernel.sojourn", "expected a list of laws" + where(table));
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto field = fmt::format("kernel.sojourn[{}]", i);
    const auto entry = table[i];
    if (!entry.IsMap()) throw SchemaError(field, "expected a table" + where(entry));
    const auto from = get_count(entry["from"], field + ".from");
    const auto to = get_count(entry["to"], field + ".to");
    if (from >= m || to >= m) throw SchemaError(field, "state index out of range" + where(entry));
    if (kernel.P(from, to) <= 0.0)
      throw SchemaError(field, fmt::format("transition {} -> {} has probability 0", from, to) + where(entry));
    if (kernel.law(from, to)) throw SchemaError(field, fmt::format("duplicate law for {} -> {}", from, to) + where(entry));
    kernel.law(from, to) = parse_law(entry, field);
  }
  for (std::size_t v = 0; v < m; ++v)
    for (std::size_t w = 0; w < m; ++w)
      if (kernel.P(v, w) > 0.0 && !kernel.law(v, w))
        throw SchemaError("kernel.sojourn", fmt::format("missing law for transition {} -> {}", v, w));
  return kernel;
}

TelegraphSpec parse_telegraph(const YAML::Node& node) {
  if (!node.IsMap()) throw SchemaError("telegraph", "expected a table" + where(node));
  reject_unknown_keys(node, {"v1", "v2", "lambda1", "lambda2", "p"}, "telegraph");
  TelegraphSpec spec;
  auto read = [&](const char* key, double& target) {
    if (const auto child = node[key]) target = get_double(child, std::string("telegraph.") + key);
  };
  read("v1", spec.v1);
  read("v2", spec.v2);
  read("lambda1", spec.lambda1);
  read("lambda2", spec.lambda2);
  read("p", spec.p);
  try {
    check_spec(spec);
  } catch (const Error& e) {
    throw SchemaError("telegraph", e.what());
  }
  return spec;
}

void emit_law(YAML::Emitter& out, std::size_t from, std::size_t to, const SojournLaw& law) {
  out << YAML::Flow << YAML::BeginMap << YAML::Key << "from" << YAML::Value << from << YAML::Key << "to"
      << YAML::Value << to << YAML::Key << "family" << YAML::Value << family_name(law);
  if (const auto* l = std::get_if<Exponential>(&law)) {
    out << YAML::Key << "rate" << YAML::Value << l->rate;
  } else if (const auto* l = std::get_if<GammaLaw>(&law)) {
    out << YAML::Key << "shape" << YAML::Value << l->shape << YAML::Key << "rate" << YAML::Value << l->rate;
  } else if (const auto* l = std::get_if<Uniform>(&law)) {
    out << YAML::Key << "a" << YAML::Value << l->a << YAML::Key << "b" << YAML::Value << l->b;
  } else if (const auto* l = std::get_if<Deterministic>(&law)) {
    out << YAML::Key << "c" << YAML::Value << l->c;
  }
  out << YAML::EndMap;
}

template <typename T>
void emit_list(YAML::Emitter& out, const char* key, const std::vector<T>& xs) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& x : xs) out << x;
  out << YAML::EndSeq;
}

}  // namespace

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> suites = {"clt",  "renewal", "ergodic", "residual",
                                                  "occupancy", "wald", "gamma2", "mixing"};
  return suites;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream stream(spec);
  std::string piece;
  while (std::getline(stream, piece, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw SchemaError("grid", "'" + spec + "' is not start:stop:step");
    }
  }
  if (parts.size() != 3) throw SchemaError("grid", "'" + spec + "' is not start:stop:step");
  const double start = parts[0];
  const double stop = parts[1];
  const double step = parts[2];
  if (!(step > 0.0) || stop < start || start < 0.0) throw SchemaError("grid", "need 0 <= start <= stop and step > 0");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) grid.push_back(start + static_cast<double>(i) * step);
  return grid;
}

SemiMarkovKernel RunConfig::effective_kernel() const {
  if (kernel) return *kernel;
  if (telegraph) return telegraph_kernel(*telegraph);
  throw SchemaError("kernel", "config defines neither a kernel nor a telegraph block");
}

bool RunConfig::operator==(const RunConfig& other) const {
  auto same_kernel = [](const std::optional<SemiMarkovKernel>& a, const std::optional<SemiMarkovKernel>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->states == b->states && a->P == b->P && a->laws == b->laws;
  };
  return same_kernel(kernel, other.kernel) && telegraph == other.telegraph && lambda == other.lambda &&
         reps == other.reps && tol == other.tol && seed == other.seed && workers == other.workers && v0 == other.v0 &&
         initial == other.initial && f == other.f && grid == other.grid && t_points == other.t_points &&
         n_values == other.n_values && n_steps == other.n_steps && n_cycles == other.n_cycles &&
         horizon == other.horizon && t == other.t && n_max == other.n_max && suites == other.suites &&
         out_dir == other.out_dir;
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (!root.IsMap()) throw ParseError("top level must be a table", 1, 1);
  reject_unknown_keys(root,
                      {"kernel", "telegraph", "lambda", "reps", "tol", "seed", "workers", "v0", "initial", "f", "grid",
                       "t_points", "n_values", "n_steps", "n_cycles", "horizon", "t", "n_max", "suites", "out"},
                      "");

  RunConfig config;
  if (const auto node = root["kernel"]) config.kernel = parse_kernel(node);
  if (const auto node = root["telegraph"]) config.telegraph = parse_telegraph(node);
  if (!config.kernel && !config.telegraph) throw SchemaError("kernel", "config needs a kernel or a telegraph block");

  if (const auto n = root["lambda"]) config.lambda = get_double(n, "lambda");
  if (!(config.lambda > 0.0)) throw SchemaError("lambda", "must be positive");
  if (const auto n = root["reps"]) config.reps = get_count(n, "reps");
  if (const auto n = root["tol"]) config.tol = get_double(n, "tol");
  if (!(config.tol > 0.0)) throw SchemaError("tol", "must be positive");
  if (const auto n = root["seed"]) config.seed = get<std::uint64_t>(n, "seed", "an unsigned 64-bit integer");
  if (const auto n = root["workers"]) config.workers = static_cast<unsigned>(get_count(n, "workers"));
  if (const auto n = root["v0"]) config.v0 = get_count(n, "v0");
  if (const auto n = root["initial"]) config.initial = get_count(n, "initial");
  if (const auto n = root["f"]) {
    try {
      config.f = parse_step_function(get<std::string>(n, "f", "a step function name"));
    } catch (const Error& e) {
      throw SchemaError("f", e.what() + where(n));
    }
  }
  if (const auto n = root["grid"])
    config.grid = n.IsScalar() ? parse_grid(n.as<std::string>()) : get_doubles(n, "grid");
  if (const auto n = root["t_points"]) config.t_points = get_doubles(n, "t_points");
  if (const auto n = root["n_values"]) {
    if (!n.IsSequence()) throw SchemaError("n_values", "expected a list" + where(n));
    config.n_values.clear();
    for (std::size_t i = 0; i < n.size(); ++i) config.n_values.push_back(get_count(n[i], fmt::format("n_values[{}]", i)));
  }
  if (const auto n = root["n_steps"]) config.n_steps = get_count(n, "n_steps");
  if (const auto n = root["n_cycles"]) config.n_cycles = get_count(n, "n_cycles");
  if (const auto n = root["horizon"]) config.horizon = get_double(n, "horizon");
  if (const auto n = root["t"]) config.t = get_double(n, "t");
  if (const auto n = root["n_max"]) config.n_max = static_cast<int>(get_count(n, "n_max"));
  if (const auto n = root["suites"]) {
    if (!n.IsSequence()) throw SchemaError("suites", "expected a list" + where(n));
    for (std::size_t i = 0; i < n.size(); ++i) {
      auto name = get<std::string>(n[i], fmt::format("suites[{}]", i), "a suite name");
      if (std::find(known_suites().begin(), known_suites().end(), name) == known_suites().end())
        throw SchemaError(fmt::format("suites[{}]", i), "unknown suite '" + name + "'" + where(n[i]));
      config.suites.push_back(std::move(name));
    }
  }
  if (const auto n = root["out"]) config.out_dir = get<std::string>(n, "out", "a path");

  const auto m = config.effective_kernel().size();
  if (config.v0 >= m) throw SchemaError("v0", fmt::format("state {} does not exist", config.v0));
  if (config.initial >= m) throw SchemaError("initial", fmt::format("state {} does not exist", config.initial));
  for (std::size_t i = 1; i < config.grid.size(); ++i)
    if (config.grid[i] < config.grid[i - 1]) throw SchemaError("grid", "must be non-decreasing");
  for (const double g : config.grid)
    if (g < 0.0) throw SchemaError("grid", "times must be non-negative");
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("config", "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& config) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  if (config.kernel) {
    const auto& k = *config.kernel;
    out << YAML::Key << "kernel" << YAML::Value << YAML::BeginMap;
    emit_list(out, "states", k.states);
    out << YAML::Key << "P" << YAML::Value << YAML::BeginSeq;
    for (Eigen::Index v = 0; v < k.P.rows(); ++v) {
      out << YAML::Flow << YAML::BeginSeq;
      for (Eigen::Index w = 0; w < k.P.cols(); ++w) out << k.P(v, w);
      out << YAML::EndSeq;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "sojourn" << YAML::Value << YAML::BeginSeq;
    for (std::size_t v = 0; v < k.size(); ++v)
      for (std::size_t w = 0; w < k.size(); ++w)
        if (k.law(v, w)) emit_law(out, v, w, *k.law(v, w));
    out << YAML::EndSeq << YAML::EndMap;
  }
  if (config.telegraph) {
    const auto& s = *config.telegraph;
    out << YAML::Key << "telegraph" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "v1" << YAML::Value << s.v1 << YAML::Key << "v2" << YAML::Value << s.v2;
    out << YAML::Key << "lambda1" << YAML::Value << s.lambda1 << YAML::Key << "lambda2" << YAML::Value << s.lambda2;
    out << YAML::Key << "p" << YAML::Value << s.p << YAML::EndMap;
  }
  out << YAML::Key << "lambda" << YAML::Value << config.lambda;
  out << YAML::Key << "reps" << YAML::Value << static_cast<unsigned long long>(config.reps);
  out << YAML::Key << "tol" << YAML::Value << config.tol;
  out << YAML::Key << "seed" << YAML::Value << static_cast<unsigned long long>(config.seed);
  out << YAML::Key << "workers" << YAML::Value << config.workers;
  out << YAML::Key << "v0" << YAML::Value << static_cast<unsigned long long>(config.v0);
  out << YAML::Key << "initial" << YAML::Value << static_cast<unsigned long long>(config.initial);
  const char* f_names[] = {"one", "x", "vx", "centered_vx"};
  out << YAML::Key << "f" << YAML::Value << f_names[static_cast<int>(config.f)];
  emit_list(out, "grid", config.grid);
  emit_list(out, "t_points", config.t_points);
  std::vector<unsigned long long> n_values(config.n_values.begin(), config.n_values.end());
  emit_list(out, "n_values", n_values);
  out << YAML::Key << "n_steps" << YAML::Value << static_cast<unsigned long long>(config.n_steps);
  out << YAML::Key << "n_cycles" << YAML::Value << static_cast<unsigned long long>(config.n_cycles);
  out << YAML::Key << "horizon" << YAML::Value << config.horizon;
  out << YAML::Key << "t" << YAML::Value << config.t;
  out << YAML::Key << "n_max" << YAML::Value << config.n_max;
  if (!config.suites.empty()) emit_list(out, "suites", config.suites);
  out << YAML::Key << "out" << YAML::Value << config.out_dir;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string config_hash(const RunConfig& config) {
  // Worker count and output location do not change results.
  RunConfig canonical = config;
  canonical.workers = kAutoWorkers;
  canonical.out_dir = ".";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : serialize_config(canonical)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace smlab
