// Copyright 2026 The pathint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATHINT_TOOLS_CLI_HPP
#define PATHINT_TOOLS_CLI_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathint/cost.hpp"
#include "pathint/estimator.hpp"
#include "pathint/expr.hpp"
#include "pathint/gbm.hpp"
#include "pathint/iis.hpp"
#include "pathint/sde.hpp"

// Configuration, provenance and the three subcommands of the pathint front-end.

namespace pathint::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Malformed or inconsistent configuration; maps to exit code 2.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct ProblemConfig {
  std::string type = "gbm";  ///< "gbm" or "custom"
  double Q = 10.0;
  double x0 = 0.5;
  bool log_coordinates = true;
  // custom problems: expressions over t and x
  std::string drift = "0";
  std::string diffusion = "1";
  std::string running_cost = "0";
  std::string terminal_cost = "0";

  bool operator==(const ProblemConfig&) const = default;
};

struct GridConfig {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t n_steps = 1000;

  bool operator==(const GridConfig&) const = default;
};

struct PolicyConfig {
  std::string type = "zero";  ///< zero | analytic | perturbed | coefficients
  double epsilon = 0.0;
  std::string coefficients;  ///< CSV written by `fit`

  bool operator==(const PolicyConfig&) const = default;
};

struct SamplerConfig {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  bool operator==(const SamplerConfig&) const = default;
};

struct IISSettings {
  std::string basis = "log";
  std::size_t n_rounds = 2;
  double damping = 1.0;
  std::optional<double> ridge;
  double relative_ridge = 1e-8;
  std::size_t nodes_per_interval = 20;
  std::string estimator = "centered";  ///< weighted | centered
  std::size_t evaluation_paths = 10000;
  std::string warm_start;  ///< coefficients CSV; empty starts from the zero policy

  bool operator==(const IISSettings&) const = default;
};

struct BenchConfig {
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t table1_rounds = 2;
  std::size_t figure2_rounds = 3;
  std::size_t nodes_per_interval = 20;
  std::string estimator = "centered";
  std::vector<double> epsilons = {0.05, 0.1, 0.2, 0.4, 0.5, 0.6, 0.8, 0.9};
  double figure2_t = 0.5;
  std::size_t histogram_bins = 40;

  bool operator==(const BenchConfig&) const = default;
};

struct ExperimentConfig {
  ProblemConfig problem;
  GridConfig grid;
  PolicyConfig policy;
  SamplerConfig sampler;
  IISSettings iis;
  BenchConfig bench;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

/// Reads the members of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ConfigError(where() + "expected an object");
    }
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) {
      return;
    }
    convert(*it, out, child(key));
  }

  const json* find(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (seen_.count(key) == 0) {
        throw ConfigError("unknown configuration key '" + child(key) + "'");
      }
    }
  }

 private:
  std::string where() const { return path_.empty() ? "configuration: " : "'" + path_ + "': "; }

  static void convert(const json& v, double& out, const std::string& key) {
    if (!v.is_number()) {
      throw ConfigError("'" + key + "' must be a number");
    }
    out = v.get<double>();
  }
  static void convert(const json& v, bool& out, const std::string& key) {
    if (!v.is_boolean()) {
      throw ConfigError("'" + key + "' must be true or false");
    }
    out = v.get<bool>();
  }
  static void convert(const json& v, std::string& out, const std::string& key) {
    if (!v.is_string()) {
      throw ConfigError("'" + key + "' must be a string");
    }
    out = v.get<std::string>();
  }
  static void convert(const json& v, std::size_t& out, const std::string& key) {
    if (!v.is_number_unsigned()) {
      throw ConfigError("'" + key + "' must be a non-negative integer");
    }
    out = v.get<std::size_t>();
  }
  static void convert(const json& v, std::optional<double>& out, const std::string& key) {
    if (v.is_null()) {
      out.reset();
      return;
    }
    double d = 0.0;
    convert(v, d, key);
    out = d;
  }
  template <class T>
  static void convert(const json& v, std::vector<T>& out, const std::string& key) {
    if (!v.is_array()) {
      throw ConfigError("'" + key + "' must be an array");
    }
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      T item{};
      convert(v[i], item, key + "[" + std::to_string(i) + "]");
      out.push_back(item);
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  if (c.problem.type != "gbm" && c.problem.type != "custom") {
    throw ConfigError("'problem.type' must be \"gbm\" or \"custom\"");
  }
  if (c.sampler.n_paths == 0) {
    throw ConfigError("'sampler.n_paths' must be positive");
  }
  if (c.iis.estimator != "weighted" && c.iis.estimator != "centered") {
    throw ConfigError("'iis.estimator' must be \"weighted\" or \"centered\"");
  }
  if (c.bench.estimator != "weighted" && c.bench.estimator != "centered") {
    throw ConfigError("'bench.estimator' must be \"weighted\" or \"centered\"");
  }
  const std::set<std::string> policies = {"zero", "analytic", "perturbed", "coefficients"};
  if (policies.count(c.policy.type) == 0) {
    throw ConfigError("'policy.type' must be one of zero, analytic, perturbed, coefficients");
  }
  if (c.problem.type == "custom" && (c.policy.type == "analytic" || c.policy.type == "perturbed")) {
    throw ConfigError("'policy.type' " + c.policy.type + " needs the gbm problem");
  }
  if (c.policy.type == "coefficients" && c.policy.coefficients.empty()) {
    throw ConfigError("'policy.coefficients' must name a coefficients file");
  }
  try {
    (void)TimeGrid(c.grid.t0, c.grid.t1, c.grid.n_steps);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("'grid': ") + e.what());
  }
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  detail::ObjectReader root(j, "");
  if (const json* p = root.find("problem")) {
    detail::ObjectReader r(*p, "problem");
    r.read("type", c.problem.type);
    r.read("Q", c.problem.Q);
    r.read("x0", c.problem.x0);
    r.read("log_coordinates", c.problem.log_coordinates);
    r.read("drift", c.problem.drift);
    r.read("diffusion", c.problem.diffusion);
    r.read("running_cost", c.problem.running_cost);
    r.read("terminal_cost", c.problem.terminal_cost);
    r.finish();
  }
  if (const json* p = root.find("grid")) {
    detail::ObjectReader r(*p, "grid");
    r.read("t0", c.grid.t0);
    r.read("t1", c.grid.t1);
    r.read("n_steps", c.grid.n_steps);
    r.finish();
  }
  if (const json* p = root.find("policy")) {
    detail::ObjectReader r(*p, "policy");
    r.read("type", c.policy.type);
    r.read("epsilon", c.policy.epsilon);
    r.read("coefficients", c.policy.coefficients);
    r.finish();
  }
  if (const json* p = root.find("sampler")) {
    detail::ObjectReader r(*p, "sampler");
    r.read("n_paths", c.sampler.n_paths);
    std::size_t seed = c.sampler.seed;
    r.read("seed", seed);
    c.sampler.seed = seed;
    r.read("threads", c.sampler.threads);
    r.finish();
  }
  if (const json* p = root.find("iis")) {
    detail::ObjectReader r(*p, "iis");
    r.read("basis", c.iis.basis);
    r.read("n_rounds", c.iis.n_rounds);
    r.read("damping", c.iis.damping);
    r.read("ridge", c.iis.ridge);
    r.read("relative_ridge", c.iis.relative_ridge);
    r.read("nodes_per_interval", c.iis.nodes_per_interval);
    r.read("estimator", c.iis.estimator);
    r.read("evaluation_paths", c.iis.evaluation_paths);
    r.read("warm_start", c.iis.warm_start);
    r.finish();
  }
  if (const json* p = root.find("bench")) {
    detail::ObjectReader r(*p, "bench");
    std::vector<std::size_t> seeds(c.bench.seeds.begin(), c.bench.seeds.end());
    r.read("seeds", seeds);
    c.bench.seeds.assign(seeds.begin(), seeds.end());
    r.read("table1_rounds", c.bench.table1_rounds);
    r.read("figure2_rounds", c.bench.figure2_rounds);
    r.read("nodes_per_interval", c.bench.nodes_per_interval);
    r.read("estimator", c.bench.estimator);
    r.read("epsilons", c.bench.epsilons);
    r.read("figure2_t", c.bench.figure2_t);
    r.read("histogram_bins", c.bench.histogram_bins);
    r.finish();
  }
  if (const json* p = root.find("output")) {
    detail::ObjectReader r(*p, "output");
    r.read("dir", c.output_dir);
    r.finish();
  }
  root.finish();
  validate(c);
  return c;
}

/// Parses JSON text (comments allowed); syntax errors report line and column.
inline ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_and_column(text, e.byte);
    throw ConfigError("configuration syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }
  return config_from_json(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read configuration file '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline json to_json(const ExperimentConfig& c) {
  json j;
  j["problem"] = {{"type", c.problem.type},
                  {"Q", c.problem.Q},
                  {"x0", c.problem.x0},
                  {"log_coordinates", c.problem.log_coordinates},
                  {"drift", c.problem.drift},
                  {"diffusion", c.problem.diffusion},
                  {"running_cost", c.problem.running_cost},
                  {"terminal_cost", c.problem.terminal_cost}};
  j["grid"] = {{"t0", c.grid.t0}, {"t1", c.grid.t1}, {"n_steps", c.grid.n_steps}};
  j["policy"] = {{"type", c.policy.type},
                 {"epsilon", c.policy.epsilon},
                 {"coefficients", c.policy.coefficients}};
  j["sampler"] = {{"n_paths", c.sampler.n_paths},
                  {"seed", c.sampler.seed},
                  {"threads", c.sampler.threads}};
  j["iis"] = {{"basis", c.iis.basis},
              {"n_rounds", c.iis.n_rounds},
              {"damping", c.iis.damping},
              {"ridge", c.iis.ridge ? json(*c.iis.ridge) : json(nullptr)},
              {"relative_ridge", c.iis.relative_ridge},
              {"nodes_per_interval", c.iis.nodes_per_interval},
              {"estimator", c.iis.estimator},
              {"evaluation_paths", c.iis.evaluation_paths},
              {"warm_start", c.iis.warm_start}};
  j["bench"] = {{"seeds", c.bench.seeds},
                {"table1_rounds", c.bench.table1_rounds},
                {"figure2_rounds", c.bench.figure2_rounds},
                {"nodes_per_interval", c.bench.nodes_per_interval},
                {"estimator", c.bench.estimator},
                {"epsilons", c.bench.epsilons},
                {"figure2_t", c.bench.figure2_t},
                {"histogram_bins", c.bench.histogram_bins}};
  j["output"] = {{"dir", c.output_dir}};
  return j;
}

/// Command-line overrides; unset fields leave the configuration alone.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> dt;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
};

inline void apply(const Overrides& o, ExperimentConfig& c) {
  if (o.seed) {
    c.sampler.seed = *o.seed;
  }
  if (o.paths) {
    c.sampler.n_paths = *o.paths;
  }
  if (o.dt) {
    try {
      c.grid.n_steps = TimeGrid::with_step(c.grid.t0, c.grid.t1, *o.dt).n_steps();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("--dt: ") + e.what());
    }
  }
  if (o.out) {
    c.output_dir = *o.out;
  }
  if (o.threads) {
    c.sampler.threads = *o.threads;
  }
  validate(c);
}

// ---------------------------------------------------------------------------------------
// Provenance

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Provenance of one run; identical configuration and command give identical metadata.
inline json metadata(const std::string& command, const ExperimentConfig& c) {
  const std::string canonical = to_json(c).dump();
  const TimeGrid grid(c.grid.t0, c.grid.t1, c.grid.n_steps);
  json m;
  m["command"] = command;
  m["seed"] = c.sampler.seed;
  m["dt"] = grid.dt();
  m["n_paths"] = c.sampler.n_paths;
  m["config_hash"] = hex64(fnv1a(canonical));
  m["run_id"] = hex64(fnv1a(command + "\n" + canonical)).substr(0, 12);
  m["config"] = to_json(c);
  return m;
}

/// The metadata as '#'-prefixed CSV comment lines.
inline std::string csv_preamble(const json& meta) {
  std::ostringstream os;
  for (const char* key : {"command", "run_id", "config_hash", "seed", "dt", "n_paths"}) {
    const json& v = meta.at(key);
    os << "# " << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  os << "# config: " << meta.at("config").dump() << '\n';
  return os.str();
}

/// Reads the configuration back out of a CSV preamble.
inline ExperimentConfig config_from_preamble(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  const std::string tag = "# config: ";
  while (std::getline(in, line)) {
    if (line.rfind(tag, 0) == 0) {
      return parse_config(line.substr(tag.size()));
    }
  }
  throw ConfigError("no configuration line in CSV preamble");
}

// ---------------------------------------------------------------------------------------
// Problem, basis and policy construction

inline gbm::GBMSpec gbm_spec(const ExperimentConfig& c) {
  gbm::GBMSpec s;
  s.Q = c.problem.Q;
  s.x0 = c.problem.x0;
  s.t0 = c.grid.t0;
  s.t1 = c.grid.t1;
  s.n_steps = c.grid.n_steps;
  s.log_coordinates = c.problem.log_coordinates;
  return s;
}

inline Expression parse_field(const std::string& key, const std::string& source) {
  try {
    return Expression::parse(source);
  } catch (const ExpressionError& e) {
    throw ConfigError("'problem." + key + "': " + e.what());
  }
}

inline ControlProblem build_problem(const ExperimentConfig& c) {
  if (c.problem.type == "gbm") {
    try {
      return gbm::make_problem(gbm_spec(c));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("'problem': ") + e.what());
    }
  }
  const auto b = parse_field("drift", c.problem.drift);
  const auto s = parse_field("diffusion", c.problem.diffusion);
  const auto v = parse_field("running_cost", c.problem.running_cost);
  const auto phi = parse_field("terminal_cost", c.problem.terminal_cost);
  ControlProblem p;
  p.dim_x = 1;
  p.dim_w = 1;
  p.drift = [b](double t, std::span<const double> x, std::span<double> out) { out[0] = b(t, x[0]); };
  p.diffusion = [s](double t, std::span<const double> x, std::span<double> out) {
    out[0] = s(t, x[0]);
  };
  p.running_cost = [v](double t, std::span<const double> x) { return v(t, x[0]); };
  const double t1 = c.grid.t1;
  p.terminal_cost = [phi, t1](std::span<const double> x) { return phi(t1, x[0]); };
  p.x0 = {c.problem.x0};
  p.grid = TimeGrid(c.grid.t0, c.grid.t1, c.grid.n_steps);
  return p;
}

/// "const", "log", or "polyN" for {1, x, ..., x^N}.
inline BasisSet build_basis(const std::string& name) {
  if (name == "const") {
    return gbm::constant_basis();
  }
  if (name == "log") {
    return gbm::log_basis();
  }
  if (name.size() > 4 && name.rfind("poly", 0) == 0 &&
      name.find_first_not_of("0123456789", 4) == std::string::npos && name.size() <= 6) {
    return gbm::polynomial_basis(std::stoul(name.substr(4)));
  }
  throw ConfigError("unknown basis '" + name + "' (expected const, log or polyN)");
}

inline CorrectionEstimator parse_estimator(const std::string& name) {
  return name == "centered" ? CorrectionEstimator::centered : CorrectionEstimator::weighted;
}

inline std::string format_exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Coefficients CSV: t, then the dim_u x k_basis entries of A(t_k) row-major.
inline std::string coefficients_csv(const ParametrizedPolicy& p, const std::string& preamble) {
  std::ostringstream os;
  os << preamble << 't';
  for (std::size_t r = 0; r < p.dim_u; ++r) {
    for (std::size_t c = 0; c < p.basis.size; ++c) {
      os << ",a_" << r << '_' << c;
    }
  }
  os << '\n';
  for (std::size_t k = 0; k < p.grid.n_steps(); ++k) {
    os << format_exact(p.grid.time(k));
    for (double a : p.at(k)) {
      os << ',' << format_exact(a);
    }
    os << '\n';
  }
  return os.str();
}

inline ParametrizedPolicy load_coefficients(const std::string& path, const BasisSet& basis,
                                            const TimeGrid& grid, std::size_t dim_u) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read coefficients file '" + path + "'");
  }
  ParametrizedPolicy p;
  p.basis = basis;
  p.grid = grid;
  p.dim_u = dim_u;
  const std::size_t width = 1 + dim_u * basis.size;
  std::string line;
  bool header = false;
  std::size_t row = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      cells.push_back(cell);
    }
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (cells.size() != width) {
      throw ConfigError(where + "expected " + std::to_string(width) + " columns for basis '" +
                        basis.name + "', found " + std::to_string(cells.size()));
    }
    if (!header) {
      header = true;
      continue;
    }
    if (row >= grid.n_steps()) {
      throw ConfigError(where + "more rows than grid nodes");
    }
    std::vector<double> values;
    for (const auto& cell : cells) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (used != cell.size()) {
          throw std::invalid_argument(cell);
        }
      } catch (const std::exception&) {
        throw ConfigError(where + "malformed number '" + cell + "'");
      }
    }
    if (std::abs(values[0] - grid.time(row)) > 1e-9 * std::max(1.0, std::abs(grid.time(row)))) {
      throw ConfigError(where + "time " + format_exact(values[0]) + " does not match grid node " +
                        std::to_string(row));
    }
    p.coefficients.insert(p.coefficients.end(), values.begin() + 1, values.end());
    ++row;
  }
  if (row != grid.n_steps()) {
    throw ConfigError(path + ": " + std::to_string(row) + " coefficient rows for " +
                      std::to_string(grid.n_steps()) + " grid nodes");
  }
  return p;
}

inline Policy build_policy(const ExperimentConfig& c, const ControlProblem& problem) {
  const auto& type = c.policy.type;
  if (type == "zero") {
    return Policy::zero();
  }
  if (type == "analytic") {
    return gbm::analytic_control(gbm_spec(c));
  }
  if (type == "perturbed") {
    try {
      return gbm::perturbed_control(gbm_spec(c), c.policy.epsilon);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("'policy.epsilon': ") + e.what());
    }
  }
  return Policy(load_coefficients(c.policy.coefficients, build_basis(c.iis.basis), problem.grid,
                                  problem.dim_w));
}

// ---------------------------------------------------------------------------------------
// Output

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write '" + path.string() + "'");
  }
  out << content;
}

inline json summary_json(const CostSummary& s) {
  // -log(1) is -0.0; print it as 0
  const double j = s.value.value + 0.0;
  return {{"ES", s.expected_cost.value},
          {"ES_stderr", s.expected_cost.std_error},
          {"J", j},
          {"J_stderr", s.value.std_error},
          {"var_alpha", s.weight_variance.value},
          {"var_alpha_stderr", s.weight_variance.std_error},
          {"lambda", s.ess_fraction.value},
          {"lambda_stderr", s.ess_fraction.std_error},
          {"cost_sd", s.cost_sd},
          {"n_paths", s.n_paths}};
}

inline SimulationOptions simulation_options(const ExperimentConfig& c) {
  SimulationOptions o;
  o.threads = c.sampler.threads;
  return o;
}

/// Runs the configured policy and writes `simulate.json`; returns the document.
inline json cmd_simulate(const ExperimentConfig& c) {
  const auto problem = build_problem(c);
  const auto policy = build_policy(c, problem);
  const auto ensemble =
      simulate(problem, policy, c.sampler.n_paths, c.sampler.seed, simulation_options(c));
  const auto costs = path_costs(ensemble, problem);
  json doc;
  doc["metadata"] = metadata("simulate", c);
  doc["summary"] = summary_json(summarize(costs));
  doc["summary"]["seed"] = c.sampler.seed;
  doc["summary"]["policy"] = policy.id();
  write_file(std::filesystem::path(c.output_dir) / "simulate.json", doc.dump(2) + "\n");
  return doc;
}

inline IISConfig iis_config(const ExperimentConfig& c, const ControlProblem& problem,
                            const BasisSet& basis) {
  IISConfig cfg;
  cfg.n_paths = c.sampler.n_paths;
  cfg.n_rounds = c.iis.n_rounds;
  cfg.damping = c.iis.damping;
  cfg.seed = c.sampler.seed;
  cfg.fit.ridge = c.iis.ridge;
  cfg.fit.relative_ridge = c.iis.relative_ridge;
  cfg.fit.nodes_per_interval = c.iis.nodes_per_interval;
  cfg.fit.estimator = parse_estimator(c.iis.estimator);
  cfg.evaluation_paths = c.iis.evaluation_paths;
  cfg.simulation = simulation_options(c);
  if (!c.iis.warm_start.empty()) {
    cfg.warm_start = Policy(load_coefficients(c.iis.warm_start, basis, problem.grid, problem.dim_w));
  }
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("'iis': ") + e.what());
  }
  return cfg;
}

inline json round_json(const IterationReport& r) {
  json j = summary_json(r.summary);
  j["round"] = r.round;
  j["sampler"] = r.sampler;
  return j;
}

/// Iterative fit; writes `coefficients.csv` and `fit_report.json`, returns the report.
inline json cmd_fit(const ExperimentConfig& c) {
  const auto problem = build_problem(c);
  const auto basis = build_basis(c.iis.basis);
  const auto cfg = iis_config(c, problem, basis);
  const auto meta = metadata("fit", c);
  const auto result = run_iis(problem, basis, basis, cfg);
  const auto* fitted = result.policy.parametrized();
  write_file(std::filesystem::path(c.output_dir) / "coefficients.csv",
             coefficients_csv(*fitted, csv_preamble(meta)));
  json doc;
  doc["metadata"] = meta;
  doc["basis"] = basis.name;
  doc["rounds"] = json::array();
  for (const auto& r : result.rounds) {
    doc["rounds"].push_back(round_json(r));
  }
  doc["evaluation"] = result.evaluation ? summary_json(*result.evaluation) : json(nullptr);
  write_file(std::filesystem::path(c.output_dir) / "fit_report.json", doc.dump(2) + "\n");
  return doc;
}

inline FitOptions bench_fit(const ExperimentConfig& c) {
  FitOptions f;
  f.ridge = c.iis.ridge;
  f.relative_ridge = c.iis.relative_ridge;
  f.nodes_per_interval = c.bench.nodes_per_interval;
  f.estimator = parse_estimator(c.bench.estimator);
  return f;
}

/// Benchmark reproduction; returns the paths written.
inline std::vector<std::string> cmd_bench(const std::string& which, const ExperimentConfig& c) {
  if (c.problem.type != "gbm") {
    throw ConfigError("bench needs the gbm problem");
  }
  const auto spec = gbm_spec(c);
  const auto meta = metadata("bench " + which, c);
  const auto preamble = csv_preamble(meta);
  const std::filesystem::path dir(c.output_dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& body) {
    write_file(dir / name, body);
    written.push_back((dir / name).string());
  };
  if (which == "table1") {
    gbm::Table1Options o;
    o.n_paths = c.sampler.n_paths;
    o.seeds = c.bench.seeds;
    o.n_rounds = c.bench.table1_rounds;
    o.fit = bench_fit(c);
    o.simulation = simulation_options(c);
    const auto r = gbm::reproduce_table1(spec, o);
    std::string notes;
    for (const auto& f : r.failures) {
      notes += "# diverged: seed " + std::to_string(f.seed) + ", " + f.policy + ": " + f.message + "\n";
    }
    emit("table1.csv", gbm::table1_csv(r.median, preamble + notes));
    std::ostringstream per_seed;
    per_seed << preamble << notes << "seed,policy,ES,varalpha,lambda,stderr_ES\n";
    for (std::size_t s = 0; s < r.per_seed.size(); ++s) {
      for (const auto& row : r.per_seed[s]) {
        per_seed << o.seeds[s] << ',' << row.policy << ',' << gbm::format_number(row.expected_cost)
                 << ',' << gbm::format_number(row.weight_variance) << ','
                 << gbm::format_number(row.ess_fraction) << ','
                 << gbm::format_number(row.stderr_expected_cost) << '\n';
      }
    }
    emit("table1_per_seed.csv", per_seed.str());
  } else if (which == "figure1") {
    const auto rows = gbm::reproduce_figure1(spec, c.bench.epsilons, c.sampler.n_paths,
                                             c.sampler.seed, simulation_options(c));
    emit("figure1.csv", gbm::figure1_csv(rows, preamble));
  } else if (which == "figure2") {
    gbm::Figure2Options o;
    o.n_paths = c.sampler.n_paths;
    o.n_rounds = c.bench.figure2_rounds;
    o.seed = c.sampler.seed;
    o.t = c.bench.figure2_t;
    o.histogram_bins = c.bench.histogram_bins;
    o.fit = bench_fit(c);
    o.simulation = simulation_options(c);
    const auto r = gbm::reproduce_figure2(spec, o);
    std::string notes;
    for (const auto& name : r.diverged) {
      notes += "# diverged: " + name + " (curve from the last controller fitted before divergence)\n";
    }
    emit("figure2_controls.csv", gbm::figure2_controls_csv(r, preamble + notes));
    emit("figure2_hist.csv", gbm::figure2_hist_csv(r, preamble));
  } else {
    throw ConfigError("unknown benchmark '" + which + "' (expected table1, figure1 or figure2)");
  }
  return written;
}

}  // namespace pathint::cli

#endif  // PATHINT_TOOLS_CLI_HPP
