#include "mec/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mec {

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all{Strategy::eejs, Strategy::hungarian, Strategy::mdoa,
                                         Strategy::roa,  Strategy::aas,       Strategy::local};
  return all;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::eejs: return "eejs";
    case Strategy::hungarian: return "hungarian";
    case Strategy::mdoa: return "mdoa";
    case Strategy::roa: return "roa";
    case Strategy::aas: return "aas";
    case Strategy::local: return "local";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(const std::string& name) {
  for (Strategy s : all_strategies())
    if (to_string(s) == name) return s;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Config

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> known) {
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) throw ConfigError(where + "." + key + ": unknown key");
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field + ": expected a number");
  return v.get<double>();
}

std::size_t count(const json& v, const std::string& field) {
  if (!v.is_number_unsigned()) throw ConfigError(field + ": expected a nonnegative integer");
  return v.get<std::size_t>();
}

Range range(const json& v, const std::string& field, double scale = 1.0) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(field + ": expected [lo, hi]");
  Range r{number(v[0], field + "[0]") * scale, number(v[1], field + "[1]") * scale};
  if (r.hi < r.lo) throw ConfigError(field + ": lo exceeds hi");
  return r;
}

void parse_scenario(const json& j, ScenarioConfig& c) {
  const std::string w = "scenario";
  if (!j.is_object()) throw ConfigError(w + ": expected an object");
  reject_unknown(j, w,
                 {"area_radius_m", "pathloss_exponent", "min_distance_m", "data_size_bits",
                  "intensity_cycles_per_bit", "deadline_ms", "user_cpu_hz", "server_cpu_hz",
                  "subcarrier_bandwidth_hz", "noise_dbm", "max_tx_power_w", "k_user", "k_server",
                  "local_energy_threshold_j"});
  auto num = [&](const char* k, double& out) {
    if (j.contains(k)) out = number(j[k], w + "." + k);
  };
  auto rng = [&](const char* k, Range& out, double scale = 1.0) {
    if (j.contains(k)) out = range(j[k], w + "." + k, scale);
  };
  num("area_radius_m", c.area_radius_m);
  num("pathloss_exponent", c.pathloss_exponent);
  num("min_distance_m", c.min_distance_m);
  rng("data_size_bits", c.data_size_bits);
  rng("intensity_cycles_per_bit", c.intensity_cycles_per_bit);
  rng("deadline_ms", c.deadline_s, 1e-3);
  rng("user_cpu_hz", c.user_cpu_hz);
  rng("server_cpu_hz", c.server_cpu_hz);
  num("subcarrier_bandwidth_hz", c.subcarrier_bandwidth_hz);
  num("noise_dbm", c.noise_dbm);
  num("max_tx_power_w", c.max_tx_power_w);
  num("k_user", c.k_user);
  num("k_server", c.k_server);
  num("local_energy_threshold_j", c.local_energy_threshold_j);
}

void parse_solver(const json& j, LowerHyper& h) {
  const std::string w = "solver";
  if (!j.is_object()) throw ConfigError(w + ": expected an object");
  reject_unknown(j, w,
                 {"step_alpha", "step_beta", "epsilon", "max_iterations", "step_rule",
                  "alpha_init", "recover_primal"});
  if (j.contains("step_alpha")) h.step_alpha = number(j["step_alpha"], w + ".step_alpha");
  if (j.contains("step_beta")) h.step_beta = number(j["step_beta"], w + ".step_beta");
  if (j.contains("epsilon")) h.epsilon = number(j["epsilon"], w + ".epsilon");
  if (j.contains("max_iterations")) h.max_iterations = count(j["max_iterations"], w + ".max_iterations");
  if (j.contains("step_rule")) {
    const auto& v = j["step_rule"];
    if (v == "fixed") h.step_rule = StepRule::fixed;
    else if (v == "normalized") h.step_rule = StepRule::normalized;
    else throw ConfigError(w + ".step_rule: expected \"fixed\" or \"normalized\"");
  }
  if (j.contains("alpha_init")) {
    const auto& v = j["alpha_init"];
    if (v == "median_gain") h.alpha_init = AlphaInit::median_gain;
    else if (v == "zero") h.alpha_init = AlphaInit::zero;
    else throw ConfigError(w + ".alpha_init: expected \"median_gain\" or \"zero\"");
  }
  if (j.contains("recover_primal")) {
    if (!j["recover_primal"].is_boolean()) throw ConfigError(w + ".recover_primal: expected a boolean");
    h.recover_primal = j["recover_primal"].get<bool>();
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected an object");
  reject_unknown(j, "config",
                 {"base_seed", "drops", "users", "subcarriers", "servers", "strategies",
                  "deadline_profiles", "scenario", "solver", "record_timing"});
  ExperimentConfig c;
  if (j.contains("base_seed")) c.base_seed = count(j["base_seed"], "config.base_seed");
  if (j.contains("drops")) c.drops = count(j["drops"], "config.drops");
  if (j.contains("users")) c.users = count(j["users"], "config.users");
  if (j.contains("subcarriers")) c.subcarriers = count(j["subcarriers"], "config.subcarriers");
  if (j.contains("servers")) {
    const auto& v = j["servers"];
    if (!v.is_array() || v.empty()) throw ConfigError("config.servers: expected a nonempty array");
    c.servers.clear();
    for (std::size_t n = 0; n < v.size(); ++n)
      c.servers.push_back(count(v[n], "config.servers[" + std::to_string(n) + "]"));
  }
  if (j.contains("strategies")) {
    const auto& v = j["strategies"];
    if (v == "all") {
      c.strategies = all_strategies();
    } else {
      if (!v.is_array() || v.empty())
        throw ConfigError("config.strategies: expected \"all\" or a nonempty array");
      c.strategies.clear();
      for (const auto& name : v) {
        const auto s = name.is_string() ? parse_strategy(name.get<std::string>()) : std::nullopt;
        if (!s) throw ConfigError("config.strategies: unknown strategy " + name.dump());
        c.strategies.push_back(*s);
      }
    }
  }
  if (j.contains("deadline_profiles")) {
    const auto& v = j["deadline_profiles"];
    if (!v.is_array() || v.empty())
      throw ConfigError("config.deadline_profiles: expected a nonempty array");
    c.profiles.clear();
    for (std::size_t n = 0; n < v.size(); ++n) {
      const std::string w = "config.deadline_profiles[" + std::to_string(n) + "]";
      reject_unknown(v[n], w, {"name", "deadline_ms"});
      DeadlineProfile p;
      if (!v[n].contains("name") || !v[n]["name"].is_string()) throw ConfigError(w + ".name: missing");
      p.name = v[n]["name"].get<std::string>();
      if (v[n].contains("deadline_ms")) p.deadline_s = range(v[n]["deadline_ms"], w + ".deadline_ms", 1e-3);
      c.profiles.push_back(std::move(p));
    }
  }
  if (j.contains("scenario")) parse_scenario(j["scenario"], c.scenario);
  if (j.contains("solver")) parse_solver(j["solver"], c.solver);
  if (j.contains("record_timing")) {
    if (!j["record_timing"].is_boolean()) throw ConfigError("config.record_timing: expected a boolean");
    c.record_timing = j["record_timing"].get<bool>();
  }
  if (c.drops == 0) throw ConfigError("config.drops: must be >= 1");
  if (c.users == 0) throw ConfigError("config.users: must be >= 1");
  if (c.subcarriers == 0) throw ConfigError("config.subcarriers: must be >= 1");
  for (std::size_t k : c.servers)
    if (k == 0) throw ConfigError("config.servers: server counts must be >= 1");
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

// ---------------------------------------------------------------------------
// Runs

StrategyRun run_strategy(Strategy strategy, const Scenario& s, const LowerHyper& hyper,
                         std::uint64_t roa_seed, Execution exec) {
  StrategyRun run;
  run.strategy = strategy;
  switch (strategy) {
    case Strategy::eejs: run.result = eejs_solve(s, hyper, exec); break;
    case Strategy::hungarian: run.result = hungarian_solve(s, hyper); break;
    case Strategy::mdoa: run.result = mdoa_solve(s, hyper); break;
    case Strategy::roa: run.result = roa_solve(s, roa_seed, hyper); break;
    case Strategy::aas: run.result = aas_solve(s); break;
    case Strategy::local:
      run.local = local_only(s);
      run.converged_fraction = 1.0;
      return run;
  }
  const auto& log = run.result.per_assignment_log;
  if (log.empty()) {
    run.converged_fraction = run.result.best_outcome.converged ? 1.0 : 0.0;
  } else {
    std::size_t converged = 0;
    for (const auto& e : log) converged += e.converged ? 1 : 0;
    run.converged_fraction = static_cast<double>(converged) / static_cast<double>(log.size());
  }
  return run;
}

DropRecord to_record(const StrategyRun& run, const Scenario& s, const std::string& profile) {
  DropRecord base;
  base.seed = s.seed;
  base.servers = s.num_servers();
  base.users = s.num_users();
  base.subcarriers = s.num_subcarriers();
  base.strategy = to_string(run.strategy);
  base.profile = profile;
  base.converged_fraction = run.converged_fraction;
  if (run.local) {
    base.served = run.local->deadline_met_count();
    base.offloaders = s.num_users();
    return make_record(base, run.local->total_energy_j, 0.0);
  }
  base.served = run.result.served_count();
  base.offloaders = run.result.offloader_count();
  base.local_j = run.result.local_energy_j;
  return make_record(base, run.result.compute_energy_j(), run.result.transmit_energy_j());
}

std::vector<DropRecord> run_experiment(const ExperimentConfig& config) {
  const auto drops = static_cast<std::ptrdiff_t>(config.drops);
  std::vector<std::vector<DropRecord>> per_drop(config.drops);
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t d = 0; d < drops; ++d) {
    try {
      const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(d);
      auto& rows = per_drop[static_cast<std::size_t>(d)];
      for (const auto& profile : config.profiles) {
        ScenarioConfig sc = config.scenario;
        if (profile.deadline_s) sc.deadline_s = *profile.deadline_s;
        std::vector<Scenario> scenarios;
        for (std::size_t k : config.servers)
          scenarios.push_back(generate_scenario(seed, config.users, k, config.subcarriers, sc));
        for (Strategy strategy : config.strategies) {
          for (const auto& s : scenarios) {
            const auto start = std::chrono::steady_clock::now();
            const auto run = run_strategy(strategy, s, config.solver, seed, Execution::serial);
            const auto stop = std::chrono::steady_clock::now();
            DropRecord r = to_record(run, s, profile.name);
            if (config.record_timing)
              r.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
            rows.push_back(std::move(r));
          }
        }
      }
    } catch (...) {
#pragma omp critical(mec_experiment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<DropRecord> out;
  for (auto& rows : per_drop)
    for (auto& r : rows) out.push_back(std::move(r));
  return out;
}

// ---------------------------------------------------------------------------
// CSV

const char* const kCsvSchema = "# mec-experiment-csv v1";

namespace {

constexpr const char* kColumns =
    "seed,K,I_prime,N,strategy,profile,total_j,compute_j,transmit_j,local_j,served,offloaders,"
    "converged_fraction,wall_ms";

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv_header(std::ostream& out) { out << kCsvSchema << '\n' << kColumns << '\n'; }

void write_csv_row(std::ostream& out, const DropRecord& r) {
  out << r.seed << ',' << r.servers << ',' << r.users << ',' << r.subcarriers << ',' << r.strategy
      << ',' << r.profile << ',' << fmt_real(r.total_j) << ',' << fmt_real(r.compute_j) << ','
      << fmt_real(r.transmit_j) << ',' << fmt_real(r.local_j) << ',' << r.served << ','
      << r.offloaders << ',' << fmt_real(r.converged_fraction) << ',' << fmt_real(r.wall_ms)
      << '\n';
}

std::vector<DropRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvSchema)
    throw std::runtime_error("csv: missing or unsupported schema line");
  if (!std::getline(in, line) || line != kColumns) throw std::runtime_error("csv: unexpected header");
  std::vector<DropRecord> rows;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 14) throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 14 fields");
    try {
      DropRecord r;
      r.seed = std::stoull(f[0]);
      r.servers = std::stoull(f[1]);
      r.users = std::stoull(f[2]);
      r.subcarriers = std::stoull(f[3]);
      r.strategy = f[4];
      r.profile = f[5];
      r.total_j = std::stod(f[6]);
      r.compute_j = std::stod(f[7]);
      r.transmit_j = std::stod(f[8]);
      r.local_j = std::stod(f[9]);
      r.served = std::stoull(f[10]);
      r.offloaders = std::stoull(f[11]);
      r.converged_fraction = std::stod(f[12]);
      r.wall_ms = std::stod(f[13]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("csv line " + std::to_string(lineno) + ": malformed field");
    }
  }
  return rows;
}

void write_csv_file(const std::filesystem::path& path, const std::vector<DropRecord>& rows) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    write_csv_header(out);
    for (const auto& r : rows) write_csv_row(out, r);
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mec
