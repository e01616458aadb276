// mecsim: scenario generation, single-snapshot solves and Monte Carlo sweeps.
//
// Exit codes: 0 success, 1 usage error, 2 I/O or parse error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "mec/experiment.hpp"
#include "mec/scenario.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kIoError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* yes_no(bool b) { return b ? "yes" : "no"; }

std::string describe(const mec::Target& t) {
  if (t.is_local()) return "local";
  if (t.is_unplaced()) return "unplaced";
  return "server " + std::to_string(t.server_index());
}

void print_run(std::ostream& out, const mec::StrategyRun& run, const mec::Scenario& s) {
  std::printf("strategy: %s\n", mec::to_string(run.strategy).c_str());
  if (run.local) {
    std::printf("local-only total energy: %.6g J\n", run.local->total_energy_j);
    for (std::size_t i = 0; i < s.num_users(); ++i)
      std::printf("  user %zu: energy %.6g J, time %.6g s, deadline met: %s\n", i,
                  run.local->energy_j[i], run.local->time_s[i],
                  yes_no(run.local->meets_deadline[i]));
    return;
  }
  const auto& r = run.result;
  const auto& o = r.best_outcome;
  std::printf("offloaders: %zu, served: %zu%s\n", r.offloader_count(), r.served_count(),
              r.more_tasks_than_servers ? " (more tasks than idle servers)" : "");
  std::printf("total remote energy: %.9g J (compute %.9g J, transmit %.9g J)\n",
              r.total_energy_j, r.compute_energy_j(), r.transmit_energy_j());
  std::printf("local energy of gated users: %.9g J\n", r.local_energy_j);
  std::printf("lower level: converged %s, iterations %zu, zeta %.6g, last relative change %.3g\n",
              yes_no(o.converged), o.iterations_used, o.objective_zeta_j, o.last_power_change);
  std::printf("assignments evaluated: %zu, converged fraction: %.3f\n", r.per_assignment_log.size(),
              run.converged_fraction);
  for (std::size_t i = 0; i < s.num_users(); ++i) {
    const auto& t = r.best_assignment.targets[i];
    std::printf("  user %zu -> %s", i, describe(t).c_str());
    if (t.is_server()) {
      std::size_t owned = 0;
      for (const auto& w : o.allocation.subcarrier_owner)
        if (w && w->user == i) ++owned;
      std::printf(": subcarriers %zu, power %.6g W, rate %.6g bit/s, energy %.9g J "
                  "(compute %.9g, transmit %.9g), deadline slack %.3g, served %s",
                  owned, o.allocation.total_power(i), o.rate_bps[i], o.energy[i].total_j,
                  o.energy[i].compute_j, o.energy[i].transmit_j, o.c10_gap[i],
                  yes_no(r.users_served[i]));
    }
    std::printf("\n");
  }
  out.flush();
}

mec::Strategy strategy_from(const std::string& name) {
  const auto s = mec::parse_strategy(name);
  if (!s) throw UsageError("unknown strategy '" + name + "'");
  return *s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint task offloading and OFDMA resource allocation for multi-server edge computing"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a scenario file");
  std::uint64_t seed = 1;
  std::size_t users = 3, servers = 5, subcarriers = 64;
  std::string out_path;
  std::vector<double> deadline_ms;
  gen->add_option("--seed", seed, "Scenario seed");
  gen->add_option("--users", users, "Number of users")->check(CLI::PositiveNumber);
  gen->add_option("--servers", servers, "Number of edge servers")->check(CLI::PositiveNumber);
  gen->add_option("--subcarriers", subcarriers, "Number of subcarriers")->check(CLI::PositiveNumber);
  gen->add_option("--deadline-ms", deadline_ms, "Deadline range in ms (lo hi)")->expected(2);
  gen->add_option("-o,--output", out_path, "Output file")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one scenario with one strategy");
  std::string scenario_path, strategy_name = "eejs", csv_path;
  std::uint64_t roa_seed = 0;
  bool roa_seed_set = false;
  mec::LowerHyper hyper;
  std::string step_rule = "normalized";
  solve->add_option("scenario", scenario_path, "Scenario file")->required();
  solve->add_option("--strategy", strategy_name, "eejs|hungarian|mdoa|roa|aas|local");
  solve->add_option("--roa-seed", roa_seed, "Seed for random offloading (default: scenario seed)")
      ->each([&](const std::string&) { roa_seed_set = true; });
  solve->add_option("--csv", csv_path, "Also write the result as a one-row CSV");
  solve->add_option("--epsilon", hyper.epsilon, "Power-change tolerance (relative)");
  solve->add_option("--max-iterations", hyper.max_iterations, "Dual iteration cap");
  solve->add_option("--step-alpha", hyper.step_alpha, "Rate multiplier step (fixed rule)");
  solve->add_option("--step-beta", hyper.step_beta, "Power multiplier step (fixed rule)");
  solve->add_option("--step-rule", step_rule, "fixed|normalized")
      ->check(CLI::IsMember({"fixed", "normalized"}));

  // compare
  auto* compare = app.add_subcommand("compare", "Run every strategy on one scenario");
  std::string compare_path;
  compare->add_option("scenario", compare_path, "Scenario file")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte Carlo sweep from a config file");
  std::string config_path, exp_out;
  int threads = 0;
  bool summary = false;
  exp->add_option("config", config_path, "Experiment config (JSON)")->required();
  exp->add_option("-o,--output", exp_out, "Results CSV")->required();
  exp->add_option("--threads", threads, "Worker threads (0: OpenMP default)");
  exp->add_flag("--summary", summary, "Print grouped means and SOP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*gen) {
      mec::ScenarioConfig sc;
      if (!deadline_ms.empty()) sc.deadline_s = {deadline_ms[0] * 1e-3, deadline_ms[1] * 1e-3};
      const auto s = mec::generate_scenario(seed, users, servers, subcarriers, sc);
      mec::save_scenario(s, out_path);
      std::printf("wrote %s (%zu users, %zu servers, %zu subcarriers, seed %llu)\n",
                  out_path.c_str(), users, servers, subcarriers,
                  static_cast<unsigned long long>(seed));
      return 0;
    }
    if (*solve) {
      const auto strategy = strategy_from(strategy_name);
      hyper.step_rule = step_rule == "fixed" ? mec::StepRule::fixed : mec::StepRule::normalized;
      const auto s = mec::load_scenario(scenario_path);
      const auto run = mec::run_strategy(strategy, s, hyper, roa_seed_set ? roa_seed : s.seed);
      print_run(std::cout, run, s);
      if (!csv_path.empty()) mec::write_csv_file(csv_path, {mec::to_record(run, s, "single")});
      return 0;
    }
    if (*compare) {
      const auto s = mec::load_scenario(compare_path);
      std::printf("%-10s %14s %14s %14s %8s\n", "strategy", "total_j", "compute_j", "transmit_j",
                  "served");
      for (auto strategy : mec::all_strategies()) {
        const auto r = mec::to_record(mec::run_strategy(strategy, s, {}, s.seed), s, "single");
        std::printf("%-10s %14.9g %14.9g %14.6g %4zu/%zu\n", r.strategy.c_str(), r.total_j,
                    r.compute_j, r.transmit_j, r.served, r.offloaders);
      }
      return 0;
    }
    if (*exp) {
      const auto config = mec::load_experiment_config(config_path);
      if (threads > 0) omp_set_num_threads(threads);
      const auto rows = mec::run_experiment(config);
      mec::write_csv_file(exp_out, rows);
      std::printf("wrote %zu rows to %s\n", rows.size(), exp_out.c_str());
      if (summary) {
        const auto report = mec::aggregate(rows);
        std::printf("%-10s %3s %-10s %12s %12s %12s %6s\n", "strategy", "K", "profile",
                    "mean_total", "mean_comp", "mean_tx", "sop");
        for (const auto& g : report.groups)
          std::printf("%-10s %3zu %-10s %12.6g %12.6g %12.4g %6.3f\n", g.strategy.c_str(),
                      g.servers, g.profile.c_str(), g.total_j.mean, g.compute_j.mean,
                      g.transmit_j.mean, g.sop.value_or(-1.0));
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoError;
  }
  return kUsageError;
}
