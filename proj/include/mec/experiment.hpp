#pragma once

// Monte Carlo sweeps over server counts, deadline profiles and strategies.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mec/baselines.hpp"
#include "mec/lower_level.hpp"
#include "mec/metrics.hpp"
#include "mec/scenario.hpp"
#include "mec/upper_level.hpp"

namespace mec {

enum class Strategy { eejs, hungarian, mdoa, roa, aas, local };

const std::vector<Strategy>& all_strategies();
std::string to_string(Strategy s);
/// nullopt for unknown names.
std::optional<Strategy> parse_strategy(const std::string& name);

/// Overrides the deadline range of generated tasks.
struct DeadlineProfile {
  std::string name = "default";
  std::optional<Range> deadline_s;
};

struct ExperimentConfig {
  std::uint64_t base_seed = 1;
  std::size_t drops = 200;
  std::size_t users = 3;
  std::size_t subcarriers = 64;
  std::vector<std::size_t> servers{3, 4, 5, 6, 7, 8, 9};
  std::vector<Strategy> strategies = all_strategies();
  std::vector<DeadlineProfile> profiles{DeadlineProfile{}};
  ScenarioConfig scenario;
  LowerHyper solver;
  /// When false wall_ms is written as 0 so reruns are byte-identical.
  bool record_timing = false;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Strategy outcome on one scenario, in the shape used for records and reports.
struct StrategyRun {
  Strategy strategy = Strategy::eejs;
  EejsResult result;                     // empty for Strategy::local
  std::optional<LocalOnlyResult> local;  // set for Strategy::local only
  double converged_fraction = 0.0;
};

/// ROA draws from `roa_seed`; everything else is a pure function of the scenario.
StrategyRun run_strategy(Strategy strategy, const Scenario& s, const LowerHyper& hyper,
                         std::uint64_t roa_seed, Execution exec = Execution::parallel);

DropRecord to_record(const StrategyRun& run, const Scenario& s, const std::string& profile);

/// Seed of drop j is base_seed + j; every strategy at a (drop, K, profile)
/// point sees the same scenario. Rows come back ordered by drop, profile,
/// strategy, K regardless of how drops were scheduled.
std::vector<DropRecord> run_experiment(const ExperimentConfig& config);

extern const char* const kCsvSchema;
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const DropRecord& r);
std::vector<DropRecord> read_csv(std::istream& in);

/// Writes to a temporary file and renames it into place, so an interrupted run
/// never leaves a partial CSV behind.
void write_csv_file(const std::filesystem::path& path, const std::vector<DropRecord>& rows);

}  // namespace mec
