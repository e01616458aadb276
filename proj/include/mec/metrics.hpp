#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mec {

/// One strategy's result on one snapshot.
struct DropRecord {
  std::uint64_t seed = 0;
  std::size_t servers = 0;      // K
  std::size_t users = 0;        // configured I'
  std::size_t subcarriers = 0;  // N
  std::string strategy;
  std::string profile;
  double total_j = 0.0;
  double compute_j = 0.0;
  double transmit_j = 0.0;
  double local_j = 0.0;
  std::size_t served = 0;
  std::size_t offloaders = 0;
  double converged_fraction = 0.0;
  double wall_ms = 0.0;
};

/// Builds a record with total_j = compute_j + transmit_j.
DropRecord make_record(DropRecord base, double compute_j, double transmit_j);

/// Pooled over users: sum served / sum offloaders. nullopt when there are no
/// offloaders in the batch.
std::optional<double> sop(std::span<const DropRecord> records);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
};

struct GroupStats {
  std::string strategy;
  std::size_t servers = 0;
  std::string profile;
  std::size_t drops = 0;
  /// mean of total is defined as mean(compute) + mean(transmit).
  Summary total_j;
  Summary compute_j;
  Summary transmit_j;
  std::optional<double> sop;
  double converged_fraction = 0.0;
};

struct AggregateReport {
  /// Ordered by (strategy, servers, profile).
  std::vector<GroupStats> groups;
  std::size_t drop_count = 0;

  const GroupStats* find(const std::string& strategy, std::size_t servers,
                         const std::string& profile) const;
};

AggregateReport aggregate(std::span<const DropRecord> records);

}  // namespace mec
