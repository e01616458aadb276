#pragma once

// Comparison strategies: nearest server, random server, equal allocation and
// all-local execution.

#include <cstdint>
#include <vector>

#include "mec/lower_level.hpp"
#include "mec/upper_level.hpp"

namespace mec {

/// Offloaders in index order each take the nearest server not yet taken
/// (equal distances go to the lower server index). Surplus users are unplaced.
Assignment mdoa_assign(const Scenario& s);
EejsResult mdoa_solve(const Scenario& s, const LowerHyper& hyper = {});

/// Uniformly random injective assignment drawn from a stream keyed by `seed`,
/// independent of the scenario's own streams.
Assignment roa_assign(const Scenario& s, std::uint64_t seed);
EejsResult roa_solve(const Scenario& s, std::uint64_t seed, const LowerHyper& hyper = {});

/// Round-robin subcarrier split (subcarrier n goes to placed offloader n mod I')
/// with P^m spread evenly over each user's share.
Allocation equal_allocation(const Assignment& b, const Scenario& s);

/// Equal allocation, with the server assignment chosen by enumeration under
/// that fixed allocation.
EejsResult aas_solve(const Scenario& s);

struct LocalOnlyResult {
  double total_energy_j = 0.0;
  std::vector<double> time_s;
  std::vector<double> energy_j;
  std::vector<bool> meets_deadline;

  std::size_t deadline_met_count() const;
};

LocalOnlyResult local_only(const Scenario& s);

}  // namespace mec
