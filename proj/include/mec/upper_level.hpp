#pragma once

// Server selection over the lower-level allocation: exhaustive enumeration of
// injective user-to-server maps, and the Hungarian shortcut.

#include <cstddef>
#include <vector>

#include "mec/lower_level.hpp"
#include "mec/scenario.hpp"

namespace mec {

enum class Execution { serial, parallel };

struct AssignmentLogEntry {
  Assignment assignment;
  double total_energy_j = 0.0;
  std::size_t served = 0;
  bool feasible = false;
  bool converged = false;
};

/// Outcome of a strategy on one snapshot. Baselines report the same shape.
struct EejsResult {
  Assignment best_assignment;
  LowerSolveResult best_outcome;
  /// Sum of remote energy over offloading users (the server-selection objective).
  double total_energy_j = 0.0;
  /// Energy of users that passed the local gate, reported separately.
  double local_energy_j = 0.0;
  std::vector<AssignmentLogEntry> per_assignment_log;
  std::vector<bool> users_served;
  std::vector<std::size_t> offloaders;
  bool more_tasks_than_servers = false;

  std::size_t served_count() const;
  std::size_t offloader_count() const { return offloaders.size(); }
  double compute_energy_j() const { return best_outcome.compute_energy_j(); }
  double transmit_energy_j() const { return best_outcome.transmit_energy_j(); }
};

/// Users failing the local gate, in index order.
std::vector<std::size_t> offloading_users(const Scenario& s);

/// All injective maps from `n_offloaders` users to `n_servers` servers in
/// lexicographic order; entry j of a map is the server of offloader j. Empty
/// when n_offloaders > n_servers.
std::vector<std::vector<std::size_t>> enumerate_assignments(std::size_t n_offloaders,
                                                            std::size_t n_servers);

/// Full assignment: offloaders mapped by `servers`, everyone else local.
Assignment expand_assignment(const Scenario& s, const std::vector<std::size_t>& offloaders,
                             const std::vector<std::size_t>& servers);

/// Lower-level solve that tolerates impossible deadlines: such users are left
/// without subcarriers and reported infeasible instead of aborting the solve.
LowerSolveResult evaluate_assignment(const Assignment& b, const Scenario& s,
                                     const LowerHyper& hyper);

/// Ranking used to pick among candidate assignments: every offloader served
/// and least energy first; otherwise most users served, then least energy over
/// served users; remaining ties go to the earlier candidate.
struct CandidateScore {
  bool all_served = false;
  std::size_t served = 0;
  double energy_j = 0.0;
};
CandidateScore score(const LowerSolveResult& r, const Assignment& b);
bool better(const CandidateScore& a, const CandidateScore& b);

/// Fill the reporting fields of a strategy result from its chosen outcome.
void finalize(EejsResult& r, const Scenario& s);

EejsResult eejs_solve(const Scenario& s, const LowerHyper& hyper = {},
                      Execution exec = Execution::parallel);

EejsResult hungarian_solve(const Scenario& s, const LowerHyper& hyper = {});

}  // namespace mec
