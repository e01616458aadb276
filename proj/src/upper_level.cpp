#include "mec/upper_level.hpp"

#include <algorithm>
#include <cmath>

#include "mec/hungarian.hpp"

namespace mec {

std::size_t EejsResult::served_count() const {
  return static_cast<std::size_t>(std::count(users_served.begin(), users_served.end(), true));
}

std::vector<std::size_t> offloading_users(const Scenario& s) {
  std::vector<std::size_t> out;
  for (const auto& u : s.users)
    if (!local_gate(u.task, u, s.params)) out.push_back(u.id);
  return out;
}

std::vector<std::vector<std::size_t>> enumerate_assignments(std::size_t n_offloaders,
                                                            std::size_t n_servers) {
  std::vector<std::vector<std::size_t>> out;
  if (n_offloaders > n_servers) return out;
  std::vector<std::size_t> current;
  std::vector<bool> used(n_servers, false);
  auto recurse = [&](auto&& self) -> void {
    if (current.size() == n_offloaders) {
      out.push_back(current);
      return;
    }
    for (std::size_t k = 0; k < n_servers; ++k) {
      if (used[k]) continue;
      used[k] = true;
      current.push_back(k);
      self(self);
      current.pop_back();
      used[k] = false;
    }
  };
  recurse(recurse);
  return out;
}

Assignment expand_assignment(const Scenario& s, const std::vector<std::size_t>& offloaders,
                             const std::vector<std::size_t>& servers) {
  Assignment b{std::vector<Target>(s.num_users(), Target::local())};
  for (std::size_t j = 0; j < offloaders.size(); ++j)
    b.targets[offloaders[j]] = j < servers.size() ? Target::server(servers[j]) : Target::unplaced();
  return b;
}

LowerSolveResult evaluate_assignment(const Assignment& b, const Scenario& s,
                                     const LowerHyper& hyper) {
  Assignment reachable = b;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!b.targets[i].is_server()) continue;
    if (!(slack_time(s.users[i].task, s.servers[b.targets[i].server_index()]) > 0.0))
      reachable.targets[i] = Target::unplaced();
  }
  return solve_lower(reachable, s, hyper);
}

CandidateScore score(const LowerSolveResult& r, const Assignment& b) {
  CandidateScore sc;
  sc.all_served = r.all_feasible(b);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.targets[i].is_local() || !r.feasible[i]) continue;
    ++sc.served;
    sc.energy_j += r.energy[i].total_j;
  }
  if (sc.all_served) sc.energy_j = r.total_energy_j();
  return sc;
}

bool better(const CandidateScore& a, const CandidateScore& b) {
  if (a.all_served != b.all_served) return a.all_served;
  if (a.served != b.served) return a.served > b.served;
  return a.energy_j < b.energy_j;
}

void finalize(EejsResult& r, const Scenario& s) {
  r.offloaders = offloading_users(s);
  r.more_tasks_than_servers = r.offloaders.size() > s.num_servers();
  r.users_served.assign(s.num_users(), false);
  for (std::size_t i : r.offloaders)
    r.users_served[i] = r.best_assignment.targets[i].is_server() && r.best_outcome.feasible[i];
  r.total_energy_j = r.best_outcome.total_energy_j();
  r.local_energy_j = 0.0;
  for (const auto& u : s.users)
    if (r.best_assignment.targets[u.id].is_local()) r.local_energy_j += local_energy(u.task, u, s.params);
}

namespace {

EejsResult unplaceable(const Scenario& s, const LowerHyper& hyper) {
  EejsResult r;
  const auto offloaders = offloading_users(s);
  r.best_assignment = expand_assignment(s, offloaders, {});
  r.best_outcome = solve_lower(r.best_assignment, s, hyper);
  finalize(r, s);
  return r;
}

}  // namespace

EejsResult eejs_solve(const Scenario& s, const LowerHyper& hyper, Execution exec) {
  const auto offloaders = offloading_users(s);
  const auto maps = enumerate_assignments(offloaders.size(), s.num_servers());
  if (maps.empty()) return unplaceable(s, hyper);

  const auto count = static_cast<std::ptrdiff_t>(maps.size());
  std::vector<Assignment> assignments(maps.size());
  std::vector<LowerSolveResult> outcomes(maps.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      assignments[j] = expand_assignment(s, offloaders, maps[j]);
      outcomes[j] = evaluate_assignment(assignments[j], s, hyper);
    }
  } else {
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      assignments[j] = expand_assignment(s, offloaders, maps[j]);
      outcomes[j] = evaluate_assignment(assignments[j], s, hyper);
    }
  }

  EejsResult r;
  r.per_assignment_log.reserve(maps.size());
  std::size_t best = 0;
  CandidateScore best_score = score(outcomes[0], assignments[0]);
  for (std::size_t j = 0; j < maps.size(); ++j) {
    const CandidateScore sc = score(outcomes[j], assignments[j]);
    r.per_assignment_log.push_back(
        {assignments[j], outcomes[j].total_energy_j(), sc.served, sc.all_served, outcomes[j].converged});
    if (j > 0 && better(sc, best_score)) {
      best = j;
      best_score = sc;
    }
  }
  r.best_assignment = std::move(assignments[best]);
  r.best_outcome = std::move(outcomes[best]);
  finalize(r, s);
  return r;
}

EejsResult hungarian_solve(const Scenario& s, const LowerHyper& hyper) {
  const auto offloaders = offloading_users(s);
  const std::size_t rows = offloaders.size();
  const std::size_t cols = s.num_servers();
  if (rows > cols) return unplaceable(s, hyper);

  // Each user alone on the full spectrum; infeasible pairs priced above any
  // feasible total so the matching avoids them when it can.
  constexpr double kInfeasiblePenalty = 1e6;
  constexpr double kImpossibleCost = 1e9;
  std::vector<double> cost(rows * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t i = offloaders[r];
    for (std::size_t k = 0; k < cols; ++k) {
      Assignment solo{std::vector<Target>(s.num_users(), Target::unplaced())};
      solo.targets[i] = Target::server(k);
      if (!(slack_time(s.users[i].task, s.servers[k]) > 0.0)) {
        cost[r * cols + k] = kImpossibleCost;
        continue;
      }
      const auto out = solve_lower(solo, s, hyper);
      cost[r * cols + k] = out.energy[i].total_j + (out.feasible[i] ? 0.0 : kInfeasiblePenalty);
    }
  }
  const auto columns = hungarian_min_cost(cost, rows, cols);

  EejsResult r;
  r.best_assignment = expand_assignment(s, offloaders, columns);
  r.best_outcome = evaluate_assignment(r.best_assignment, s, hyper);
  const auto sc = score(r.best_outcome, r.best_assignment);
  r.per_assignment_log.push_back({r.best_assignment, r.best_outcome.total_energy_j(), sc.served,
                                  sc.all_served, r.best_outcome.converged});
  finalize(r, s);
  return r;
}

}  // namespace mec
