#include "mec/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "mec/rng.hpp"

namespace mec {

Assignment mdoa_assign(const Scenario& s) {
  const auto offloaders = offloading_users(s);
  std::vector<bool> taken(s.num_servers(), false);
  std::vector<std::size_t> servers;
  for (std::size_t i : offloaders) {
    std::size_t best = s.num_servers();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s.num_servers(); ++k) {
      if (taken[k]) continue;
      const double d = distance(s.users[i].position, s.servers[k].position);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    if (best == s.num_servers()) break;
    taken[best] = true;
    servers.push_back(best);
  }
  return expand_assignment(s, offloaders, servers);
}

namespace {

EejsResult solve_fixed(const Scenario& s, Assignment b, const LowerHyper& hyper) {
  EejsResult r;
  r.best_outcome = evaluate_assignment(b, s, hyper);
  r.best_assignment = std::move(b);
  const auto sc = score(r.best_outcome, r.best_assignment);
  r.per_assignment_log.push_back({r.best_assignment, r.best_outcome.total_energy_j(), sc.served,
                                  sc.all_served, r.best_outcome.converged});
  finalize(r, s);
  return r;
}

}  // namespace

EejsResult mdoa_solve(const Scenario& s, const LowerHyper& hyper) {
  return solve_fixed(s, mdoa_assign(s), hyper);
}

Assignment roa_assign(const Scenario& s, std::uint64_t seed) {
  const auto offloaders = offloading_users(s);
  std::vector<std::size_t> order(s.num_servers());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto g = rng::stream(seed, rng::Tag::random_offload);
  // Fisher-Yates, only as far as needed.
  const std::size_t picks = std::min(offloaders.size(), order.size());
  for (std::size_t j = 0; j < picks; ++j) {
    const std::size_t r = j + rng::uniform_index(g, order.size() - j);
    std::swap(order[j], order[r]);
  }
  order.resize(picks);
  return expand_assignment(s, offloaders, order);
}

EejsResult roa_solve(const Scenario& s, std::uint64_t seed, const LowerHyper& hyper) {
  return solve_fixed(s, roa_assign(s, seed), hyper);
}

Allocation equal_allocation(const Assignment& b, const Scenario& s) {
  const std::size_t N = s.num_subcarriers();
  Allocation alloc(s.num_users(), N);
  const auto pairs = offload_pairs(b);
  if (pairs.empty()) return alloc;
  std::vector<std::size_t> share(pairs.size(), 0);
  for (std::size_t n = 0; n < N; ++n) ++share[n % pairs.size()];
  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t q = n % pairs.size();
    alloc.subcarrier_owner[n] = pairs[q];
    const auto& user = s.users[pairs[q].user];
    alloc.power(pairs[q].user, n) = user.max_tx_power_w / static_cast<double>(share[q]);
  }
  return alloc;
}

EejsResult aas_solve(const Scenario& s) {
  const auto offloaders = offloading_users(s);
  const auto maps = enumerate_assignments(offloaders.size(), s.num_servers());

  auto evaluate = [&](const Assignment& b) {
    LowerSolveResult out;
    out.allocation = equal_allocation(b, s);
    out.converged = true;
    evaluate_allocation(out, b, s);
    return out;
  };

  EejsResult r;
  if (maps.empty()) {
    r.best_assignment = expand_assignment(s, offloaders, {});
    r.best_outcome = evaluate(r.best_assignment);
    finalize(r, s);
    return r;
  }

  CandidateScore best_score;
  for (std::size_t j = 0; j < maps.size(); ++j) {
    Assignment b = expand_assignment(s, offloaders, maps[j]);
    LowerSolveResult out = evaluate(b);
    const auto sc = score(out, b);
    r.per_assignment_log.push_back({b, out.total_energy_j(), sc.served, sc.all_served, true});
    if (j == 0 || better(sc, best_score)) {
      best_score = sc;
      r.best_assignment = std::move(b);
      r.best_outcome = std::move(out);
    }
  }
  finalize(r, s);
  return r;
}

std::size_t LocalOnlyResult::deadline_met_count() const {
  return static_cast<std::size_t>(std::count(meets_deadline.begin(), meets_deadline.end(), true));
}

LocalOnlyResult local_only(const Scenario& s) {
  LocalOnlyResult r;
  for (const auto& u : s.users) {
    const double t = local_time(u.task, u);
    const double e = local_energy(u.task, u, s.params);
    r.time_s.push_back(t);
    r.energy_j.push_back(e);
    r.meets_deadline.push_back(t <= u.task.deadline_s);
    r.total_energy_j += e;
  }
  return r;
}

}  // namespace mec
