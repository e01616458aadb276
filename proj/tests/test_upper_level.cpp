#include <doctest.h>

#include <algorithm>
#include <set>

#include "mec/upper_level.hpp"
#include "support.hpp"

using namespace mec;

TEST_CASE("assignment counts") {
  CHECK(enumerate_assignments(3, 5).size() == 60);
  CHECK(enumerate_assignments(3, 9).size() == 504);
  CHECK(enumerate_assignments(1, 1).size() == 1);
  CHECK(enumerate_assignments(2, 1).empty());
  CHECK(enumerate_assignments(0, 4).size() == 1);
}

TEST_CASE("assignments are injective, distinct and lexicographic") {
  const auto maps = enumerate_assignments(3, 5);
  std::set<std::vector<std::size_t>> seen;
  for (const auto& m : maps) {
    std::set<std::size_t> servers(m.begin(), m.end());
    CHECK(servers.size() == m.size());
    for (auto k : m) CHECK(k < 5);
    seen.insert(m);
  }
  CHECK(seen.size() == maps.size());
  CHECK(std::is_sorted(maps.begin(), maps.end()));
  CHECK(maps.front() == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("offloading users follow the local gate") {
  auto s = testing::flat_scenario(3, 3, 8);
  CHECK(offloading_users(s) == std::vector<std::size_t>{0, 1, 2});
  s.params.local_energy_threshold_j = 1.0;  // 0.36 J local energy now passes
  CHECK(offloading_users(s).empty());
  s.users[1].task.deadline_s = 1e-3;  // local time 1.67 ms misses this deadline
  CHECK(offloading_users(s) == std::vector<std::size_t>{1});
}

TEST_CASE("single user and single server reduces to one lower-level solve") {
  const auto s = generate_scenario(4, 1, 1, 64);
  const auto r = eejs_solve(s);
  REQUIRE(r.per_assignment_log.size() == 1);
  const Assignment b{{Target::server(0)}};
  CHECK(r.best_assignment == b);
  const auto direct = solve_lower(b, s);
  CHECK(r.total_energy_j == direct.total_energy_j());
  CHECK(r.best_outcome.allocation.power_w == direct.allocation.power_w);
}

TEST_CASE("selected energy is minimal over fully feasible assignments") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto s = generate_scenario(seed, 3, 4, 64);
    const auto r = eejs_solve(s);
    CHECK(r.per_assignment_log.size() == 24);
    double sum = 0.0;
    for (const auto& e : r.best_outcome.energy) sum += e.total_j;
    CHECK(r.total_energy_j == doctest::Approx(sum).epsilon(1e-15));
    for (const auto& entry : r.per_assignment_log) {
      CHECK_NOTHROW(validate(entry.assignment, 4));
      if (entry.feasible) CHECK(r.total_energy_j <= entry.total_energy_j);
    }
  }
}

TEST_CASE("serial and parallel searches agree exactly") {
  for (std::uint64_t seed : {3ULL, 17ULL}) {
    const auto s = generate_scenario(seed, 3, 6, 64);
    const auto a = eejs_solve(s, {}, Execution::serial);
    const auto b = eejs_solve(s, {}, Execution::parallel);
    CHECK(a.best_assignment == b.best_assignment);
    CHECK(a.total_energy_j == b.total_energy_j);
    CHECK(a.best_outcome.allocation.power_w == b.best_outcome.allocation.power_w);
    REQUIRE(a.per_assignment_log.size() == b.per_assignment_log.size());
    for (std::size_t j = 0; j < a.per_assignment_log.size(); ++j)
      CHECK(a.per_assignment_log[j].total_energy_j == b.per_assignment_log[j].total_energy_j);
  }
}

TEST_CASE("more tasks than servers leaves every offloader unserved") {
  const auto s = generate_scenario(2, 3, 2, 16);
  const auto r = eejs_solve(s);
  CHECK(r.more_tasks_than_servers);
  CHECK(r.served_count() == 0);
  CHECK(r.offloader_count() == 3);
  CHECK(r.per_assignment_log.empty());
  const auto h = hungarian_solve(s);
  CHECK(h.served_count() == 0);
}

TEST_CASE("a server too slow for a deadline is avoided") {
  auto s = generate_scenario(6, 2, 2, 64);
  s.servers[0].cpu_freq_hz = 1.1e9;
  s.servers[1].cpu_freq_hz = 1.2e9;
  // User 1's deadline falls between its compute times on the two servers.
  s.users[1].task.deadline_s = s.users[1].task.cycles() / 1.1e9 - 1e-6;
  const auto r = eejs_solve(s);
  CHECK(r.best_assignment.targets[1] == Target::server(1));
  CHECK(r.served_count() == 2);
  const Assignment bad{{Target::server(1), Target::server(0)}};
  const auto out = evaluate_assignment(bad, s, {});
  CHECK_FALSE(out.feasible[1]);
  CHECK(out.allocation.total_power(1) == 0.0);
}

CandidateScore make_score(bool all, std::size_t served, double e) { return {all, served, e}; }

TEST_CASE("candidate ranking") {
  CHECK(better(make_score(true, 2, 5.0), make_score(false, 3, 1.0)));
  CHECK(better(make_score(false, 2, 5.0), make_score(false, 1, 1.0)));
  CHECK(better(make_score(false, 2, 1.0), make_score(false, 2, 5.0)));
  CHECK_FALSE(better(make_score(true, 2, 1.0), make_score(true, 2, 1.0)));
}

TEST_CASE("hungarian agrees with enumeration for one offloader") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = generate_scenario(seed, 1, 5, 64);
    const auto e = eejs_solve(s);
    const auto h = hungarian_solve(s);
    CHECK(e.best_assignment == h.best_assignment);
  }
}

TEST_CASE("hungarian never beats enumeration when both serve everyone") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto s = generate_scenario(seed, 3, 5, 64);
    const auto e = eejs_solve(s);
    const auto h = hungarian_solve(s);
    CHECK_NOTHROW(validate(h.best_assignment, 5));
    if (e.served_count() == 3 && h.served_count() == 3) CHECK(e.total_energy_j <= h.total_energy_j);
  }
}
