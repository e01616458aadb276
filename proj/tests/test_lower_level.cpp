#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "grid_oracle.hpp"
#include "mec/lower_level.hpp"
#include "support.hpp"
#include "tiny_instances.hpp"

using namespace mec;
using testing::flat_scenario;

namespace {

Assignment one_to_one(std::size_t users) {
  Assignment b;
  for (std::size_t i = 0; i < users; ++i) b.targets.push_back(Target::server(i));
  return b;
}

struct FrozenRow {
  std::size_t index = 0;
  unsigned long long seed = 0;
  bool feasible = false;
  double zeta = 0.0;
};

std::vector<FrozenRow> frozen_table() {
  std::ifstream in(std::string(MEC_TEST_DATA_DIR) + "/grid_oracle_frozen.txt");
  REQUIRE(in.good());
  std::vector<FrozenRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    FrozenRow r;
    int feasible = 0;
    std::string zeta;
    ss >> r.index >> r.seed >> feasible >> zeta;
    r.feasible = feasible != 0;
    r.zeta = std::strtod(zeta.c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("slack time") {
  auto s = flat_scenario(1, 1, 4);
  const auto b = one_to_one(1);
  CHECK(slack_time(0, b, s) == doctest::Approx(8.1304e-3).epsilon(1e-4));
  s.servers[0].cpu_freq_hz = 1e30;
  CHECK(slack_time(0, b, s) == doctest::Approx(9e-3).epsilon(1e-12));
  s = flat_scenario(1, 1, 4);
  s.users[0].task.deadline_s = 0.5e-3;
  CHECK_THROWS_AS(slack_time(0, b, s), DeadlineImpossible);
  Assignment local{{Target::local()}};
  CHECK_THROWS_AS(slack_time(0, local, s), std::invalid_argument);
}

TEST_CASE("water-filling power") {
  const auto s = flat_scenario(1, 1, 4, 2.7778e-4);
  const auto b = one_to_one(1);
  const double chi = slack_time(0, b, s);
  DualState d(1, 1);
  CHECK(waterfill_power(0, 0, 0, d, chi, s) == 0.0);

  // 1e-6 * 12.5e3 / (ln 2 * 8.1304e-3), evaluated at 30 digits.
  d.a(0, 0) = 1e-6;
  const double level = water_level(1e-6, 12.5e3, chi, 0.0);
  CHECK(level == doctest::Approx(2.21804719).epsilon(1e-8));
  CHECK(water_level(1e-9, 12.5e3, chi, 0.0) == doctest::Approx(2.21804719e-3).epsilon(1e-8));
  CHECK(s.params.noise_power_w / 2.7778e-4 == doctest::Approx(1.8043e-11).epsilon(1e-4));
  CHECK(waterfill_power(0, 0, 0, d, chi, s) == doctest::Approx(2.21804719).epsilon(1e-8));

  // Water level exactly at the noise floor.
  const double floor = s.params.noise_power_w / s.gains(0, 0, 0);
  d.a(0, 0) = floor * std::numbers::ln2 * chi / 12.5e3;
  CHECK(waterfill_power(0, 0, 0, d, chi, s) == doctest::Approx(0.0).epsilon(1e-30));
  CHECK(waterfill_power(0, 0, 0, d, chi, s) < 1e-25);

  auto dead = s;
  dead.gains(0, 1, 0) = 0.0;
  d.a(0, 0) = 1e-6;
  CHECK(waterfill_power(0, 1, 0, d, chi, dead) == 0.0);
}

TEST_CASE("phi") {
  const auto s = flat_scenario(1, 1, 4, 2.7778e-4);
  const auto b = one_to_one(1);
  const double chi = slack_time(0, b, s);
  DualState d(1, 1);
  d.a(0, 0) = 1e-6;
  CHECK(phi(0, 0, 0, 0.0, d, chi, s) == 0.0);
  const double p = waterfill_power(0, 0, 0, d, chi, s);
  CHECK(phi(0, 0, 0, p, d, chi, s) < 0.0);
  DualState zero(1, 1);
  CHECK(phi(0, 0, 0, 1e-3, zero, chi, s) > 0.0);
}

TEST_CASE("subcarrier assignment picks the smallest phi") {
  const std::vector<OffloadPair> pairs{{0, 0}, {1, 1}};
  {
    const std::vector<double> phis{-3.0, -1.0};  // one subcarrier, two pairs
    CHECK(assign_subcarriers(pairs, phis, 1)[0] == 0);
  }
  {
    const std::vector<double> phis{-1.0, -3.0};
    CHECK(assign_subcarriers(pairs, phis, 1)[0] == 1);
  }
  {
    const std::vector<double> phis{-2.0, -2.0};
    CHECK(assign_subcarriers(pairs, phis, 1)[0] == 0);
    const std::vector<OffloadPair> reversed{{1, 0}, {0, 1}};
    CHECK(assign_subcarriers(reversed, phis, 1)[0] == 1);  // lower user index wins
  }
  {
    const std::vector<OffloadPair> single{{0, 2}};
    const std::vector<double> phis{0.0, -1.0, 5.0};
    const auto owner = assign_subcarriers(single, phis, 3);
    for (auto o : owner) CHECK(o == 0);
  }
  CHECK_THROWS_AS(assign_subcarriers({}, {}, 2), std::invalid_argument);
}

TEST_CASE("dual update signs") {
  const auto s = flat_scenario(1, 1, 2);
  const auto b = one_to_one(1);
  const double chi = slack_time(0, b, s);
  const double required = 1000.0 / chi;
  Allocation alloc(1, 2);
  alloc.subcarrier_owner[0] = OffloadPair{0, 0};
  alloc.power(0, 0) = 0.6;
  DualState d(1, 1);
  d.a(0, 0) = 5e-7;
  d.beta[0] = 0.25;

  const std::vector<double> exact{required};
  const auto same = update_duals(d, alloc, exact, b, s, 2e-18, 1e-5);
  CHECK(same.a(0, 0) == d.a(0, 0));
  CHECK(same.beta[0] == d.beta[0]);
  CHECK(same.iteration == d.iteration + 1);

  const std::vector<double> fast{required * 2.0};
  CHECK(update_duals(d, alloc, fast, b, s, 1e-12, 1e-5).a(0, 0) < d.a(0, 0));
  CHECK(update_duals(d, alloc, fast, b, s, 1.0, 1e-5).a(0, 0) == 0.0);  // projected

  alloc.power(0, 0) = 0.8;
  const auto over = update_duals(d, alloc, exact, b, s, 2e-18, 1e-5);
  CHECK(over.beta[0] == doctest::Approx(0.25 + 1e-5 * 0.2).epsilon(1e-12));
  alloc.power(0, 0) = 0.0;
  CHECK(update_duals(d, alloc, exact, b, s, 2e-18, 1.0).beta[0] == 0.0);
}

TEST_CASE("stationarity of interior water-filling powers") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double bandwidth = 12.5e3;
  const double noise = 5.011872336272715e-15;
  std::size_t interior = 0;
  for (int t = 0; t < 1000; ++t) {
    const double alpha = std::pow(10.0, -20.0 + 16.0 * u01(rng));
    const double beta = u01(rng) < 0.5 ? 0.0 : std::pow(10.0, -6.0 + 6.0 * u01(rng));
    const double g = std::pow(10.0, -8.0 + 6.0 * u01(rng));
    const double chi = 5e-3 + 5e-3 * u01(rng);
    const double p = std::max(0.0, water_level(alpha, bandwidth, chi, beta) - noise / g);
    if (p <= 0.0) continue;
    ++interior;
    const double lhs = chi + beta;
    const double rhs = alpha * bandwidth * g / (std::numbers::ln2 * (noise + g * p));
    CHECK(std::abs(lhs - rhs) <= 1e-6 * lhs);
  }
  CHECK(interior > 200);
}

TEST_CASE("minimum-power water-filling") {
  const std::vector<double> gains{1e-4, 5e-5, 2e-6, 0.0};
  const double noise = 5.011872336272715e-15;
  const double target = 1.2e5;
  const auto wf = min_power_waterfill(gains, noise, 12.5e3, target, 0.6);
  CHECK_FALSE(wf.budget_limited);
  double rate = 0.0;
  for (double g : gains)
    if (g > 0.0) rate += 12.5e3 * std::log2(1.0 + g * std::max(0.0, wf.level - noise / g) / noise);
  CHECK(rate == doctest::Approx(target).epsilon(1e-9));

  const auto capped = min_power_waterfill(gains, 1e-3, 12.5e3, target, 0.6);
  CHECK(capped.budget_limited);
  double power = 0.0;
  for (double g : gains)
    if (g > 0.0) power += std::max(0.0, capped.level - 1e-3 / g);
  CHECK(power == doctest::Approx(0.6).epsilon(1e-12));

  CHECK(min_power_waterfill(std::vector<double>{0.0}, noise, 12.5e3, target, 0.6).level == 0.0);
}

TEST_CASE("impossible deadline is rejected before iterating") {
  auto s = flat_scenario(1, 1, 4);
  s.users[0].task.deadline_s = 0.5e-3;
  CHECK_THROWS_AS(solve_lower(one_to_one(1), s), DeadlineImpossible);
  CHECK_THROWS_AS(solve_lower(Assignment{{Target::server(0), Target::server(0)}},
                              flat_scenario(2, 1, 4)),
                  std::invalid_argument);
}

TEST_CASE("solution at the reference scale") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = generate_scenario(seed, 3, 3, 64);
    const auto b = one_to_one(3);
    const auto r = solve_lower(b, s);
    CHECK(r.converged);
    CHECK(r.iterations_used <= 600);
    CHECK(r.all_feasible(b));
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(r.allocation.total_power(i) <= 0.6 + 1e-9);
      CHECK(r.c10_gap[i] >= -1e-6);
      CHECK(r.energy[i].total_j == r.energy[i].compute_j + r.energy[i].transmit_j);
    }
    for (double p : r.allocation.power_w) CHECK(p >= 0.0);
    for (double a : r.duals.alpha) CHECK(a >= 0.0);
    for (double bb : r.duals.beta) CHECK(bb >= 0.0);
    // One owner per subcarrier, power only on owned subcarriers.
    for (std::size_t n = 0; n < 64; ++n) {
      REQUIRE(r.allocation.subcarrier_owner[n].has_value());
      const auto owner = r.allocation.subcarrier_owner[n]->user;
      CHECK(b.targets[owner] == Target::server(r.allocation.subcarrier_owner[n]->server));
      for (std::size_t i = 0; i < 3; ++i)
        if (i != owner) CHECK(r.allocation.power(i, n) == 0.0);
    }
  }
}

TEST_CASE("solve is deterministic") {
  const auto s = generate_scenario(77, 3, 4, 64);
  const Assignment b{{Target::server(3), Target::server(0), Target::server(2)}};
  const auto a = solve_lower(b, s);
  const auto c = solve_lower(b, s);
  CHECK(a.allocation.power_w == c.allocation.power_w);
  CHECK(a.duals.alpha == c.duals.alpha);
  CHECK(a.iterations_used == c.iterations_used);
  CHECK(a.objective_zeta_j == c.objective_zeta_j);
}

TEST_CASE("local and unplaced users get nothing") {
  const auto s = generate_scenario(5, 3, 3, 16);
  const Assignment b{{Target::local(), Target::server(1), Target::unplaced()}};
  const auto r = solve_lower(b, s);
  CHECK(r.allocation.total_power(0) == 0.0);
  CHECK(r.allocation.total_power(2) == 0.0);
  CHECK_FALSE(r.feasible[0]);
  CHECK_FALSE(r.feasible[2]);
  CHECK(r.feasible[1]);
  for (const auto& w : r.allocation.subcarrier_owner) CHECK(w->user == 1);
  const auto empty = solve_lower(Assignment{{Target::local(), Target::local(), Target::local()}}, s);
  CHECK(empty.converged);
  CHECK(empty.objective_zeta_j == 0.0);
}

TEST_CASE("literal fixed steps keep the multipliers feasible") {
  const auto s = generate_scenario(3, 2, 2, 16);
  LowerHyper hyper;
  hyper.step_rule = StepRule::fixed;
  hyper.max_iterations = 50;
  const auto r = solve_lower(one_to_one(2), s, hyper);
  CHECK(r.iterations_used <= 50);
  for (double a : r.duals.alpha) CHECK(a >= 0.0);
  for (double bb : r.duals.beta) CHECK(bb >= 0.0);
}

TEST_CASE("grid oracle reproduces its frozen table") {
  const auto rows = frozen_table();
  REQUIRE(rows.size() == oracle::kTinyCount);
  for (const auto& row : rows) {
    const auto t = oracle::tiny_instance(row.index);
    CHECK(t.seed == row.seed);
    const auto r = oracle::grid_optimum(oracle::to_grid(t));
    CHECK(r.feasible == row.feasible);
    CHECK(r.zeta == row.zeta);
  }
}

TEST_CASE("grid oracle on a hand-checked instance") {
  // One subcarrier: the least grid level reaching the rate.
  oracle::GridInstance inst;
  inst.bandwidth_hz = 1.0;
  inst.noise_w = 1.0;
  inst.users.push_back({2.0, 3.0, 7.0, {1.0}});  // needs p >= 7
  auto r = oracle::grid_optimum(inst, 8);        // levels 0..7
  CHECK(r.feasible);
  CHECK(r.zeta == doctest::Approx(14.0));
  inst.users[0].required_rate_bps = 3.1;
  CHECK_FALSE(oracle::grid_optimum(inst, 8).feasible);
  // Two subcarriers of which only the second is any good.
  inst.users[0] = {1.0, 2.0, 7.0, {1e-3, 1.0}};
  r = oracle::grid_optimum(inst, 8);
  CHECK(r.feasible);
  CHECK(r.zeta == doctest::Approx(3.0));
  CHECK(r.owner[1] == 0);
}

TEST_CASE("single user on four subcarriers matches the grid oracle") {
  std::size_t checked = 0;
  for (std::size_t j = 0; j < oracle::kTinyCount; ++j) {
    const auto t = oracle::tiny_instance(j);
    if (t.scenario.num_users() != 1 || t.scenario.num_subcarriers() != 4) continue;
    const auto o = oracle::grid_optimum(oracle::to_grid(t));
    if (!o.feasible) continue;
    const auto r = solve_lower(t.assignment, t.scenario);
    CHECK(r.all_feasible(t.assignment));
    CHECK(r.objective_zeta_j <= 1.03 * o.zeta);
    ++checked;
  }
  CHECK(checked >= 10);
}
