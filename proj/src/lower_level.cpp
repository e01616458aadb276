#include "mec/lower_level.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mec {

std::size_t Target::server_index() const {
  if (kind_ != Kind::server) throw std::logic_error("Target::server_index on a non-server target");
  return server_;
}

void validate(const Assignment& b, std::size_t n_servers) {
  std::vector<bool> taken(n_servers, false);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!b.targets[i].is_server()) continue;
    const std::size_t k = b.targets[i].server_index();
    if (k >= n_servers)
      throw std::invalid_argument("assignment: user " + std::to_string(i) +
                                  " targets unknown server " + std::to_string(k));
    if (taken[k])
      throw std::invalid_argument("assignment: server " + std::to_string(k) +
                                  " hosts more than one task");
    taken[k] = true;
  }
}

std::vector<OffloadPair> offload_pairs(const Assignment& b) {
  std::vector<OffloadPair> pairs;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.targets[i].is_server()) pairs.push_back({i, b.targets[i].server_index()});
  return pairs;
}

double Allocation::total_power(std::size_t i) const {
  double sum = 0.0;
  for (std::size_t n = 0; n < num_subcarriers; ++n) sum += power(i, n);
  return sum;
}

std::vector<SubcarrierPower> Allocation::subcarriers_of(std::size_t i) const {
  std::vector<SubcarrierPower> out;
  for (std::size_t n = 0; n < num_subcarriers; ++n)
    if (subcarrier_owner[n] && subcarrier_owner[n]->user == i) out.push_back({n, power(i, n)});
  return out;
}

std::size_t LowerSolveResult::feasible_count() const {
  return static_cast<std::size_t>(std::count(feasible.begin(), feasible.end(), true));
}

bool LowerSolveResult::all_feasible(const Assignment& b) const {
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!b.targets[i].is_local() && !feasible[i]) return false;
  return true;
}

double LowerSolveResult::total_energy_j() const {
  double sum = 0.0;
  for (const auto& e : energy) sum += e.total_j;
  return sum;
}

double LowerSolveResult::compute_energy_j() const {
  double sum = 0.0;
  for (const auto& e : energy) sum += e.compute_j;
  return sum;
}

double LowerSolveResult::transmit_energy_j() const {
  double sum = 0.0;
  for (const auto& e : energy) sum += e.transmit_j;
  return sum;
}

double slack_time(const TaskSpec& task, const EdgeServer& server) {
  return task.deadline_s - server_compute_time(task, server);
}

double slack_time(std::size_t user, const Assignment& b, const Scenario& s) {
  if (user >= b.size() || !b.targets[user].is_server())
    throw std::invalid_argument("slack_time: user " + std::to_string(user) + " does not offload");
  const double chi = slack_time(s.users[user].task, s.servers[b.targets[user].server_index()]);
  if (!(chi > 0.0)) throw DeadlineImpossible(user);
  return chi;
}

double water_level(double alpha, double bandwidth_hz, double chi, double beta) {
  return alpha * bandwidth_hz / (std::numbers::ln2 * (chi + beta));
}

namespace {

double waterfill_at(double level, double gain, double noise) {
  if (!(gain > 0.0)) return 0.0;
  return std::max(0.0, level - noise / gain);
}

double phi_at(double p_star, double gain, double alpha, double chi, double beta,
              const SystemParams& params) {
  if (p_star == 0.0) return 0.0;
  return (chi + beta) * p_star -
         alpha * params.subcarrier_bandwidth_hz *
             std::log2(1.0 + gain * p_star / params.noise_power_w);
}

}  // namespace

double waterfill_power(std::size_t i, std::size_t n, std::size_t k, const DualState& duals,
                       double chi, const Scenario& s) {
  const double level =
      water_level(duals.a(i, k), s.params.subcarrier_bandwidth_hz, chi, duals.beta[i]);
  return waterfill_at(level, s.gains(i, n, k), s.params.noise_power_w);
}

double phi(std::size_t i, std::size_t n, std::size_t k, double p_star, const DualState& duals,
           double chi, const Scenario& s) {
  return phi_at(p_star, s.gains(i, n, k), duals.a(i, k), chi, duals.beta[i], s.params);
}

std::vector<std::size_t> assign_subcarriers(std::span<const OffloadPair> pairs,
                                            std::span<const double> phi_values,
                                            std::size_t n_subcarriers) {
  if (pairs.empty()) throw std::invalid_argument("assign_subcarriers: no offloading pairs");
  if (phi_values.size() != pairs.size() * n_subcarriers)
    throw std::invalid_argument("assign_subcarriers: phi matrix has wrong size");
  auto before = [&](std::size_t a, std::size_t b, std::size_t n) {
    const double fa = phi_values[a * n_subcarriers + n];
    const double fb = phi_values[b * n_subcarriers + n];
    if (fa != fb) return fa < fb;
    if (pairs[a].user != pairs[b].user) return pairs[a].user < pairs[b].user;
    return pairs[a].server < pairs[b].server;
  };
  std::vector<std::size_t> owner(n_subcarriers, 0);
  for (std::size_t n = 0; n < n_subcarriers; ++n) {
    std::size_t best = 0;
    for (std::size_t q = 1; q < pairs.size(); ++q)
      if (before(q, best, n)) best = q;
    owner[n] = best;
  }
  return owner;
}

DualState update_duals(const DualState& duals, const Allocation& allocation,
                       std::span<const double> rates, const Assignment& b, const Scenario& s,
                       const DualSteps& steps) {
  DualState next = duals;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!b.targets[i].is_server()) continue;
    const std::size_t k = b.targets[i].server_index();
    const double chi = slack_time(i, b, s);
    const double required = static_cast<double>(s.users[i].task.data_size_bits) / chi;
    next.a(i, k) = std::max(0.0, duals.a(i, k) + steps.alpha[i] * (required - rates[i]));
    const double excess = allocation.total_power(i) - s.users[i].max_tx_power_w;
    next.beta[i] = std::max(0.0, duals.beta[i] + steps.beta[i] * excess);
  }
  ++next.iteration;
  return next;
}

DualState update_duals(const DualState& duals, const Allocation& allocation,
                       std::span<const double> rates, const Assignment& b, const Scenario& s,
                       double step_alpha, double step_beta) {
  DualSteps steps{std::vector<double>(b.size(), step_alpha),
                  std::vector<double>(b.size(), step_beta)};
  return update_duals(duals, allocation, rates, b, s, steps);
}

namespace {

double median_gain_alpha(std::size_t i, std::size_t k, double chi, const Scenario& s) {
  std::vector<double> row;
  row.reserve(s.num_subcarriers());
  for (std::size_t n = 0; n < s.num_subcarriers(); ++n)
    if (s.gains(i, n, k) > 0.0) row.push_back(s.gains(i, n, k));
  if (row.empty()) return 0.0;
  auto mid = row.begin() + static_cast<std::ptrdiff_t>(row.size() / 2);
  std::nth_element(row.begin(), mid, row.end());
  const double share = s.users[i].max_tx_power_w / static_cast<double>(s.num_subcarriers());
  return std::numbers::ln2 * chi * (s.params.noise_power_w / *mid + share) /
         s.params.subcarrier_bandwidth_hz;
}

}  // namespace

DualState initial_duals(const Assignment& b, const Scenario& s, const LowerHyper& hyper) {
  DualState d(s.num_users(), s.num_servers());
  if (hyper.alpha_init == AlphaInit::zero) return d;
  for (const auto& [i, k] : offload_pairs(b)) d.a(i, k) = median_gain_alpha(i, k, slack_time(i, b, s), s);
  return d;
}

WaterFill min_power_waterfill(std::span<const double> gains, double noise_w, double bandwidth_hz,
                              double target_rate_bps, double max_power_w) {
  std::vector<double> floor;  // noise-to-gain ratios of usable subcarriers
  floor.reserve(gains.size());
  for (double g : gains)
    if (g > 0.0) floor.push_back(noise_w / g);
  if (floor.empty() || !(target_rate_bps > 0.0)) return {};
  std::sort(floor.begin(), floor.end());
  const std::size_t m = floor.size();

  // Rate with the best j subcarriers active is B * (j*log2 L - sum log2 floor).
  const double bits = target_rate_bps / bandwidth_hz;
  double level = 0.0;
  double log_sum = 0.0;
  for (std::size_t j = 1; j <= m; ++j) {
    log_sum += std::log2(floor[j - 1]);
    const double candidate = std::exp2((bits + log_sum) / static_cast<double>(j));
    if (j == m || candidate <= floor[j]) {
      level = candidate;
      break;
    }
  }
  double power = 0.0;
  for (double f : floor) power += std::max(0.0, level - f);
  if (power <= max_power_w) return {level, false};

  // Budget binds: spend exactly max_power_w.
  double sum = 0.0;
  for (std::size_t j = 1; j <= m; ++j) {
    sum += floor[j - 1];
    const double candidate = (max_power_w + sum) / static_cast<double>(j);
    if (j == m || candidate <= floor[j]) return {candidate, true};
  }
  return {level, true};
}

void evaluate_allocation(LowerSolveResult& r, const Assignment& b, const Scenario& s) {
  const std::size_t users = s.num_users();
  r.rate_bps.assign(users, 0.0);
  r.slack_s.assign(users, 0.0);
  r.feasible.assign(users, false);
  r.energy.assign(users, EnergyBreakdown{});
  r.c10_gap.assign(users, 0.0);
  r.objective_zeta_j = 0.0;
  r.true_transmit_energy_j = 0.0;

  for (std::size_t i = 0; i < users; ++i) {
    if (!b.targets[i].is_server()) continue;
    const std::size_t k = b.targets[i].server_index();
    const auto& task = s.users[i].task;
    const double chi = slack_time(task, s.servers[k]);
    r.slack_s[i] = chi;
    const auto owned = r.allocation.subcarriers_of(i);
    const double rate =
        aggregate_rate(std::span<const SubcarrierPower>(owned),
                       [&](std::size_t n) { return s.gains(i, n, k); }, s.params);
    r.rate_bps[i] = rate;
    const double total_power = r.allocation.total_power(i);
    r.objective_zeta_j += chi * total_power;
    if (!(rate > 0.0) || !(chi > 0.0)) {
      r.c10_gap[i] = -1.0;
      continue;
    }
    r.energy[i] = remote_energy(task, owned, rate, s.servers[k], s.params);
    r.true_transmit_energy_j += r.energy[i].transmit_j;
    const double tx_time = transmit_time(task, rate);
    r.c10_gap[i] = (chi - tx_time) / chi;
    const bool power_ok = total_power <= s.users[i].max_tx_power_w + 1e-9;
    const bool deadline_ok = tx_time <= chi * (1.0 + 1e-6);
    r.feasible[i] = power_ok && deadline_ok;
  }
}

namespace {

// Per-iteration state for the offloading pairs of one assignment.
struct PairState {
  OffloadPair pair;
  double chi = 0.0;
  double required_rate = 0.0;
  double max_power = 0.0;
};

}  // namespace

LowerSolveResult solve_lower(const Assignment& b, const Scenario& s, const LowerHyper& hyper) {
  if (b.size() != s.num_users())
    throw std::invalid_argument("solve_lower: assignment size does not match user count");
  validate(b, s.num_servers());

  const auto pairs = offload_pairs(b);
  std::vector<PairState> state;
  state.reserve(pairs.size());
  for (const auto& pr : pairs) {
    const double chi = slack_time(pr.user, b, s);
    state.push_back({pr, chi, static_cast<double>(s.users[pr.user].task.data_size_bits) / chi,
                     s.users[pr.user].max_tx_power_w});
  }

  const std::size_t N = s.num_subcarriers();
  const std::size_t users = s.num_users();
  const double bandwidth = s.params.subcarrier_bandwidth_hz;
  const double noise = s.params.noise_power_w;

  LowerSolveResult result;
  result.allocation = Allocation(users, N);
  result.duals = initial_duals(b, s, hyper);
  if (pairs.empty()) {
    result.converged = true;
    evaluate_allocation(result, b, s);
    return result;
  }

  const DualState reseed = initial_duals(b, s, LowerHyper{});
  std::vector<double> p_star(pairs.size() * N, 0.0);
  std::vector<double> phi_values(pairs.size() * N, 0.0);
  std::vector<double> previous(pairs.size() * N, 0.0);
  std::vector<double> rates(users, 0.0);
  // Per-user damping of the normalized step, halved whenever the rate
  // residual changes sign.
  std::vector<double> damping(users, 1.0);
  std::vector<int> last_sign(users, 0);
  std::vector<double> beta_damping(users, 1.0);
  std::vector<int> last_beta_sign(users, 0);
  DualSteps steps{std::vector<double>(users, 0.0), std::vector<double>(users, 0.0)};

  for (std::size_t m = 0; m < hyper.max_iterations; ++m) {
    auto& duals = result.duals;
    for (std::size_t q = 0; q < state.size(); ++q) {
      const auto [i, k] = state[q].pair;
      const double alpha = duals.a(i, k);
      const double level = water_level(alpha, bandwidth, state[q].chi, duals.beta[i]);
      for (std::size_t n = 0; n < N; ++n) {
        const double g = s.gains(i, n, k);
        const double p = waterfill_at(level, g, noise);
        p_star[q * N + n] = p;
        phi_values[q * N + n] = phi_at(p, g, alpha, state[q].chi, duals.beta[i], s.params);
      }
    }
    const auto owner = assign_subcarriers(pairs, phi_values, N);

    auto& alloc = result.allocation;
    std::fill(alloc.power_w.begin(), alloc.power_w.end(), 0.0);
    std::vector<std::size_t> active(users, 0);
    std::fill(rates.begin(), rates.end(), 0.0);
    for (std::size_t n = 0; n < N; ++n) {
      const std::size_t q = owner[n];
      const auto [i, k] = pairs[q];
      alloc.subcarrier_owner[n] = pairs[q];
      const double p = p_star[q * N + n];
      alloc.power(i, n) = p;
      if (p > 0.0) {
        ++active[i];
        rates[i] += subcarrier_rate(s.gains(i, n, k), p, s.params);
      }
    }

    // Convergence is judged on the water-filling powers of every pair and
    // subcarrier, which move continuously with the multipliers even when
    // ownership of a marginal subcarrier flips.
    double change = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < p_star.size(); ++j) {
      change = std::max(change, std::abs(p_star[j] - previous[j]));
      scale = std::max({scale, p_star[j], previous[j]});
    }
    result.iterations_used = m + 1;
    result.last_power_change = scale > 0.0 ? change / scale : 0.0;
    if (m > 0 && change <= hyper.epsilon * scale) {
      result.converged = true;
      break;
    }
    previous = p_star;

    for (const auto& ps : state) {
      const auto [i, k] = ps.pair;
      if (hyper.step_rule == StepRule::fixed) {
        steps.alpha[i] = hyper.step_alpha;
        steps.beta[i] = hyper.step_beta;
        continue;
      }
      const double residual = ps.required_rate - rates[i];
      const int sign = (residual > 0.0) - (residual < 0.0);
      if (sign != 0 && last_sign[i] != 0 && sign != last_sign[i]) damping[i] *= 0.5;
      if (sign != 0) last_sign[i] = sign;
      double alpha = duals.a(i, k);
      if (alpha == 0.0) alpha = reseed.a(i, k);
      const double eta =
          std::numbers::ln2 / (bandwidth * static_cast<double>(std::max<std::size_t>(1, active[i])));
      // Rate is convex in the log of the water level, so a Newton step from
      // below overshoots; upward moves are capped at a factor of four.
      const double log_step =
          std::clamp(damping[i] * eta * residual, -50.0, std::log(4.0));
      const double target = alpha * std::exp(log_step);
      steps.alpha[i] = residual != 0.0 ? (target - duals.a(i, k)) / residual : 0.0;
      const double excess = alloc.total_power(i) - ps.max_power;
      const int beta_sign = (excess > 0.0) - (excess < 0.0);
      if (beta_sign != 0 && last_beta_sign[i] != 0 && beta_sign != last_beta_sign[i])
        beta_damping[i] *= 0.5;
      if (beta_sign != 0) last_beta_sign[i] = beta_sign;
      steps.beta[i] = beta_damping[i] * ps.chi / ps.max_power;
    }
    duals = update_duals(duals, alloc, rates, b, s, steps);
  }

  if (hyper.recover_primal) {
    auto& alloc = result.allocation;
    std::vector<double> gains;
    for (const auto& ps : state) {
      const auto [i, k] = ps.pair;
      gains.clear();
      std::vector<std::size_t> owned;
      for (std::size_t n = 0; n < N; ++n) {
        if (alloc.subcarrier_owner[n] && alloc.subcarrier_owner[n]->user == i) {
          owned.push_back(n);
          gains.push_back(s.gains(i, n, k));
        }
      }
      const auto wf = min_power_waterfill(gains, noise, bandwidth, ps.required_rate, ps.max_power);
      for (std::size_t j = 0; j < owned.size(); ++j)
        alloc.power(i, owned[j]) = waterfill_at(wf.level, gains[j], noise);
      if (wf.level > 0.0) {
        result.duals.a(i, k) =
            wf.level * std::numbers::ln2 * (ps.chi + result.duals.beta[i]) / bandwidth;
      }
    }
  }

  evaluate_allocation(result, b, s);
  return result;
}

}  // namespace mec
