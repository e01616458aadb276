#include "tiny_instances.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace oracle {

TinyInstance tiny_instance(std::size_t index) {
  TinyInstance t;
  t.seed = 5000 + index;
  const std::size_t users = 1 + index % 2;
  const std::size_t subcarriers = 2 + (index / 2) % 3;
  const std::size_t servers = std::max<std::size_t>(users, 1 + (index / 6) % 2);
  t.scenario = mec::generate_scenario(t.seed, users, servers, subcarriers);

  std::mt19937_64 rng(t.seed);
  std::vector<double> all(t.scenario.gains.values());
  std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
  const double g_med = all[all.size() / 2];
  // Noise such that P^m on a median subcarrier gives an SNR between 60 and 6000.
  const double snr = std::exp(std::uniform_real_distribution<double>(std::log(60.0), std::log(6000.0))(rng));
  t.scenario.params.noise_power_w = g_med * t.scenario.users[0].max_tx_power_w / snr;

  t.assignment.targets.assign(users, mec::Target::local());
  const bool swap = users == 2 && (rng() & 1u);
  for (std::size_t i = 0; i < users; ++i) {
    const std::size_t k = swap ? users - 1 - i : i;
    t.assignment.targets[i] = mec::Target::server(users == 1 ? rng() % servers : k);
  }
  return t;
}

GridInstance to_grid(const TinyInstance& t) {
  const auto& s = t.scenario;
  GridInstance g;
  g.bandwidth_hz = s.params.subcarrier_bandwidth_hz;
  g.noise_w = s.params.noise_power_w;
  for (std::size_t i = 0; i < s.users.size(); ++i) {
    const auto& target = t.assignment.targets[i];
    if (!target.is_server()) continue;
    const std::size_t k = target.server_index();
    const auto& task = s.users[i].task;
    const double cycles = static_cast<double>(task.data_size_bits) * task.intensity_cycles_per_bit;
    GridUser u;
    u.chi_s = task.deadline_s - cycles / s.servers[k].cpu_freq_hz;
    u.required_rate_bps = static_cast<double>(task.data_size_bits) / u.chi_s;
    u.max_power_w = s.users[i].max_tx_power_w;
    for (std::size_t n = 0; n < s.num_subcarriers(); ++n)
      u.gains.push_back(s.gains.values()[(i * s.num_subcarriers() + n) * s.num_servers() + k]);
    g.users.push_back(std::move(u));
  }
  return g;
}

}  // namespace oracle
