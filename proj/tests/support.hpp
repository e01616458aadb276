#pragma once

// Hand-built scenarios for unit tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mec/scenario.hpp"

namespace testing {

/// Users with D = 1000, X = 1000, tau = 9 ms, f_loc = 0.6 GHz, P^m = 0.6 W;
/// servers at 1.15 GHz; every gain equal to `gain`.
inline mec::Scenario flat_scenario(std::size_t users, std::size_t servers, std::size_t subcarriers,
                                   double gain = 1e-4) {
  mec::Scenario s;
  s.params.num_subcarriers = subcarriers;
  for (std::size_t i = 0; i < users; ++i) {
    mec::UserDevice u;
    u.id = i;
    u.cpu_freq_hz = 0.6e9;
    u.max_tx_power_w = 0.6;
    u.task = {1000, 9e-3, 1000.0};
    s.users.push_back(u);
  }
  for (std::size_t k = 0; k < servers; ++k) {
    mec::EdgeServer e;
    e.id = k;
    e.position = {10.0 * static_cast<double>(k + 1), 0.0};
    e.cpu_freq_hz = 1.15e9;
    s.servers.push_back(e);
  }
  s.gains = mec::ChannelGains(users, subcarriers, servers,
                              std::vector<double>(users * subcarriers * servers, gain));
  return s;
}

inline bool close_rel(double a, double b, double rel) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= rel * scale;
}

}  // namespace testing
