#pragma once

// One network snapshot: users, servers, channel gains and system constants.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "mec/model.hpp"

namespace mec {

/// Linear power gains indexed (user, subcarrier, server), stored row-major.
class ChannelGains {
 public:
  ChannelGains() = default;
  ChannelGains(std::size_t users, std::size_t subcarriers, std::size_t servers);
  ChannelGains(std::size_t users, std::size_t subcarriers, std::size_t servers,
               std::vector<double> values);

  double operator()(std::size_t i, std::size_t n, std::size_t k) const {
    return values_[index(i, n, k)];
  }
  double& operator()(std::size_t i, std::size_t n, std::size_t k) {
    return values_[index(i, n, k)];
  }

  std::size_t users() const { return users_; }
  std::size_t subcarriers() const { return subcarriers_; }
  std::size_t servers() const { return servers_; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const ChannelGains&) const = default;

 private:
  std::size_t index(std::size_t i, std::size_t n, std::size_t k) const {
    return (i * subcarriers_ + n) * servers_ + k;
  }

  std::size_t users_ = 0;
  std::size_t subcarriers_ = 0;
  std::size_t servers_ = 0;
  std::vector<double> values_;
};

struct Scenario {
  std::vector<UserDevice> users;
  std::vector<EdgeServer> servers;
  SystemParams params;
  ChannelGains gains;
  std::uint64_t seed = 0;
  double pathloss_exponent = 2.0;
  double area_radius_m = 60.0;

  std::size_t num_users() const { return users.size(); }
  std::size_t num_servers() const { return servers.size(); }
  std::size_t num_subcarriers() const { return params.num_subcarriers; }
};

bool operator==(const Scenario& a, const Scenario& b);

/// Closed interval used for sampling.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sampling ranges and constants for scenario generation. Defaults follow the
/// reference simulation setup.
struct ScenarioConfig {
  double area_radius_m = 60.0;
  double pathloss_exponent = 2.0;
  double min_distance_m = 1.0;
  Range data_size_bits{1000.0, 1100.0};
  Range intensity_cycles_per_bit{1000.0, 1200.0};
  Range deadline_s{9e-3, 10e-3};
  Range user_cpu_hz{0.6e9, 0.7e9};
  Range server_cpu_hz{1.1e9, 1.2e9};
  double subcarrier_bandwidth_hz = 12.5e3;
  double noise_dbm = -113.0;
  double max_tx_power_w = 0.6;
  double k_user = 1e-24;
  double k_server = 1e-26;
  double local_energy_threshold_j = 0.1;
};

/// Distance-based path gain d^-theta with the separation floored at min_distance_m.
double path_gain(double distance_m, double exponent, double min_distance_m = 1.0);

/// Deterministic in all arguments. Streams are keyed per user, per server and
/// per (user, server) link, so a scenario with more servers or users contains
/// the smaller one with identical draws.
Scenario generate_scenario(std::uint64_t seed, std::size_t n_users, std::size_t n_servers,
                           std::size_t n_subcarriers, const ScenarioConfig& config = {});

/// Checks every invariant; throws ScenarioError naming the offending field.
void validate(const Scenario& s);

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_text(const Scenario& s);
Scenario from_text(const std::string& text);

void save_scenario(const Scenario& s, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

/// Exact-round-trip textual form of a double (C99 hex float).
std::string hex_double(double v);
double parse_hex_double(const std::string& text, const std::string& field);

}  // namespace mec
