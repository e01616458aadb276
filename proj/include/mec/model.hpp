#pragma once

// Time and energy accounting for local and offloaded task execution.
//
// All quantities are SI: bits, seconds, hertz, watts, joules. Conversions from
// dBm happen once, when a scenario is built (see scenario.hpp).

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace mec {

struct Point {
  double x_m = 0.0;
  double y_m = 0.0;
};

double distance(Point a, Point b);

/// Task descriptor: input size, completion deadline and computation intensity.
struct TaskSpec {
  std::uint64_t data_size_bits = 1;
  double deadline_s = 1.0;
  double intensity_cycles_per_bit = 1.0;

  double cycles() const {
    return static_cast<double>(data_size_bits) * intensity_cycles_per_bit;
  }
};

struct UserDevice {
  std::size_t id = 0;
  Point position;
  double cpu_freq_hz = 1.0;
  double max_tx_power_w = 1.0;
  TaskSpec task;
};

struct EdgeServer {
  std::size_t id = 0;
  Point position;
  double cpu_freq_hz = 1.0;
};

struct SystemParams {
  double subcarrier_bandwidth_hz = 12.5e3;
  double noise_power_w = 5.011872336272715e-15;  // -113 dBm
  double k_user = 1e-24;
  double k_server = 1e-26;
  double local_energy_threshold_j = 0.1;
  std::size_t num_subcarriers = 64;
};

struct EnergyBreakdown {
  double compute_j = 0.0;
  double transmit_j = 0.0;
  double total_j = 0.0;

  static EnergyBreakdown of(double compute_j, double transmit_j) {
    return {compute_j, transmit_j, compute_j + transmit_j};
  }
};

/// One (subcarrier, power) entry of a user's uplink allocation.
struct SubcarrierPower {
  std::size_t subcarrier = 0;
  double power_w = 0.0;
};

/// Raised when an operation needs a positive uplink rate and gets zero.
class UnreachableServer : public std::domain_error {
 public:
  UnreachableServer() : std::domain_error("unreachable server: uplink rate is zero") {}
};

double dbm_to_watts(double dbm);

/// Throws std::invalid_argument naming the violated field.
void validate(const TaskSpec& task);
void validate(const UserDevice& user);
void validate(const EdgeServer& server);
void validate(const SystemParams& params);

double local_time(const TaskSpec& task, const UserDevice& user);
double local_energy(const TaskSpec& task, const UserDevice& user, const SystemParams& params);

/// True when the task should run on the device: strictly below both the
/// local energy threshold and its deadline.
bool local_gate(const TaskSpec& task, const UserDevice& user, const SystemParams& params);

/// Shannon rate summed over subcarriers. `gain_of(n)` is the linear power gain
/// of subcarrier n on the user-server link.
template <typename GainFn>
double aggregate_rate(std::span<const SubcarrierPower> subcarriers, GainFn&& gain_of,
                      const SystemParams& params);

double transmit_time(const TaskSpec& task, double rate_bps);
double server_compute_time(const TaskSpec& task, const EdgeServer& server);
double remote_time(const TaskSpec& task, double rate_bps, const EdgeServer& server);

double server_compute_energy(const TaskSpec& task, const EdgeServer& server,
                             const SystemParams& params);
EnergyBreakdown remote_energy(const TaskSpec& task, std::span<const SubcarrierPower> powers,
                              double rate_bps, const EdgeServer& server,
                              const SystemParams& params);

double subcarrier_rate(double gain, double power_w, const SystemParams& params);

template <typename GainFn>
double aggregate_rate(std::span<const SubcarrierPower> subcarriers, GainFn&& gain_of,
                      const SystemParams& params) {
  double rate = 0.0;
  for (const auto& sp : subcarriers) {
    if (sp.power_w < 0.0) throw std::invalid_argument("aggregate_rate: negative power");
    rate += subcarrier_rate(gain_of(sp.subcarrier), sp.power_w, params);
  }
  return rate;
}

}  // namespace mec
