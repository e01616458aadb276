#include "mec/model.hpp"

#include <cmath>
#include <string>

namespace mec {

namespace {

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(field) + " must be positive and finite");
  }
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m); }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void validate(const TaskSpec& task) {
  if (task.data_size_bits < 1) throw std::invalid_argument("data_size_bits must be >= 1");
  require_positive(task.deadline_s, "deadline_s");
  require_positive(task.intensity_cycles_per_bit, "intensity_cycles_per_bit");
}

void validate(const UserDevice& user) {
  require_positive(user.cpu_freq_hz, "cpu_freq_hz");
  require_positive(user.max_tx_power_w, "max_tx_power_w");
  validate(user.task);
}

void validate(const EdgeServer& server) { require_positive(server.cpu_freq_hz, "cpu_freq_hz"); }

void validate(const SystemParams& params) {
  require_positive(params.subcarrier_bandwidth_hz, "subcarrier_bandwidth_hz");
  require_positive(params.noise_power_w, "noise_power_w");
  require_positive(params.k_user, "k_user");
  require_positive(params.k_server, "k_server");
  require_positive(params.local_energy_threshold_j, "local_energy_threshold_j");
  if (params.num_subcarriers < 1) throw std::invalid_argument("num_subcarriers must be >= 1");
}

double local_time(const TaskSpec& task, const UserDevice& user) {
  validate(task);
  return task.cycles() / user.cpu_freq_hz;
}

double local_energy(const TaskSpec& task, const UserDevice& user, const SystemParams& params) {
  validate(task);
  return params.k_user * user.cpu_freq_hz * user.cpu_freq_hz * task.cycles();
}

bool local_gate(const TaskSpec& task, const UserDevice& user, const SystemParams& params) {
  return local_energy(task, user, params) < params.local_energy_threshold_j &&
         local_time(task, user) < task.deadline_s;
}

double subcarrier_rate(double gain, double power_w, const SystemParams& params) {
  return params.subcarrier_bandwidth_hz * std::log2(1.0 + gain * power_w / params.noise_power_w);
}

double transmit_time(const TaskSpec& task, double rate_bps) {
  if (!(rate_bps > 0.0)) throw UnreachableServer{};
  return static_cast<double>(task.data_size_bits) / rate_bps;
}

double server_compute_time(const TaskSpec& task, const EdgeServer& server) {
  return task.cycles() / server.cpu_freq_hz;
}

double remote_time(const TaskSpec& task, double rate_bps, const EdgeServer& server) {
  return transmit_time(task, rate_bps) + server_compute_time(task, server);
}

double server_compute_energy(const TaskSpec& task, const EdgeServer& server,
                             const SystemParams& params) {
  return params.k_server * server.cpu_freq_hz * server.cpu_freq_hz * task.cycles();
}

EnergyBreakdown remote_energy(const TaskSpec& task, std::span<const SubcarrierPower> powers,
                              double rate_bps, const EdgeServer& server,
                              const SystemParams& params) {
  double total_power = 0.0;
  for (const auto& sp : powers) total_power += sp.power_w;
  const double transmit = total_power * transmit_time(task, rate_bps);
  return EnergyBreakdown::of(server_compute_energy(task, server, params), transmit);
}

}  // namespace mec
