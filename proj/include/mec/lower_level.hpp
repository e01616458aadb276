#pragma once

// Power and subcarrier allocation for a fixed offloading assignment.
//
// The transmit-energy problem is replaced by its convex surrogate
//   min  sum_i chi_i * sum_n p_{i,n}
//   s.t. R_i >= D_i / chi_i,  sum_n p_{i,n} <= P^m,  one owner per subcarrier
// and solved through its Lagrangian: water-filling power for the current
// multipliers, subcarrier ownership by the smallest partial derivative phi,
// then a projected subgradient step on the multipliers.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mec/model.hpp"
#include "mec/scenario.hpp"

namespace mec {

/// Where a user's task runs.
class Target {
 public:
  static Target local() { return Target(Kind::local, 0); }
  static Target unplaced() { return Target(Kind::unplaced, 0); }
  static Target server(std::size_t k) { return Target(Kind::server, k); }

  bool is_local() const { return kind_ == Kind::local; }
  bool is_unplaced() const { return kind_ == Kind::unplaced; }
  bool is_server() const { return kind_ == Kind::server; }
  std::size_t server_index() const;

  bool operator==(const Target&) const = default;

 private:
  enum class Kind : unsigned char { local, unplaced, server };
  Target(Kind kind, std::size_t k) : kind_(kind), server_(k) {}

  Kind kind_;
  std::size_t server_;
};

/// Per-user placement. Unplaced users wanted to offload but got no server.
struct Assignment {
  std::vector<Target> targets;

  std::size_t size() const { return targets.size(); }
  bool operator==(const Assignment&) const = default;
};

/// Throws std::invalid_argument if a server index is out of range or a server
/// hosts more than one task.
void validate(const Assignment& b, std::size_t n_servers);

struct OffloadPair {
  std::size_t user = 0;
  std::size_t server = 0;
};

/// Offloading (user, server) pairs of an assignment, ordered by user index.
std::vector<OffloadPair> offload_pairs(const Assignment& b);

struct Allocation {
  /// Owner of each subcarrier; nullopt when unassigned.
  std::vector<std::optional<OffloadPair>> subcarrier_owner;
  /// Row-major (user, subcarrier) transmit power in watts.
  std::vector<double> power_w;
  std::size_t num_subcarriers = 0;

  Allocation() = default;
  Allocation(std::size_t users, std::size_t subcarriers)
      : subcarrier_owner(subcarriers), power_w(users * subcarriers, 0.0),
        num_subcarriers(subcarriers) {}

  double power(std::size_t i, std::size_t n) const { return power_w[i * num_subcarriers + n]; }
  double& power(std::size_t i, std::size_t n) { return power_w[i * num_subcarriers + n]; }
  double total_power(std::size_t i) const;
  std::vector<SubcarrierPower> subcarriers_of(std::size_t i) const;
};

struct DualState {
  /// Row-major (user, server) rate multipliers.
  std::vector<double> alpha;
  /// Per-user power-budget multipliers.
  std::vector<double> beta;
  std::size_t iteration = 0;
  std::size_t num_servers = 0;

  DualState() = default;
  DualState(std::size_t users, std::size_t servers)
      : alpha(users * servers, 0.0), beta(users, 0.0), num_servers(servers) {}

  double a(std::size_t i, std::size_t k) const { return alpha[i * num_servers + k]; }
  double& a(std::size_t i, std::size_t k) { return alpha[i * num_servers + k]; }
};

enum class StepRule {
  /// Constant step sizes exactly as configured.
  fixed,
  /// Per-user steps scaled to the problem's units: the rate multiplier moves by
  /// an exponentiated subgradient step (Newton-exact for a fixed high-SNR
  /// subcarrier set), the power multiplier by chi_i / P^m per watt of excess.
  normalized,
};

enum class AlphaInit {
  /// Water level puts P^m / N on a subcarrier with the median gain of the row.
  median_gain,
  zero,
};

struct LowerHyper {
  double step_alpha = 2e-18;
  double step_beta = 1e-5;
  double epsilon = 1e-5;
  std::size_t max_iterations = 600;
  StepRule step_rule = StepRule::normalized;
  AlphaInit alpha_init = AlphaInit::median_gain;
  /// Re-solve each user's water level exactly on the final subcarrier set.
  bool recover_primal = true;
};

/// Per-user dual step sizes.
struct DualSteps {
  std::vector<double> alpha;  // indexed by user
  std::vector<double> beta;   // indexed by user
};

struct LowerSolveResult {
  Allocation allocation;
  DualState duals;
  bool converged = false;
  std::size_t iterations_used = 0;
  double objective_zeta_j = 0.0;
  double true_transmit_energy_j = 0.0;
  std::vector<double> rate_bps;
  std::vector<double> slack_s;
  /// Meaningful for offloading users only; false elsewhere.
  std::vector<bool> feasible;
  std::vector<EnergyBreakdown> energy;
  /// Relative deadline slack left after transmission: (chi - D/R) / chi.
  std::vector<double> c10_gap;
  /// Last iteration's largest power change, relative to the largest power.
  double last_power_change = 0.0;

  std::size_t feasible_count() const;
  bool all_feasible(const Assignment& b) const;
  double total_energy_j() const;
  double compute_energy_j() const;
  double transmit_energy_j() const;
};

class DeadlineImpossible : public std::domain_error {
 public:
  explicit DeadlineImpossible(std::size_t user)
      : std::domain_error("deadline impossible: server compute time alone exceeds deadline of user " +
                          std::to_string(user)),
        user_(user) {}
  std::size_t user() const { return user_; }

 private:
  std::size_t user_;
};

/// tau_i minus the remote compute time; throws DeadlineImpossible if <= 0.
double slack_time(std::size_t user, const Assignment& b, const Scenario& s);
double slack_time(const TaskSpec& task, const EdgeServer& server);

double water_level(double alpha, double bandwidth_hz, double chi, double beta);

double waterfill_power(std::size_t i, std::size_t n, std::size_t k, const DualState& duals,
                       double chi, const Scenario& s);

double phi(std::size_t i, std::size_t n, std::size_t k, double p_star, const DualState& duals,
           double chi, const Scenario& s);

/// `phi_values` is row-major (pair, subcarrier). For each subcarrier returns the
/// index of the pair with the smallest phi; ties go to the lower user index,
/// then the lower server index.
std::vector<std::size_t> assign_subcarriers(std::span<const OffloadPair> pairs,
                                            std::span<const double> phi_values,
                                            std::size_t n_subcarriers);

/// Projected subgradient step on both multiplier sets.
DualState update_duals(const DualState& duals, const Allocation& allocation,
                       std::span<const double> rates, const Assignment& b, const Scenario& s,
                       const DualSteps& steps);
DualState update_duals(const DualState& duals, const Allocation& allocation,
                       std::span<const double> rates, const Assignment& b, const Scenario& s,
                       double step_alpha, double step_beta);

/// Initial multipliers for the configured policy.
DualState initial_duals(const Assignment& b, const Scenario& s, const LowerHyper& hyper);

/// Minimum-power allocation over a fixed subcarrier set meeting `target_rate`.
/// Returns the water level; powers are max(0, level - noise/gain). Falls back
/// to the budget-limited level when the target needs more than `max_power`.
struct WaterFill {
  double level = 0.0;
  bool budget_limited = false;
};
WaterFill min_power_waterfill(std::span<const double> gains, double noise_w, double bandwidth_hz,
                              double target_rate_bps, double max_power_w);

/// Throws DeadlineImpossible if any offloading user has non-positive slack,
/// std::invalid_argument if the assignment is invalid.
LowerSolveResult solve_lower(const Assignment& b, const Scenario& s, const LowerHyper& hyper = {});

/// Marks feasibility and fills energies/rates for an allocation. Used by the
/// solver and by fixed-allocation strategies.
void evaluate_allocation(LowerSolveResult& result, const Assignment& b, const Scenario& s);

}  // namespace mec
