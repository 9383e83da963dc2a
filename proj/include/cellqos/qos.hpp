#pragma once

// Per-cell processor-sharing metrics and the coupled cell-load equations.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cellqos/radio.hpp"

namespace cellqos {

struct TrafficModel {
  double arrival_rate = 0.0;        // users / s / km^2
  double mean_volume_bits = 1.0;    // 1/mu

  static TrafficModel from_density(double traffic_density_bps_per_km2, double mean_volume_bits);

  double traffic_density() const { return arrival_rate * mean_volume_bits; }  // bit/s/km^2
  void validate() const;
};

struct CellMetrics {
  std::vector<double> traffic_demand;    // rho(X), bit/s
  std::vector<double> critical_traffic;  // rho_c(X), bit/s
  std::vector<double> load;              // theta(X)
  std::vector<double> throughput;        // r(X), bit/s
  std::vector<double> mean_users;        // N(X), inf when unstable
  std::vector<double> busy_prob;         // p(X)
  std::vector<double> area;              // km^2

  std::size_t size() const { return load.size(); }
  bool stable(std::size_t i) const { return load[i] < 1.0; }
};

struct SolverOptions {
  double tol = 1e-4;
  int max_iter = 200;
  double sinr_cap_db = kDefaultSinrCapDb;

  void validate() const;

  friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

struct LoadSolution {
  std::vector<double> theta;  // = theta_upper
  std::vector<double> theta_lower;
  std::vector<double> theta_upper;
  int iterations_lower = 0;
  int iterations_upper = 0;
  int iterations = 0;  // max of the two branches
  double max_gap = 0.0;
  bool converged = false;
  bool unique_within_tol = false;
  InterferenceModel model = InterferenceModel::weighted;
  std::string diagnostics;  // set when not converged
};

// Per-cell integral of 1/R over the cell, pixel_area * sum 1/R(y), s/bit*km^2.
std::vector<double> cell_inverse_rate_integrals(const CellPartition& partition,
                                                std::span<const double> inverse_rates);

// theta(X) = rho * integral over V(X) of 1/R(SINR) for a full-interference field.
std::vector<double> cell_loads_full(const CellPartition& partition, const SinrField& sinr_full,
                                    const RateFunction& rf, const TrafficModel& traffic);

// Right-hand side of the cell-load equations on a fixed map and partition.
// Reuses its buffers across evaluations.
class CellLoadMap {
 public:
  CellLoadMap(const PropagationMap& map, const CellPartition& partition, const LinkBudget& budget,
              const RateFunction& rf, double sinr_cap_db = kDefaultSinrCapDb);

  // Integrals of 1/R over each cell with interferer weights
  // min(theta_Z, 1)(1 - eps) + eps.
  std::vector<double> integrals(std::span<const double> theta);

  // Full-interference integrals (all weights one).
  std::vector<double> full_integrals();

  // rho * integrals(theta).
  std::vector<double> apply(std::span<const double> theta, double traffic_density);

  const CellPartition& partition() const { return *partition_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  std::vector<double> integrals_for_weights(std::span<const double> weights);

  const PropagationMap* map_;
  const CellPartition* partition_;
  LinkBudget budget_;
  simd::RateKernelParams rate_;
  double sinr_cap_;
  SinrComponents components_;
  std::vector<double> inv_rate_;
  std::vector<double> weights_;
  std::size_t evaluations_ = 0;
};

// Two monotone iterations of the cell-load map: ascending from zero and
// descending from the full-interference loads.
LoadSolution solve_cell_load_equations(const PropagationMap& map, const CellPartition& partition,
                                       const LinkBudget& budget, const RateFunction& rf,
                                       const TrafficModel& traffic, const SolverOptions& options = {});

// Same, on a prepared load map; full_integrals may be supplied to skip one
// evaluation.
LoadSolution solve_cell_load_equations(CellLoadMap& load_map, double traffic_density,
                                       const SolverOptions& options,
                                       std::optional<std::span<const double>> full_integrals = std::nullopt);

// max_X |theta(X) - T(theta)(X)|.
double fixed_point_residual(CellLoadMap& load_map, std::span<const double> theta,
                            double traffic_density);

// Processor-sharing identities per cell. When inverse-rate integrals are
// given the critical traffic comes from them (needed at zero load);
// otherwise rho_c = rho(X)/theta(X).
CellMetrics cell_metrics(std::span<const double> theta, const CellPartition& partition,
                         const TrafficModel& traffic,
                         std::optional<std::span<const double>> integrals = std::nullopt);

// Discrete-event simulation of one cell as a multi-class PS queue.
enum class VolumeDistribution { exponential, deterministic };

struct QueueOracleInput {
  double arrival_rate = 0.0;  // users / s into the cell
  VolumeDistribution volume_distribution = VolumeDistribution::exponential;
  double mean_volume_bits = 1.0;
  std::vector<std::pair<double, double>> pixel_rates;  // (area weight, peak rate bit/s)
  double horizon_s = 0.0;
  std::uint64_t seed = 0;
  double warmup_fraction = 0.05;
};

struct QueueOracleResult {
  double empirical_mean_users = 0.0;
  double empirical_mean_throughput = 0.0;  // mean volume / mean sojourn
  double empirical_busy_fraction = 0.0;
  std::size_t departures = 0;
  std::size_t n_classes = 0;
  double critical_traffic = 0.0;  // harmonic mean rate
  double load = 0.0;              // rho(X) / rho_c
  bool stationary = true;         // false when load >= 1
};

inline constexpr std::size_t kMaxQueueClasses = 200;

// Merges rate classes into at most max_classes quantile bins; each bin's rate
// is the weighted harmonic mean so the integral of 1/R is preserved.
std::vector<std::pair<double, double>> bin_rate_classes(std::vector<std::pair<double, double>> pixel_rates,
                                                        std::size_t max_classes = kMaxQueueClasses);

QueueOracleResult ps_queue_oracle(const QueueOracleInput& input);

}  // namespace cellqos
