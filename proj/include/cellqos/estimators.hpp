#pragma once

// Network-level estimators. Typical-cell quantities are Monte Carlo averages
// over independent realizations of the whole network; mean-cell quantities
// come from the stationary SINR distribution seen by a typical user.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellqos/geometry.hpp"
#include "cellqos/propagation.hpp"
#include "cellqos/qos.hpp"
#include "cellqos/radio.hpp"

namespace cellqos {

enum class PatternType { poisson, hexagonal };

struct Scenario {
  Window window = Window::disc({0.0, 0.0}, 2.63);
  double intensity = 4.62;  // stations per km^2
  PatternType pattern = PatternType::poisson;
  PathLossParams path_loss;
  ShadowingParams shadowing;
  LinkBudget budget;
  RateFunction rate;
  double pixel_size_km = 0.02;
  // Statistics use only stations at least this far from the window edge.
  double guard_margin_km = 0.0;
  SolverOptions solver;

  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Per-realization ingredients of a typical-cell estimate.
struct RealizationSummary {
  std::size_t n_stations = 0;       // in the window
  std::size_t n_included = 0;       // after the guard margin
  double mean_load = 0.0;           // mean of theta over included stations
  double stable_fraction = 0.0;     // stable area / included area
  double n0 = 0.0;                  // sum of N over stable cells / n_included
  double mean_integral = 0.0;       // mean of the integral of 1/R, s/bit km^2
  double included_area = 0.0;
  bool converged = true;
  double max_gap = 0.0;
  int iterations = 0;
};

struct TypicalCellEstimate {
  InterferenceModel model = InterferenceModel::full;
  double traffic_density = 0.0;   // bit/s/km^2
  double traffic_per_cell = 0.0;  // bit/s
  std::size_t n_realizations = 0;

  double mean_load = 0.0;
  double load_std = 0.0;
  double stable_fraction = 0.0;
  double stable_fraction_std = 0.0;
  double n0 = 0.0;
  double n0_over_pis = 0.0;
  double n_std = 0.0;  // std of the per-realization N0/pi_S
  double r0 = 0.0;     // bit/s
  double r0_std = 0.0;
  bool r0_defined = true;  // false when every cell is unstable

  std::size_t n_nonconverged = 0;
  double max_gap = 0.0;            // worst over realizations
  double gap_within_fraction = 0;  // share of realizations with max_gap < 10 tol

  std::vector<RealizationSummary> realizations;

  double load_std_error() const;
};

struct MeanCellEstimate {
  InterferenceModel model = InterferenceModel::full;
  double rho_bar = 0.0;     // bit/s
  double theta_bar = 0.0;
  double rho_c_bar = 0.0;   // bit/s
  double r_bar = 0.0;       // bit/s
  double n_bar = 0.0;       // inf when unstable
  bool stable = true;
  // Standard error from per-realization (or per-batch) estimates; NaN when
  // only one group is available.
  double theta_bar_std_error = 0.0;
  std::size_t n_samples = 0;
};

// Per-location decomposition used by the mean cell: signal and total
// interference at unit load, both referred to the transmit power.
struct SinrSamples {
  std::vector<double> signal;
  std::vector<double> interference;
  double noise_over_power = 0.0;
  // Sample index boundaries of independent groups (realizations or batches);
  // group g is [group_begin[g], group_begin[g+1]).
  std::vector<std::size_t> group_begin;

  std::size_t size() const { return signal.size(); }
  std::size_t n_groups() const { return group_begin.empty() ? 0 : group_begin.size() - 1; }
  void append(std::span<const double> sig, std::span<const double> interf);
};

// theta_bar = (rho / lambda) mean 1/R(SINR) with full interference.
MeanCellEstimate mean_cell_full(double traffic_density, double intensity, const SinrSamples& samples,
                                const RateFunction& rf, double sinr_cap_db = kDefaultSinrCapDb);

// Scalar fixed point of the weighted mean cell by bisection on
// g(t) = (rho / lambda) mean 1/R(sig / (noise + w(t) interf)) - t over
// [0, theta_bar_full], with w(t) = min(t, 1)(1 - eps) + eps.
MeanCellEstimate solve_mean_cell_equation(double traffic_density, double intensity,
                                          const SinrSamples& samples, const RateFunction& rf,
                                          double pilot_fraction, double tol = 1e-9,
                                          double sinr_cap_db = kDefaultSinrCapDb);

// Fills the mean-cell identities from rho_bar and theta_bar.
MeanCellEstimate mean_cell_from_load(double rho_bar, double theta_bar, InterferenceModel model);

// Hands per-realization state to callers that persist artifacts.
struct RealizationView {
  std::size_t index = 0;
  const PropagationMap* map = nullptr;
  const CellPartition* partition = nullptr;
  double traffic_density = 0.0;
  InterferenceModel model = InterferenceModel::full;
  const std::vector<double>* theta = nullptr;
  const CellMetrics* metrics = nullptr;
  const LoadSolution* solution = nullptr;  // null for the full model
};
using RealizationObserver = std::function<void(const RealizationView&)>;

struct SweepPoint {
  double traffic_density = 0.0;
  InterferenceModel model = InterferenceModel::full;
  TypicalCellEstimate typical;
  MeanCellEstimate mean_cell;
  std::string error;  // non-empty when this point could not be estimated
};

struct SweepResult {
  std::vector<SweepPoint> points;  // density-major, models in request order
  std::size_t n_realizations = 0;
  std::vector<std::string> warnings;
  double mean_cell_area = 0.0;  // pooled over every cell of every realization
  std::size_t total_cells = 0;

  bool all_converged() const;
};

// Realizations are sampled once and reused for every traffic value and
// model. traffic_densities must be >= 0.
SweepResult run_sweep(const Scenario& scenario, std::span<const double> traffic_densities,
                      std::span<const InterferenceModel> models, std::size_t n_realizations,
                      std::uint64_t base_seed, const RealizationObserver& observer = {});

// Single-point convenience over run_sweep.
TypicalCellEstimate typical_cell_estimate(const Scenario& scenario, double traffic_density,
                                          InterferenceModel model, std::size_t n_realizations,
                                          std::uint64_t base_seed);

// Partition-only pass: per-realization mean cell area and station count,
// for checking that the mean cell area is 1/lambda.
struct CellAreaStudy {
  std::vector<double> mean_area;  // per realization
  std::vector<std::size_t> n_stations;
  double pooled_mean_area = 0.0;  // total area / total cell count
};
CellAreaStudy cell_area_study(const Scenario& scenario, std::size_t n_realizations,
                              std::uint64_t base_seed);

// SINR at the origin for Poisson networks on a disc of the given radius
// centered there, full interference. With shadowing the factors at the
// origin are i.i.d. log-normal. Samples are grouped in batches of
// batch_size for standard errors.
struct OriginSamplingOptions {
  double radius_km = 8.0;
  std::size_t n_samples = 100000;
  std::size_t batch_size = 1000;
};
SinrSamples sample_origin_sinr(double intensity, const PathLossParams& pl, const ShadowingParams& sh,
                               const LinkBudget& budget, const OriginSamplingOptions& options,
                               std::uint64_t seed);

double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct EquivalenceCheck {
  double ks_distance = 0.0;
  double equivalent_intensity = 0.0;
  double moment = 0.0;  // E[S^(2/beta)]
  double threshold = 0.03;
  bool pass = false;
};

// Shadowed SINR(0) at intensity lambda against unshadowed SINR(0) at
// lambda E[S^(2/beta)].
EquivalenceCheck shadowing_equivalence_check(const PathLossParams& pl, const ShadowingParams& sh,
                                             const LinkBudget& budget, double intensity,
                                             std::size_t n_samples, std::uint64_t seed,
                                             double radius_km = 8.0, double threshold = 0.03);

}  // namespace cellqos
