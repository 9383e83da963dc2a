#pragma once

// Cell partition, downlink SINR and the peak bit-rate function.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cellqos/propagation.hpp"
#include "cellqos/simd.hpp"

namespace cellqos {

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double linear);

struct LinkBudget {
  double tx_power_dbm = 58.0;
  double noise_dbm = -96.0;
  double pilot_fraction = 0.1;  // epsilon, always-on share of the power

  double tx_power_w() const { return dbm_to_watts(tx_power_dbm); }
  double noise_w() const { return dbm_to_watts(noise_dbm); }
  // Noise referred to the transmit power; SINR is computed on gains.
  double noise_over_power() const { return noise_w() / tx_power_w(); }
  void validate() const;

  friend bool operator==(const LinkBudget&, const LinkBudget&) = default;
};

using RateMode = simd::RateMode;

struct RateFunction {
  RateMode mode = RateMode::rayleigh_ergodic;
  double bandwidth_hz = 5e6;
  double efficiency = 0.3;

  void validate() const;

  friend bool operator==(const RateFunction&, const RateFunction&) = default;
};

struct GaussLaguerreRule {
  std::array<double, simd::kLaguerreNodes> nodes;
  std::array<double, simd::kLaguerreNodes> weights;
};

// 32-point rule for the weight e^-t on [0, inf).
const GaussLaguerreRule& gauss_laguerre_rule();

// R(sinr) in bit/s. The Rayleigh mode is eta W E[log2(1 + |H|^2 sinr)] with
// |H|^2 ~ Exp(1): Gauss-Laguerre quadrature for sinr <= 1, the closed form
// e^(1/sinr) E1(1/sinr) / ln 2 beyond.
double peak_rate(double sinr, const RateFunction& rf);

simd::RateKernelParams rate_kernel_params(const RateFunction& rf);

struct CellPartition {
  std::vector<std::int32_t> serving;  // per pixel
  std::vector<double> cell_area;      // per station, km^2
  std::vector<std::size_t> pixel_count;
  double pixel_area = 0.0;

  std::size_t n_stations() const { return cell_area.size(); }
  std::size_t n_pixels() const { return serving.size(); }
};

// Argmin of the loss per pixel (argmax of the gain), ties to the lowest
// station index.
CellPartition partition_cells(const PropagationMap& map);

enum class InterferenceModel { full, weighted };

inline constexpr double kDefaultSinrCapDb = 60.0;

// Per-pixel signal gain and interference gain sum, both referred to the
// transmit power. SINR = signal / (noise_over_power + interference).
struct SinrComponents {
  std::vector<double> signal;
  std::vector<double> interference;
  double noise_over_power = 0.0;
};

// Interference with per-station weights; empty weights means all ones.
SinrComponents sinr_components(const PropagationMap& map, const CellPartition& partition,
                               const LinkBudget& budget, std::span<const double> weights = {});

// Same as above but refreshes an existing interference buffer in place.
void accumulate_interference(const PropagationMap& map, const CellPartition& partition,
                             std::span<const double> weights, std::span<double> interference);

struct SinrField {
  std::vector<double> sinr;
  std::vector<std::uint8_t> saturated;  // pixel hit the cap
  InterferenceModel model = InterferenceModel::full;
  std::vector<double> load_weights;     // w_Z actually used
  double sinr_cap = 0.0;
  std::size_t n_saturated = 0;
};

// Full model when busy_probabilities is absent; weighted model otherwise,
// with interferer weights p_Z (1 - eps) + eps.
SinrField sinr_field(const PropagationMap& map, const CellPartition& partition,
                     const LinkBudget& budget,
                     std::optional<std::span<const double>> busy_probabilities = std::nullopt,
                     double sinr_cap_db = kDefaultSinrCapDb);

// Interferer weight of the weighted model for a busy probability p.
inline double interference_weight(double busy_probability, double pilot_fraction) {
  return busy_probability * (1.0 - pilot_fraction) + pilot_fraction;
}

// 1/R per pixel for the given components, through the active SIMD kernels.
std::vector<double> inverse_rates(const SinrComponents& components, const RateFunction& rf,
                                  double sinr_cap_db = kDefaultSinrCapDb);

}  // namespace cellqos
