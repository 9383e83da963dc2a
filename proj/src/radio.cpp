#include "cellqos/radio.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cellqos {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

void LinkBudget::validate() const {
  if (!std::isfinite(tx_power_dbm) || !std::isfinite(noise_dbm)) {
    throw std::invalid_argument("link budget powers must be finite");
  }
  if (!(pilot_fraction >= 0.0 && pilot_fraction <= 1.0)) {
    throw std::invalid_argument("pilot fraction must be in [0, 1]");
  }
}

void RateFunction::validate() const {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument("efficiency must be in (0, 1]");
  }
}

namespace {

// Nodes by Newton iteration on L_n with the usual asymptotic starting
// guesses; weights from L_{n-1} at the nodes.
GaussLaguerreRule compute_rule() {
  constexpr int n = static_cast<int>(simd::kLaguerreNodes);
  GaussLaguerreRule rule{};
  long double z = 0.0L;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0L / (1.0L + 2.4L * n);
    } else if (i == 1) {
      z += 15.0L / (1.0L + 2.5L * n);
    } else {
      const long double ai = i - 1;
      z += ((1.0L + 2.55L * ai) / (1.9L * ai)) * (z - static_cast<long double>(rule.nodes[i - 2]));
    }
    long double p1 = 0.0L, p2 = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      p1 = 1.0L;
      p2 = 0.0L;
      for (int j = 1; j <= n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = ((2.0L * j - 1.0L - z) * p2 - (j - 1.0L) * p3) / j;
      }
      const long double pp = n * (p1 - p2) / z;
      const long double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-18L * std::fabs(z)) break;
    }
    // p2 holds L_{n-1}(z): w = z / (n^2 L_{n-1}(z)^2).
    rule.nodes[i] = static_cast<double>(z);
    rule.weights[i] = static_cast<double>(z / (static_cast<long double>(n) * n * p2 * p2));
  }
  return rule;
}

}  // namespace

const GaussLaguerreRule& gauss_laguerre_rule() {
  static const GaussLaguerreRule rule = compute_rule();
  return rule;
}

simd::RateKernelParams rate_kernel_params(const RateFunction& rf) {
  rf.validate();
  const auto& rule = gauss_laguerre_rule();
  simd::RateKernelParams p;
  p.mode = rf.mode;
  p.scale_bps = rf.efficiency * rf.bandwidth_hz / std::numbers::ln2;
  p.nodes = rule.nodes.data();
  p.weights = rule.weights.data();
  return p;
}

double peak_rate(double sinr, const RateFunction& rf) {
  if (sinr < 0.0 || std::isnan(sinr)) throw std::invalid_argument("sinr must be non-negative");
  // The scalar kernel is the reference implementation of the rate map.
  const auto params = rate_kernel_params(rf);
  const double signal = sinr;
  const double interference = 0.0;
  double inv = 0.0;
  simd::scalar_kernels().inverse_rate(&signal, &interference, 1.0,
                                      std::numeric_limits<double>::infinity(), params, &inv, 1);
  return 1.0 / inv;
}

CellPartition partition_cells(const PropagationMap& map) {
  const std::size_t n_pix = map.n_pixels();
  const std::size_t n_st = map.n_stations();
  CellPartition part;
  part.pixel_area = map.grid().pixel_area();
  part.serving.assign(n_pix, -1);
  part.cell_area.assign(n_st, 0.0);
  part.pixel_count.assign(n_st, 0);
  if (n_st == 0) return part;

  std::vector<double> best(n_pix, -1.0);
  const auto& k = simd::active_kernels();
  for (std::size_t s = 0; s < n_st; ++s) {
    k.serving_update(map.gain_row(s).data(), static_cast<std::int32_t>(s), best.data(),
                     part.serving.data(), n_pix);
  }
  for (std::int32_t s : part.serving) ++part.pixel_count[static_cast<std::size_t>(s)];
  for (std::size_t s = 0; s < n_st; ++s) {
    part.cell_area[s] = part.pixel_area * static_cast<double>(part.pixel_count[s]);
  }
  return part;
}

void accumulate_interference(const PropagationMap& map, const CellPartition& partition,
                             std::span<const double> weights, std::span<double> interference) {
  const std::size_t n_pix = map.n_pixels();
  if (interference.size() != n_pix) throw std::invalid_argument("interference buffer size mismatch");
  if (!weights.empty() && weights.size() != map.n_stations()) {
    throw std::invalid_argument("one interference weight per station is required");
  }
  std::fill(interference.begin(), interference.end(), 0.0);
  const auto& k = simd::active_kernels();
  for (std::size_t s = 0; s < map.n_stations(); ++s) {
    const double w = weights.empty() ? 1.0 : weights[s];
    if (w == 0.0) continue;
    k.accumulate_interference(map.gain_row(s).data(), static_cast<std::int32_t>(s), w,
                              partition.serving.data(), interference.data(), n_pix);
  }
}

SinrComponents sinr_components(const PropagationMap& map, const CellPartition& partition,
                               const LinkBudget& budget, std::span<const double> weights) {
  budget.validate();
  const std::size_t n_pix = map.n_pixels();
  SinrComponents c;
  c.noise_over_power = budget.noise_over_power();
  c.signal.resize(n_pix);
  c.interference.resize(n_pix);
  for (std::size_t p = 0; p < n_pix; ++p) {
    c.signal[p] = map.gain(static_cast<std::size_t>(partition.serving[p]), p);
  }
  accumulate_interference(map, partition, weights, c.interference);
  return c;
}

SinrField sinr_field(const PropagationMap& map, const CellPartition& partition,
                     const LinkBudget& budget,
                     std::optional<std::span<const double>> busy_probabilities,
                     double sinr_cap_db) {
  SinrField field;
  field.sinr_cap = db_to_linear(sinr_cap_db);
  std::vector<double> weights;
  if (busy_probabilities) {
    if (busy_probabilities->size() != map.n_stations()) {
      throw std::invalid_argument("one busy probability per station is required");
    }
    field.model = InterferenceModel::weighted;
    weights.reserve(map.n_stations());
    for (double p : *busy_probabilities) {
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("busy probabilities must be in [0, 1]");
      weights.push_back(interference_weight(p, budget.pilot_fraction));
    }
  }
  const SinrComponents c = sinr_components(map, partition, budget, weights);
  field.load_weights = weights.empty() ? std::vector<double>(map.n_stations(), 1.0) : weights;
  field.sinr.resize(c.signal.size());
  field.saturated.assign(c.signal.size(), 0);
  for (std::size_t p = 0; p < c.signal.size(); ++p) {
    const double raw = c.signal[p] / (c.noise_over_power + c.interference[p]);
    if (!(raw < field.sinr_cap)) {
      field.sinr[p] = field.sinr_cap;
      field.saturated[p] = 1;
      ++field.n_saturated;
    } else {
      field.sinr[p] = raw;
    }
  }
  return field;
}

std::vector<double> inverse_rates(const SinrComponents& components, const RateFunction& rf,
                                  double sinr_cap_db) {
  const auto params = rate_kernel_params(rf);
  std::vector<double> out(components.signal.size());
  simd::active_kernels().inverse_rate(components.signal.data(), components.interference.data(),
                                      components.noise_over_power, db_to_linear(sinr_cap_db),
                                      params, out.data(), out.size());
  return out;
}

}  // namespace cellqos
