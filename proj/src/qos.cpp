#include "cellqos/qos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cellqos {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// |a - b| treating equal infinities as no change.
double change(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b);
}
}  // namespace

TrafficModel TrafficModel::from_density(double traffic_density_bps_per_km2, double mean_volume_bits) {
  if (!(mean_volume_bits > 0.0)) throw std::invalid_argument("mean volume must be positive");
  if (!(traffic_density_bps_per_km2 >= 0.0)) throw std::invalid_argument("traffic density must be >= 0");
  return {traffic_density_bps_per_km2 / mean_volume_bits, mean_volume_bits};
}

void TrafficModel::validate() const {
  if (!(arrival_rate >= 0.0) || !std::isfinite(arrival_rate)) {
    throw std::invalid_argument("arrival rate must be finite and >= 0");
  }
  if (!(mean_volume_bits > 0.0)) throw std::invalid_argument("mean volume must be positive");
}

void SolverOptions::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("solver max_iter must be >= 1");
}

std::vector<double> cell_inverse_rate_integrals(const CellPartition& partition,
                                                std::span<const double> inverse_rates) {
  if (inverse_rates.size() != partition.n_pixels()) {
    throw std::invalid_argument("one inverse rate per pixel is required");
  }
  std::vector<double> sums(partition.n_stations(), 0.0);
  for (std::size_t p = 0; p < inverse_rates.size(); ++p) {
    sums[static_cast<std::size_t>(partition.serving[p])] += inverse_rates[p];
  }
  for (double& s : sums) s *= partition.pixel_area;
  return sums;
}

namespace {

std::vector<double> scale_loads(std::span<const double> integrals, double rho) {
  std::vector<double> theta(integrals.size(), 0.0);
  if (rho == 0.0) return theta;
  for (std::size_t i = 0; i < integrals.size(); ++i) theta[i] = rho * integrals[i];
  return theta;
}

}  // namespace

std::vector<double> cell_loads_full(const CellPartition& partition, const SinrField& sinr_full,
                                    const RateFunction& rf, const TrafficModel& traffic) {
  traffic.validate();
  if (sinr_full.sinr.size() != partition.n_pixels()) {
    throw std::invalid_argument("SINR field does not match the partition");
  }
  const auto params = rate_kernel_params(rf);
  const std::vector<double> interference(sinr_full.sinr.size(), 0.0);
  std::vector<double> inv(sinr_full.sinr.size());
  simd::active_kernels().inverse_rate(sinr_full.sinr.data(), interference.data(), 1.0, kInf, params,
                                      inv.data(), inv.size());
  return scale_loads(cell_inverse_rate_integrals(partition, inv), traffic.traffic_density());
}

CellLoadMap::CellLoadMap(const PropagationMap& map, const CellPartition& partition,
                         const LinkBudget& budget, const RateFunction& rf, double sinr_cap_db)
    : map_(&map),
      partition_(&partition),
      budget_(budget),
      rate_(rate_kernel_params(rf)),
      sinr_cap_(db_to_linear(sinr_cap_db)) {
  budget.validate();
  components_ = sinr_components(map, partition, budget, std::vector<double>{});
  inv_rate_.resize(map.n_pixels());
  weights_.resize(map.n_stations());
}

std::vector<double> CellLoadMap::integrals_for_weights(std::span<const double> weights) {
  accumulate_interference(*map_, *partition_, weights, components_.interference);
  simd::active_kernels().inverse_rate(components_.signal.data(), components_.interference.data(),
                                      components_.noise_over_power, sinr_cap_, rate_,
                                      inv_rate_.data(), inv_rate_.size());
  ++evaluations_;
  return cell_inverse_rate_integrals(*partition_, inv_rate_);
}

std::vector<double> CellLoadMap::integrals(std::span<const double> theta) {
  if (theta.size() != map_->n_stations()) throw std::invalid_argument("one load per station is required");
  for (std::size_t i = 0; i < theta.size(); ++i) {
    weights_[i] = interference_weight(std::min(theta[i], 1.0), budget_.pilot_fraction);
  }
  return integrals_for_weights(weights_);
}

std::vector<double> CellLoadMap::full_integrals() {
  std::fill(weights_.begin(), weights_.end(), 1.0);
  return integrals_for_weights(weights_);
}

std::vector<double> CellLoadMap::apply(std::span<const double> theta, double traffic_density) {
  return scale_loads(integrals(theta), traffic_density);
}

namespace {

struct Branch {
  std::vector<double> theta;
  int iterations = 0;
  bool converged = false;
};

Branch iterate(CellLoadMap& load_map, std::vector<double> start, double rho, const SolverOptions& opt) {
  Branch b;
  b.theta = std::move(start);
  for (int it = 1; it <= opt.max_iter; ++it) {
    std::vector<double> next = load_map.apply(b.theta, rho);
    double delta = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) delta = std::max(delta, change(next[i], b.theta[i]));
    b.theta = std::move(next);
    b.iterations = it;
    if (delta < opt.tol) {
      b.converged = true;
      break;
    }
  }
  return b;
}

}  // namespace

LoadSolution solve_cell_load_equations(CellLoadMap& load_map, double traffic_density,
                                       const SolverOptions& options,
                                       std::optional<std::span<const double>> full_integrals) {
  options.validate();
  if (!(traffic_density >= 0.0)) throw std::invalid_argument("traffic density must be >= 0");
  const std::size_t n = load_map.partition().n_stations();

  std::vector<double> full;
  if (full_integrals) {
    full = scale_loads(*full_integrals, traffic_density);
  } else {
    full = scale_loads(load_map.full_integrals(), traffic_density);
  }

  Branch lower = iterate(load_map, std::vector<double>(n, 0.0), traffic_density, options);
  Branch upper = iterate(load_map, std::move(full), traffic_density, options);

  LoadSolution sol;
  sol.model = InterferenceModel::weighted;
  sol.theta_lower = std::move(lower.theta);
  sol.theta_upper = std::move(upper.theta);
  sol.theta = sol.theta_upper;
  sol.iterations_lower = lower.iterations;
  sol.iterations_upper = upper.iterations;
  sol.iterations = std::max(lower.iterations, upper.iterations);
  for (std::size_t i = 0; i < n; ++i) {
    sol.max_gap = std::max(sol.max_gap, change(sol.theta_upper[i], sol.theta_lower[i]));
  }
  sol.converged = lower.converged && upper.converged;
  sol.unique_within_tol = sol.converged && sol.max_gap < options.tol;
  if (!sol.converged) {
    std::ostringstream msg;
    msg << "cell-load iteration did not converge within " << options.max_iter << " steps (";
    if (!lower.converged) msg << "ascending branch";
    if (!lower.converged && !upper.converged) msg << ", ";
    if (!upper.converged) msg << "descending branch";
    msg << "); max gap " << sol.max_gap;
    sol.diagnostics = msg.str();
  }
  return sol;
}

LoadSolution solve_cell_load_equations(const PropagationMap& map, const CellPartition& partition,
                                       const LinkBudget& budget, const RateFunction& rf,
                                       const TrafficModel& traffic, const SolverOptions& options) {
  traffic.validate();
  CellLoadMap load_map(map, partition, budget, rf, options.sinr_cap_db);
  return solve_cell_load_equations(load_map, traffic.traffic_density(), options);
}

double fixed_point_residual(CellLoadMap& load_map, std::span<const double> theta, double traffic_density) {
  const std::vector<double> next = load_map.apply(theta, traffic_density);
  double r = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) r = std::max(r, change(next[i], theta[i]));
  return r;
}

CellMetrics cell_metrics(std::span<const double> theta, const CellPartition& partition,
                         const TrafficModel& traffic, std::optional<std::span<const double>> integrals) {
  traffic.validate();
  const std::size_t n = partition.n_stations();
  if (theta.size() != n) throw std::invalid_argument("one load per station is required");
  if (integrals && integrals->size() != n) throw std::invalid_argument("one integral per station is required");
  const double rho = traffic.traffic_density();

  CellMetrics m;
  m.traffic_demand.resize(n);
  m.critical_traffic.resize(n);
  m.load.assign(theta.begin(), theta.end());
  m.throughput.resize(n);
  m.mean_users.resize(n);
  m.busy_prob.resize(n);
  m.area = partition.cell_area;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = theta[i];
    if (!(t >= 0.0)) throw std::invalid_argument("loads must be >= 0");
    const double demand = rho * partition.cell_area[i];
    m.traffic_demand[i] = demand;
    if (t > 0.0) {
      m.critical_traffic[i] = demand / t;
    } else if (integrals) {
      m.critical_traffic[i] = partition.cell_area[i] / (*integrals)[i];
    } else {
      m.critical_traffic[i] = std::numeric_limits<double>::quiet_NaN();
    }
    m.busy_prob[i] = std::min(t, 1.0);
    if (t < 1.0) {
      m.mean_users[i] = t / (1.0 - t);
      m.throughput[i] = std::max(m.critical_traffic[i] - demand, 0.0);
    } else {
      m.mean_users[i] = kInf;
      m.throughput[i] = 0.0;
    }
  }
  return m;
}

}  // namespace cellqos
