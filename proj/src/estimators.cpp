#include "cellqos/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cellqos/random.hpp"

namespace cellqos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> v) {
  if (v.empty()) return kNaN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1 denominator); NaN below two values.
double std_of(std::span<const double> v) {
  if (v.size() < 2) return kNaN;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Mean of 1/R over samples [begin, end) for interference scaled by weight.
double mean_inverse_rate(const SinrSamples& s, std::size_t begin, std::size_t end, double weight,
                         const simd::RateKernelParams& params, double cap,
                         std::vector<double>& scaled, std::vector<double>& out) {
  const std::size_t n = end - begin;
  if (n == 0) return kNaN;
  const double* interference = s.interference.data() + begin;
  if (weight != 1.0) {
    scaled.resize(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weight * interference[i];
    interference = scaled.data();
  }
  out.resize(n);
  simd::active_kernels().inverse_rate(s.signal.data() + begin, interference, s.noise_over_power, cap,
                                      params, out.data(), n);
  return std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(n);
}

struct WeightedRoot {
  double theta = 0.0;
  double mean_inv = 0.0;
  bool stable_bracket = true;
};

WeightedRoot weighted_root(const SinrSamples& s, std::size_t begin, std::size_t end, double scale,
                           double pilot, double tol, const simd::RateKernelParams& params,
                           double cap, std::vector<double>& scaled, std::vector<double>& out) {
  auto mean_inv_at = [&](double t) {
    return mean_inverse_rate(s, begin, end, interference_weight(std::min(t, 1.0), pilot), params, cap,
                             scaled, out);
  };
  WeightedRoot root;
  const double full_inv = mean_inverse_rate(s, begin, end, 1.0, params, cap, scaled, out);
  double hi = scale * full_inv;
  if (scale == 0.0) {
    root.mean_inv = mean_inv_at(0.0);
    return root;
  }
  const double g_hi = scale * mean_inv_at(hi) - hi;
  if (g_hi >= 0.0) {
    root.theta = hi;
    root.mean_inv = full_inv;
    root.stable_bracket = g_hi == 0.0;
    return root;
  }
  double lo = 0.0;
  double inv_lo = mean_inv_at(0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double inv_mid = mean_inv_at(mid);
    const double g = scale * inv_mid - mid;
    if (g >= 0.0) {
      lo = mid;
      inv_lo = inv_mid;
    } else {
      hi = mid;
    }
    if (std::abs(g) < tol || hi - lo < tol * std::max(1.0, hi)) break;
  }
  root.theta = lo;
  root.mean_inv = inv_lo;
  return root;
}

}  // namespace

void Scenario::validate() const {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw std::invalid_argument("station intensity must be positive");
  }
  path_loss.validate();
  shadowing.validate();
  budget.validate();
  rate.validate();
  if (!(pixel_size_km > 0.0)) throw std::invalid_argument("pixel size must be positive");
  if (!(guard_margin_km >= 0.0)) throw std::invalid_argument("guard margin must be >= 0");
  solver.validate();
}

double TypicalCellEstimate::load_std_error() const {
  return load_std / std::sqrt(static_cast<double>(n_realizations));
}

void SinrSamples::append(std::span<const double> sig, std::span<const double> interf) {
  if (sig.size() != interf.size()) throw std::invalid_argument("signal and interference sizes differ");
  if (group_begin.empty()) group_begin.push_back(0);
  signal.insert(signal.end(), sig.begin(), sig.end());
  interference.insert(interference.end(), interf.begin(), interf.end());
  group_begin.push_back(signal.size());
}

MeanCellEstimate mean_cell_from_load(double rho_bar, double theta_bar, InterferenceModel model) {
  MeanCellEstimate m;
  m.model = model;
  m.rho_bar = rho_bar;
  m.theta_bar = theta_bar;
  m.rho_c_bar = theta_bar > 0.0 ? rho_bar / theta_bar : kNaN;
  m.stable = theta_bar < 1.0;
  if (m.stable) {
    m.n_bar = theta_bar / (1.0 - theta_bar);
    m.r_bar = std::max(m.rho_c_bar - rho_bar, 0.0);
  } else {
    m.n_bar = kInf;
    m.r_bar = 0.0;
  }
  return m;
}

namespace {

// Identities from the mean 1/R, which also covers zero traffic where
// rho_c_bar = 1 / mean(1/R).
MeanCellEstimate mean_cell_from_inverse(double rho_bar, double mean_inv, InterferenceModel model) {
  MeanCellEstimate m = mean_cell_from_load(rho_bar, rho_bar * mean_inv, model);
  m.rho_c_bar = 1.0 / mean_inv;
  if (m.stable) m.r_bar = std::max(m.rho_c_bar - rho_bar, 0.0);
  return m;
}

void require_samples(const SinrSamples& samples) {
  if (samples.size() == 0) throw std::invalid_argument("mean cell needs at least one SINR sample");
  if (samples.signal.size() != samples.interference.size()) {
    throw std::invalid_argument("signal and interference sample counts differ");
  }
}

double group_std_error(std::span<const double> per_group) {
  if (per_group.size() < 2) return kNaN;
  return std_of(per_group) / std::sqrt(static_cast<double>(per_group.size()));
}

}  // namespace

MeanCellEstimate mean_cell_full(double traffic_density, double intensity, const SinrSamples& samples,
                                const RateFunction& rf, double sinr_cap_db) {
  require_samples(samples);
  if (!(traffic_density >= 0.0)) throw std::invalid_argument("traffic density must be >= 0");
  if (!(intensity > 0.0)) throw std::invalid_argument("station intensity must be positive");
  const auto params = rate_kernel_params(rf);
  const double cap = db_to_linear(sinr_cap_db);
  const double rho_bar = traffic_density / intensity;
  std::vector<double> scaled, out;

  const double mean_inv = mean_inverse_rate(samples, 0, samples.size(), 1.0, params, cap, scaled, out);
  MeanCellEstimate m = mean_cell_from_inverse(rho_bar, mean_inv, InterferenceModel::full);
  m.n_samples = samples.size();

  std::vector<double> per_group;
  for (std::size_t g = 0; g < samples.n_groups(); ++g) {
    const double inv = mean_inverse_rate(samples, samples.group_begin[g], samples.group_begin[g + 1], 1.0,
                                         params, cap, scaled, out);
    if (std::isfinite(inv)) per_group.push_back(rho_bar * inv);
  }
  m.theta_bar_std_error = group_std_error(per_group);
  return m;
}

MeanCellEstimate solve_mean_cell_equation(double traffic_density, double intensity,
                                          const SinrSamples& samples, const RateFunction& rf,
                                          double pilot_fraction, double tol, double sinr_cap_db) {
  require_samples(samples);
  if (!(traffic_density >= 0.0)) throw std::invalid_argument("traffic density must be >= 0");
  if (!(intensity > 0.0)) throw std::invalid_argument("station intensity must be positive");
  if (!(pilot_fraction >= 0.0 && pilot_fraction <= 1.0)) {
    throw std::invalid_argument("pilot fraction must be in [0, 1]");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const auto params = rate_kernel_params(rf);
  const double cap = db_to_linear(sinr_cap_db);
  const double rho_bar = traffic_density / intensity;
  std::vector<double> scaled, out;

  const WeightedRoot root =
      weighted_root(samples, 0, samples.size(), rho_bar, pilot_fraction, tol, params, cap, scaled, out);
  MeanCellEstimate m = mean_cell_from_inverse(rho_bar, root.mean_inv, InterferenceModel::weighted);
  m.theta_bar = root.theta;
  m.stable = m.stable && root.stable_bracket;
  if (!m.stable) {
    m.n_bar = kInf;
    m.r_bar = 0.0;
  }
  m.n_samples = samples.size();

  std::vector<double> per_group;
  for (std::size_t g = 0; g < samples.n_groups(); ++g) {
    const WeightedRoot r = weighted_root(samples, samples.group_begin[g], samples.group_begin[g + 1],
                                         rho_bar, pilot_fraction, tol, params, cap, scaled, out);
    per_group.push_back(r.theta);
  }
  m.theta_bar_std_error = group_std_error(per_group);
  return m;
}

bool SweepResult::all_converged() const {
  for (const auto& p : points) {
    if (p.typical.n_nonconverged > 0) return false;
  }
  return true;
}

namespace {

BsPattern realize_pattern(const Scenario& sc, std::uint64_t realization_seed) {
  if (sc.pattern == PatternType::hexagonal) return hexagonal_lattice(sc.intensity, sc.window);
  return sample_poisson(sc.intensity, sc.window, derive_seed(realization_seed, stream::pattern));
}

std::vector<std::uint8_t> included_stations(const Scenario& sc, const std::vector<Point>& stations) {
  std::vector<std::uint8_t> inc(stations.size(), 1);
  if (sc.guard_margin_km > 0.0) {
    for (std::size_t i = 0; i < stations.size(); ++i) {
      inc[i] = sc.window.distance_to_boundary(stations[i]) >= sc.guard_margin_km ? 1 : 0;
    }
  }
  return inc;
}

RealizationSummary summarize(const CellPartition& partition, const std::vector<std::uint8_t>& included,
                             std::span<const double> theta, const CellMetrics& metrics,
                             std::span<const double> integrals) {
  RealizationSummary s;
  s.n_stations = partition.n_stations();
  double load_sum = 0.0, stable_area = 0.0, n_sum = 0.0, integral_sum = 0.0;
  for (std::size_t i = 0; i < s.n_stations; ++i) {
    if (!included[i]) continue;
    ++s.n_included;
    load_sum += theta[i];
    s.included_area += partition.cell_area[i];
    integral_sum += integrals[i];
    if (metrics.stable(i)) {
      stable_area += partition.cell_area[i];
      n_sum += metrics.mean_users[i];
    }
  }
  const double n = static_cast<double>(s.n_included);
  s.mean_load = load_sum / n;
  s.stable_fraction = s.included_area > 0.0 ? stable_area / s.included_area : 0.0;
  s.n0 = n_sum / n;
  s.mean_integral = integral_sum / n;
  return s;
}

TypicalCellEstimate aggregate(const Scenario& sc, double rho, InterferenceModel model,
                              std::vector<RealizationSummary> reals) {
  if (reals.size() < 2) throw std::runtime_error("fewer than two usable realizations");
  TypicalCellEstimate e;
  e.model = model;
  e.traffic_density = rho;
  e.traffic_per_cell = rho / sc.intensity;
  e.n_realizations = reals.size();

  std::vector<double> load, pis, n0, n0_pis, r0, integral;
  std::size_t within = 0;
  for (const auto& r : reals) {
    load.push_back(r.mean_load);
    pis.push_back(r.stable_fraction);
    n0.push_back(r.n0);
    integral.push_back(r.mean_integral);
    if (r.stable_fraction > 0.0) n0_pis.push_back(r.n0 / r.stable_fraction);
    if (rho > 0.0) {
      if (r.n0 > 0.0) r0.push_back(rho * r.stable_fraction / (sc.intensity * r.n0));
    } else {
      r0.push_back(r.stable_fraction / (sc.intensity * r.mean_integral));
    }
    if (!r.converged) ++e.n_nonconverged;
    e.max_gap = std::max(e.max_gap, r.max_gap);
    if (r.max_gap < 10.0 * sc.solver.tol) ++within;
  }
  e.mean_load = mean_of(load);
  e.load_std = std_of(load);
  e.stable_fraction = mean_of(pis);
  e.stable_fraction_std = std_of(pis);
  e.n0 = mean_of(n0);
  e.n0_over_pis = e.stable_fraction > 0.0 ? e.n0 / e.stable_fraction : kNaN;
  e.n_std = std_of(n0_pis);
  if (rho > 0.0) {
    e.r0_defined = e.n0 > 0.0;
    e.r0 = e.r0_defined ? rho * e.stable_fraction / (sc.intensity * e.n0) : 0.0;
  } else {
    // Zero-traffic limit of rho pi_S / (lambda N0) with N0 ~ rho mean(integral).
    e.r0_defined = true;
    e.r0 = e.stable_fraction / (sc.intensity * mean_of(integral));
  }
  e.r0_std = std_of(r0);
  e.gap_within_fraction = static_cast<double>(within) / static_cast<double>(reals.size());
  e.realizations = std::move(reals);
  return e;
}

const char* model_name(InterferenceModel m) { return m == InterferenceModel::full ? "full" : "weighted"; }

}  // namespace

SweepResult run_sweep(const Scenario& scenario, std::span<const double> traffic_densities,
                      std::span<const InterferenceModel> models, std::size_t n_realizations,
                      std::uint64_t base_seed, const RealizationObserver& observer) {
  scenario.validate();
  if (n_realizations < 2) throw std::invalid_argument("at least two realizations are required");
  for (double rho : traffic_densities) {
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw std::invalid_argument("traffic densities must be >= 0");
  }
  if (models.empty()) throw std::invalid_argument("at least one interference model is required");

  const Grid grid(scenario.window, scenario.pixel_size_km);
  const std::size_t n_points = traffic_densities.size() * models.size();
  std::vector<std::vector<RealizationSummary>> summaries(n_points);
  SinrSamples pool;
  pool.noise_over_power = scenario.budget.noise_over_power();
  pool.group_begin.push_back(0);

  SweepResult result;
  double total_area = 0.0;
  std::size_t usable = 0;
  std::vector<double> sig_buf, int_buf;

  for (std::size_t r = 0; r < n_realizations; ++r) {
    const std::uint64_t rs = derive_seed(base_seed, stream::realization, r);
    const BsPattern pattern = realize_pattern(scenario, rs);
    if (pattern.size() == 0) {
      result.warnings.push_back("realization " + std::to_string(r) + " has no stations; skipped");
      continue;
    }
    const PropagationMap map = build_propagation_map(pattern, grid, scenario.path_loss, scenario.shadowing,
                                                     derive_seed(rs, stream::shadowing));
    if (r == 0) {
      for (const auto& w : map.warnings) result.warnings.push_back(w);
    }
    const CellPartition partition = partition_cells(map);
    const auto included = included_stations(scenario, map.stations());
    if (std::find(included.begin(), included.end(), 1) == included.end()) {
      result.warnings.push_back("realization " + std::to_string(r) +
                                " has no station inside the guard margin; skipped");
      continue;
    }
    ++usable;
    for (std::size_t i = 0; i < partition.n_stations(); ++i) {
      total_area += partition.cell_area[i];
      ++result.total_cells;
    }

    // Unit-load samples of the mean cell: pixels served by included stations.
    const SinrComponents full = sinr_components(map, partition, scenario.budget);
    sig_buf.clear();
    int_buf.clear();
    for (std::size_t p = 0; p < partition.n_pixels(); ++p) {
      if (!included[static_cast<std::size_t>(partition.serving[p])]) continue;
      sig_buf.push_back(full.signal[p]);
      int_buf.push_back(full.interference[p]);
    }
    pool.append(sig_buf, int_buf);

    CellLoadMap load_map(map, partition, scenario.budget, scenario.rate, scenario.solver.sinr_cap_db);
    const std::vector<double> full_integrals = load_map.full_integrals();
    std::vector<double> zero_integrals;

    for (std::size_t ip = 0; ip < traffic_densities.size(); ++ip) {
      const double rho = traffic_densities[ip];
      const TrafficModel traffic = TrafficModel::from_density(rho, 1.0);
      for (std::size_t im = 0; im < models.size(); ++im) {
        const InterferenceModel model = models[im];
        std::vector<double> theta(partition.n_stations(), 0.0);
        std::vector<double> integrals;
        std::optional<LoadSolution> solution;
        if (model == InterferenceModel::full) {
          for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = rho * full_integrals[i];
          integrals = full_integrals;
        } else {
          solution = solve_cell_load_equations(load_map, rho, scenario.solver, full_integrals);
          theta = solution->theta;
          if (rho > 0.0) {
            integrals.resize(theta.size());
            for (std::size_t i = 0; i < theta.size(); ++i) integrals[i] = theta[i] / rho;
          } else {
            if (zero_integrals.empty()) zero_integrals = load_map.integrals(theta);
            integrals = zero_integrals;
          }
        }
        const CellMetrics metrics =
            cell_metrics(theta, partition, traffic, std::span<const double>(integrals));
        RealizationSummary s = summarize(partition, included, theta, metrics, integrals);
        if (solution) {
          s.converged = solution->converged;
          s.max_gap = solution->max_gap;
          s.iterations = solution->iterations;
        }
        summaries[ip * models.size() + im].push_back(s);
        if (observer) {
          RealizationView view;
          view.index = r;
          view.map = &map;
          view.partition = &partition;
          view.traffic_density = rho;
          view.model = model;
          view.theta = &theta;
          view.metrics = &metrics;
          view.solution = solution ? &*solution : nullptr;
          observer(view);
        }
      }
    }
  }

  result.n_realizations = usable;
  result.mean_cell_area = result.total_cells > 0 ? total_area / static_cast<double>(result.total_cells) : kNaN;

  for (std::size_t ip = 0; ip < traffic_densities.size(); ++ip) {
    for (std::size_t im = 0; im < models.size(); ++im) {
      SweepPoint pt;
      pt.traffic_density = traffic_densities[ip];
      pt.model = models[im];
      try {
        pt.typical = aggregate(scenario, pt.traffic_density, pt.model,
                               std::move(summaries[ip * models.size() + im]));
        if (pt.model == InterferenceModel::full) {
          pt.mean_cell = mean_cell_full(pt.traffic_density, scenario.intensity, pool, scenario.rate,
                                        scenario.solver.sinr_cap_db);
        } else {
          pt.mean_cell = solve_mean_cell_equation(pt.traffic_density, scenario.intensity, pool, scenario.rate,
                                                  scenario.budget.pilot_fraction, 1e-9,
                                                  scenario.solver.sinr_cap_db);
        }
        if (pt.typical.n_nonconverged > 0) {
          std::ostringstream msg;
          msg << pt.typical.n_nonconverged << " realization(s) did not converge (" << model_name(pt.model)
              << ", rho " << pt.traffic_density << " bit/s/km^2)";
          result.warnings.push_back(msg.str());
        }
      } catch (const std::exception& ex) {
        pt.error = ex.what();
      }
      result.points.push_back(std::move(pt));
    }
  }
  return result;
}

TypicalCellEstimate typical_cell_estimate(const Scenario& scenario, double traffic_density,
                                          InterferenceModel model, std::size_t n_realizations,
                                          std::uint64_t base_seed) {
  const double rho[] = {traffic_density};
  const InterferenceModel m[] = {model};
  SweepResult res = run_sweep(scenario, rho, m, n_realizations, base_seed);
  if (!res.points.front().error.empty()) throw std::runtime_error(res.points.front().error);
  return std::move(res.points.front().typical);
}

CellAreaStudy cell_area_study(const Scenario& scenario, std::size_t n_realizations, std::uint64_t base_seed) {
  scenario.validate();
  const Grid grid(scenario.window, scenario.pixel_size_km);
  CellAreaStudy study;
  double total_area = 0.0;
  std::size_t total_cells = 0;
  for (std::size_t r = 0; r < n_realizations; ++r) {
    const std::uint64_t rs = derive_seed(base_seed, stream::realization, r);
    const BsPattern pattern = realize_pattern(scenario, rs);
    if (pattern.size() == 0) continue;
    const PropagationMap map = build_propagation_map(pattern, grid, scenario.path_loss, scenario.shadowing,
                                                     derive_seed(rs, stream::shadowing));
    const CellPartition partition = partition_cells(map);
    const double area = std::accumulate(partition.cell_area.begin(), partition.cell_area.end(), 0.0);
    study.mean_area.push_back(area / static_cast<double>(partition.n_stations()));
    study.n_stations.push_back(partition.n_stations());
    total_area += area;
    total_cells += partition.n_stations();
  }
  study.pooled_mean_area = total_cells > 0 ? total_area / static_cast<double>(total_cells) : kNaN;
  return study;
}

SinrSamples sample_origin_sinr(double intensity, const PathLossParams& pl, const ShadowingParams& sh,
                               const LinkBudget& budget, const OriginSamplingOptions& options,
                               std::uint64_t seed) {
  if (!(intensity > 0.0)) throw std::invalid_argument("station intensity must be positive");
  if (!(options.radius_km > 0.0)) throw std::invalid_argument("sampling radius must be positive");
  if (options.n_samples == 0 || options.batch_size == 0) {
    throw std::invalid_argument("need at least one sample and a positive batch size");
  }
  pl.validate();
  sh.validate();
  budget.validate();

  SinrSamples out;
  out.noise_over_power = budget.noise_over_power();
  out.signal.reserve(options.n_samples);
  out.interference.reserve(options.n_samples);
  out.group_begin.push_back(0);

  const double mean_count = intensity * std::numbers::pi * options.radius_km * options.radius_km;
  const double log_sigma = sh.enabled ? sh.log_sigma() : 0.0;
  const double log_k = std::log(pl.k_per_km);
  std::poisson_distribution<long> count(mean_count);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (std::size_t b = 0; out.signal.size() < options.n_samples; ++b) {
    Rng rng = make_rng(seed, stream::origin, b);
    const std::size_t n_batch = std::min(options.batch_size, options.n_samples - out.signal.size());
    for (std::size_t i = 0; i < n_batch; ++i) {
      const long n = count(rng);
      double best = 0.0, total = 0.0;
      for (long k = 0; k < n; ++k) {
        const double r = options.radius_km * std::sqrt(unif(rng));
        double log_gain = -pl.beta * (log_k + std::log(r));
        if (log_sigma > 0.0) log_gain += log_sigma * normal(rng);
        const double g = std::exp(log_gain);
        total += g;
        best = std::max(best, g);
      }
      out.signal.push_back(best);
      out.interference.push_back(total - best);
    }
    out.group_begin.push_back(out.signal.size());
  }
  return out;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

EquivalenceCheck shadowing_equivalence_check(const PathLossParams& pl, const ShadowingParams& sh,
                                             const LinkBudget& budget, double intensity,
                                             std::size_t n_samples, std::uint64_t seed, double radius_km,
                                             double threshold) {
  if (n_samples < 100) throw std::invalid_argument("shadowing equivalence check needs >= 100 samples");
  EquivalenceCheck res;
  res.threshold = threshold;
  res.moment = sh.enabled ? lognormal_equivalence_moment(sh.sigma_db, pl.beta) : 1.0;
  res.equivalent_intensity = intensity * res.moment;

  OriginSamplingOptions opt;
  opt.radius_km = radius_km;
  opt.n_samples = n_samples;
  ShadowingParams none = sh;
  none.enabled = false;

  auto sinr = [](const SinrSamples& s) {
    std::vector<double> v(s.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = s.signal[i] / (s.noise_over_power + s.interference[i]);
    }
    return v;
  };
  const SinrSamples shadowed = sample_origin_sinr(intensity, pl, sh, budget, opt, derive_seed(seed, 1));
  const SinrSamples plain =
      sample_origin_sinr(res.equivalent_intensity, pl, none, budget, opt, derive_seed(seed, 2));
  res.ks_distance = ks_two_sample(sinr(shadowed), sinr(plain));
  res.pass = res.ks_distance < threshold;
  return res;
}

}  // namespace cellqos
