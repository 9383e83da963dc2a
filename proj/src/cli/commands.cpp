#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cellqos/cli.hpp"
#include "cellqos/csv.hpp"
#include "cellqos/random.hpp"
#include "json_section.hpp"

namespace cellqos::cli {

using detail::json;
using detail::Section;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double relative_deviation(double measured, double model) {
  if (measured == model) return 0.0;
  if (model == 0.0 || !std::isfinite(model)) return kNaN;
  return (measured - model) / model;
}

// Linear interpolation on an increasing abscissa; x must lie in range.
double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const auto it = std::lower_bound(xs.begin(), xs.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  if (xs[hi] == x) return ys[hi];
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  if (!std::isfinite(ys[lo]) || !std::isfinite(ys[hi])) return t < 0.5 ? ys[lo] : ys[hi];
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (pos - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

DeviationSummary summarize(const std::string& metric, const std::vector<ComparisonRow>& rows,
                           double ComparisonRow::*field) {
  std::vector<double> v;
  for (const auto& r : rows) {
    if (std::isfinite(r.*field)) v.push_back(r.*field);
  }
  DeviationSummary s;
  s.metric = metric;
  s.count = v.size();
  if (v.empty()) {
    s.min = s.q25 = s.median = s.q75 = s.max = kNaN;
    return s;
  }
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.q25 = quantile(v, 0.25);
  s.median = quantile(v, 0.5);
  s.q75 = quantile(v, 0.75);
  s.max = v.back();
  return s;
}

}  // namespace

SweepCurve read_sweep_curve(std::istream& in, InterferenceModel model) {
  const CsvTable t = read_csv(in);
  const std::size_t c_rho = t.column("rho_per_cell_bps");
  const std::size_t c_model = t.column("model");
  const std::size_t c_load = t.column("mean_load");
  const std::size_t c_users = t.column("n0_over_pis");
  const std::size_t c_r0 = t.column("r0_bps");
  const std::size_t c_tb = t.column("theta_bar");
  const std::size_t c_nb = t.column("n_bar");
  const std::size_t c_rb = t.column("r_bar_bps");

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i][c_model] == model_name(model)) rows.push_back(i);
  }
  std::sort(rows.begin(), rows.end(),
            [&](std::size_t a, std::size_t b) { return t.number(a, c_rho) < t.number(b, c_rho); });
  SweepCurve c;
  for (std::size_t i : rows) {
    const double x = t.number(i, c_rho);
    if (!c.rho_per_cell.empty() && !(x > c.rho_per_cell.back())) {
      throw CsvError("sweep CSV repeats a traffic value for one model");
    }
    c.rho_per_cell.push_back(x);
    c.load.push_back(t.number(i, c_load));
    c.users.push_back(t.number(i, c_users));
    c.throughput.push_back(t.number(i, c_r0));
    c.theta_bar.push_back(t.number(i, c_tb));
    c.n_bar.push_back(t.number(i, c_nb));
    c.r_bar.push_back(t.number(i, c_rb));
  }
  return c;
}

std::vector<MeasurementRow> read_measurements(std::istream& in) {
  const CsvTable t = read_csv(in);
  const std::size_t c_label = t.column("hour_label");
  const std::size_t c_rho = t.column("traffic_demand_per_cell_bps");
  const std::size_t c_users = t.column("mean_users");
  const std::size_t c_busy = t.column("busy_fraction");
  const std::size_t c_thr = t.column("throughput_bps");
  std::vector<MeasurementRow> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    MeasurementRow r;
    r.hour_label = t.rows[i][c_label];
    r.traffic_demand_per_cell_bps = t.number(i, c_rho);
    r.mean_users = t.number(i, c_users);
    r.busy_fraction = t.number(i, c_busy);
    r.throughput_bps = t.number(i, c_thr);
    if (!(r.traffic_demand_per_cell_bps >= 0.0) || !(r.mean_users >= 0.0) || !(r.busy_fraction >= 0.0) ||
        !(r.throughput_bps >= 0.0)) {
      throw CsvError("measurement row " + std::to_string(i + 1) + " has a negative or missing value");
    }
    out.push_back(std::move(r));
  }
  return out;
}

ComparisonReport compare_measurements(const SweepCurve& curve, const std::vector<MeasurementRow>& rows) {
  ComparisonReport report;
  for (const auto& m : rows) {
    const double x = m.traffic_demand_per_cell_bps;
    if (curve.rho_per_cell.empty() || x < curve.rho_per_cell.front() || x > curve.rho_per_cell.back()) {
      std::ostringstream msg;
      msg << "row '" << m.hour_label << "' at " << format_double(x)
          << " bit/s per cell is outside the swept range; skipped";
      report.skipped.push_back(msg.str());
      continue;
    }
    const auto& xs = curve.rho_per_cell;
    ComparisonRow r;
    r.hour_label = m.hour_label;
    r.traffic_demand_per_cell_bps = x;
    r.load_deviation = relative_deviation(m.busy_fraction, interpolate(xs, curve.load, x));
    r.users_deviation = relative_deviation(m.mean_users, interpolate(xs, curve.users, x));
    r.throughput_deviation = relative_deviation(m.throughput_bps, interpolate(xs, curve.throughput, x));
    r.mean_cell_load_deviation = relative_deviation(m.busy_fraction, interpolate(xs, curve.theta_bar, x));
    r.mean_cell_users_deviation = relative_deviation(m.mean_users, interpolate(xs, curve.n_bar, x));
    r.mean_cell_throughput_deviation = relative_deviation(m.throughput_bps, interpolate(xs, curve.r_bar, x));
    report.rows.push_back(std::move(r));
  }
  report.summary = {
      summarize("load", report.rows, &ComparisonRow::load_deviation),
      summarize("users", report.rows, &ComparisonRow::users_deviation),
      summarize("throughput", report.rows, &ComparisonRow::throughput_deviation),
      summarize("mean_cell_load", report.rows, &ComparisonRow::mean_cell_load_deviation),
      summarize("mean_cell_users", report.rows, &ComparisonRow::mean_cell_users_deviation),
      summarize("mean_cell_throughput", report.rows, &ComparisonRow::mean_cell_throughput_deviation),
  };
  return report;
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
  out << "# units: traffic_demand_per_cell_bps bit/s; deviations are (measured - model) / model\n";
  out << "hour_label,traffic_demand_per_cell_bps,load_dev,users_dev,throughput_dev,mean_cell_load_dev,"
         "mean_cell_users_dev,mean_cell_throughput_dev\n";
  for (const auto& r : report.rows) {
    out << r.hour_label << ',' << format_double(r.traffic_demand_per_cell_bps) << ','
        << format_double(r.load_deviation) << ',' << format_double(r.users_deviation) << ','
        << format_double(r.throughput_deviation) << ',' << format_double(r.mean_cell_load_deviation) << ','
        << format_double(r.mean_cell_users_deviation) << ','
        << format_double(r.mean_cell_throughput_deviation) << '\n';
  }
}

void write_comparison_summary(std::ostream& out, const ComparisonReport& report) {
  for (const auto& n : report.skipped) out << "notice: " << n << '\n';
  out << "metric,count,min,q25,median,q75,max\n";
  for (const auto& s : report.summary) {
    out << s.metric << ',' << s.count << ',' << format_double(s.min) << ',' << format_double(s.q25) << ','
        << format_double(s.median) << ',' << format_double(s.q75) << ',' << format_double(s.max) << '\n';
  }
}

DiagnoseReport diagnose_pattern(const std::vector<Point>& points, const DiagnoseOptions& options) {
  if (points.size() < 10) throw std::invalid_argument("pattern diagnosis needs at least 10 stations");
  DiagnoseReport report;
  if (options.window) {
    report.window = *options.window;
  } else {
    double x0 = points[0].x, x1 = x0, y0 = points[0].y, y1 = y0;
    for (const auto& p : points) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    report.window = Window::rectangle(x0, y0, x1, y1);
  }
  for (const auto& p : points) {
    if (!report.window.contains(p)) throw std::invalid_argument("a station lies outside the window");
  }
  BsPattern pattern;
  pattern.points = points;
  pattern.window = report.window;
  pattern.intensity = static_cast<double>(points.size()) / report.window.area();
  report.n_points = points.size();
  const auto radii = default_l_radii(report.window, options.n_radii);
  report.test = poisson_envelope_test(pattern, radii, options.n_simulations, options.seed);
  return report;
}

void write_diagnose_csv(std::ostream& out, const DiagnoseReport& report) {
  const auto& t = report.test;
  out << "# units: r_km, l_km, lower_km, upper_km in km\n";
  out << "# stations " << report.n_points << "; intensity " << format_double(t.matched_intensity)
      << " per km^2; max |L(r) - r| observed " << format_double(t.observed_deviation) << " km, envelope "
      << format_double(t.critical_deviation) << " km; p-value " << format_double(t.p_value) << "; "
      << (t.inside ? "inside" : "outside") << " the Poisson envelope\n";
  out << "r_km,l_km,lower_km,upper_km\n";
  for (std::size_t i = 0; i < t.observed.radii.size(); ++i) {
    out << format_double(t.observed.radii[i]) << ',' << format_double(t.observed.l_values[i]) << ','
        << format_double(t.pointwise_lower[i]) << ',' << format_double(t.pointwise_upper[i]) << '\n';
  }
}

QueueOracleInput parse_cell_spec(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw ConfigError("", std::string("malformed JSON: ") + ex.what());
  }
  QueueOracleInput in;
  Section top(root, "");
  {
    Section v = top.section("volume");
    std::string dist = "exponential";
    v.string("distribution", dist);
    if (dist == "exponential") {
      in.volume_distribution = VolumeDistribution::exponential;
    } else if (dist == "deterministic") {
      in.volume_distribution = VolumeDistribution::deterministic;
    } else {
      throw ConfigError(v.child_path("distribution"), "expected \"exponential\" or \"deterministic\"");
    }
    in.mean_volume_bits = 1e6;
    v.number("mean_bits", in.mean_volume_bits);
    if (!(in.mean_volume_bits > 0.0)) throw ConfigError(v.child_path("mean_bits"), "must be positive");
    v.finish();
  }
  const bool has_rate = top.has("arrival_rate_per_s");
  const bool has_demand = top.has("traffic_demand_bps");
  if (has_rate == has_demand) {
    throw ConfigError("arrival_rate_per_s", "give exactly one of arrival_rate_per_s and traffic_demand_bps");
  }
  if (has_rate) {
    top.number("arrival_rate_per_s", in.arrival_rate);
  } else {
    double demand = 0.0;
    top.number("traffic_demand_bps", demand);
    in.arrival_rate = demand / in.mean_volume_bits;
  }
  if (!(in.arrival_rate > 0.0)) {
    throw ConfigError(has_rate ? "arrival_rate_per_s" : "traffic_demand_bps", "must be positive");
  }
  const json* classes = top.find("classes");
  if (!classes || !classes->is_array() || classes->empty()) {
    throw ConfigError("classes", "expected a non-empty list of {weight, rate_bps}");
  }
  for (std::size_t i = 0; i < classes->size(); ++i) {
    Section c((*classes)[i], "classes[" + std::to_string(i) + "]");
    double w = 1.0, r = 0.0;
    c.number("weight", w);
    c.number("rate_bps", r);
    if (!(w >= 0.0)) throw ConfigError(c.child_path("weight"), "must be >= 0");
    if (!(r > 0.0)) throw ConfigError(c.child_path("rate_bps"), "must be positive");
    c.finish();
    in.pixel_rates.emplace_back(w, r);
  }
  top.number("horizon_s", in.horizon_s);
  if (!(in.horizon_s > 0.0)) throw ConfigError("horizon_s", "must be positive");
  top.integer("seed", in.seed);
  top.number("warmup_fraction", in.warmup_fraction);
  if (!(in.warmup_fraction >= 0.0 && in.warmup_fraction < 1.0)) {
    throw ConfigError("warmup_fraction", "must be in [0, 1)");
  }
  top.finish();
  return in;
}

std::string oracle_report_json(const QueueOracleInput& input, const QueueOracleResult& r) {
  const double demand = input.arrival_rate * input.mean_volume_bits;
  const double theta = r.load;
  json theory = {{"load", theta}, {"busy_fraction", std::min(theta, 1.0)}};
  if (theta < 1.0) {
    theory["mean_users"] = theta / (1.0 - theta);
    theory["throughput_bps"] = r.critical_traffic - demand;
  } else {
    theory["mean_users"] = "inf";
    theory["throughput_bps"] = 0.0;
  }
  json out = {
      {"traffic_demand_bps", demand},
      {"critical_traffic_bps", r.critical_traffic},
      {"rate_classes", r.n_classes},
      {"stationary", r.stationary},
      {"departures", r.departures},
      {"empirical",
       {{"mean_users", r.empirical_mean_users},
        {"busy_fraction", r.empirical_busy_fraction},
        {"throughput_bps", r.empirical_mean_throughput}}},
      {"theory", theory},
  };
  return out.dump(2) + "\n";
}

std::vector<MeanCellRow> run_mean_cell(const RunConfig& config) {
  const auto& sc = config.scenario;
  OriginSamplingOptions opt;
  opt.radius_km = config.estimation.origin_radius_km;
  opt.n_samples = config.estimation.origin_samples;
  const SinrSamples samples = sample_origin_sinr(sc.intensity, sc.path_loss, sc.shadowing, sc.budget, opt,
                                                 derive_seed(config.estimation.base_seed, stream::origin));
  std::vector<MeanCellRow> rows;
  const auto densities = config.traffic_densities();
  for (double rho : densities) {
    for (auto m : config.estimation.models) {
      MeanCellRow row;
      row.rho_per_cell_bps = rho / sc.intensity;
      row.estimate = m == InterferenceModel::full
                         ? mean_cell_full(rho, sc.intensity, samples, sc.rate, sc.solver.sinr_cap_db)
                         : solve_mean_cell_equation(rho, sc.intensity, samples, sc.rate, sc.budget.pilot_fraction,
                                                    1e-9, sc.solver.sinr_cap_db);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_mean_cell_csv(std::ostream& out, const std::vector<MeanCellRow>& rows) {
  out << "# units: rho_per_cell_bps, rho_c_bar_bps, r_bar_bps in bit/s; theta_bar, n_bar dimensionless; "
         "theta_bar_se standard error over sample batches\n";
  out << kMeanCellHeader << '\n';
  for (const auto& r : rows) {
    const auto& e = r.estimate;
    out << format_double(r.rho_per_cell_bps) << ',' << model_name(e.model) << ',' << format_double(e.theta_bar)
        << ',' << format_double(e.theta_bar_std_error) << ',' << format_double(e.rho_c_bar) << ','
        << format_double(e.n_bar) << ',' << format_double(e.r_bar) << '\n';
  }
}

}  // namespace cellqos::cli
