#pragma once

// Run configuration, sweep persistence and the command implementations
// behind the cellqos executable.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cellqos/estimators.hpp"

namespace cellqos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonConvergence = 3;

// Invalid configuration; path names the offending field, e.g.
// "radio.pilot_fraction".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct EstimationOptions {
  std::size_t n_realizations = 30;
  std::uint64_t base_seed = 1;
  std::vector<InterferenceModel> models{InterferenceModel::full, InterferenceModel::weighted};
  // Origin sampling used by the mean-cell command.
  std::size_t origin_samples = 100000;
  double origin_radius_km = 8.0;

  friend bool operator==(const EstimationOptions&, const EstimationOptions&) = default;
};

struct OutputOptions {
  std::string directory = "out";
  bool dat = true;
  bool gnuplot = true;
  bool cell_csv = false;
  bool raster_csv = false;
  std::size_t artifact_realizations = 1;  // realizations with cell/raster files

  friend bool operator==(const OutputOptions&, const OutputOptions&) = default;
};

struct RunConfig {
  Scenario scenario;
  std::vector<double> rho_per_cell_kbps;
  double mean_volume_bits = 1e6;
  EstimationOptions estimation;
  OutputOptions outputs;

  // Per-km^2 densities: rho per cell times the station intensity.
  std::vector<double> traffic_densities() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

// Reference network: 4.62 stations/km^2 on a 2.63 km disc, shadowing on,
// both interference models, 30 realizations.
RunConfig default_config();

const char* model_name(InterferenceModel model);

// Sweep CSV, one row per (rho, model) point that could be estimated.
inline constexpr std::string_view kSweepHeader =
    "rho_per_cell_bps,model,mean_load,load_std,stable_fraction,n0_over_pis,n_std,r0_bps,r0_std,"
    "theta_bar,n_bar,r_bar_bps";
void write_sweep_csv(std::ostream& out, const SweepResult& result, double intensity);

inline constexpr std::string_view kCellHeader =
    "station_id,x_km,y_km,area_km2,rho_bps,rho_c_bps,theta,r_bps,n_users,p_busy";
void write_cell_csv(std::ostream& out, const std::vector<Point>& stations, const CellMetrics& metrics);

struct SweepRunReport {
  SweepResult result;
  std::vector<std::filesystem::path> files;
  bool converged = true;
};

// Runs the sweep and writes every requested artifact under the output
// directory.
SweepRunReport run_sweep_command(const RunConfig& config, std::ostream& log);

// Model curve read back from a sweep CSV.
struct SweepCurve {
  std::vector<double> rho_per_cell;  // bit/s, increasing
  std::vector<double> load;
  std::vector<double> users;
  std::vector<double> throughput;
  std::vector<double> theta_bar;
  std::vector<double> n_bar;
  std::vector<double> r_bar;
};
SweepCurve read_sweep_curve(std::istream& in, InterferenceModel model);

struct MeasurementRow {
  std::string hour_label;
  double traffic_demand_per_cell_bps = 0.0;
  double mean_users = 0.0;
  double busy_fraction = 0.0;
  double throughput_bps = 0.0;
};
std::vector<MeasurementRow> read_measurements(std::istream& in);

struct ComparisonRow {
  std::string hour_label;
  double traffic_demand_per_cell_bps = 0.0;
  // (measured - model) / model against the typical-cell curves.
  double load_deviation = 0.0;
  double users_deviation = 0.0;
  double throughput_deviation = 0.0;
  // Same against the mean-cell curves.
  double mean_cell_load_deviation = 0.0;
  double mean_cell_users_deviation = 0.0;
  double mean_cell_throughput_deviation = 0.0;
};

struct DeviationSummary {
  std::string metric;
  std::size_t count = 0;
  double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::vector<std::string> skipped;  // notices for rows outside the sweep
  std::vector<DeviationSummary> summary;
};
ComparisonReport compare_measurements(const SweepCurve& curve, const std::vector<MeasurementRow>& rows);
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);
void write_comparison_summary(std::ostream& out, const ComparisonReport& report);

struct DiagnoseOptions {
  std::optional<Window> window;  // bounding box of the points when absent
  int n_simulations = 99;
  std::uint64_t seed = 1;
  std::size_t n_radii = 50;
};
struct DiagnoseReport {
  EnvelopeTest test;
  Window window = Window::rectangle(0, 0, 1, 1);
  std::size_t n_points = 0;
};
DiagnoseReport diagnose_pattern(const std::vector<Point>& points, const DiagnoseOptions& options);
void write_diagnose_csv(std::ostream& out, const DiagnoseReport& report);

// Single-cell queue oracle from a JSON cell description.
QueueOracleInput parse_cell_spec(std::string_view json_text);
std::string oracle_report_json(const QueueOracleInput& input, const QueueOracleResult& result);

struct MeanCellRow {
  double rho_per_cell_bps = 0.0;
  MeanCellEstimate estimate;
};
// Mean cell from origin SINR samples for every configured rho and model.
std::vector<MeanCellRow> run_mean_cell(const RunConfig& config);
inline constexpr std::string_view kMeanCellHeader =
    "rho_per_cell_bps,model,theta_bar,theta_bar_se,rho_c_bar_bps,n_bar,r_bar_bps";
void write_mean_cell_csv(std::ostream& out, const std::vector<MeanCellRow>& rows);

}  // namespace cellqos::cli
