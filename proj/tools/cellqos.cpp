// cellqos: cellular network QoS sweeps and diagnostics.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cellqos/cli.hpp"
#include "cellqos/csv.hpp"

namespace {

using namespace cellqos;
using namespace cellqos::cli;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path);
  return in;
}

// Output file when a path is given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

Window parse_window_option(const std::vector<double>& disc, const std::vector<double>& rect) {
  if (!disc.empty()) return Window::disc({disc[0], disc[1]}, disc[2]);
  return Window::rectangle(rect[0], rect[1], rect[2], rect[3]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cellular network QoS: cell loads, stability and user throughput"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* sweep = app.add_subcommand("sweep", "Typical-cell and mean-cell sweep over traffic demand");
  sweep->add_option("config", config_path, "JSON run configuration")->required();
  sweep->add_option("--out", out_dir, "Override outputs.directory");

  std::string sweep_csv, meas_csv, model = "weighted", compare_out, summary_out;
  auto* compare = app.add_subcommand("compare", "Compare measurements against a sweep");
  compare->add_option("sweep_csv", sweep_csv, "sweep.csv from the sweep command")->required();
  compare->add_option("measurements_csv", meas_csv, "Measurement table")->required();
  compare->add_option("--model", model, "Interference model curve to compare against")
      ->check(CLI::IsMember({"full", "weighted"}));
  compare->add_option("--out", compare_out, "Per-row report CSV (stdout when omitted)");
  compare->add_option("--summary", summary_out, "Summary file (stderr when omitted)");

  std::string stations_csv, diagnose_out;
  std::vector<double> disc, rect;
  DiagnoseOptions diag;
  auto* diagnose = app.add_subcommand("diagnose", "Ripley L-function against a Poisson envelope");
  diagnose->add_option("stations_csv", stations_csv, "Station coordinates x_km,y_km")->required();
  auto* disc_opt = diagnose->add_option("--disc", disc, "Disc window cx,cy,radius (km)")
                       ->expected(3)->delimiter(',');
  diagnose->add_option("--rect", rect, "Rectangle window x0,y0,x1,y1 (km)")
      ->expected(4)->delimiter(',')->excludes(disc_opt);
  diagnose->add_option("--simulations", diag.n_simulations, "Poisson simulations in the envelope")
      ->check(CLI::PositiveNumber);
  diagnose->add_option("--seed", diag.seed, "Seed of the envelope simulations");
  diagnose->add_option("--radii", diag.n_radii, "Number of radii")->check(CLI::PositiveNumber);
  diagnose->add_option("--out", diagnose_out, "Report CSV (stdout when omitted)");

  std::string cell_spec;
  auto* oracle = app.add_subcommand("oracle", "Discrete-event processor-sharing simulation of one cell");
  oracle->add_option("cell_spec", cell_spec, "JSON cell description")->required();

  std::string mean_out;
  auto* mean_cell = app.add_subcommand("mean-cell", "Mean-cell model from origin SINR samples");
  mean_cell->add_option("config", config_path, "JSON run configuration")->required();
  mean_cell->add_option("--out", mean_out, "CSV output (stdout when omitted)");

  app.add_subcommand("default-config", "Print the reference configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep) {
      RunConfig config = load_config(config_path);
      if (!out_dir.empty()) config.outputs.directory = out_dir;
      const auto report = run_sweep_command(config, std::cerr);
      if (!report.converged) {
        std::cerr << "error: the cell-load iteration did not converge on every realization; "
                     "outputs are kept, see warnings.txt\n";
        return kExitNonConvergence;
      }
    } else if (*compare) {
      auto sweep_in = open_input(sweep_csv);
      auto meas_in = open_input(meas_csv);
      const SweepCurve curve =
          read_sweep_curve(sweep_in, model == "full" ? InterferenceModel::full : InterferenceModel::weighted);
      const ComparisonReport report = compare_measurements(curve, read_measurements(meas_in));
      Sink rows(compare_out);
      write_comparison_csv(rows.stream(), report);
      if (summary_out.empty()) {
        write_comparison_summary(std::cerr, report);
      } else {
        Sink summary(summary_out);
        write_comparison_summary(summary.stream(), report);
      }
    } else if (*diagnose) {
      if (!disc.empty() || !rect.empty()) diag.window = parse_window_option(disc, rect);
      auto in = open_input(stations_csv);
      const DiagnoseReport report = diagnose_pattern(read_points_csv(in), diag);
      Sink out(diagnose_out);
      write_diagnose_csv(out.stream(), report);
      std::cerr << (report.test.inside ? "inside" : "outside") << " the Poisson envelope (p = "
                << report.test.p_value << ")\n";
    } else if (*oracle) {
      auto in = open_input(cell_spec);
      std::ostringstream text;
      text << in.rdbuf();
      const QueueOracleInput input = parse_cell_spec(text.str());
      const QueueOracleResult result = ps_queue_oracle(input);
      std::cout << oracle_report_json(input, result);
      if (!result.stationary) std::cerr << "warning: cell load >= 1, the queue is not stationary\n";
    } else if (*mean_cell) {
      const RunConfig config = load_config(config_path);
      const auto rows = run_mean_cell(config);
      Sink out(mean_out);
      write_mean_cell_csv(out.stream(), rows);
    } else {
      std::cout << serialize_config(default_config());
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CsvError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
