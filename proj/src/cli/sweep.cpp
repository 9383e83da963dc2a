#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cellqos/cli.hpp"
#include "cellqos/csv.hpp"

namespace cellqos::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path, std::vector<fs::path>& files) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  files.push_back(path);
  return out;
}

std::string rho_tag(std::size_t index) {
  std::ostringstream s;
  s << "rho" << index;
  return s.str();
}

struct DatSeries {
  const char* name;
  const char* what;
  double (*y)(const SweepPoint&);
  double (*err)(const SweepPoint&);
};

const DatSeries kDatSeries[] = {
    {"load", "mean typical-cell load; yerr std over realizations",
     [](const SweepPoint& p) { return p.typical.mean_load; },
     [](const SweepPoint& p) { return p.typical.load_std; }},
    {"theta_bar", "mean-cell load; yerr standard error",
     [](const SweepPoint& p) { return p.mean_cell.theta_bar; },
     [](const SweepPoint& p) { return p.mean_cell.theta_bar_std_error; }},
    {"stable_fraction", "stable area fraction; yerr std over realizations",
     [](const SweepPoint& p) { return p.typical.stable_fraction; },
     [](const SweepPoint& p) { return p.typical.stable_fraction_std; }},
    {"users", "N0/pi_S users per stable cell; yerr std over realizations",
     [](const SweepPoint& p) { return p.typical.n0_over_pis; },
     [](const SweepPoint& p) { return p.typical.n_std; }},
    {"n_bar", "mean-cell users",
     [](const SweepPoint& p) { return p.mean_cell.n_bar; }, [](const SweepPoint&) { return 0.0; }},
    {"throughput", "r0 user throughput (bit/s); yerr std over realizations",
     [](const SweepPoint& p) { return p.typical.r0; },
     [](const SweepPoint& p) { return p.typical.r0_std; }},
    {"r_bar", "mean-cell user throughput (bit/s)",
     [](const SweepPoint& p) { return p.mean_cell.r_bar; }, [](const SweepPoint&) { return 0.0; }},
};

void write_dat(std::ostream& out, const SweepResult& result, InterferenceModel model, const DatSeries& s,
               double intensity) {
  out << "# x: traffic demand per cell (bit/s); y: " << s.what << "; model " << model_name(model) << "\n";
  for (const auto& p : result.points) {
    if (p.model != model || !p.error.empty()) continue;
    out << format_double(p.traffic_density / intensity) << ' ' << format_double(s.y(p)) << ' '
        << format_double(s.err(p)) << '\n';
  }
}

void write_gnuplot(std::ostream& out, const std::vector<InterferenceModel>& models) {
  struct Figure {
    const char* file;
    const char* ylabel;
    const char* typical;
    const char* mean;
  };
  const Figure figures[] = {
      {"load", "cell load", "load", "theta_bar"},
      {"stable_fraction", "stable fraction", "stable_fraction", nullptr},
      {"users", "users per cell", "users", "n_bar"},
      {"throughput", "user throughput [kbit/s]", "throughput", "r_bar"},
  };
  out << "# gnuplot script; run from the output directory.\n";
  out << "set terminal pngcairo size 800,600\n";
  out << "set xlabel 'traffic demand per cell [kbit/s]'\n";
  out << "set key top left\nset grid\n";
  for (const auto& f : figures) {
    const bool rate = std::string_view(f.file) == "throughput";
    const char* scale = rate ? "/1000" : "";
    out << "\nset output 'fig_" << f.file << ".png'\n";
    out << "set ylabel '" << f.ylabel << "'\n";
    out << "plot ";
    bool first = true;
    for (auto m : models) {
      if (!first) out << ", \\\n     ";
      first = false;
      out << "'" << f.typical << "_" << model_name(m) << ".dat' using ($1/1000):($2" << scale << "):($3"
          << scale << ") with yerrorlines title 'typical cell, " << model_name(m) << "'";
      if (f.mean) {
        out << ", \\\n     '" << f.mean << "_" << model_name(m) << ".dat' using ($1/1000):($2" << scale
            << ") with lines title 'mean cell, " << model_name(m) << "'";
      }
    }
    out << "\n";
  }
}

void write_raster(std::ostream& out, const RealizationView& v, const LinkBudget& budget, const RateFunction& rf,
                  double sinr_cap_db) {
  std::optional<std::vector<double>> busy;
  if (v.model == InterferenceModel::weighted) busy = v.metrics->busy_prob;
  const SinrField field =
      busy ? sinr_field(*v.map, *v.partition, budget, std::span<const double>(*busy), sinr_cap_db)
           : sinr_field(*v.map, *v.partition, budget, std::nullopt, sinr_cap_db);
  const Grid& grid = v.map->grid();
  out << "# units: x_km,y_km km; sinr_db dB; rate_bps bit/s\n";
  out << "x_km,y_km,sinr_db,rate_bps\n";
  for (std::size_t p = 0; p < grid.size(); ++p) {
    out << format_double(grid.xs()[p]) << ',' << format_double(grid.ys()[p]) << ','
        << format_double(linear_to_db(field.sinr[p])) << ',' << format_double(peak_rate(field.sinr[p], rf))
        << '\n';
  }
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result, double intensity) {
  out << "# units: rho_per_cell_bps, r0_bps, r0_std, r_bar_bps in bit/s; loads, fractions and user "
         "counts dimensionless; *_std are standard deviations over realizations\n";
  out << kSweepHeader << '\n';
  for (const auto& p : result.points) {
    if (!p.error.empty()) continue;
    const auto& t = p.typical;
    const auto& m = p.mean_cell;
    out << format_double(p.traffic_density / intensity) << ',' << model_name(p.model) << ','
        << format_double(t.mean_load) << ',' << format_double(t.load_std) << ','
        << format_double(t.stable_fraction) << ',' << format_double(t.n0_over_pis) << ','
        << format_double(t.n_std) << ',' << format_double(t.r0) << ',' << format_double(t.r0_std) << ','
        << format_double(m.theta_bar) << ',' << format_double(m.n_bar) << ',' << format_double(m.r_bar)
        << '\n';
  }
}

void write_cell_csv(std::ostream& out, const std::vector<Point>& stations, const CellMetrics& m) {
  out << "# units: x_km,y_km km; area_km2 km^2; rho_bps,rho_c_bps,r_bps bit/s; theta,n_users,p_busy "
         "dimensionless\n";
  out << kCellHeader << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << i << ',' << format_double(stations[i].x) << ',' << format_double(stations[i].y) << ','
        << format_double(m.area[i]) << ',' << format_double(m.traffic_demand[i]) << ','
        << format_double(m.critical_traffic[i]) << ',' << format_double(m.load[i]) << ','
        << format_double(m.throughput[i]) << ',' << format_double(m.mean_users[i]) << ','
        << format_double(m.busy_prob[i]) << '\n';
  }
}

SweepRunReport run_sweep_command(const RunConfig& config, std::ostream& log) {
  const fs::path dir(config.outputs.directory);
  fs::create_directories(dir);
  SweepRunReport report;
  const auto densities = config.traffic_densities();
  const auto& sc = config.scenario;

  RealizationObserver observer;
  if ((config.outputs.cell_csv || config.outputs.raster_csv) && config.outputs.artifact_realizations > 0) {
    observer = [&](const RealizationView& v) {
      if (v.index >= config.outputs.artifact_realizations) return;
      std::size_t ip = 0;
      while (ip + 1 < densities.size() && densities[ip] != v.traffic_density) ++ip;
      const std::string suffix =
          std::string(model_name(v.model)) + "_" + rho_tag(ip) + "_r" + std::to_string(v.index) + ".csv";
      if (config.outputs.cell_csv) {
        if (ip == 0 && v.model == config.estimation.models.front()) {
          auto out = open_output(dir / ("stations_r" + std::to_string(v.index) + ".csv"), report.files);
          BsPattern pattern;
          pattern.points = v.map->stations();
          write_pattern_csv(out, pattern);
        }
        auto out = open_output(dir / ("cells_" + suffix), report.files);
        write_cell_csv(out, v.map->stations(), *v.metrics);
      }
      if (config.outputs.raster_csv) {
        auto out = open_output(dir / ("raster_" + suffix), report.files);
        write_raster(out, v, sc.budget, sc.rate, sc.solver.sinr_cap_db);
      }
    };
  }

  report.result = run_sweep(sc, densities, config.estimation.models, config.estimation.n_realizations,
                            config.estimation.base_seed, observer);
  const SweepResult& res = report.result;

  {
    auto out = open_output(dir / "sweep.csv", report.files);
    write_sweep_csv(out, res, sc.intensity);
  }
  if (config.outputs.dat) {
    for (auto m : config.estimation.models) {
      for (const auto& s : kDatSeries) {
        auto out = open_output(dir / (std::string(s.name) + "_" + model_name(m) + ".dat"), report.files);
        write_dat(out, res, m, s, sc.intensity);
      }
    }
  }
  if (config.outputs.gnuplot) {
    auto out = open_output(dir / "plots.gp", report.files);
    write_gnuplot(out, config.estimation.models);
  }

  std::vector<std::string> notes = res.warnings;
  for (const auto& p : res.points) {
    if (!p.error.empty()) {
      std::ostringstream msg;
      msg << "point rho_per_cell " << format_double(p.traffic_density / sc.intensity) << " bit/s ("
          << model_name(p.model) << ") failed: " << p.error;
      notes.push_back(msg.str());
    }
  }
  {
    auto out = open_output(dir / "warnings.txt", report.files);
    for (const auto& n : notes) {
      out << n << '\n';
      log << "warning: " << n << '\n';
    }
  }
  report.converged = res.all_converged();
  log << "sweep: " << res.points.size() << " points over " << res.n_realizations << " realizations written to "
      << dir.string() << '\n';
  return report;
}

}  // namespace cellqos::cli
