#include <cmath>
#include <fstream>
#include <sstream>

#include "cellqos/cli.hpp"
#include "json_section.hpp"

namespace cellqos::cli {

using nlohmann::json;
using detail::Section;

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

namespace {

InterferenceModel parse_model(const std::string& name, const std::string& path) {
  if (name == "full") return InterferenceModel::full;
  if (name == "weighted") return InterferenceModel::weighted;
  throw ConfigError(path, "expected \"full\" or \"weighted\"");
}

// Runs a validate() and reattaches the failure to a config path.
template <typename F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(path, ex.what());
  }
}

Window parse_window(Section s) {
  std::string kind = "disc";
  s.string("kind", kind);
  Window w = Window::disc({0.0, 0.0}, 1.0);
  if (kind == "disc") {
    double cx = 0.0, cy = 0.0, r = 2.63;
    if (const json* c = s.find("center_km")) {
      if (!c->is_array() || c->size() != 2 || !(*c)[0].is_number() || !(*c)[1].is_number()) {
        throw ConfigError(s.child_path("center_km"), "expected [x, y]");
      }
      cx = (*c)[0].get<double>();
      cy = (*c)[1].get<double>();
    }
    s.number("radius_km", r);
    checked(s.child_path("radius_km"), [&] { w = Window::disc({cx, cy}, r); });
  } else if (kind == "rectangle") {
    double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
    s.number("x0_km", x0);
    s.number("y0_km", y0);
    s.number("x1_km", x1);
    s.number("y1_km", y1);
    checked(s.child_path("x1_km"), [&] { w = Window::rectangle(x0, y0, x1, y1); });
  } else {
    throw ConfigError(s.child_path("kind"), "expected \"disc\" or \"rectangle\"");
  }
  s.finish();
  return w;
}

json window_json(const Window& w) {
  if (w.kind() == Window::Kind::disc) {
    return {{"kind", "disc"}, {"center_km", {w.center().x, w.center().y}}, {"radius_km", w.radius()}};
  }
  return {{"kind", "rectangle"}, {"x0_km", w.x0()}, {"y0_km", w.y0()}, {"x1_km", w.x1()}, {"y1_km", w.y1()}};
}

}  // namespace

std::vector<double> RunConfig::traffic_densities() const {
  std::vector<double> out;
  out.reserve(rho_per_cell_kbps.size());
  for (double kbps : rho_per_cell_kbps) out.push_back(kbps * 1e3 * scenario.intensity);
  return out;
}

const char* model_name(InterferenceModel model) {
  return model == InterferenceModel::full ? "full" : "weighted";
}

RunConfig default_config() {
  RunConfig c;
  c.scenario.shadowing.enabled = true;
  c.rho_per_cell_kbps = {50, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
  return c;
}

RunConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw ConfigError("", std::string("malformed JSON: ") + ex.what());
  }
  RunConfig c;
  Section top(root, "");

  {
    Section g = top.section("geometry");
    if (g.has("window")) c.scenario.window = parse_window(g.section("window"));
    g.number("intensity_per_km2", c.scenario.intensity);
    std::string pattern = "poisson";
    g.string("pattern", pattern);
    if (pattern == "poisson") {
      c.scenario.pattern = PatternType::poisson;
    } else if (pattern == "hexagonal") {
      c.scenario.pattern = PatternType::hexagonal;
    } else {
      throw ConfigError(g.child_path("pattern"), "expected \"poisson\" or \"hexagonal\"");
    }
    if (!(c.scenario.intensity > 0.0)) throw ConfigError(g.child_path("intensity_per_km2"), "must be positive");
    g.finish();
  }
  {
    Section p = top.section("propagation");
    p.number("k_per_km", c.scenario.path_loss.k_per_km);
    p.number("beta", c.scenario.path_loss.beta);
    checked(p.child_path("k_per_km"), [&] { c.scenario.path_loss.validate(); });
    Section sh = p.section("shadowing");
    sh.boolean("enabled", c.scenario.shadowing.enabled);
    sh.number("sigma_db", c.scenario.shadowing.sigma_db);
    sh.number("corr_dist_km", c.scenario.shadowing.corr_dist_km);
    checked(sh.child_path("sigma_db"), [&] { c.scenario.shadowing.validate(); });
    sh.finish();
    p.finish();
  }
  {
    Section r = top.section("radio");
    r.number("tx_power_dbm", c.scenario.budget.tx_power_dbm);
    r.number("noise_dbm", c.scenario.budget.noise_dbm);
    r.number("pilot_fraction", c.scenario.budget.pilot_fraction);
    checked(r.child_path("pilot_fraction"), [&] { c.scenario.budget.validate(); });
    std::string mode = "rayleigh_ergodic";
    r.string("rate_mode", mode);
    if (mode == "rayleigh_ergodic") {
      c.scenario.rate.mode = RateMode::rayleigh_ergodic;
    } else if (mode == "awgn") {
      c.scenario.rate.mode = RateMode::awgn;
    } else {
      throw ConfigError(r.child_path("rate_mode"), "expected \"rayleigh_ergodic\" or \"awgn\"");
    }
    r.number("bandwidth_hz", c.scenario.rate.bandwidth_hz);
    r.number("efficiency", c.scenario.rate.efficiency);
    checked(r.child_path("efficiency"), [&] { c.scenario.rate.validate(); });
    r.finish();
  }
  {
    Section t = top.section("traffic");
    c.rho_per_cell_kbps.clear();
    if (const json* rho = t.find("rho_per_cell_kbps")) {
      const std::string path = t.child_path("rho_per_cell_kbps");
      if (!rho->is_array()) throw ConfigError(path, "expected a list of numbers");
      for (const auto& v : *rho) {
        if (!v.is_number()) throw ConfigError(path, "expected a list of numbers");
        c.rho_per_cell_kbps.push_back(v.get<double>());
      }
      for (std::size_t i = 0; i < c.rho_per_cell_kbps.size(); ++i) {
        const double x = c.rho_per_cell_kbps[i];
        if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(path, "values must be positive");
        if (i > 0 && !(x > c.rho_per_cell_kbps[i - 1])) {
          throw ConfigError(path, "values must be strictly increasing");
        }
      }
    } else {
      throw ConfigError(t.child_path("rho_per_cell_kbps"), "missing");
    }
    if (c.rho_per_cell_kbps.empty()) throw ConfigError(t.child_path("rho_per_cell_kbps"), "must not be empty");
    t.number("mean_volume_bits", c.mean_volume_bits);
    if (!(c.mean_volume_bits > 0.0)) throw ConfigError(t.child_path("mean_volume_bits"), "must be positive");
    t.finish();
  }
  {
    Section s = top.section("solver");
    s.number("tol", c.scenario.solver.tol);
    s.integer("max_iter", c.scenario.solver.max_iter);
    s.number("sinr_cap_db", c.scenario.solver.sinr_cap_db);
    s.number("pixel_size_km", c.scenario.pixel_size_km);
    s.number("guard_margin_km", c.scenario.guard_margin_km);
    if (!(c.scenario.solver.tol > 0.0)) throw ConfigError(s.child_path("tol"), "must be positive");
    if (c.scenario.solver.max_iter < 1) throw ConfigError(s.child_path("max_iter"), "must be >= 1");
    if (!(c.scenario.pixel_size_km > 0.0)) throw ConfigError(s.child_path("pixel_size_km"), "must be positive");
    if (!(c.scenario.guard_margin_km >= 0.0)) throw ConfigError(s.child_path("guard_margin_km"), "must be >= 0");
    s.finish();
  }
  {
    Section e = top.section("estimation");
    e.integer("n_realizations", c.estimation.n_realizations);
    e.integer("base_seed", c.estimation.base_seed);
    if (const json* m = e.find("models")) {
      const std::string path = e.child_path("models");
      if (!m->is_array() || m->empty()) throw ConfigError(path, "expected a non-empty list");
      c.estimation.models.clear();
      for (const auto& v : *m) {
        if (!v.is_string()) throw ConfigError(path, "expected model names");
        const InterferenceModel model = parse_model(v.get<std::string>(), path);
        for (auto seen : c.estimation.models) {
          if (seen == model) throw ConfigError(path, "duplicate model");
        }
        c.estimation.models.push_back(model);
      }
    }
    e.integer("origin_samples", c.estimation.origin_samples);
    e.number("origin_radius_km", c.estimation.origin_radius_km);
    if (c.estimation.n_realizations < 2) throw ConfigError(e.child_path("n_realizations"), "must be >= 2");
    if (c.estimation.origin_samples < 100) throw ConfigError(e.child_path("origin_samples"), "must be >= 100");
    if (!(c.estimation.origin_radius_km > 0.0)) {
      throw ConfigError(e.child_path("origin_radius_km"), "must be positive");
    }
    e.finish();
  }
  {
    Section o = top.section("outputs");
    o.string("directory", c.outputs.directory);
    o.boolean("dat", c.outputs.dat);
    o.boolean("gnuplot", c.outputs.gnuplot);
    o.boolean("cell_csv", c.outputs.cell_csv);
    o.boolean("raster_csv", c.outputs.raster_csv);
    o.integer("artifact_realizations", c.outputs.artifact_realizations);
    if (c.outputs.directory.empty()) throw ConfigError(o.child_path("directory"), "must not be empty");
    o.finish();
  }
  top.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& c) {
  const auto& sc = c.scenario;
  json models = json::array();
  for (auto m : c.estimation.models) models.push_back(model_name(m));
  json root = {
      {"geometry",
       {{"window", window_json(sc.window)},
        {"intensity_per_km2", sc.intensity},
        {"pattern", sc.pattern == PatternType::poisson ? "poisson" : "hexagonal"}}},
      {"propagation",
       {{"k_per_km", sc.path_loss.k_per_km},
        {"beta", sc.path_loss.beta},
        {"shadowing",
         {{"enabled", sc.shadowing.enabled},
          {"sigma_db", sc.shadowing.sigma_db},
          {"corr_dist_km", sc.shadowing.corr_dist_km}}}}},
      {"radio",
       {{"tx_power_dbm", sc.budget.tx_power_dbm},
        {"noise_dbm", sc.budget.noise_dbm},
        {"pilot_fraction", sc.budget.pilot_fraction},
        {"rate_mode", sc.rate.mode == RateMode::awgn ? "awgn" : "rayleigh_ergodic"},
        {"bandwidth_hz", sc.rate.bandwidth_hz},
        {"efficiency", sc.rate.efficiency}}},
      {"traffic", {{"rho_per_cell_kbps", c.rho_per_cell_kbps}, {"mean_volume_bits", c.mean_volume_bits}}},
      {"solver",
       {{"tol", sc.solver.tol},
        {"max_iter", sc.solver.max_iter},
        {"sinr_cap_db", sc.solver.sinr_cap_db},
        {"pixel_size_km", sc.pixel_size_km},
        {"guard_margin_km", sc.guard_margin_km}}},
      {"estimation",
       {{"n_realizations", c.estimation.n_realizations},
        {"base_seed", c.estimation.base_seed},
        {"models", models},
        {"origin_samples", c.estimation.origin_samples},
        {"origin_radius_km", c.estimation.origin_radius_km}}},
      {"outputs",
       {{"directory", c.outputs.directory},
        {"dat", c.outputs.dat},
        {"gnuplot", c.outputs.gnuplot},
        {"cell_csv", c.outputs.cell_csv},
        {"raster_csv", c.outputs.raster_csv},
        {"artifact_realizations", c.outputs.artifact_realizations}}},
  };
  return root.dump(2) + "\n";
}

}  // namespace cellqos::cli
