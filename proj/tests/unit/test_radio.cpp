#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>

#include "cellqos/radio.hpp"

using namespace cellqos;

namespace {

// E[log2(1 + sinr H)], H ~ Exp(1), by adaptive double-exponential quadrature.
double ergodic_oracle(double sinr) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [sinr](double t) { return std::exp(-t) * std::log1p(sinr * t) / std::numbers::ln2; };
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return v;
}

PropagationMap map_for(const std::vector<Point>& stations, const Grid& g) {
  BsPattern p;
  p.points = stations;
  return build_propagation_map(p, g, {}, {}, 0);
}

}  // namespace

TEST_CASE("dBm conversions") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(58.0) == doctest::Approx(std::pow(10.0, 2.8)));
  CHECK(dbm_to_watts(-96.0) == doctest::Approx(std::pow(10.0, -12.6)));
  CHECK(watts_to_dbm(dbm_to_watts(-17.5)) == doctest::Approx(-17.5));
  CHECK(linear_to_db(db_to_linear(60.0)) == doctest::Approx(60.0));
  const LinkBudget b;
  CHECK(b.noise_over_power() == doctest::Approx(std::pow(10.0, -15.4)));
  CHECK_THROWS_AS((LinkBudget{58, -96, 1.5}.validate()), std::invalid_argument);
}

TEST_CASE("Gauss-Laguerre rule integrates polynomials exactly") {
  const auto& rule = gauss_laguerre_rule();
  double factorial = 1.0;
  for (int k = 0; k <= 20; ++k) {
    if (k > 0) factorial *= k;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
    CHECK(sum == doctest::Approx(factorial).epsilon(1e-11));
  }
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
  CHECK(rule.nodes.front() == doctest::Approx(0.0444893658).epsilon(1e-8));
  CHECK(rule.nodes.back() == doctest::Approx(111.7513980979).epsilon(1e-9));
}

TEST_CASE("peak rate: fixed values") {
  RateFunction awgn{RateMode::awgn, 5e6, 0.3};
  RateFunction ray{RateMode::rayleigh_ergodic, 5e6, 0.3};
  CHECK(peak_rate(0.0, awgn) == 0.0);
  CHECK(peak_rate(0.0, ray) == 0.0);
  CHECK(peak_rate(1.0, awgn) == doctest::Approx(1.5e6).epsilon(1e-12));
  // E[log2(1 + H)] = e E1(1) / ln 2.
  const RateFunction unit{RateMode::rayleigh_ergodic, 1.0, 1.0};
  CHECK(peak_rate(1.0, unit) == doctest::Approx(0.86034738227088595).epsilon(1e-9));
  CHECK(peak_rate(1.0, unit) == doctest::Approx(ergodic_oracle(1.0)).epsilon(1e-6));
  CHECK_THROWS_AS(peak_rate(-1.0, ray), std::invalid_argument);
  CHECK_THROWS_AS(peak_rate(std::nan(""), ray), std::invalid_argument);
  CHECK_THROWS_AS((RateFunction{RateMode::awgn, 0.0, 0.3}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((RateFunction{RateMode::awgn, 5e6, 1.3}.validate()), std::invalid_argument);
}

TEST_CASE("ergodic rate matches adaptive quadrature across the SINR range") {
  const RateFunction unit{RateMode::rayleigh_ergodic, 1.0, 1.0};
  double worst = 0.0;
  for (double s : log_grid(1e-4, 1e6, 201)) {
    const double ref = ergodic_oracle(s);
    worst = std::max(worst, std::abs(peak_rate(s, unit) - ref) / ref);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("peak rate is increasing and concave, ergodic below AWGN") {
  for (RateMode mode : {RateMode::awgn, RateMode::rayleigh_ergodic}) {
    const RateFunction rf{mode, 5e6, 0.3};
    const auto grid = log_grid(1e-4, 1e6, 100);
    std::vector<double> r;
    for (double s : grid) r.push_back(peak_rate(s, rf));
    double prev_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < grid.size(); ++i) {
      REQUIRE(r[i] > r[i - 1]);
      const double slope = (r[i] - r[i - 1]) / (grid[i] - grid[i - 1]);
      REQUIRE(slope < prev_slope);
      prev_slope = slope;
    }
  }
  const RateFunction awgn{RateMode::awgn, 5e6, 0.3};
  const RateFunction ray{RateMode::rayleigh_ergodic, 5e6, 0.3};
  for (double s : log_grid(1e-4, 1e6, 100)) CHECK(peak_rate(s, ray) < peak_rate(s, awgn));
}

TEST_CASE("partition with one station covers the window") {
  const Grid g(Window::disc({0, 0}, 0.5), 0.02);
  const auto part = partition_cells(map_for({{0.1, 0.2}}, g));
  CHECK(part.n_stations() == 1);
  CHECK(part.cell_area[0] == doctest::Approx(g.covered_area()));
  for (auto s : part.serving) REQUIRE(s == 0);
}

TEST_CASE("partition of two stations is the perpendicular bisector") {
  const Grid g(Window::rectangle(0, 0, 1, 1), 0.02);
  const auto part = partition_cells(map_for({{0.25, 0.5}, {0.75, 0.3}}, g));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point y = g.center(i);
    const double d0 = distance(y, {0.25, 0.5}), d1 = distance(y, {0.75, 0.3});
    if (std::abs(d0 - d1) < 1e-9) continue;
    REQUIRE(part.serving[i] == (d0 < d1 ? 0 : 1));
  }
}

TEST_CASE("partition without shadowing is the nearest-station assignment") {
  const Grid g(Window::disc({0, 0}, 2.63), 0.02);
  const BsPattern p = sample_poisson(4.62, g.window(), 21);
  const auto part = partition_cells(build_propagation_map(p, g, {}, {}, 0));
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < p.size(); ++s) {
      if (distance(g.center(i), p.points[s]) < distance(g.center(i), p.points[best])) best = s;
    }
    REQUIRE(static_cast<std::size_t>(part.serving[i]) == best);
  }
  for (double a : part.cell_area) total += a;
  CHECK(total == doctest::Approx(g.covered_area()));
}

TEST_CASE("SINR of a lone station is signal over noise") {
  const Grid g(Window::rectangle(-1, -1, 1, 1), 0.05);
  const LinkBudget b;
  const PathLossParams pl;
  const auto map = map_for({{0.013, 0.007}}, g);
  const auto part = partition_cells(map);
  const SinrField f = sinr_field(map, part, b);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double raw = b.tx_power_w() / (path_loss(distance(g.center(i), {0.013, 0.007}), pl) * b.noise_w());
    REQUIRE(f.sinr[i] == doctest::Approx(std::min(raw, db_to_linear(60.0))).epsilon(1e-12));
  }
}

TEST_CASE("a pixel on top of a station saturates at the cap") {
  const Grid g(Window::rectangle(0, 0, 1, 1), 0.1);
  const auto map = map_for({{0.05, 0.05}, {0.75, 0.65}}, g);
  const auto part = partition_cells(map);
  const SinrField f = sinr_field(map, part, LinkBudget{});
  CHECK(f.sinr[0] == doctest::Approx(1e6));
  CHECK(f.saturated[0] == 1);
  CHECK(f.n_saturated >= 1);
  const SinrField f30 = sinr_field(map, part, LinkBudget{}, std::nullopt, 30.0);
  CHECK(f30.sinr[0] == doctest::Approx(1e3));
}

TEST_CASE("weighted SINR is monotone in the interferer weights") {
  const Grid g(Window::disc({0, 0}, 1.0), 0.04);
  const BsPattern p = sample_poisson(8.0, g.window(), 5);
  REQUIRE(p.size() >= 3);
  const auto map = build_propagation_map(p, g, {}, {}, 0);
  const auto part = partition_cells(map);
  const LinkBudget b;
  const SinrField full = sinr_field(map, part, b);

  std::vector<double> ones(p.size(), 1.0);
  const SinrField all_busy = sinr_field(map, part, b, std::span<const double>(ones));
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(all_busy.sinr[i] == doctest::Approx(full.sinr[i]).epsilon(1e-14));

  const LinkBudget silent{58.0, -96.0, 0.0};
  std::vector<double> zeros(p.size(), 0.0);
  const SinrField idle = sinr_field(map, part, silent, std::span<const double>(zeros));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double clean = map.gain(static_cast<std::size_t>(part.serving[i]), i) / silent.noise_over_power();
    REQUIRE(idle.sinr[i] == doctest::Approx(std::min(clean, 1e6)).epsilon(1e-12));
  }

  std::vector<double> p_busy(p.size(), 0.3);
  const SinrField base = sinr_field(map, part, b, std::span<const double>(p_busy));
  p_busy[1] = 0.9;
  const SinrField more = sinr_field(map, part, b, std::span<const double>(p_busy));
  for (std::size_t i = 0; i < g.size(); ++i) {
    REQUIRE(more.sinr[i] <= base.sinr[i]);
    REQUIRE(base.sinr[i] >= full.sinr[i]);
  }
  CHECK(base.load_weights[0] == doctest::Approx(0.3 * 0.9 + 0.1));
  std::vector<double> bad(p.size(), 1.2);
  CHECK_THROWS_AS(sinr_field(map, part, b, std::span<const double>(bad)), std::invalid_argument);
}

TEST_CASE("interference weight formula") {
  CHECK(interference_weight(0.0, 0.1) == doctest::Approx(0.1));
  CHECK(interference_weight(1.0, 0.1) == doctest::Approx(1.0));
  CHECK(interference_weight(0.5, 0.0) == doctest::Approx(0.5));
  CHECK(interference_weight(0.5, 1.0) == doctest::Approx(1.0));
}
