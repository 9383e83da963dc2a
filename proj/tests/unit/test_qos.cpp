#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cellqos/qos.hpp"

using namespace cellqos;

namespace {

struct SmallNetwork {
  Grid grid;
  BsPattern pattern;
  PropagationMap map;
  CellPartition partition;

  SmallNetwork(Window w, double pixel, std::vector<Point> stations)
      : grid(w, pixel), pattern{std::move(stations), 0.0, w, 0},
        map(build_propagation_map(pattern, grid, {}, {}, 0)), partition(partition_cells(map)) {}
};

// Three stations on a 0.6 km square, pixel centers away from the stations.
SmallNetwork three_stations() {
  return SmallNetwork(Window::rectangle(0, 0, 0.6, 0.6), 0.1, {{0.13, 0.17}, {0.47, 0.22}, {0.31, 0.48}});
}

// Integral of 1/R over each cell written out pixel by pixel from path loss
// and the scalar rate function.
std::vector<double> oracle_integrals(const SmallNetwork& net, const std::vector<double>& theta,
                                     const LinkBudget& b, const RateFunction& rf) {
  const PathLossParams pl;
  const std::size_t n = net.pattern.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < net.grid.size(); ++i) {
    const Point y = net.grid.center(i);
    std::size_t serving = 0;
    for (std::size_t s = 1; s < n; ++s) {
      if (distance(y, net.pattern.points[s]) < distance(y, net.pattern.points[serving])) serving = s;
    }
    double interference = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
      if (z == serving) continue;
      const double w = std::min(theta[z], 1.0) * (1.0 - b.pilot_fraction) + b.pilot_fraction;
      interference += w * b.tx_power_w() / path_loss(distance(y, net.pattern.points[z]), pl);
    }
    const double signal = b.tx_power_w() / path_loss(distance(y, net.pattern.points[serving]), pl);
    const double sinr = std::min(signal / (b.noise_w() + interference), 1e6);
    out[serving] += net.grid.pixel_area() / peak_rate(sinr, rf);
  }
  return out;
}

bool leq(const std::vector<double>& a, const std::vector<double>& b, double slack) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i] + slack) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("traffic model conversions") {
  const TrafficModel t = TrafficModel::from_density(2e6, 1e6);
  CHECK(t.arrival_rate == doctest::Approx(2.0));
  CHECK(t.traffic_density() == doctest::Approx(2e6));
  CHECK_THROWS_AS(TrafficModel::from_density(-1.0, 1e6), std::invalid_argument);
  CHECK_THROWS_AS(TrafficModel::from_density(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((SolverOptions{0.0, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((SolverOptions{1e-4, 0}.validate()), std::invalid_argument);
}

TEST_CASE("cell metrics follow the processor-sharing identities") {
  CellPartition part;
  part.cell_area = {0.2, 0.3, 0.1, 0.25};
  part.pixel_area = 0.01;
  const TrafficModel traffic = TrafficModel::from_density(4e6, 1e6);
  const std::vector<double> theta{0.0, 0.4, 1.0, 1.7};
  const std::vector<double> integrals{0.2 / 3e6, 0.3 / 3e6, 0.1 / 4e5, 0.25 / 2.35e6};
  const CellMetrics m = cell_metrics(theta, part, traffic, std::span<const double>(integrals));

  CHECK(m.traffic_demand[1] == doctest::Approx(1.2e6));
  CHECK(m.critical_traffic[0] == doctest::Approx(3e6));  // zero load falls back to the integral
  CHECK(m.mean_users[0] == 0.0);
  CHECK(m.throughput[0] == doctest::Approx(3e6 - 0.2 * 4e6));

  CHECK(m.critical_traffic[1] == doctest::Approx(1.2e6 / 0.4));
  CHECK(m.mean_users[1] == doctest::Approx(0.4 / 0.6));
  CHECK(m.throughput[1] == doctest::Approx(1.2e6 * 0.6 / 0.4));
  CHECK(m.busy_prob[1] == doctest::Approx(0.4));
  // Little's law: N = rho(X) / r(X) for a stable cell.
  CHECK(m.mean_users[1] == doctest::Approx(m.traffic_demand[1] / m.throughput[1]));

  for (std::size_t i : {std::size_t{2}, std::size_t{3}}) {
    CHECK_FALSE(m.stable(i));
    CHECK(std::isinf(m.mean_users[i]));
    CHECK(m.throughput[i] == 0.0);
    CHECK(m.busy_prob[i] == 1.0);
  }
  CHECK(std::isnan(cell_metrics(theta, part, traffic).critical_traffic[0]));
  const std::vector<double> negative{0.1, -0.1, 0.1, 0.1};
  CHECK_THROWS_AS(cell_metrics(negative, part, traffic), std::invalid_argument);
}

TEST_CASE("load map integrals match the pixel-by-pixel oracle") {
  const SmallNetwork net = three_stations();
  const LinkBudget b;
  const RateFunction rf;
  CellLoadMap lm(net.map, net.partition, b, rf);
  for (const std::vector<double>& theta :
       {std::vector<double>{0, 0, 0}, std::vector<double>{0.3, 0.9, 0.05}, std::vector<double>{1, 1, 1},
        std::vector<double>{2.5, 0.2, 1.4}}) {
    const auto got = lm.integrals(theta);
    const auto ref = oracle_integrals(net, theta, b, rf);
    for (std::size_t i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-9));
  }
  const auto full = lm.full_integrals();
  const auto ref = oracle_integrals(net, {1, 1, 1}, b, rf);
  for (std::size_t i = 0; i < 3; ++i) CHECK(full[i] == doctest::Approx(ref[i]).epsilon(1e-9));
}

TEST_CASE("full-interference loads are linear in the traffic density") {
  const SmallNetwork net = three_stations();
  const SinrField f = sinr_field(net.map, net.partition, LinkBudget{});
  const RateFunction rf;
  const auto t1 = cell_loads_full(net.partition, f, rf, TrafficModel::from_density(1e6, 1e6));
  const auto t3 = cell_loads_full(net.partition, f, rf, TrafficModel::from_density(3e6, 1e6));
  const auto t0 = cell_loads_full(net.partition, f, rf, TrafficModel::from_density(0.0, 1e6));
  CellLoadMap lm(net.map, net.partition, LinkBudget{}, rf);
  const auto full = lm.full_integrals();
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t3[i] == doctest::Approx(3.0 * t1[i]).epsilon(1e-12));
    CHECK(t1[i] == doctest::Approx(1e6 * full[i]).epsilon(1e-9));
    CHECK(t0[i] == 0.0);
  }
}

TEST_CASE("zero traffic gives zero loads") {
  const SmallNetwork net = three_stations();
  const auto sol = solve_cell_load_equations(net.map, net.partition, LinkBudget{}, RateFunction{},
                                             TrafficModel::from_density(0.0, 1e6));
  CHECK(sol.converged);
  for (double t : sol.theta) CHECK(t == 0.0);
  CHECK(sol.max_gap == 0.0);
}

TEST_CASE("brute-force grid search brackets the solver on three stations") {
  const SmallNetwork net = three_stations();
  const LinkBudget b;
  const RateFunction rf;
  CellLoadMap lm(net.map, net.partition, b, rf);
  const auto full = lm.full_integrals();
  const double rho = 1.2 / *std::max_element(full.begin(), full.end());
  const SolverOptions opt{1e-10, 500};
  const LoadSolution sol = solve_cell_load_equations(lm, rho, opt);
  REQUIRE(sol.converged);
  CHECK(leq(sol.theta_lower, sol.theta_upper, 1e-12));
  CHECK(fixed_point_residual(lm, sol.theta, rho) < 1e-9);

  // T is monotone: the least fixed point lies below every supersolution
  // (T(t) <= t) and the greatest above every subsolution (T(t) >= t).
  std::size_t super = 0, sub = 0, near_fixed = 0;
  std::vector<double> theta(3);
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      for (int k = 0; k <= 100; ++k) {
        theta = {0.01 * i, 0.01 * j, 0.01 * k};
        const auto next = lm.apply(theta, rho);
        if (leq(next, theta, 0.0)) {
          ++super;
          REQUIRE(leq(sol.theta_lower, theta, 1e-9));
        }
        if (leq(theta, next, 0.0)) {
          ++sub;
          REQUIRE(leq(theta, sol.theta_upper, 1e-9));
        }
        double r = 0.0;
        for (std::size_t s = 0; s < 3; ++s) r = std::max(r, std::abs(next[s] - theta[s]));
        if (r < 0.01) {
          ++near_fixed;
          for (std::size_t s = 0; s < 3; ++s) {
            REQUIRE(std::abs(theta[s] - sol.theta[s]) < 0.05);
          }
        }
      }
    }
  }
  CHECK(super > 0);
  CHECK(sub > 0);
  CHECK(near_fixed > 0);
}

TEST_CASE("weighted loads: below full, monotone in traffic, residual under tolerance") {
  const Grid g(Window::disc({0, 0}, 1.5), 0.03);
  const BsPattern p = sample_poisson(4.62, g.window(), 17);
  REQUIRE(p.size() > 10);
  const auto map = build_propagation_map(p, g, {}, {true, 10.0, 0.05}, 17);
  const auto part = partition_cells(map);
  const LinkBudget b;
  const RateFunction rf;
  CellLoadMap lm(map, part, b, rf);
  const auto full = lm.full_integrals();
  const SolverOptions opt;

  std::vector<double> prev(p.size(), 0.0);
  for (double rho : {2e5, 1e6, 3e6, 6e6}) {
    const LoadSolution sol = solve_cell_load_equations(lm, rho, opt, std::span<const double>(full));
    REQUIRE(sol.converged);
    CHECK(sol.max_gap < 10 * opt.tol);
    CHECK(fixed_point_residual(lm, sol.theta, rho) < opt.tol);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(sol.theta[i] <= rho * full[i] * (1 + 1e-12));
      CHECK(sol.theta[i] >= prev[i]);
      CHECK(sol.theta_lower[i] <= sol.theta_upper[i] + 1e-12);
    }
    prev = sol.theta;
  }
}

TEST_CASE("pilot fraction one reproduces the full model") {
  const SmallNetwork net = three_stations();
  const LinkBudget always_on{58.0, -96.0, 1.0};
  CellLoadMap lm(net.map, net.partition, always_on, RateFunction{});
  const auto full = lm.full_integrals();
  const double rho = 0.8 / *std::max_element(full.begin(), full.end());
  const LoadSolution sol = solve_cell_load_equations(lm, rho, SolverOptions{});
  REQUIRE(sol.converged);
  for (std::size_t i = 0; i < 3; ++i) CHECK(sol.theta[i] == doctest::Approx(rho * full[i]).epsilon(1e-12));
}

TEST_CASE("a single station sees no interference in either model") {
  const SmallNetwork net(Window::disc({0, 0}, 0.8), 0.02, {{0.011, -0.007}});
  CellLoadMap lm(net.map, net.partition, LinkBudget{}, RateFunction{});
  const auto full = lm.full_integrals();
  const LoadSolution sol = solve_cell_load_equations(lm, 2e6, SolverOptions{});
  REQUIRE(sol.converged);
  CHECK(sol.theta[0] == doctest::Approx(2e6 * full[0]).epsilon(1e-12));
  CHECK(sol.iterations_lower <= 2);
}

TEST_CASE("non-convergence is reported, not hidden") {
  const SmallNetwork net = three_stations();
  CellLoadMap lm(net.map, net.partition, LinkBudget{}, RateFunction{});
  const auto full = lm.full_integrals();
  const double rho = 0.9 / *std::max_element(full.begin(), full.end());
  const LoadSolution sol = solve_cell_load_equations(lm, rho, SolverOptions{1e-4, 1});
  CHECK_FALSE(sol.converged);
  CHECK_FALSE(sol.unique_within_tol);
  CHECK(sol.iterations == 1);
  CHECK(sol.diagnostics.find("did not converge") != std::string::npos);
  CHECK(sol.max_gap > 0.0);
}
