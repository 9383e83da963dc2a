#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "cellqos/estimators.hpp"

using namespace cellqos;

namespace {

// Small network that keeps each sweep well under a second.
Scenario small_scenario(bool shadowed) {
  Scenario sc;
  sc.window = Window::disc({0, 0}, 1.2);
  sc.pixel_size_km = 0.04;
  sc.shadowing.enabled = shadowed;
  return sc;
}

SinrSamples constant_samples(double signal, double interference, double noise, std::size_t n,
                             std::size_t groups) {
  SinrSamples s;
  s.noise_over_power = noise;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::vector<double> sig(n, signal), itf(n, interference);
    s.append(sig, itf);
  }
  return s;
}

// Weighted mean-cell load by bracketing on the scalar equation, from the
// scalar rate function.
double weighted_root_oracle(double rho_bar, const SinrSamples& s, const RateFunction& rf, double eps) {
  auto g = [&](double t) {
    const double w = std::min(t, 1.0) * (1 - eps) + eps;
    double inv = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      inv += 1.0 / peak_rate(std::min(s.signal[i] / (s.noise_over_power + w * s.interference[i]), 1e6), rf);
    }
    return rho_bar * inv / static_cast<double>(s.size()) - t;
  };
  double hi = 1.0;
  while (g(hi) > 0) hi *= 2;
  auto tol = [](double a, double b) { return std::abs(b - a) < 1e-13; };
  const auto r = boost::math::tools::bisect(g, 0.0, hi, tol);
  return 0.5 * (r.first + r.second);
}

}  // namespace

TEST_CASE("scenario validation") {
  Scenario sc;
  CHECK_NOTHROW(sc.validate());
  sc.intensity = 0.0;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = Scenario{};
  sc.pixel_size_km = -1;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = Scenario{};
  sc.guard_margin_km = -0.1;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  const double rho[] = {1e6};
  const InterferenceModel m[] = {InterferenceModel::full};
  CHECK_THROWS_AS(run_sweep(Scenario{}, rho, m, 1, 1), std::invalid_argument);
  const double negative[] = {-1.0};
  CHECK_THROWS_AS(run_sweep(Scenario{}, negative, m, 2, 1), std::invalid_argument);
}

TEST_CASE("mean-cell identities") {
  const MeanCellEstimate m = mean_cell_from_load(4e5, 0.4, InterferenceModel::full);
  CHECK(m.rho_c_bar == doctest::Approx(1e6));
  CHECK(m.n_bar == doctest::Approx(0.4 / 0.6));
  CHECK(m.r_bar == doctest::Approx(6e5));
  CHECK(m.n_bar == doctest::Approx(m.rho_bar / m.r_bar));
  const MeanCellEstimate u = mean_cell_from_load(4e5, 1.3, InterferenceModel::weighted);
  CHECK_FALSE(u.stable);
  CHECK(std::isinf(u.n_bar));
  CHECK(u.r_bar == 0.0);
}

TEST_CASE("mean cell with constant SINR samples") {
  const RateFunction rf;
  const double noise = 1e-3, sig = 2.0, itf = 1.0;
  const SinrSamples s = constant_samples(sig, itf, noise, 50, 4);
  const double lambda = 4.62, rho = 1.5e6;
  const double rate = peak_rate(sig / (noise + itf), rf);

  const MeanCellEstimate f = mean_cell_full(rho, lambda, s, rf);
  CHECK(f.theta_bar == doctest::Approx(rho / lambda / rate).epsilon(1e-12));
  CHECK(f.rho_c_bar == doctest::Approx(rate).epsilon(1e-12));
  CHECK(f.theta_bar_std_error == doctest::Approx(0.0));
  CHECK(f.n_samples == 200);

  const MeanCellEstimate w = solve_mean_cell_equation(rho, lambda, s, rf, 0.1);
  CHECK(w.theta_bar == doctest::Approx(weighted_root_oracle(rho / lambda, s, rf, 0.1)).epsilon(1e-8));
  CHECK(w.theta_bar < f.theta_bar);

  const MeanCellEstimate zero = mean_cell_full(0.0, lambda, s, rf);
  CHECK(zero.theta_bar == 0.0);
  CHECK(zero.rho_c_bar == doctest::Approx(rate));
  CHECK(zero.r_bar == doctest::Approx(rate));
}

TEST_CASE("weighted mean cell against a bracketing oracle on mixed samples") {
  const RateFunction rf;
  SinrSamples s;
  s.noise_over_power = 1e-4;
  std::vector<double> sig, itf;
  for (int i = 0; i < 300; ++i) {
    sig.push_back(std::exp(0.03 * i - 2.0));
    itf.push_back(0.2 + 0.01 * (i % 37));
  }
  s.append(sig, itf);
  for (double rho_bar : {1e5, 4e5, 7e5}) {
    const MeanCellEstimate w = solve_mean_cell_equation(rho_bar * 4.62, 4.62, s, rf, 0.1);
    CHECK(w.theta_bar == doctest::Approx(weighted_root_oracle(rho_bar, s, rf, 0.1)).epsilon(1e-8));
    CHECK(std::isnan(w.theta_bar_std_error));  // single group
  }
}

TEST_CASE("pilot fraction one makes the weighted mean cell equal the full one") {
  const RateFunction rf;
  const SinrSamples s = sample_origin_sinr(4.62, {}, {}, LinkBudget{}, {8.0, 5000, 500}, 3);
  for (double rho : {2e5, 1e6, 3e6}) {
    const MeanCellEstimate f = mean_cell_full(rho, 4.62, s, rf);
    const MeanCellEstimate w = solve_mean_cell_equation(rho, 4.62, s, rf, 1.0);
    CHECK(w.theta_bar == doctest::Approx(f.theta_bar).epsilon(1e-8));
  }
}

TEST_CASE("mean-cell load grows with traffic") {
  const RateFunction rf;
  const SinrSamples s = sample_origin_sinr(4.62, {}, {}, LinkBudget{}, {8.0, 5000, 500}, 4);
  double prev_f = -1, prev_w = -1;
  for (double per_cell_kbps = 50; per_cell_kbps <= 1000; per_cell_kbps += 50) {
    const double rho = per_cell_kbps * 1e3 * 4.62;
    const double f = mean_cell_full(rho, 4.62, s, rf).theta_bar;
    const double w = solve_mean_cell_equation(rho, 4.62, s, rf, 0.1).theta_bar;
    CHECK(f > prev_f);
    CHECK(w > prev_w);
    CHECK(w <= f * (1 + 1e-9));
    prev_f = f;
    prev_w = w;
  }
}

TEST_CASE("origin samples without shadowing: nearest-station distance law") {
  const PathLossParams pl;
  const LinkBudget b;
  const SinrSamples s = sample_origin_sinr(4.62, pl, {}, b, {8.0, 20000, 1000}, 12);
  CHECK(s.size() == 20000);
  CHECK(s.n_groups() == 20);
  CHECK(s.noise_over_power == doctest::Approx(b.noise_over_power()));
  // signal = (K r)^-beta for the nearest station, P(r > x) = exp(-lambda pi x^2).
  std::vector<double> r;
  for (double sig : s.signal) r.push_back(std::pow(sig, -1.0 / pl.beta) / pl.k_per_km);
  std::sort(r.begin(), r.end());
  double ks = 0.0;
  const double n = static_cast<double>(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double f = 1.0 - std::exp(-4.62 * std::numbers::pi * r[i] * r[i]);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
  }
  CHECK(ks < 1.63 / std::sqrt(n));  // 1% level
  for (std::size_t i = 0; i < s.size(); ++i) REQUIRE(s.interference[i] >= 0.0);
}

TEST_CASE("two-sample KS distance against the definition") {
  CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_two_sample({1, 2, 3}, {4, 5}) == doctest::Approx(1.0));
  const std::vector<double> a{0.1, 0.5, 0.5, 0.9, 1.3}, b{0.2, 0.5, 1.0, 1.1};
  double brute = 0.0;
  for (double x : {0.1, 0.2, 0.5, 0.9, 1.0, 1.1, 1.3}) {
    double fa = 0, fb = 0;
    for (double v : a) fa += v <= x;
    for (double v : b) fb += v <= x;
    brute = std::max(brute, std::abs(fa / 5.0 - fb / 4.0));
  }
  CHECK(ks_two_sample(a, b) == doctest::Approx(brute));
  CHECK_THROWS_AS(ks_two_sample({}, {1.0}), std::invalid_argument);
}

TEST_CASE("equivalence check with zero shadowing spread compares like with like") {
  const ShadowingParams none{true, 0.0, 0.05};
  const EquivalenceCheck c = shadowing_equivalence_check({}, none, LinkBudget{}, 4.62, 20000, 6);
  CHECK(c.moment == doctest::Approx(1.0));
  CHECK(c.equivalent_intensity == doctest::Approx(4.62));
  CHECK(c.ks_distance < 1.63 * std::sqrt(2.0 / 20000));
  CHECK(c.pass);
}

TEST_CASE("throughput identity holds by construction at every sweep point") {
  const Scenario sc = small_scenario(true);
  const double lambda = sc.intensity;
  std::vector<double> rho;
  for (double kbps : {0.0, 100.0, 400.0, 900.0, 1500.0}) rho.push_back(kbps * 1e3 * lambda);
  const InterferenceModel models[] = {InterferenceModel::full, InterferenceModel::weighted};
  const SweepResult res = run_sweep(sc, rho, models, 3, 21);
  REQUIRE(res.points.size() == rho.size() * 2);
  for (const SweepPoint& p : res.points) {
    REQUIRE(p.error.empty());
    const TypicalCellEstimate& e = p.typical;
    if (p.traffic_density == 0.0) continue;
    REQUIRE(e.r0_defined);
    CHECK(e.r0 * lambda * e.n0 == doctest::Approx(p.traffic_density * e.stable_fraction).epsilon(1e-14));
  }
}

TEST_CASE("zero traffic: zero loads and the low-traffic limit of r0") {
  const Scenario sc = small_scenario(false);
  const double lambda = sc.intensity;
  const double rho[] = {0.0, 1e-3 * lambda};
  const InterferenceModel models[] = {InterferenceModel::full, InterferenceModel::weighted};
  const SweepResult res = run_sweep(sc, rho, models, 3, 8);
  for (std::size_t im = 0; im < 2; ++im) {
    const TypicalCellEstimate& z = res.points[im].typical;
    const TypicalCellEstimate& tiny = res.points[2 + im].typical;
    CHECK(z.mean_load == 0.0);
    CHECK(z.stable_fraction == 1.0);
    CHECK(z.n0 == 0.0);
    CHECK(z.r0_defined);
    CHECK(z.r0 > 0.0);
    CHECK(tiny.r0 == doctest::Approx(z.r0).epsilon(1e-6));
    // r0 at zero traffic is the mean critical traffic of the realization.
    double expected = 0.0;
    for (const auto& r : z.realizations) expected += 1.0 / (lambda * r.mean_integral);
    CHECK(z.r0 == doctest::Approx(expected / 3.0).epsilon(0.05));
  }
  CHECK(res.points[0].mean_cell.theta_bar == 0.0);
}

TEST_CASE("weighted model sits below full and keeps the branch ordering") {
  const Scenario sc = small_scenario(true);
  std::vector<double> rho;
  for (double kbps : {200.0, 600.0, 1000.0}) rho.push_back(kbps * 1e3 * sc.intensity);
  const InterferenceModel models[] = {InterferenceModel::full, InterferenceModel::weighted};
  std::size_t checked = 0;
  auto observer = [&](const RealizationView& v) {
    if (!v.solution) return;
    for (std::size_t i = 0; i < v.solution->theta.size(); ++i) {
      REQUIRE(v.solution->theta_lower[i] <= v.solution->theta_upper[i] + 1e-12);
    }
    ++checked;
  };
  const SweepResult res = run_sweep(sc, rho, models, 3, 4, observer);
  CHECK(checked == 9);
  CHECK(res.all_converged());
  for (std::size_t ip = 0; ip < rho.size(); ++ip) {
    const auto& full = res.points[2 * ip];
    const auto& weighted = res.points[2 * ip + 1];
    CHECK(weighted.typical.mean_load <= full.typical.mean_load);
    CHECK(weighted.typical.stable_fraction >= full.typical.stable_fraction);
    CHECK(weighted.mean_cell.theta_bar <= full.mean_cell.theta_bar);
    if (ip > 0) CHECK(full.typical.mean_load > res.points[2 * (ip - 1)].typical.mean_load);
  }
}

TEST_CASE("sweeps are reproducible from the base seed") {
  const Scenario sc = small_scenario(true);
  const double rho[] = {500e3 * sc.intensity};
  const InterferenceModel models[] = {InterferenceModel::weighted};
  const SweepResult a = run_sweep(sc, rho, models, 2, 99);
  const SweepResult b = run_sweep(sc, rho, models, 2, 99);
  const SweepResult c = run_sweep(sc, rho, models, 2, 100);
  CHECK(a.points[0].typical.mean_load == b.points[0].typical.mean_load);
  CHECK(a.points[0].mean_cell.theta_bar == b.points[0].mean_cell.theta_bar);
  CHECK(a.points[0].typical.mean_load != c.points[0].typical.mean_load);
}

TEST_CASE("guard margin drops edge stations from the statistics") {
  Scenario sc = small_scenario(false);
  sc.guard_margin_km = 0.5;
  const double rho[] = {300e3 * sc.intensity};
  const InterferenceModel models[] = {InterferenceModel::full};
  const SweepResult res = run_sweep(sc, rho, models, 3, 2);
  for (const auto& r : res.points[0].typical.realizations) CHECK(r.n_included < r.n_stations);
}

TEST_CASE("mean cell area times intensity is one") {
  const Scenario sc = small_scenario(false);
  const CellAreaStudy study = cell_area_study(sc, 150, 31);
  REQUIRE(study.mean_area.size() >= 140);
  std::size_t cells = 0;
  for (auto n : study.n_stations) cells += n;
  // Pooled ratio; relative standard error about 1/sqrt(cells).
  CHECK(std::abs(study.pooled_mean_area * sc.intensity - 1.0) < 4.0 / std::sqrt(static_cast<double>(cells)));
}
