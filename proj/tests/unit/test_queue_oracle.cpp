#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cellqos/qos.hpp"

using namespace cellqos;

namespace {

QueueOracleInput single_class(double load, VolumeDistribution dist, std::uint64_t seed) {
  QueueOracleInput in;
  in.mean_volume_bits = 1e6;
  in.pixel_rates = {{1.0, 2e6}};
  in.arrival_rate = load * 2e6 / 1e6;
  in.volume_distribution = dist;
  in.horizon_s = 4e4;
  in.seed = seed;
  return in;
}

}  // namespace

TEST_CASE("single-class processor sharing matches M/G/1-PS") {
  for (double load : {0.3, 0.6}) {
    for (VolumeDistribution dist : {VolumeDistribution::exponential, VolumeDistribution::deterministic}) {
      const QueueOracleResult r = ps_queue_oracle(single_class(load, dist, 11));
      CAPTURE(load);
      CHECK(r.stationary);
      CHECK(r.load == doctest::Approx(load));
      CHECK(r.critical_traffic == doctest::Approx(2e6));
      CHECK(r.empirical_mean_users == doctest::Approx(load / (1 - load)).epsilon(0.05));
      CHECK(r.empirical_busy_fraction == doctest::Approx(load).epsilon(0.05));
      CHECK(r.empirical_mean_throughput == doctest::Approx(2e6 * (1 - load)).epsilon(0.05));
    }
  }
}

TEST_CASE("multi-class cell: harmonic-mean critical traffic and insensitive mean occupancy") {
  QueueOracleInput in;
  in.mean_volume_bits = 5e5;
  in.pixel_rates = {{0.5, 4e6}, {0.3, 1e6}, {0.2, 2.5e5}};
  const double inv = 0.5 / 4e6 + 0.3 / 1e6 + 0.2 / 2.5e5;
  const double rho_c = 1.0 / inv;
  const double load = 0.5;
  in.arrival_rate = load * rho_c / in.mean_volume_bits;
  in.horizon_s = 3e4;
  in.seed = 5;
  for (VolumeDistribution dist : {VolumeDistribution::exponential, VolumeDistribution::deterministic}) {
    in.volume_distribution = dist;
    const QueueOracleResult r = ps_queue_oracle(in);
    CHECK(r.n_classes == 3);
    CHECK(r.critical_traffic == doctest::Approx(rho_c).epsilon(1e-12));
    CHECK(r.load == doctest::Approx(load).epsilon(1e-12));
    CHECK(r.empirical_mean_users == doctest::Approx(1.0).epsilon(0.05));
    CHECK(r.empirical_busy_fraction == doctest::Approx(load).epsilon(0.05));
    CHECK(r.empirical_mean_throughput == doctest::Approx(rho_c * (1 - load)).epsilon(0.05));
    CHECK(r.departures > 1000);
  }
}

TEST_CASE("overloaded cell is flagged non-stationary") {
  const QueueOracleResult r = ps_queue_oracle(single_class(1.2, VolumeDistribution::exponential, 3));
  CHECK_FALSE(r.stationary);
  CHECK(r.load == doctest::Approx(1.2));
  CHECK(r.empirical_busy_fraction > 0.95);
}

TEST_CASE("oracle is deterministic in its seed") {
  QueueOracleInput in = single_class(0.4, VolumeDistribution::exponential, 8);
  in.horizon_s = 2e3;
  const QueueOracleResult a = ps_queue_oracle(in);
  const QueueOracleResult b = ps_queue_oracle(in);
  CHECK(a.empirical_mean_users == b.empirical_mean_users);
  CHECK(a.departures == b.departures);
  in.seed = 9;
  CHECK(ps_queue_oracle(in).empirical_mean_users != a.empirical_mean_users);
}

TEST_CASE("oracle rejects invalid input") {
  QueueOracleInput in = single_class(0.4, VolumeDistribution::exponential, 1);
  in.horizon_s = 0.0;
  CHECK_THROWS_AS(ps_queue_oracle(in), std::invalid_argument);
  in = single_class(0.4, VolumeDistribution::exponential, 1);
  in.pixel_rates.clear();
  CHECK_THROWS_AS(ps_queue_oracle(in), std::invalid_argument);
  in = single_class(0.4, VolumeDistribution::exponential, 1);
  in.pixel_rates = {{1.0, 0.0}};
  CHECK_THROWS_AS(ps_queue_oracle(in), std::invalid_argument);
  in = single_class(0.4, VolumeDistribution::exponential, 1);
  in.warmup_fraction = 1.0;
  CHECK_THROWS_AS(ps_queue_oracle(in), std::invalid_argument);
}

TEST_CASE("binning preserves the total weight and the integral of 1/R") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> w(0.1, 1.0), logr(11.0, 16.0);
  std::vector<std::pair<double, double>> pixels;
  for (int i = 0; i < 5000; ++i) pixels.emplace_back(w(rng), std::exp(logr(rng)));
  double total_w = 0, total_inv = 0;
  for (auto [wi, ri] : pixels) {
    total_w += wi;
    total_inv += wi / ri;
  }
  for (std::size_t k : {std::size_t{1}, std::size_t{7}, std::size_t{200}}) {
    const auto bins = bin_rate_classes(pixels, k);
    CHECK(bins.size() <= k);
    double bw = 0, binv = 0;
    for (auto [wi, ri] : bins) {
      bw += wi;
      binv += wi / ri;
    }
    CHECK(bw == doctest::Approx(total_w).epsilon(1e-12));
    CHECK(binv == doctest::Approx(total_inv).epsilon(1e-12));
  }
  const std::vector<std::pair<double, double>> few{{1.0, 3e6}, {2.0, 1e6}};
  const auto same = bin_rate_classes(few, 200);
  CHECK(same.size() == 2);
}
