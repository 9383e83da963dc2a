// Event-driven multi-class processor-sharing queue for one cell.
//
// With n users present each is served at R_class / n. In units of "service
// time if alone" every user progresses at rate 1/n, so a single virtual
// clock V(t) with dV/dt = 1/n orders all departures: a user arriving at
// virtual time V_a with volume v leaves when V reaches V_a + v / R_class.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>

#include "cellqos/qos.hpp"
#include "cellqos/random.hpp"

namespace cellqos {

std::vector<std::pair<double, double>> bin_rate_classes(std::vector<std::pair<double, double>> pixel_rates,
                                                        std::size_t max_classes) {
  if (max_classes == 0) throw std::invalid_argument("need at least one rate class");
  for (const auto& [w, r] : pixel_rates) {
    if (!(w >= 0.0) || !(r > 0.0)) throw std::invalid_argument("rate classes need weight >= 0 and rate > 0");
  }
  if (pixel_rates.size() <= max_classes) return pixel_rates;
  std::sort(pixel_rates.begin(), pixel_rates.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  std::vector<std::pair<double, double>> classes;
  const std::size_t n = pixel_rates.size();
  for (std::size_t b = 0; b < max_classes; ++b) {
    const std::size_t lo = b * n / max_classes;
    const std::size_t hi = (b + 1) * n / max_classes;
    double weight = 0.0, inv = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      weight += pixel_rates[i].first;
      inv += pixel_rates[i].first / pixel_rates[i].second;
    }
    if (weight > 0.0) classes.emplace_back(weight, weight / inv);
  }
  return classes;
}

QueueOracleResult ps_queue_oracle(const QueueOracleInput& input) {
  if (!(input.arrival_rate > 0.0)) throw std::invalid_argument("cell arrival rate must be positive");
  if (!(input.mean_volume_bits > 0.0)) throw std::invalid_argument("mean volume must be positive");
  if (!(input.horizon_s > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(input.warmup_fraction >= 0.0 && input.warmup_fraction < 1.0)) {
    throw std::invalid_argument("warmup fraction must be in [0, 1)");
  }
  if (input.pixel_rates.empty()) throw std::invalid_argument("cell needs at least one rate class");

  const auto classes = bin_rate_classes(input.pixel_rates);
  double total_w = 0.0, total_inv = 0.0;
  std::vector<double> weights;
  for (const auto& [w, r] : classes) {
    total_w += w;
    total_inv += w / r;
    weights.push_back(w);
  }
  if (!(total_w > 0.0)) throw std::invalid_argument("rate class weights sum to zero");

  QueueOracleResult res;
  res.n_classes = classes.size();
  res.critical_traffic = total_w / total_inv;
  res.load = input.arrival_rate * input.mean_volume_bits / res.critical_traffic;
  res.stationary = res.load < 1.0;

  Rng rng = make_rng(input.seed, stream::queue);
  std::exponential_distribution<double> interarrival(input.arrival_rate);
  std::exponential_distribution<double> exp_volume(1.0 / input.mean_volume_bits);
  std::discrete_distribution<std::size_t> pick_class(weights.begin(), weights.end());

  struct User {
    double finish_tag;
    double arrival_time;
    double volume;
    bool operator>(const User& o) const { return finish_tag > o.finish_tag; }
  };
  std::priority_queue<User, std::vector<User>, std::greater<>> active;

  const double warmup = input.warmup_fraction * input.horizon_s;
  double t = 0.0;
  double virtual_time = 0.0;
  double next_arrival = interarrival(rng);

  double area_users = 0.0;   // integral of n(t) dt after warmup
  double busy_time = 0.0;
  double sojourn_sum = 0.0;
  double volume_sum = 0.0;
  std::size_t departures = 0;

  auto advance = [&](double until) {
    const double n = static_cast<double>(active.size());
    const double from = std::max(t, warmup);
    if (until > from) {
      area_users += n * (until - from);
      if (n > 0) busy_time += until - from;
    }
    if (n > 0) virtual_time += (until - t) / n;
    t = until;
  };

  while (true) {
    double next_departure = std::numeric_limits<double>::infinity();
    if (!active.empty()) {
      next_departure = t + (active.top().finish_tag - virtual_time) * static_cast<double>(active.size());
    }
    const double next_event = std::min(next_arrival, next_departure);
    if (next_event > input.horizon_s) {
      advance(input.horizon_s);
      break;
    }
    if (next_departure <= next_arrival) {
      advance(next_departure);
      const User u = active.top();
      active.pop();
      // Pin the clock to the tag to keep rounding from accumulating.
      virtual_time = u.finish_tag;
      if (t >= warmup) {
        sojourn_sum += t - u.arrival_time;
        volume_sum += u.volume;
        ++departures;
      }
    } else {
      advance(next_arrival);
      const double v = input.volume_distribution == VolumeDistribution::exponential
                           ? exp_volume(rng)
                           : input.mean_volume_bits;
      const double rate = classes[pick_class(rng)].second;
      active.push({virtual_time + v / rate, t, v});
      next_arrival = t + interarrival(rng);
    }
  }

  const double observed = input.horizon_s - warmup;
  res.departures = departures;
  res.empirical_mean_users = area_users / observed;
  res.empirical_busy_fraction = busy_time / observed;
  res.empirical_mean_throughput =
      departures > 0 ? (volume_sum / static_cast<double>(departures)) / (sojourn_sum / static_cast<double>(departures))
                     : 0.0;
  return res;
}

}  // namespace cellqos
