#include <algorithm>
#include <cmath>
#include <limits>

#include "cellqos/simd.hpp"
#include "ergodic_series.hpp"

namespace cellqos::simd {
namespace {

void station_gain(double sx, double sy, const double* px, const double* py,
                  const double* log_shadow, double log_scale, double half_beta,
                  double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = px[i] - sx;
    const double dy = py[i] - sy;
    double e = log_scale - half_beta * std::log(dx * dx + dy * dy);
    if (log_shadow) e += log_shadow[i];
    out[i] = std::exp(e);
  }
}

void serving_update(const double* gain, std::int32_t station, double* best_gain,
                    std::int32_t* best_station, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (gain[i] > best_gain[i]) {
      best_gain[i] = gain[i];
      best_station[i] = station;
    }
  }
}

void accumulate_interference(const double* gain, std::int32_t station,
                             double weight, const std::int32_t* serving,
                             double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (serving[i] != station) acc[i] += weight * gain[i];
  }
}

void inverse_rate(const double* signal, const double* interference,
                  double noise, double sinr_cap, const RateKernelParams& rate,
                  double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double sinr = std::min(signal[i] / (noise + interference[i]), sinr_cap);
    double nats = 0.0;
    if (rate.mode == RateMode::awgn) {
      nats = std::log1p(sinr);
    } else if (sinr <= 1.0) {
      for (std::size_t k = 0; k < kLaguerreNodes; ++k) {
        nats += rate.weights[k] * std::log1p(rate.nodes[k] * sinr);
      }
    } else {
      const double a = 1.0 / sinr;
      double series = 0.0;
      for (std::size_t k = detail::kE1Terms; k-- > 0;) {
        series = a * (detail::kE1Coefficients[k] + series);
      }
      nats = std::exp(a) * (series - detail::kEulerGamma - std::log(a));
    }
    out[i] = 1.0 / (rate.scale_bps * nats);
  }
}

void vlog(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::log(x[i]);
}

void vexp(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

constexpr KernelTable kScalar{
    "scalar",       station_gain, serving_update, accumulate_interference,
    inverse_rate,   vlog,         vexp,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace cellqos::simd
