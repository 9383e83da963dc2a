#pragma once

// Data-parallel inner loops of the simulator. Every kernel has a scalar
// reference implementation and, where the CPU allows it, an AVX2 variant.
// The active table is chosen once at startup; CELLQOS_SIMD=scalar forces the
// reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace cellqos::simd {

enum class Isa { scalar, avx2 };

enum class RateMode : int { awgn = 0, rayleigh_ergodic = 1 };

// Gauss-Laguerre rule used by the ergodic-capacity kernel.
inline constexpr std::size_t kLaguerreNodes = 32;

struct RateKernelParams {
  RateMode mode = RateMode::awgn;
  double scale_bps = 1.0;  // efficiency * bandwidth / ln 2
  const double* nodes = nullptr;    // kLaguerreNodes abscissae
  const double* weights = nullptr;  // kLaguerreNodes weights
};

struct KernelTable {
  const char* name;

  // out[i] = exp(log_scale + log_shadow[i] - half_beta * ln(dx^2 + dy^2)),
  // i.e. the gain 1/L of a station at (sx, sy). log_shadow may be null.
  void (*station_gain)(double sx, double sy, const double* px, const double* py,
                       const double* log_shadow, double log_scale,
                       double half_beta, double* out, std::size_t n);

  // Strict-greater argmax update; visiting stations in increasing index
  // order breaks ties towards the lowest index.
  void (*serving_update)(const double* gain, std::int32_t station,
                         double* best_gain, std::int32_t* best_station,
                         std::size_t n);

  // acc[i] += weight * gain[i] wherever serving[i] != station.
  void (*accumulate_interference)(const double* gain, std::int32_t station,
                                  double weight, const std::int32_t* serving,
                                  double* acc, std::size_t n);

  // out[i] = 1 / R(min(signal[i] / (noise + interference[i]), sinr_cap)).
  void (*inverse_rate)(const double* signal, const double* interference,
                       double noise, double sinr_cap,
                       const RateKernelParams& rate, double* out,
                       std::size_t n);

  // Vector math primitives, exposed for equivalence tests.
  void (*log)(const double* x, double* out, std::size_t n);
  void (*exp)(const double* x, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

// Null when the AVX2 variant was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);

// Table selected for this process (AVX2+FMA when available).
const KernelTable& active_kernels();

std::string_view isa_name(Isa isa);

}  // namespace cellqos::simd
