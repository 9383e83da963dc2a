#pragma once

#include <array>
#include <cstddef>

namespace cellqos::simd::detail {

// For sinr > 1 the ergodic integral of ln(1 + t*sinr) against e^-t equals
// e^a * E1(a) with a = 1/sinr <= 1, and
//   E1(a) = -gamma - ln a + sum_k (-1)^(k+1) a^k / (k * k!).
inline constexpr std::size_t kE1Terms = 24;
inline constexpr double kEulerGamma = 0.57721566490153286060651209;

inline constexpr std::array<double, kE1Terms> e1_series_coefficients() {
  std::array<double, kE1Terms> c{};
  double factorial = 1.0;
  for (std::size_t k = 1; k <= kE1Terms; ++k) {
    factorial *= static_cast<double>(k);
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    c[k - 1] = sign / (static_cast<double>(k) * factorial);
  }
  return c;
}

inline constexpr std::array<double, kE1Terms> kE1Coefficients = e1_series_coefficients();

}  // namespace cellqos::simd::detail
