// AVX2 + FMA variants of the kernels in simd.hpp. This translation unit is
// compiled with -mavx2 -mfma and only reached after a cpuid check.

#include "cellqos/simd.hpp"
#include "ergodic_series.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <limits>

namespace cellqos::simd {
namespace {

constexpr std::size_t kLanes = 4;

// Cephes-style natural logarithm: mantissa reduced to [sqrt(1/2), sqrt(2)),
// rational approximation of degree 5/5, exponent folded back in two parts.
inline __m256d log_pd(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();

  // Subnormals are lifted into the normal range first.
  const __m256d tiny = _mm256_cmp_pd(x, _mm256_set1_pd(std::numeric_limits<double>::min()), _CMP_LT_OQ);
  const __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, _mm256_set1_pd(4503599627370496.0)), tiny);
  const __m256d e_adj = _mm256_and_pd(tiny, _mm256_set1_pd(-52.0));

  const __m256i bits = _mm256_castpd_si256(xs);
  const __m256i exp_field = _mm256_srli_epi64(bits, 52);
  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(exp_field, _mm256_castpd_si256(two52))), two52);
  e = _mm256_add_pd(_mm256_sub_pd(e, _mm256_set1_pd(1022.0)), e_adj);

  const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
  const __m256i half_bits = _mm256_set1_epi64x(0x3fe0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_bits));

  const __m256d below = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(below, one));
  const __m256d f = _mm256_add_pd(_mm256_sub_pd(m, one), _mm256_and_pd(below, m));

  const __m256d z = _mm256_mul_pd(f, f);
  __m256d p = _mm256_set1_pd(1.01875663804580931796e-4);
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(4.97494994976747001425e-1));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(4.70579119878881725854e0));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(1.44989225341610930846e1));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(1.79368678507819816313e1));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(7.70838733755885391666e0));
  __m256d q = _mm256_add_pd(f, _mm256_set1_pd(1.12873587189167450590e1));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(4.52279145837532221105e1));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(8.29875266912776603211e1));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(7.11544750618563894466e1));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(2.31251620126765340583e1));

  __m256d y = _mm256_mul_pd(_mm256_mul_pd(f, z), _mm256_div_pd(p, q));
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
  __m256d r = _mm256_add_pd(f, y);
  r = _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);

  const __m256d is_zero = _mm256_cmp_pd(x, zero, _CMP_EQ_OQ);
  const __m256d is_inf = _mm256_cmp_pd(x, _mm256_set1_pd(std::numeric_limits<double>::infinity()), _CMP_EQ_OQ);
  const __m256d invalid = _mm256_cmp_pd(x, zero, _CMP_NGE_UQ);  // negative or NaN
  r = _mm256_blendv_pd(r, _mm256_set1_pd(-std::numeric_limits<double>::infinity()), is_zero);
  r = _mm256_blendv_pd(r, x, is_inf);
  r = _mm256_blendv_pd(r, _mm256_set1_pd(std::numeric_limits<double>::quiet_NaN()), invalid);
  return r;
}

// 2^k for integral k in [-1022, 1023], built directly in the exponent field.
inline __m256d pow2_pd(__m256d k) {
  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
  const __m256d biased = _mm256_add_pd(_mm256_add_pd(k, _mm256_set1_pd(1023.0)), two52);
  return _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_castpd_si256(biased), 52));
}

// Cephes-style exponential with a Pade form on [-ln2/2, ln2/2].
inline __m256d exp_pd(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.782712893384);
  const __m256d lo = _mm256_set1_pd(-745.1332191019412);
  const __m256d over = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
  const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  const __m256d nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  __m256d v = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(v, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  v = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), v);
  v = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), v);

  const __m256d xx = _mm256_mul_pd(v, v);
  __m256d px = _mm256_set1_pd(1.26177193074810590878e-4);
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(3.02994407707441961300e-2));
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(9.99999999999999999910e-1));
  px = _mm256_mul_pd(px, v);
  __m256d qx = _mm256_set1_pd(3.00198505138664455042e-6);
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.52448340349684104192e-3));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.27265548208155028766e-1));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.00000000000000000009e0));
  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  // Split the scaling so that results in the subnormal or overflow range
  // still come out of a plain multiplication.
  const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
  const __m256d n2 = _mm256_sub_pd(n, n1);
  r = _mm256_mul_pd(_mm256_mul_pd(r, pow2_pd(n1)), pow2_pd(n2));

  r = _mm256_blendv_pd(r, _mm256_set1_pd(std::numeric_limits<double>::infinity()), over);
  r = _mm256_blendv_pd(r, _mm256_setzero_pd(), under);
  r = _mm256_blendv_pd(r, x, nan);
  return r;
}

// ln(1 + x) with the usual correction term for small x.
inline __m256d log1p_pd(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d u = _mm256_add_pd(one, x);
  const __m256d lu = log_pd(u);
  const __m256d corr = _mm256_div_pd(_mm256_sub_pd(_mm256_sub_pd(u, one), x), u);
  const __m256d r = _mm256_sub_pd(lu, corr);
  const __m256d is_inf = _mm256_cmp_pd(u, _mm256_set1_pd(std::numeric_limits<double>::infinity()), _CMP_EQ_OQ);
  return _mm256_blendv_pd(r, lu, is_inf);
}

// Runs `body(offset)` on full vectors, then once more on a zero-padded copy
// of the tail so that every element goes through the same vector code.
template <std::size_t NIn, std::size_t NOut, class Body>
void for_each_block(std::size_t n, const std::array<const double*, NIn>& in,
                    const std::array<double*, NOut>& out, Body&& body) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) body(in, out, i);
  if (i == n) return;
  const std::size_t rest = n - i;
  alignas(32) double in_buf[NIn == 0 ? 1 : NIn][kLanes] = {};
  alignas(32) double out_buf[NOut == 0 ? 1 : NOut][kLanes] = {};
  std::array<const double*, NIn> tin{};
  std::array<double*, NOut> tout{};
  for (std::size_t k = 0; k < NIn; ++k) {
    if (in[k]) {
      std::fill(std::begin(in_buf[k]), std::end(in_buf[k]), 1.0);
      std::memcpy(in_buf[k], in[k] + i, rest * sizeof(double));
      tin[k] = in_buf[k];
    }
  }
  for (std::size_t k = 0; k < NOut; ++k) {
    std::memcpy(out_buf[k], out[k] + i, rest * sizeof(double));
    tout[k] = out_buf[k];
  }
  body(tin, tout, 0);
  for (std::size_t k = 0; k < NOut; ++k) std::memcpy(out[k] + i, out_buf[k], rest * sizeof(double));
}

void station_gain(double sx, double sy, const double* px, const double* py,
                  const double* log_shadow, double log_scale, double half_beta,
                  double* out, std::size_t n) {
  const __m256d vsx = _mm256_set1_pd(sx);
  const __m256d vsy = _mm256_set1_pd(sy);
  const __m256d vscale = _mm256_set1_pd(log_scale);
  const __m256d vhb = _mm256_set1_pd(half_beta);
  for_each_block<3, 1>(n, {px, py, log_shadow}, {out},
                       [&](const auto& in, const auto& o, std::size_t i) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(in[0] + i), vsx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(in[1] + i), vsy);
    const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    __m256d e = _mm256_fnmadd_pd(vhb, log_pd(r2), vscale);
    if (in[2]) e = _mm256_add_pd(e, _mm256_loadu_pd(in[2] + i));
    _mm256_storeu_pd(o[0] + i, exp_pd(e));
  });
}

void serving_update(const double* gain, std::int32_t station, double* best_gain,
                    std::int32_t* best_station, std::size_t n) {
  const __m128i vstation = _mm_set1_epi32(station);
  const __m256i pack = _mm256_setr_epi32(0, 2, 4, 6, 1, 3, 5, 7);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d g = _mm256_loadu_pd(gain + i);
    const __m256d b = _mm256_loadu_pd(best_gain + i);
    const __m256d gt = _mm256_cmp_pd(g, b, _CMP_GT_OQ);
    _mm256_storeu_pd(best_gain + i, _mm256_blendv_pd(b, g, gt));
    const __m128i m32 = _mm256_castsi256_si128(
        _mm256_permutevar8x32_epi32(_mm256_castpd_si256(gt), pack));
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(best_station + i));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(best_station + i),
                     _mm_blendv_epi8(idx, vstation, m32));
  }
  for (; i < n; ++i) {
    if (gain[i] > best_gain[i]) {
      best_gain[i] = gain[i];
      best_station[i] = station;
    }
  }
}

void accumulate_interference(const double* gain, std::int32_t station,
                             double weight, const std::int32_t* serving,
                             double* acc, std::size_t n) {
  const __m256d w = _mm256_set1_pd(weight);
  const __m128i vstation = _mm_set1_epi32(station);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m128i s = _mm_loadu_si128(reinterpret_cast<const __m128i*>(serving + i));
    const __m256d own = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpeq_epi32(s, vstation)));
    const __m256d contrib = _mm256_andnot_pd(own, _mm256_mul_pd(w, _mm256_loadu_pd(gain + i)));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), contrib));
  }
  for (; i < n; ++i) {
    if (serving[i] != station) acc[i] += weight * gain[i];
  }
}

void inverse_rate(const double* signal, const double* interference,
                  double noise, double sinr_cap, const RateKernelParams& rate,
                  double* out, std::size_t n) {
  const __m256d vnoise = _mm256_set1_pd(noise);
  const __m256d vcap = _mm256_set1_pd(sinr_cap);
  const __m256d vscale = _mm256_set1_pd(rate.scale_bps);
  const __m256d one = _mm256_set1_pd(1.0);
  for_each_block<2, 1>(n, {signal, interference}, {out},
                       [&](const auto& in, const auto& o, std::size_t i) {
    const __m256d sig = _mm256_loadu_pd(in[0] + i);
    const __m256d itf = _mm256_loadu_pd(in[1] + i);
    const __m256d sinr = _mm256_min_pd(_mm256_div_pd(sig, _mm256_add_pd(vnoise, itf)), vcap);
    __m256d nats;
    if (rate.mode == RateMode::awgn) {
      nats = log1p_pd(sinr);
    } else {
      const __m256d small = _mm256_cmp_pd(sinr, one, _CMP_LE_OQ);
      __m256d quad = _mm256_setzero_pd();
      if (_mm256_movemask_pd(small) != 0) {
        for (std::size_t k = 0; k < kLaguerreNodes; ++k) {
          const __m256d t = _mm256_mul_pd(_mm256_set1_pd(rate.nodes[k]), sinr);
          quad = _mm256_fmadd_pd(_mm256_set1_pd(rate.weights[k]), log1p_pd(t), quad);
        }
      }
      __m256d closed = _mm256_setzero_pd();
      if (_mm256_movemask_pd(small) != 0xF) {
        const __m256d a = _mm256_div_pd(one, sinr);
        __m256d series = _mm256_setzero_pd();
        for (std::size_t k = detail::kE1Terms; k-- > 0;) {
          series = _mm256_mul_pd(a, _mm256_add_pd(_mm256_set1_pd(detail::kE1Coefficients[k]), series));
        }
        const __m256d e1 = _mm256_sub_pd(_mm256_sub_pd(series, _mm256_set1_pd(detail::kEulerGamma)), log_pd(a));
        closed = _mm256_mul_pd(exp_pd(a), e1);
      }
      nats = _mm256_blendv_pd(closed, quad, small);
    }
    _mm256_storeu_pd(o[0] + i, _mm256_div_pd(one, _mm256_mul_pd(vscale, nats)));
  });
}

void vlog(const double* x, double* out, std::size_t n) {
  for_each_block<1, 1>(n, {x}, {out}, [](const auto& in, const auto& o, std::size_t i) {
    _mm256_storeu_pd(o[0] + i, log_pd(_mm256_loadu_pd(in[0] + i)));
  });
}

void vexp(const double* x, double* out, std::size_t n) {
  for_each_block<1, 1>(n, {x}, {out}, [](const auto& in, const auto& o, std::size_t i) {
    _mm256_storeu_pd(o[0] + i, exp_pd(_mm256_loadu_pd(in[0] + i)));
  });
}

constexpr KernelTable kAvx2{
    "avx2",        station_gain, serving_update, accumulate_interference,
    inverse_rate,  vlog,         vexp,
};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace cellqos::simd

#else

namespace cellqos::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace cellqos::simd

#endif
