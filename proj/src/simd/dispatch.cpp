#include <cstdlib>
#include <string_view>

#include "cellqos/simd.hpp"

namespace cellqos::simd {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

const KernelTable& active_kernels() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* forced = std::getenv("CELLQOS_SIMD");
    if (forced && std::string_view(forced) == "scalar") return scalar_kernels();
    if (cpu_supports(Isa::avx2)) return *avx2_kernels();
    return scalar_kernels();
  }();
  return table;
}

}  // namespace cellqos::simd
