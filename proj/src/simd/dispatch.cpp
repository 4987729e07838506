#include <cstdlib>
#include <string_view>

#include "multimapper/simd.hpp"

namespace mm::simd {

#if !defined(MULTIMAPPER_HAVE_AVX2)
const KernelTable* avx2_kernels() noexcept { return nullptr; }
#endif
#if !defined(MULTIMAPPER_HAVE_NEON)
const KernelTable* neon_kernels() noexcept { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& select() noexcept {
  if (const char* forced = std::getenv("MULTIMAPPER_SIMD");
      forced != nullptr && std::string_view(forced) == "scalar") {
    return scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels(); t != nullptr && cpu_has_avx2()) return *t;
  if (const KernelTable* t = neon_kernels(); t != nullptr) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace mm::simd
