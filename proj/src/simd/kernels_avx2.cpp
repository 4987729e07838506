// Built with -mavx2 on x86-64 only; never called unless the CPU reports AVX2.
#include <immintrin.h>

#include "multimapper/simd.hpp"

namespace mm::simd {
namespace {

// Low nibble of a 4-lane compare mask expanded to four 0/1 bytes.
inline std::uint32_t expand_nibble(int bits) {
  std::uint32_t out = 0;
  for (int b = 0; b < 4; ++b) out |= static_cast<std::uint32_t>((bits >> b) & 1) << (8 * b);
  return out;
}

void accumulate_sq_diff_avx2(const double* column, double q, double* acc, std::size_t n) {
  const __m256d vq = _mm256_set1_pd(q);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(column + j), vq);
    _mm256_storeu_pd(acc + j, _mm256_add_pd(_mm256_loadu_pd(acc + j), _mm256_mul_pd(d, d)));
  }
  for (; j < n; ++j) {
    const double d = column[j] - q;
    acc[j] += d * d;
  }
}

void box_mask_avx2(const double* column, double lo, double hi, std::uint8_t* mask,
                   std::size_t n) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d c = _mm256_loadu_pd(column + j);
    const __m256d inside =
        _mm256_and_pd(_mm256_cmp_pd(vlo, c, _CMP_LE_OQ), _mm256_cmp_pd(c, vhi, _CMP_LT_OQ));
    const std::uint32_t bytes = expand_nibble(_mm256_movemask_pd(inside));
    std::uint32_t current;
    __builtin_memcpy(&current, mask + j, 4);
    current &= bytes;
    __builtin_memcpy(mask + j, &current, 4);
  }
  for (; j < n; ++j) {
    const bool inside = lo <= column[j] && column[j] < hi;
    mask[j] = static_cast<std::uint8_t>(mask[j] & static_cast<std::uint8_t>(inside));
  }
}

std::size_t count_le_avx2(const double* values, double bound, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(bound);
  std::size_t count = 0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const int bits = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(values + j), vb, _CMP_LE_OQ));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(bits)));
  }
  for (; j < n; ++j) count += values[j] <= bound ? 1 : 0;
  return count;
}

void accumulate_mask_avx2(const std::uint8_t* mask, std::uint32_t* counts, std::size_t n) {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m128i raw = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(mask + j));
    const __m256i widened = _mm256_cvtepu8_epi32(raw);
    auto* dst = reinterpret_cast<__m256i*>(counts + j);
    _mm256_storeu_si256(dst, _mm256_add_epi32(_mm256_loadu_si256(dst), widened));
  }
  for (; j < n; ++j) counts[j] += mask[j];
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
  static const KernelTable table{"avx2", accumulate_sq_diff_avx2, box_mask_avx2, count_le_avx2,
                                 accumulate_mask_avx2};
  return &table;
}

}  // namespace mm::simd
