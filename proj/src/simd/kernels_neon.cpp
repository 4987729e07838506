// Built on aarch64 only. NEON is mandatory there, so no runtime probe is needed.
#include <arm_neon.h>

#include "multimapper/simd.hpp"

namespace mm::simd {
namespace {

void accumulate_sq_diff_neon(const double* column, double q, double* acc, std::size_t n) {
  const float64x2_t vq = vdupq_n_f64(q);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(column + j), vq);
    // vmulq + vaddq rather than vfmaq to match the scalar rounding.
    vst1q_f64(acc + j, vaddq_f64(vld1q_f64(acc + j), vmulq_f64(d, d)));
  }
  for (; j < n; ++j) {
    const double d = column[j] - q;
    acc[j] += d * d;
  }
}

void box_mask_neon(const double* column, double lo, double hi, std::uint8_t* mask,
                   std::size_t n) {
  const float64x2_t vlo = vdupq_n_f64(lo);
  const float64x2_t vhi = vdupq_n_f64(hi);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t c = vld1q_f64(column + j);
    const uint64x2_t inside = vandq_u64(vcleq_f64(vlo, c), vcltq_f64(c, vhi));
    mask[j] = static_cast<std::uint8_t>(mask[j] & (vgetq_lane_u64(inside, 0) & 1U));
    mask[j + 1] = static_cast<std::uint8_t>(mask[j + 1] & (vgetq_lane_u64(inside, 1) & 1U));
  }
  for (; j < n; ++j) {
    const bool inside = lo <= column[j] && column[j] < hi;
    mask[j] = static_cast<std::uint8_t>(mask[j] & static_cast<std::uint8_t>(inside));
  }
}

std::size_t count_le_neon(const double* values, double bound, std::size_t n) {
  const float64x2_t vb = vdupq_n_f64(bound);
  uint64x2_t total = vdupq_n_u64(0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    total = vsubq_u64(total, vcleq_f64(vld1q_f64(values + j), vb));  // true lanes are all-ones
  }
  std::size_t count = vgetq_lane_u64(total, 0) + vgetq_lane_u64(total, 1);
  for (; j < n; ++j) count += values[j] <= bound ? 1 : 0;
  return count;
}

void accumulate_mask_neon(const std::uint8_t* mask, std::uint32_t* counts, std::size_t n) {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const uint16x8_t wide = vmovl_u8(vld1_u8(mask + j));
    vst1q_u32(counts + j, vaddq_u32(vld1q_u32(counts + j), vmovl_u16(vget_low_u16(wide))));
    vst1q_u32(counts + j + 4,
              vaddq_u32(vld1q_u32(counts + j + 4), vmovl_u16(vget_high_u16(wide))));
  }
  for (; j < n; ++j) counts[j] += mask[j];
}

}  // namespace

const KernelTable* neon_kernels() noexcept {
  static const KernelTable table{"neon", accumulate_sq_diff_neon, box_mask_neon, count_le_neon,
                                 accumulate_mask_neon};
  return &table;
}

}  // namespace mm::simd
