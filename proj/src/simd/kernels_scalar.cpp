#include "multimapper/simd.hpp"

namespace mm::simd {
namespace {

void accumulate_sq_diff_scalar(const double* column, double q, double* acc, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double d = column[j] - q;
    acc[j] += d * d;
  }
}

void box_mask_scalar(const double* column, double lo, double hi, std::uint8_t* mask,
                     std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const bool inside = lo <= column[j] && column[j] < hi;
    mask[j] = static_cast<std::uint8_t>(mask[j] & static_cast<std::uint8_t>(inside));
  }
}

std::size_t count_le_scalar(const double* values, double bound, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < n; ++j) count += values[j] <= bound ? 1 : 0;
  return count;
}

void accumulate_mask_scalar(const std::uint8_t* mask, std::uint32_t* counts, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) counts[j] += mask[j];
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar", accumulate_sq_diff_scalar, box_mask_scalar,
                                 count_le_scalar, accumulate_mask_scalar};
  return table;
}

}  // namespace mm::simd
