#pragma once
// Data-parallel inner loops used by clustering and cover membership.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The active table is
// picked once at first use from the CPU's capabilities; MULTIMAPPER_SIMD=scalar
// forces the reference path. Variants perform the same floating-point
// operations in the same order per lane, so results are bit-identical.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace mm::simd {

struct KernelTable {
  std::string_view name;

  // acc[j] += (column[j] - q)^2 for every j.
  void (*accumulate_sq_diff)(const double* column, double q, double* acc, std::size_t n);

  // mask[j] &= (lo <= column[j] && column[j] < hi).
  void (*box_mask)(const double* column, double lo, double hi, std::uint8_t* mask,
                   std::size_t n);

  // Number of j with values[j] <= bound.
  std::size_t (*count_le)(const double* values, double bound, std::size_t n);

  // counts[j] += mask[j] for every j.
  void (*accumulate_mask)(const std::uint8_t* mask, std::uint32_t* counts, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
const KernelTable* avx2_kernels() noexcept;  // nullptr when not compiled in
const KernelTable* neon_kernels() noexcept;  // nullptr when not compiled in

// Best table the running CPU supports (honours MULTIMAPPER_SIMD=scalar).
const KernelTable& active() noexcept;

// Convenience wrappers over active().
inline void accumulate_sq_diff(std::span<const double> column, double q, std::span<double> acc) {
  active().accumulate_sq_diff(column.data(), q, acc.data(), acc.size());
}
inline void box_mask(std::span<const double> column, double lo, double hi,
                     std::span<std::uint8_t> mask) {
  active().box_mask(column.data(), lo, hi, mask.data(), mask.size());
}
inline std::size_t count_le(std::span<const double> values, double bound) {
  return active().count_le(values.data(), bound, values.size());
}
inline void accumulate_mask(std::span<const std::uint8_t> mask, std::span<std::uint32_t> counts) {
  active().accumulate_mask(mask.data(), counts.data(), counts.size());
}

}  // namespace mm::simd
