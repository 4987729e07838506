#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "multimapper/geometry.hpp"

namespace mm {

enum class CoverScheme { Cuboidal, Brick };

std::string_view to_string(CoverScheme scheme) noexcept;
CoverScheme parse_scheme(std::string_view text);

// One element of a cover. The base box is a piece of the underlying
// partition; overlap grows it towards the top-right only, and membership is
// the half-open box [base_lo, grown_hi).
struct Bin {
  int id = 0;
  Vec base_lo;
  Vec base_hi;
  Vec grown_hi;
  int level = 0;

  [[nodiscard]] bool contains(std::span<const double> z) const noexcept;
  [[nodiscard]] double base_width(std::size_t k) const { return base_hi[k] - base_lo[k]; }
  // Euclidean diagonal of the grown box.
  [[nodiscard]] double diameter() const;
};

struct Cover {
  std::vector<Bin> bins;
  CoverScheme scheme = CoverScheme::Cuboidal;
  double g = 0.0;
  int bins_per_axis = 1;
  BoundingBox bounds;
  // Set on brick covers built with g >= 0.5, where the three-fold
  // intersection bound no longer holds.
  bool overlap_warning = false;
  // restrict_cover produced no bins.
  bool empty_restriction = false;

  [[nodiscard]] std::size_t dim() const noexcept { return bounds.dim(); }
};

struct BrickLayout {
  // Number of brick rows; 0 means bins_per_axis rows.
  int rows = 0;
};

Cover build_cuboidal_cover(const BoundingBox& bounds, int bins_per_axis, double g);
Cover build_brick_cover(const BoundingBox& bounds, int bins_per_axis, double g,
                        BrickLayout layout = {});
Cover build_cover(CoverScheme scheme, const BoundingBox& bounds, int bins_per_axis, double g);

using PartitionSelector = std::set<int>;

// Replaces each selected bin by m^d children tiling its base box; children
// grow by g times their own width. Cuboidal covers only.
Cover slice_refine(const Cover& cover, const PartitionSelector& selection, int m);

// Keeps the bins that hold at least one lens value of member_ids; the kept
// bins are renumbered densely in their original order.
Cover restrict_cover(const Cover& cover, const LensMap& lens, std::span<const PointIndex> member_ids);

// Point indices (ascending) whose lens value lies in the bin. When subset is
// given only those indices are tested.
std::vector<PointIndex> bin_members(const Bin& bin, const LensMap& lens,
                                    std::optional<std::span<const PointIndex>> subset = std::nullopt);

// First point index of `points` not covered by any bin, if any.
std::optional<PointIndex> first_uncovered(const Cover& cover, const LensMap& lens,
                                          std::optional<std::span<const PointIndex>> subset = std::nullopt);

struct MultiplicityProbe {
  int max_multiplicity = 0;
  Vec witness;  // probe location achieving the maximum
};

// Counts bin membership on a regular grid of probes_per_axis^d points spanning
// the cover's bounds (inclusive of both ends) and returns the maximum.
MultiplicityProbe max_multiplicity(const Cover& cover, int probes_per_axis);

// Exact maximum over the whole plane, found by probing every combination of
// bin lower-corner coordinates.
MultiplicityProbe exact_max_multiplicity(const Cover& cover);

// Degenerate (near zero-width) axes are widened to this width.
inline constexpr double kDegenerateAxisWidth = 1e-9;

}  // namespace mm
