#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mm {

using PointIndex = std::int32_t;
using Vec = std::vector<double>;

// Point cloud in R^n, stored column-major so per-axis loops stay contiguous.
class PointCloud {
 public:
  PointCloud() = default;
  // rows[i] is point i; every row must have the same length >= 1.
  explicit PointCloud(const std::vector<Vec>& rows);

  [[nodiscard]] std::size_t size() const noexcept { return count_; }
  [[nodiscard]] std::size_t dim() const noexcept { return columns_.size(); }
  [[nodiscard]] double at(std::size_t i, std::size_t k) const { return columns_[k][i]; }
  [[nodiscard]] std::span<const double> column(std::size_t k) const { return columns_[k]; }
  [[nodiscard]] Vec point(std::size_t i) const;

  // Stable FNV-1a digest of the raw coordinates, used to reference datasets
  // from session files without embedding them.
  [[nodiscard]] std::string content_hash() const;

 private:
  std::size_t count_ = 0;
  std::vector<Vec> columns_;
};

// Lens values f(x_i) in R^d with d in {1, 2}; same column-major layout.
class LensMap {
 public:
  LensMap() = default;
  explicit LensMap(const std::vector<Vec>& rows);

  [[nodiscard]] std::size_t size() const noexcept { return count_; }
  [[nodiscard]] std::size_t dim() const noexcept { return columns_.size(); }
  [[nodiscard]] double at(std::size_t i, std::size_t k) const { return columns_[k][i]; }
  [[nodiscard]] std::span<const double> column(std::size_t k) const { return columns_[k]; }
  [[nodiscard]] Vec value(std::size_t i) const;

 private:
  std::size_t count_ = 0;
  std::vector<Vec> columns_;
};

struct BoundingBox {
  Vec lo;
  Vec hi;

  [[nodiscard]] std::size_t dim() const noexcept { return lo.size(); }
  [[nodiscard]] double width(std::size_t k) const { return hi[k] - lo[k]; }
};

LensMap lens_coordinate(const PointCloud& pc, std::span<const std::size_t> axes);

// Projection onto the top-d principal axes of the centred cloud. Each axis is
// signed so that its largest-magnitude loading is positive.
LensMap lens_pca(const PointCloud& pc, std::size_t d);

BoundingBox lens_bounds(const LensMap& lens);
// Bounds over a subset of point indices (nonempty).
BoundingBox lens_bounds(const LensMap& lens, std::span<const PointIndex> subset);

// Parses "coord:0,2" or "pca:2" and evaluates it on pc.
LensMap lens_from_spec(const PointCloud& pc, std::string_view spec);

// CSV ingestion. One row per record, comma separated; a header row is
// detected by a non-numeric first cell. Blank lines are skipped.
std::vector<Vec> parse_csv_rows(std::string_view text);
PointCloud parse_points_csv(std::string_view text);
PointCloud load_points_csv(const std::filesystem::path& path);
LensMap parse_lens_csv(std::string_view text, std::size_t expected_rows);
LensMap load_lens_csv(const std::filesystem::path& path, std::size_t expected_rows);

std::string read_text_file(const std::filesystem::path& path);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace mm
