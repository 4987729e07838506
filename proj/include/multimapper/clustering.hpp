#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multimapper/geometry.hpp"

namespace mm {

enum class ClusterAlgorithm { Dbscan, SingleLinkage };

struct ClusterParams {
  ClusterAlgorithm algorithm = ClusterAlgorithm::Dbscan;
  double eps = 0.5;        // dbscan radius
  int min_pts = 4;         // dbscan core threshold; also k for auto radius
  double threshold = 1.0;  // single-linkage merge radius
  bool auto_eps = true;    // derive the radius per member set via auto_eps()

  // "dbscan:eps=0.5,min_pts=4", "dbscan:auto", "single:threshold=1.2", "single:auto".
  static ClusterParams parse(std::string_view spec);
  // Canonical spec string; parse(to_spec()) reproduces the params.
  [[nodiscard]] std::string to_spec() const;
  void validate() const;

  friend bool operator==(const ClusterParams&, const ClusterParams&) = default;
};

// A cluster found inside one bin's pullback. Members are ascending point
// indices. region is 0 for the original cover and the magnification index
// for clusters produced by later rescaling.
struct Cluster {
  int id = 0;
  std::vector<PointIndex> members;
  int bin_id = -1;
  int level = 0;
  int region = 0;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

// Approximate path components of the member set. DBSCAN noise is omitted
// from the result. Returned clusters are ordered by discovery over ascending
// point index; ids are left at 0 for the caller to assign. fallback_radius is
// used by the automatic radius when the member set is too small (see
// auto_eps).
std::vector<Cluster> cluster_bin(const PointCloud& pc, std::span<const PointIndex> member_ids,
                                 const ClusterParams& params,
                                 std::optional<double> fallback_radius = std::nullopt);

// 90th percentile (nearest rank) of k-th nearest neighbour distances within
// the member set. With |members| <= k returns fallback_radius, or the ambient
// diameter of the members when no fallback is given. Never returns <= 0.
double auto_eps(const PointCloud& pc, std::span<const PointIndex> member_ids, int k,
                std::optional<double> fallback_radius = std::nullopt);

// Nearest-rank percentile of an unsorted sample (pct in (0, 100]).
double nearest_rank_percentile(std::vector<double> values, int pct);

}  // namespace mm
