#pragma once

#include <memory>
#include <set>
#include <vector>

#include "multimapper/clustering.hpp"
#include "multimapper/complex.hpp"
#include "multimapper/cover.hpp"
#include "multimapper/geometry.hpp"

namespace mm {

// Cover recipe for a local region; bounds are taken from the region itself.
struct LocalCoverSpec {
  CoverScheme scheme = CoverScheme::Cuboidal;
  int bins_per_axis = 1;
  double g = 0.25;

  friend bool operator==(const LocalCoverSpec&, const LocalCoverSpec&) = default;
};

struct MagnifyRequest {
  std::vector<int> node_ids;
  LocalCoverSpec cover;
  ClusterParams params;
};

struct RegionRecord {
  std::vector<int> node_ids;  // ascending
  LocalCoverSpec spec;
  ClusterParams params;
  Cover cover;  // built cover; no bins when node_ids is empty
};

// The current cluster collection and its nerve. Region 0 is the base Mapper;
// region r >= 1 holds the clusters added by region_log[r - 1].
struct AnalysisState {
  std::shared_ptr<const PointCloud> pc;
  std::shared_ptr<const LensMap> lens;
  Cover base_cover;
  ClusterParams params;
  int dim_cap = kDefaultDimCap;
  std::vector<Cluster> clusters;
  std::vector<PointIndex> noise;  // ascending, in no cluster
  MapperComplex complex;
  std::vector<RegionRecord> region_log;
  BuildReport report;

  [[nodiscard]] const Cover& region_cover(int region) const;
  [[nodiscard]] const Cluster& cluster(int id) const;  // throws UnknownNode
};

AnalysisState initial_state(std::shared_ptr<const PointCloud> pc, std::shared_ptr<const LensMap> lens,
                            const Cover& cover, const ClusterParams& params, int dim_cap = kDefaultDimCap);

// Points in no cluster, ascending.
std::vector<PointIndex> unclustered_points(std::size_t n, const std::vector<Cluster>& clusters);

// Union of the selected nodes' members, ascending. Throws UnknownNode.
std::vector<PointIndex> selected_points(const AnalysisState& state, const std::vector<int>& node_ids);

// Replaces the Mapper on the selected nodes with a locally covered one built
// over the selection's own points and glues the result back through the
// nerve. Clusters that keep any point outside the selection survive. Returns
// a new state; the input is untouched.
AnalysisState magnify(const AnalysisState& state, const MagnifyRequest& req);

// Same operation; the name documents intent when the local cover is coarser.
inline AnalysisState coarsen(const AnalysisState& state, const MagnifyRequest& req) { return magnify(state, req); }

// Points outside the selection whose lens values fall in the local cover that
// magnify would build. They are not re-clustered.
std::vector<PointIndex> degeneracy_guard(const AnalysisState& state, const MagnifyRequest& req);

// bins_per_axis for a local cover whose bins are `factor` times finer than
// the selected nodes' current bins (factor < 1 coarsens). Per axis the count
// is ceil(factor * selection width / bin width); the largest count wins.
int relative_bins(const AnalysisState& state, const std::vector<int>& node_ids, double factor);

}  // namespace mm
