#pragma once

#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "multimapper/clustering.hpp"
#include "multimapper/cover.hpp"
#include "multimapper/geometry.hpp"

namespace mm {

// Ascending node ids; dimension is size() - 1.
using Simplex = std::vector<int>;

struct Node {
  Cluster cluster;
  Vec lens_centroid;

  [[nodiscard]] int id() const noexcept { return cluster.id; }
  [[nodiscard]] std::size_t size() const noexcept { return cluster.members.size(); }
};

// Nerve of a cluster collection. Nodes are the 0-simplices; `simplices`
// holds every simplex of dimension 1..dim_cap, lexicographically ordered.
struct MapperComplex {
  std::vector<Node> nodes;
  std::set<Simplex> simplices;
  int dim_cap = 3;
  bool truncated = false;
  // Distinct point witness sets larger than dim_cap + 1.
  int truncated_count = 0;

  [[nodiscard]] const Node* find_node(int id) const;
  [[nodiscard]] int max_dim() const;
  [[nodiscard]] std::size_t count_dim(int dim) const;
};

struct BuildReport {
  int points_total = 0;
  int points_clustered = 0;
  int noise_dropped = 0;
  int bins_empty = 0;
  int truncated_simplices_count = 0;
  std::vector<std::string> warnings;

  friend bool operator==(const BuildReport&, const BuildReport&) = default;
};

inline constexpr int kDefaultDimCap = 3;
inline constexpr int kRegionIdStride = 1'000'000;

// Nerve of the clusters up to dim_cap. Each point's set of containing
// clusters spans a full simplex, which yields exactly the nerve because every
// nonempty intersection has a witness point. When lens is given, node lens
// centroids are filled in.
MapperComplex nerve(const std::vector<Cluster>& clusters, int dim_cap, const LensMap* lens = nullptr);

struct CoverClustering {
  std::vector<Cluster> clusters;
  int bins_empty = 0;
};

// Clusters every bin's pullback (restricted to subset when given). Cluster
// ids are region * kRegionIdStride + running index in (bin id, intra-bin)
// order; cluster level is the bin level plus level_offset.
CoverClustering cluster_cover(const PointCloud& pc, const LensMap& lens, const Cover& cover,
                              const ClusterParams& params, std::optional<std::span<const PointIndex>> subset,
                              int region = 0, int level_offset = 0);

struct MapperBuild {
  MapperComplex complex;
  BuildReport report;
};

MapperBuild build_mapper(const PointCloud& pc, const LensMap& lens, const Cover& cover,
                         const ClusterParams& params, int dim_cap = kDefaultDimCap,
                         std::optional<std::span<const PointIndex>> subset = std::nullopt);

struct Graph {
  std::vector<int> nodes;
  std::vector<std::pair<int, int>> edges;
};

struct Betti {
  int b0 = 0;
  int b1 = 0;
  friend bool operator==(const Betti&, const Betti&) = default;
};

Graph one_skeleton(const MapperComplex& mc);
// b0 by union-find, b1 = E - V + b0.
Betti graph_betti(const Graph& g);
// Homology of the complex over GF(2) in degrees 0 and 1; filled triangles do
// not count as cycles here, unlike graph_betti on the 1-skeleton.
Betti complex_betti(const MapperComplex& mc);

// Connected components of the 1-skeleton as sorted node-id lists, ordered by
// their smallest node id.
std::vector<std::vector<int>> components(const MapperComplex& mc);

// Subcomplex induced on the given node ids.
MapperComplex induced_subcomplex(const MapperComplex& mc, const std::set<int>& node_ids);

// Label-free form of a complex: nodes are identified by member sets, so two
// complexes compare equal iff they are isomorphic via matching member sets.
struct CanonicalComplex {
  std::vector<std::vector<PointIndex>> node_members;
  std::set<Simplex> simplices;  // over positions in node_members
  friend bool operator==(const CanonicalComplex&, const CanonicalComplex&) = default;
};

CanonicalComplex canonical_form(const MapperComplex& mc);

}  // namespace mm
