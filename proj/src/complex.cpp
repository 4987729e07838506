#include "multimapper/complex.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "multimapper/errors.hpp"
#include "multimapper/parallel.hpp"

namespace mm {
namespace {

// All subsets of `set` with between 2 and max_size elements, in ascending
// element order.
void emit_subsets(const std::vector<int>& set, std::size_t max_size, std::set<Simplex>& out) {
  const std::size_t n = set.size();
  Simplex current;
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (current.size() >= 2) out.insert(current);
    if (current.size() == max_size) return;
    for (std::size_t i = start; i < n; ++i) {
      current.push_back(set[i]);
      self(self, i + 1);
      current.pop_back();
    }
  };
  recurse(recurse, 0);
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace

const Node* MapperComplex::find_node(int id) const {
  const auto it = std::find_if(nodes.begin(), nodes.end(), [id](const Node& n) { return n.id() == id; });
  return it == nodes.end() ? nullptr : &*it;
}

int MapperComplex::max_dim() const {
  if (nodes.empty()) return -1;
  int best = 0;
  for (const Simplex& s : simplices) best = std::max(best, static_cast<int>(s.size()) - 1);
  return best;
}

std::size_t MapperComplex::count_dim(int dim) const {
  if (dim == 0) return nodes.size();
  return static_cast<std::size_t>(std::count_if(simplices.begin(), simplices.end(), [dim](const Simplex& s) {
    return static_cast<int>(s.size()) - 1 == dim;
  }));
}

MapperComplex nerve(const std::vector<Cluster>& clusters, int dim_cap, const LensMap* lens) {
  if (dim_cap < 1) throw Error(ErrorKind::InvalidArgument, "dim_cap must be >= 1");
  MapperComplex mc;
  mc.dim_cap = dim_cap;
  PointIndex max_point = -1;
  for (const Cluster& c : clusters) {
    Node node{c, {}};
    if (lens != nullptr && !c.members.empty()) {
      node.lens_centroid.assign(lens->dim(), 0.0);
      for (const PointIndex p : c.members) {
        for (std::size_t k = 0; k < lens->dim(); ++k) node.lens_centroid[k] += lens->at(static_cast<std::size_t>(p), k);
      }
      for (double& v : node.lens_centroid) v /= static_cast<double>(c.members.size());
    }
    mc.nodes.push_back(std::move(node));
    if (!c.members.empty()) max_point = std::max(max_point, c.members.back());
  }

  std::vector<std::vector<int>> containing(static_cast<std::size_t>(max_point + 1));
  for (const Cluster& c : clusters) {
    for (const PointIndex p : c.members) containing[static_cast<std::size_t>(p)].push_back(c.id);
  }
  // Many points share a witness set; enumerate each distinct set once.
  std::vector<std::vector<int>> witness_sets;
  for (auto& s : containing) {
    if (s.size() < 2) continue;
    std::sort(s.begin(), s.end());
    witness_sets.push_back(std::move(s));
  }
  std::sort(witness_sets.begin(), witness_sets.end());
  witness_sets.erase(std::unique(witness_sets.begin(), witness_sets.end()), witness_sets.end());

  const auto max_size = static_cast<std::size_t>(dim_cap) + 1;
  for (const auto& s : witness_sets) {
    if (s.size() > max_size) {
      mc.truncated = true;
      ++mc.truncated_count;
    }
    emit_subsets(s, max_size, mc.simplices);
  }
  return mc;
}

CoverClustering cluster_cover(const PointCloud& pc, const LensMap& lens, const Cover& cover,
                              const ClusterParams& params, std::optional<std::span<const PointIndex>> subset,
                              int region, int level_offset) {
  std::vector<std::vector<Cluster>> per_bin(cover.bins.size());
  std::vector<char> empty(cover.bins.size(), 0);
  parallel_for(cover.bins.size(), [&](std::size_t b) {
    const Bin& bin = cover.bins[b];
    const std::vector<PointIndex> members = bin_members(bin, lens, subset);
    if (members.empty()) {
      empty[b] = 1;
      return;
    }
    per_bin[b] = cluster_bin(pc, members, params, bin.diameter());
  });

  CoverClustering out;
  int local = 0;
  for (std::size_t b = 0; b < cover.bins.size(); ++b) {
    out.bins_empty += empty[b];
    for (Cluster& c : per_bin[b]) {
      c.id = region * kRegionIdStride + local++;
      c.bin_id = cover.bins[b].id;
      c.level = cover.bins[b].level + level_offset;
      c.region = region;
      out.clusters.push_back(std::move(c));
    }
  }
  return out;
}

MapperBuild build_mapper(const PointCloud& pc, const LensMap& lens, const Cover& cover,
                         const ClusterParams& params, int dim_cap,
                         std::optional<std::span<const PointIndex>> subset) {
  if (lens.size() != pc.size()) {
    throw Error(ErrorKind::LensSizeMismatch, "lens has " + std::to_string(lens.size()) + " values for " +
                                                 std::to_string(pc.size()) + " points");
  }
  if (lens.dim() != cover.dim()) throw Error(ErrorKind::InvalidArgument, "cover and lens dimensions differ");
  params.validate();
  if (const auto missed = first_uncovered(cover, lens, subset)) {
    throw Error(ErrorKind::CoverageError, "point " + std::to_string(*missed) + " lies in no bin");
  }
  CoverClustering cc = cluster_cover(pc, lens, cover, params, subset);

  MapperBuild out;
  out.complex = nerve(cc.clusters, dim_cap, &lens);
  std::vector<char> clustered(pc.size(), 0);
  for (const Cluster& c : cc.clusters) {
    for (const PointIndex p : c.members) clustered[static_cast<std::size_t>(p)] = 1;
  }
  out.report.points_total = subset ? static_cast<int>(subset->size()) : static_cast<int>(pc.size());
  out.report.points_clustered = static_cast<int>(std::count(clustered.begin(), clustered.end(), 1));
  out.report.noise_dropped = out.report.points_total - out.report.points_clustered;
  out.report.bins_empty = cc.bins_empty;
  out.report.truncated_simplices_count = out.complex.truncated_count;
  if (cover.overlap_warning) {
    out.report.warnings.emplace_back("brick overlap >= 0.5: bins may meet four at a time");
  }
  return out;
}

Graph one_skeleton(const MapperComplex& mc) {
  Graph g;
  for (const Node& n : mc.nodes) g.nodes.push_back(n.id());
  for (const Simplex& s : mc.simplices) {
    if (s.size() == 2) g.edges.emplace_back(s[0], s[1]);
  }
  return g;
}

Betti graph_betti(const Graph& g) {
  std::map<int, std::size_t> index;
  for (const int v : g.nodes) index.emplace(v, index.size());
  UnionFind uf(index.size());
  int components = static_cast<int>(index.size());
  for (const auto& [a, b] : g.edges) {
    if (uf.unite(index.at(a), index.at(b))) --components;
  }
  Betti betti;
  betti.b0 = components;
  betti.b1 = static_cast<int>(g.edges.size()) - static_cast<int>(g.nodes.size()) + components;
  return betti;
}

Betti complex_betti(const MapperComplex& mc) {
  const Graph g = one_skeleton(mc);
  Betti betti = graph_betti(g);
  std::map<std::pair<int, int>, int> edge_index;
  for (const auto& e : g.edges) edge_index.emplace(e, static_cast<int>(edge_index.size()));

  // Column reduction of the triangle boundary matrix over GF(2).
  std::map<int, std::vector<int>> by_pivot;
  int rank = 0;
  for (const Simplex& s : mc.simplices) {
    if (s.size() != 3) continue;
    std::vector<int> column = {edge_index.at({s[0], s[1]}), edge_index.at({s[0], s[2]}),
                               edge_index.at({s[1], s[2]})};
    std::sort(column.begin(), column.end());
    while (!column.empty()) {
      const auto hit = by_pivot.find(column.back());
      if (hit == by_pivot.end()) break;
      std::vector<int> sum;
      std::set_symmetric_difference(column.begin(), column.end(), hit->second.begin(), hit->second.end(),
                                    std::back_inserter(sum));
      column = std::move(sum);
    }
    if (!column.empty()) {
      const int pivot = column.back();
      by_pivot.emplace(pivot, std::move(column));
      ++rank;
    }
  }
  betti.b1 -= rank;
  return betti;
}

std::vector<std::vector<int>> components(const MapperComplex& mc) {
  std::map<int, std::size_t> index;
  for (const Node& n : mc.nodes) index.emplace(n.id(), index.size());
  UnionFind uf(index.size());
  for (const Simplex& s : mc.simplices) {
    if (s.size() == 2) uf.unite(index.at(s[0]), index.at(s[1]));
  }
  std::map<std::size_t, std::vector<int>> groups;
  for (const auto& [id, i] : index) groups[uf.find(i)].push_back(id);
  std::vector<std::vector<int>> out;
  for (auto& [root, ids] : groups) out.push_back(std::move(ids));  // ids ascending via map order
  std::sort(out.begin(), out.end());
  return out;
}

MapperComplex induced_subcomplex(const MapperComplex& mc, const std::set<int>& node_ids) {
  MapperComplex out;
  out.dim_cap = mc.dim_cap;
  out.truncated = mc.truncated;
  for (const Node& n : mc.nodes) {
    if (node_ids.contains(n.id())) out.nodes.push_back(n);
  }
  for (const Simplex& s : mc.simplices) {
    if (std::all_of(s.begin(), s.end(), [&](int v) { return node_ids.contains(v); })) out.simplices.insert(s);
  }
  return out;
}

CanonicalComplex canonical_form(const MapperComplex& mc) {
  std::vector<std::size_t> order(mc.nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mc.nodes[a].cluster.members < mc.nodes[b].cluster.members;
  });
  CanonicalComplex out;
  std::map<int, int> position;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Node& n = mc.nodes[order[i]];
    out.node_members.push_back(n.cluster.members);
    position.emplace(n.id(), static_cast<int>(i));
  }
  for (const Simplex& s : mc.simplices) {
    Simplex mapped;
    for (const int v : s) mapped.push_back(position.at(v));
    std::sort(mapped.begin(), mapped.end());
    out.simplices.insert(std::move(mapped));
  }
  return out;
}

}  // namespace mm
