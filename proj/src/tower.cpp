#include "multimapper/tower.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "multimapper/errors.hpp"
#include "multimapper/parallel.hpp"

namespace mm {
namespace {

std::size_t overlap(const std::vector<PointIndex>& a, const std::vector<PointIndex>& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

// Component index per node position of a complex's 1-skeleton, numbered in
// order of first appearance.
std::vector<int> component_labels(const MapperComplex& mc, int& count) {
  std::map<int, std::size_t> pos;
  for (std::size_t i = 0; i < mc.nodes.size(); ++i) pos.emplace(mc.nodes[i].id(), i);
  std::vector<std::size_t> parent(mc.nodes.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Simplex& s : mc.simplices) {
    if (s.size() != 2) continue;
    const std::size_t a = find(pos.at(s[0]));
    const std::size_t b = find(pos.at(s[1]));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> label(mc.nodes.size(), -1);
  std::map<std::size_t, int> root_label;
  for (std::size_t i = 0; i < mc.nodes.size(); ++i) {
    const auto [it, inserted] = root_label.emplace(find(i), static_cast<int>(root_label.size()));
    label[i] = it->second;
  }
  count = static_cast<int>(root_label.size());
  return label;
}

}  // namespace

TowerOfCovers build_tower(const BoundingBox& bounds, int base_cells_per_axis, double g, int levels,
                          double lo_fraction, double hi_fraction) {
  if (base_cells_per_axis < 1) throw Error(ErrorKind::InvalidArgument, "base_cells_per_axis must be >= 1");
  Vec width;
  for (std::size_t k = 0; k < bounds.dim(); ++k) {
    width.push_back(std::max(bounds.width(k), kDegenerateAxisWidth) / base_cells_per_axis);
  }
  return build_tower(bounds, width, g, TowerConfig{levels, lo_fraction, hi_fraction});
}

TowerOfCovers build_tower(const BoundingBox& bounds, const Vec& base_width, double g,
                          const TowerConfig& config) {
  if (config.levels < 2) throw Error(ErrorKind::InvalidArgument, "a tower needs at least 2 levels");
  if (!(config.lo_fraction > 0.0) || !(config.lo_fraction < config.hi_fraction)) {
    throw Error(ErrorKind::InvalidArgument, "need 0 < lo_fraction < hi_fraction");
  }
  if (!(g >= 0.0) || !(g < 1.0)) throw Error(ErrorKind::InvalidOverlap, "overlap must lie in [0, 1)");
  const std::size_t d = bounds.dim();
  if (base_width.size() != d) throw Error(ErrorKind::InvalidArgument, "base width dimension mismatch");

  // Cells of side lo_fraction * base width anchored at bounds.lo. floor + 1
  // cells put bounds.hi strictly inside the last cell.
  Vec step(d);
  std::vector<int> cells(d);
  for (std::size_t k = 0; k < d; ++k) {
    if (!(base_width[k] > 0.0)) throw Error(ErrorKind::InvalidArgument, "base width must be positive");
    step[k] = config.lo_fraction * base_width[k];
    cells[k] = static_cast<int>(std::floor(bounds.width(k) / step[k])) + 1;
  }
  std::size_t total = 1;
  for (const int c : cells) total *= static_cast<std::size_t>(c);

  TowerOfCovers tower;
  tower.base_width = base_width;
  const double reference = *std::max_element(base_width.begin(), base_width.end());
  for (int i = 0; i < config.levels; ++i) {
    const double t = static_cast<double>(i) / (config.levels - 1);
    const double fraction = config.lo_fraction + t * (config.hi_fraction - config.lo_fraction);
    tower.fractions.push_back(fraction);
    tower.levels.push_back(fraction * reference);

    Cover cover;
    cover.scheme = CoverScheme::Cuboidal;
    cover.g = g;
    cover.bins_per_axis = cells.front();
    cover.bounds = bounds;
    for (std::size_t c = 0; c < total; ++c) {
      Bin bin;
      bin.id = static_cast<int>(c);
      std::size_t rest = c;
      for (std::size_t k = 0; k < d; ++k) {
        const auto idx = static_cast<double>(rest % static_cast<std::size_t>(cells[k]));
        rest /= static_cast<std::size_t>(cells[k]);
        const double lo = bounds.lo[k] + idx * step[k];
        const double side = fraction * base_width[k];
        bin.base_lo.push_back(lo);
        bin.base_hi.push_back(lo + side);
        bin.grown_hi.push_back(lo + side * (1.0 + g));
      }
      cover.bins.push_back(std::move(bin));
    }
    tower.covers.push_back(std::move(cover));
  }
  for (int i = 0; i + 1 < config.levels; ++i) {
    std::vector<int> identity(total);
    std::iota(identity.begin(), identity.end(), 0);
    tower.maps.push_back(std::move(identity));
  }
  verify_containment(tower);
  return tower;
}

void verify_containment(const TowerOfCovers& tower) {
  for (std::size_t i = 0; i + 1 < tower.covers.size(); ++i) {
    const auto& from = tower.covers[i].bins;
    const auto& to = tower.covers[i + 1].bins;
    for (std::size_t a = 0; a < from.size(); ++a) {
      const Bin& inner = from[a];
      const Bin& outer = to[static_cast<std::size_t>(tower.maps[i][a])];
      for (std::size_t k = 0; k < inner.base_lo.size(); ++k) {
        if (inner.base_lo[k] < outer.base_lo[k] || inner.grown_hi[k] > outer.grown_hi[k]) {
          throw std::logic_error("tower containment violated at level " + std::to_string(i) + ", bin " +
                                 std::to_string(a));
        }
      }
    }
  }
}

std::vector<int> compose_maps(const TowerOfCovers& tower, std::size_t from, std::size_t to) {
  std::vector<int> result(tower.covers.at(from).bins.size());
  std::iota(result.begin(), result.end(), 0);
  for (std::size_t i = from; i < to; ++i) {
    for (int& v : result) v = tower.maps[i][static_cast<std::size_t>(v)];
  }
  return result;
}

MapperTower tower_mappers(const PointCloud& pc, const LensMap& lens, std::span<const PointIndex> subset,
                          const TowerOfCovers& tower, const ClusterParams& params, int dim_cap) {
  if (subset.empty()) throw Error(ErrorKind::InvalidArgument, "tower over an empty subset");
  MapperTower mt;
  mt.complexes.resize(tower.size());
  parallel_for(tower.size(), [&](std::size_t i) {
    mt.complexes[i] = build_mapper(pc, lens, tower.covers[i], params, dim_cap, subset).complex;
  });

  for (std::size_t i = 0; i + 1 < tower.size(); ++i) {
    const auto& src = mt.complexes[i].nodes;
    const auto& dst = mt.complexes[i + 1].nodes;
    std::vector<int> map(src.size(), -1);
    for (std::size_t p = 0; p < src.size(); ++p) {
      const int target_bin = tower.maps[i][static_cast<std::size_t>(src[p].cluster.bin_id)];
      std::size_t best_same = 0;
      std::size_t best_any = 0;
      int pick_same = -1;
      int pick_any = -1;
      for (std::size_t q = 0; q < dst.size(); ++q) {
        const std::size_t shared = overlap(src[p].cluster.members, dst[q].cluster.members);
        if (shared == 0) continue;
        if (dst[q].cluster.bin_id == target_bin && shared > best_same) {
          best_same = shared;
          pick_same = static_cast<int>(q);
        }
        if (shared > best_any) {
          best_any = shared;
          pick_any = static_cast<int>(q);
        }
      }
      if (pick_same >= 0) {
        map[p] = pick_same;
      } else {
        map[p] = pick_any;
        ++mt.soft_warnings;
      }
    }
    mt.node_maps.push_back(std::move(map));
  }
  return mt;
}

std::vector<int> compose_node_maps(const MapperTower& mt, std::size_t from, std::size_t to) {
  std::vector<int> result(mt.complexes.at(from).nodes.size());
  std::iota(result.begin(), result.end(), 0);
  for (std::size_t i = from; i < to; ++i) {
    for (int& v : result) {
      if (v >= 0) v = mt.node_maps[i][static_cast<std::size_t>(v)];
    }
  }
  return result;
}

bool is_simplicial(const MapperTower& mt, std::size_t level) {
  const MapperComplex& from = mt.complexes.at(level);
  const MapperComplex& to = mt.complexes.at(level + 1);
  std::map<int, std::size_t> pos;
  for (std::size_t i = 0; i < from.nodes.size(); ++i) pos.emplace(from.nodes[i].id(), i);
  const auto& map = mt.node_maps.at(level);
  for (const Simplex& s : from.simplices) {
    Simplex image;
    for (const int v : s) {
      const int q = map[pos.at(v)];
      if (q < 0) return false;
      image.push_back(to.nodes[static_cast<std::size_t>(q)].id());
    }
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    if (image.size() >= 2 && !to.simplices.contains(image)) return false;
  }
  return std::all_of(map.begin(), map.end(), [](int q) { return q >= 0; });
}

int beta0_mode(std::span<const int> beta0_per_level) {
  std::map<int, int> phi;
  for (const int b : beta0_per_level) ++phi[b];
  int best = 0;
  int best_count = 0;
  for (const auto& [b, count] : phi) {  // ascending b, so strict > keeps the smaller on ties
    if (count > best_count) {
      best = b;
      best_count = count;
    }
  }
  return best;
}

PersistenceReport persistence0(const MapperTower& mt, std::span<const double> levels) {
  if (mt.complexes.size() < 2) throw Error(ErrorKind::InvalidArgument, "persistence needs >= 2 levels");
  if (levels.size() != mt.complexes.size()) throw Error(ErrorKind::InvalidArgument, "level count mismatch");

  PersistenceReport report;
  report.levels.assign(levels.begin(), levels.end());
  std::vector<std::vector<int>> labels;
  for (const MapperComplex& mc : mt.complexes) {
    int count = 0;
    labels.push_back(component_labels(mc, count));
    report.beta0.push_back(count);
  }

  struct Class {
    std::size_t birth;
    std::size_t death;
  };
  std::vector<Class> classes;
  std::vector<int> alive(static_cast<std::size_t>(report.beta0[0]));  // component -> class
  for (std::size_t c = 0; c < alive.size(); ++c) {
    alive[c] = static_cast<int>(classes.size());
    classes.push_back({0, 0});
  }

  for (std::size_t i = 0; i + 1 < mt.complexes.size(); ++i) {
    const auto components_here = static_cast<std::size_t>(report.beta0[i]);
    const auto components_next = static_cast<std::size_t>(report.beta0[i + 1]);
    // Image component of each component: the one most of its nodes land in.
    std::vector<std::map<int, int>> votes(components_here);
    for (std::size_t p = 0; p < labels[i].size(); ++p) {
      const int q = mt.node_maps[i][p];
      if (q >= 0) ++votes[static_cast<std::size_t>(labels[i][p])][labels[i + 1][static_cast<std::size_t>(q)]];
    }
    std::vector<std::vector<int>> incoming(components_next);
    for (std::size_t c = 0; c < components_here; ++c) {
      const int cls = alive[c];
      int target = -1;
      int best = 0;
      for (const auto& [comp, n] : votes[c]) {
        if (n > best) {
          best = n;
          target = comp;
        }
      }
      if (target < 0) {
        classes[static_cast<std::size_t>(cls)].death = i;
      } else {
        incoming[static_cast<std::size_t>(target)].push_back(cls);
      }
    }
    std::vector<int> next_alive(components_next);
    for (std::size_t d = 0; d < components_next; ++d) {
      auto& in = incoming[d];
      if (in.empty()) {
        next_alive[d] = static_cast<int>(classes.size());
        classes.push_back({i + 1, i + 1});
        continue;
      }
      // Elder rule: earliest birth survives, ties to the lower class id.
      std::sort(in.begin(), in.end(), [&](int a, int b) {
        const auto& ca = classes[static_cast<std::size_t>(a)];
        const auto& cb = classes[static_cast<std::size_t>(b)];
        return ca.birth != cb.birth ? ca.birth < cb.birth : a < b;
      });
      next_alive[d] = in.front();
      for (std::size_t j = 1; j < in.size(); ++j) classes[static_cast<std::size_t>(in[j])].death = i;
    }
    alive = std::move(next_alive);
  }
  for (const int cls : alive) classes[static_cast<std::size_t>(cls)].death = mt.complexes.size() - 1;

  for (const Class& c : classes) report.pairs.emplace_back(levels[c.birth], levels[c.death]);
  std::sort(report.pairs.begin(), report.pairs.end());
  report.beta0_mode = beta0_mode(report.beta0);
  return report;
}

}  // namespace mm
