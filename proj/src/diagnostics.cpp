#include "multimapper/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include "multimapper/errors.hpp"
#include "multimapper/parallel.hpp"

namespace mm {
namespace {

std::vector<const Simplex*> simplices_up_to(const MapperComplex& mc, int max_dim) {
  if (max_dim < 1) throw Error(ErrorKind::InvalidArgument, "max_dim must be >= 1");
  std::vector<const Simplex*> out;
  for (const Simplex& s : mc.simplices) {
    if (static_cast<int>(s.size()) - 1 <= max_dim) out.push_back(&s);
  }
  return out;
}

Diagnosis collect(std::vector<std::optional<ViolationReport>>& found, int skipped, std::size_t checked) {
  Diagnosis d;
  for (auto& v : found) {
    if (v) d.violations.push_back(std::move(*v));
  }
  d.bad = !d.violations.empty();
  d.skipped = skipped;
  d.checked = static_cast<int>(checked);
  return d;
}

// Smallest base width per axis over the bins behind the simplex's nodes.
Vec reference_width(const AnalysisState& state, const Simplex& simplex, double& g) {
  Vec width(state.lens->dim(), std::numeric_limits<double>::infinity());
  g = state.base_cover.g;
  for (const int id : simplex) {
    const Cluster& c = state.cluster(id);
    const Cover& cover = state.region_cover(c.region);
    const auto it = std::find_if(cover.bins.begin(), cover.bins.end(), [&](const Bin& b) { return b.id == c.bin_id; });
    if (it == cover.bins.end()) continue;
    g = cover.g;
    for (std::size_t k = 0; k < width.size(); ++k) width[k] = std::min(width[k], it->base_width(k));
  }
  for (double& w : width) {
    if (!std::isfinite(w) || !(w > 0.0)) w = kDegenerateAxisWidth;
  }
  return width;
}

std::vector<std::vector<PointIndex>> level_components(const MapperComplex& mc) {
  std::vector<std::vector<PointIndex>> out;
  for (const auto& ids : components(mc)) {
    std::vector<PointIndex> pts;
    for (const int id : ids) {
      const auto& m = mc.find_node(id)->cluster.members;
      pts.insert(pts.end(), m.begin(), m.end());
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    out.push_back(std::move(pts));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string_view to_string(DiagnoseMethod method) noexcept {
  return method == DiagnoseMethod::Clustering ? "clustering" : "persistence";
}

DiagnoseMethod parse_method(std::string_view text) {
  if (text == "clustering") return DiagnoseMethod::Clustering;
  if (text == "persistence") return DiagnoseMethod::Persistence;
  throw Error(ErrorKind::ParseError, "unknown diagnose method '" + std::string(text) + "'");
}

std::string_view to_string(ActionKind kind) noexcept { return kind == ActionKind::Refine ? "refine" : "coarsen"; }

std::vector<PointIndex> simplex_intersection(const AnalysisState& state, const Simplex& simplex) {
  std::vector<PointIndex> acc;
  bool first = true;
  for (const int id : simplex) {
    const auto& m = state.cluster(id).members;
    if (first) {
      acc = m;
      first = false;
      continue;
    }
    std::vector<PointIndex> next;
    std::set_intersection(acc.begin(), acc.end(), m.begin(), m.end(), std::back_inserter(next));
    acc = std::move(next);
  }
  return acc;
}

Diagnosis check_clustering(const AnalysisState& state, const ClusterParams& params, int max_dim) {
  params.validate();
  const auto todo = simplices_up_to(state.complex, max_dim);
  std::vector<std::optional<ViolationReport>> found(todo.size());
  parallel_for(todo.size(), [&](std::size_t i) {
    const Simplex& s = *todo[i];
    const std::vector<PointIndex> common = simplex_intersection(state, s);
    std::vector<Cluster> parts = cluster_bin(*state.pc, common, params);
    if (parts.size() < 2) return;
    ViolationReport v;
    v.simplex = s;
    v.method = DiagnoseMethod::Clustering;
    v.beta0 = static_cast<int>(parts.size());
    v.witness = {parts[0].members.front(), parts[1].members.front()};
    for (Cluster& c : parts) v.components.push_back(std::move(c.members));
    found[i] = std::move(v);
  });
  Diagnosis d = collect(found, 0, todo.size());
  for (ViolationReport& v : d.violations) v.action = choose_action(v, state);
  return d;
}

Diagnosis check_persistence(const AnalysisState& state, const TowerConfig& config, int max_dim) {
  if (config.levels < 2) throw Error(ErrorKind::InvalidArgument, "a tower needs at least 2 levels");
  const auto todo = simplices_up_to(state.complex, max_dim);
  std::vector<std::optional<ViolationReport>> found(todo.size());
  std::vector<char> skipped(todo.size(), 0);
  parallel_for(todo.size(), [&](std::size_t i) {
    const Simplex& s = *todo[i];
    const std::vector<PointIndex> common = simplex_intersection(state, s);
    if (common.size() < 2) {
      skipped[i] = 1;
      return;
    }
    double g = 0.0;
    const Vec width = reference_width(state, s, g);
    const TowerOfCovers tower = build_tower(lens_bounds(*state.lens, common), width, g, config);
    const MapperTower mt = tower_mappers(*state.pc, *state.lens, common, tower, state.params);
    PersistenceReport pr = persistence0(mt, tower.levels);
    if (pr.beta0_mode <= 1) return;

    ViolationReport v;
    v.simplex = s;
    v.method = DiagnoseMethod::Persistence;
    v.beta0 = pr.beta0_mode;
    const auto level = static_cast<std::size_t>(
        std::find(pr.beta0.begin(), pr.beta0.end(), pr.beta0_mode) - pr.beta0.begin());
    v.components = level_components(mt.complexes[level]);
    v.witness = {v.components[0].front(), v.components[1].front()};
    v.persistence = std::move(pr);
    found[i] = std::move(v);
  });
  const int skip_count = static_cast<int>(std::count(skipped.begin(), skipped.end(), 1));
  Diagnosis d = collect(found, skip_count, todo.size());
  for (ViolationReport& v : d.violations) v.action = choose_action(v, state);
  return d;
}

Diagnosis diagnose(const AnalysisState& state, DiagnoseMethod method, int levels, int max_dim) {
  if (method == DiagnoseMethod::Clustering) return check_clustering(state, state.params, max_dim);
  TowerConfig config;
  config.levels = levels;
  return check_persistence(state, config, max_dim);
}

SuggestedAction choose_action(const ViolationReport& v, const AnalysisState& state) {
  const auto in_simplex = [&](int id) { return std::binary_search(v.simplex.begin(), v.simplex.end(), id); };
  bool all_elsewhere = !v.components.empty();
  for (const auto& comp : v.components) {
    bool held = false;
    for (const Cluster& c : state.clusters) {
      if (in_simplex(c.id)) continue;
      std::vector<PointIndex> shared;
      std::set_intersection(comp.begin(), comp.end(), c.members.begin(), c.members.end(),
                            std::back_inserter(shared));
      if (2 * shared.size() >= comp.size()) {
        held = true;
        break;
      }
    }
    if (!held) {
      all_elsewhere = false;
      break;
    }
  }
  return all_elsewhere ? SuggestedAction{ActionKind::Coarsen, 2.0} : SuggestedAction{ActionKind::Refine, 2.0};
}

MagnifyRequest suggest_action(const ViolationReport& v, const AnalysisState& state) {
  MagnifyRequest req;
  req.node_ids = v.simplex;
  const double factor = v.action.kind == ActionKind::Refine ? v.action.factor : 1.0 / v.action.factor;
  req.cover = LocalCoverSpec{CoverScheme::Cuboidal, relative_bins(state, v.simplex, factor), state.base_cover.g};
  req.params = state.params;
  return req;
}

}  // namespace mm
