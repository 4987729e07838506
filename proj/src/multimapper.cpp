#include "multimapper/multimapper.hpp"

#include <algorithm>
#include <cmath>

#include "multimapper/errors.hpp"

namespace mm {
namespace {

std::vector<int> sorted_ids(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

Cover local_cover(const LensMap& lens, std::span<const PointIndex> points, const LocalCoverSpec& spec) {
  return build_cover(spec.scheme, lens_bounds(lens, points), spec.bins_per_axis, spec.g);
}

BuildReport report_for(const AnalysisState& s) {
  BuildReport r;
  r.points_total = static_cast<int>(s.pc->size());
  r.noise_dropped = static_cast<int>(s.noise.size());
  r.points_clustered = r.points_total - r.noise_dropped;
  r.truncated_simplices_count = s.complex.truncated_count;
  return r;
}

}  // namespace

const Cover& AnalysisState::region_cover(int region) const {
  if (region == 0) return base_cover;
  return region_log.at(static_cast<std::size_t>(region - 1)).cover;
}

const Cluster& AnalysisState::cluster(int id) const {
  const auto it = std::find_if(clusters.begin(), clusters.end(), [id](const Cluster& c) { return c.id == id; });
  if (it == clusters.end()) throw Error(ErrorKind::UnknownNode, "no node with id " + std::to_string(id));
  return *it;
}

std::vector<PointIndex> unclustered_points(std::size_t n, const std::vector<Cluster>& clusters) {
  std::vector<char> seen(n, 0);
  for (const Cluster& c : clusters) {
    for (const PointIndex p : c.members) seen[static_cast<std::size_t>(p)] = 1;
  }
  std::vector<PointIndex> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] == 0) out.push_back(static_cast<PointIndex>(i));
  }
  return out;
}

AnalysisState initial_state(std::shared_ptr<const PointCloud> pc, std::shared_ptr<const LensMap> lens,
                            const Cover& cover, const ClusterParams& params, int dim_cap) {
  MapperBuild build = build_mapper(*pc, *lens, cover, params, dim_cap);
  AnalysisState s;
  s.pc = std::move(pc);
  s.lens = std::move(lens);
  s.base_cover = cover;
  s.params = params;
  s.dim_cap = dim_cap;
  for (const Node& n : build.complex.nodes) s.clusters.push_back(n.cluster);
  s.noise = unclustered_points(s.pc->size(), s.clusters);
  s.complex = std::move(build.complex);
  s.report = std::move(build.report);
  return s;
}

std::vector<PointIndex> selected_points(const AnalysisState& state, const std::vector<int>& node_ids) {
  std::vector<PointIndex> out;
  for (const int id : node_ids) {
    const Cluster& c = state.cluster(id);
    out.insert(out.end(), c.members.begin(), c.members.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AnalysisState magnify(const AnalysisState& state, const MagnifyRequest& req) {
  const std::vector<int> ids = sorted_ids(req.node_ids);
  const std::vector<PointIndex> x_sel = selected_points(state, ids);
  req.params.validate();

  AnalysisState next = state;
  RegionRecord record{ids, req.cover, req.params, {}};
  if (ids.empty()) {
    next.region_log.push_back(std::move(record));
    return next;
  }

  record.cover = local_cover(*state.lens, x_sel, req.cover);
  const int region = static_cast<int>(state.region_log.size()) + 1;
  int max_level = 0;
  for (const int id : ids) max_level = std::max(max_level, state.cluster(id).level);

  // Keep clusters with at least one point outside the selection.
  std::vector<Cluster> kept;
  for (const Cluster& c : state.clusters) {
    const bool inside = std::includes(x_sel.begin(), x_sel.end(), c.members.begin(), c.members.end());
    if (!inside) kept.push_back(c);
  }
  CoverClustering fresh =
      cluster_cover(*state.pc, *state.lens, record.cover, req.params, x_sel, region, max_level + 1);
  kept.insert(kept.end(), std::make_move_iterator(fresh.clusters.begin()),
              std::make_move_iterator(fresh.clusters.end()));

  next.clusters = std::move(kept);
  next.noise = unclustered_points(state.pc->size(), next.clusters);
  next.complex = nerve(next.clusters, state.dim_cap, state.lens.get());
  next.region_log.push_back(std::move(record));
  next.report = report_for(next);
  next.report.bins_empty = state.report.bins_empty + fresh.bins_empty;
  if (req.cover.scheme == CoverScheme::Brick && req.cover.g >= 0.5) {
    next.report.warnings.emplace_back("brick overlap >= 0.5: bins may meet four at a time");
  }
  return next;
}

std::vector<PointIndex> degeneracy_guard(const AnalysisState& state, const MagnifyRequest& req) {
  const std::vector<int> ids = sorted_ids(req.node_ids);
  if (ids.empty()) return {};
  const std::vector<PointIndex> x_sel = selected_points(state, ids);
  const Cover cover = local_cover(*state.lens, x_sel, req.cover);
  std::vector<PointIndex> out;
  std::vector<double> z(state.lens->dim());
  for (std::size_t i = 0; i < state.lens->size(); ++i) {
    const auto p = static_cast<PointIndex>(i);
    if (std::binary_search(x_sel.begin(), x_sel.end(), p)) continue;
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = state.lens->at(i, k);
    if (std::any_of(cover.bins.begin(), cover.bins.end(), [&](const Bin& b) { return b.contains(z); })) {
      out.push_back(p);
    }
  }
  return out;
}

int relative_bins(const AnalysisState& state, const std::vector<int>& node_ids, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw Error(ErrorKind::InvalidArgument, "bin factor must be > 0");
  const std::vector<int> ids = sorted_ids(node_ids);
  if (ids.empty()) return 1;
  const std::vector<PointIndex> x_sel = selected_points(state, ids);
  const BoundingBox box = lens_bounds(*state.lens, x_sel);
  Vec bin_width(box.dim(), 0.0);
  for (const int id : ids) {
    const Cluster& c = state.cluster(id);
    const Cover& cover = state.region_cover(c.region);
    const auto it = std::find_if(cover.bins.begin(), cover.bins.end(), [&](const Bin& b) { return b.id == c.bin_id; });
    if (it == cover.bins.end()) continue;
    for (std::size_t k = 0; k < box.dim(); ++k) bin_width[k] = std::max(bin_width[k], it->base_width(k));
  }
  int bins = 1;
  for (std::size_t k = 0; k < box.dim(); ++k) {
    if (!(bin_width[k] > 0.0)) continue;
    const double want = factor * box.width(k) / bin_width[k];
    bins = std::max(bins, static_cast<int>(std::ceil(want - 1e-9)));
  }
  return bins;
}

}  // namespace mm
