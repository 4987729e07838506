#include "multimapper/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "multimapper/errors.hpp"
#include "multimapper/simd.hpp"

namespace mm {
namespace {

void check_overlap(double g) {
  if (!(g >= 0.0) || !(g < 1.0)) {
    throw Error(ErrorKind::InvalidOverlap, "overlap must lie in [0, 1), got " + std::to_string(g));
  }
}

BoundingBox widen_degenerate(BoundingBox bounds) {
  for (std::size_t k = 0; k < bounds.dim(); ++k) {
    if (bounds.hi[k] < bounds.lo[k]) throw Error(ErrorKind::InvalidArgument, "inverted bounds");
    if (bounds.hi[k] - bounds.lo[k] < kDegenerateAxisWidth) bounds.hi[k] = bounds.lo[k] + kDegenerateAxisWidth;
  }
  return bounds;
}

// With g = 0 a bin touching the upper bound would exclude points sitting
// exactly on it; nudge such bins one ulp past the bound.
void close_top_edge(Bin& bin, const BoundingBox& bounds) {
  for (std::size_t k = 0; k < bin.grown_hi.size(); ++k) {
    if (bin.base_hi[k] >= bounds.hi[k] && bin.grown_hi[k] <= bounds.hi[k]) {
      bin.grown_hi[k] = std::nextafter(bounds.hi[k], std::numeric_limits<double>::infinity());
    }
  }
}

// Splits [lo, hi] into n equal pieces; the last edge is hi exactly.
Vec edges(double lo, double hi, int n) {
  Vec e(static_cast<std::size_t>(n) + 1);
  const double w = (hi - lo) / n;
  for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = lo + i * w;
  e.back() = hi;
  return e;
}

// Calls fn(index tuple) for every tuple in [0,n)^d, axis 0 fastest.
template <typename Fn>
void for_each_index(std::size_t d, int n, Fn&& fn) {
  std::vector<int> idx(d, 0);
  while (true) {
    fn(idx);
    std::size_t k = 0;
    while (k < d && ++idx[k] == n) idx[k++] = 0;
    if (k == d) break;
  }
}

void renumber(Cover& cover) {
  for (std::size_t i = 0; i < cover.bins.size(); ++i) cover.bins[i].id = static_cast<int>(i);
}

std::vector<std::uint32_t> membership_counts(const Cover& cover, const std::vector<Vec>& columns) {
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  std::vector<std::uint32_t> counts(n, 0);
  std::vector<std::uint8_t> mask(n);
  for (const Bin& bin : cover.bins) {
    std::fill(mask.begin(), mask.end(), std::uint8_t{1});
    for (std::size_t k = 0; k < columns.size(); ++k) {
      simd::box_mask(columns[k], bin.base_lo[k], bin.grown_hi[k], mask);
    }
    simd::accumulate_mask(mask, counts);
  }
  return counts;
}

MultiplicityProbe probe_max(const Cover& cover, const std::vector<Vec>& axis_values) {
  // Cartesian product of per-axis probe coordinates, stored column-major.
  const std::size_t d = axis_values.size();
  std::size_t total = 1;
  for (const Vec& a : axis_values) total *= a.size();
  std::vector<Vec> columns(d, Vec(total));
  for (std::size_t j = 0; j < total; ++j) {
    std::size_t rest = j;
    for (std::size_t k = 0; k < d; ++k) {
      columns[k][j] = axis_values[k][rest % axis_values[k].size()];
      rest /= axis_values[k].size();
    }
  }
  const auto counts = membership_counts(cover, columns);
  MultiplicityProbe result;
  if (counts.empty()) return result;
  const auto best = std::max_element(counts.begin(), counts.end());
  const auto j = static_cast<std::size_t>(best - counts.begin());
  result.max_multiplicity = static_cast<int>(*best);
  for (std::size_t k = 0; k < d; ++k) result.witness.push_back(columns[k][j]);
  return result;
}

}  // namespace

std::string_view to_string(CoverScheme scheme) noexcept {
  return scheme == CoverScheme::Brick ? "brick" : "cuboidal";
}

CoverScheme parse_scheme(std::string_view text) {
  if (text == "brick") return CoverScheme::Brick;
  if (text == "cuboidal") return CoverScheme::Cuboidal;
  throw Error(ErrorKind::ParseError, "unknown cover scheme '" + std::string(text) + "'");
}

bool Bin::contains(std::span<const double> z) const noexcept {
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (!(base_lo[k] <= z[k] && z[k] < grown_hi[k])) return false;
  }
  return true;
}

double Bin::diameter() const {
  double s = 0.0;
  for (std::size_t k = 0; k < base_lo.size(); ++k) {
    const double w = grown_hi[k] - base_lo[k];
    s += w * w;
  }
  return std::sqrt(s);
}

Cover build_cuboidal_cover(const BoundingBox& raw_bounds, int bins_per_axis, double g) {
  check_overlap(g);
  if (bins_per_axis < 1) throw Error(ErrorKind::InvalidArgument, "bins_per_axis must be >= 1");
  const BoundingBox bounds = widen_degenerate(raw_bounds);
  const std::size_t d = bounds.dim();
  std::vector<Vec> axis_edges;
  for (std::size_t k = 0; k < d; ++k) axis_edges.push_back(edges(bounds.lo[k], bounds.hi[k], bins_per_axis));

  Cover cover;
  cover.scheme = CoverScheme::Cuboidal;
  cover.g = g;
  cover.bins_per_axis = bins_per_axis;
  cover.bounds = bounds;
  for_each_index(d, bins_per_axis, [&](const std::vector<int>& idx) {
    Bin bin;
    bin.id = static_cast<int>(cover.bins.size());
    for (std::size_t k = 0; k < d; ++k) {
      const auto i = static_cast<std::size_t>(idx[k]);
      bin.base_lo.push_back(axis_edges[k][i]);
      bin.base_hi.push_back(axis_edges[k][i + 1]);
      bin.grown_hi.push_back(bin.base_hi[k] + g * (bin.base_hi[k] - bin.base_lo[k]));
    }
    close_top_edge(bin, bounds);
    cover.bins.push_back(std::move(bin));
  });
  return cover;
}

Cover build_brick_cover(const BoundingBox& raw_bounds, int bins_per_axis, double g, BrickLayout layout) {
  if (raw_bounds.dim() != 2) {
    throw Error(ErrorKind::BrickCoverDimension, "brick covers need a 2-dimensional lens, got " +
                                                    std::to_string(raw_bounds.dim()));
  }
  check_overlap(g);
  if (bins_per_axis < 1) throw Error(ErrorKind::InvalidArgument, "bins_per_axis must be >= 1");
  const int rows = layout.rows > 0 ? layout.rows : bins_per_axis;
  const BoundingBox bounds = widen_degenerate(raw_bounds);
  const double lo_x = bounds.lo[0];
  const double hi_x = bounds.hi[0];
  const double w = (hi_x - lo_x) / bins_per_axis;
  const double h = (bounds.hi[1] - bounds.lo[1]) / rows;
  const Vec row_edges = edges(bounds.lo[1], bounds.hi[1], rows);

  Cover cover;
  cover.scheme = CoverScheme::Brick;
  cover.g = g;
  cover.bins_per_axis = bins_per_axis;
  cover.bounds = bounds;
  cover.overlap_warning = g >= 0.5;
  for (int r = 0; r < rows; ++r) {
    // Odd rows are shifted by half a brick and clipped at both ends.
    Vec x_edges;
    if (r % 2 == 0) {
      x_edges = edges(lo_x, hi_x, bins_per_axis);
    } else {
      x_edges.push_back(lo_x);
      for (int i = 0; i < bins_per_axis; ++i) x_edges.push_back(lo_x + (i + 0.5) * w);
      x_edges.push_back(hi_x);
    }
    for (std::size_t i = 0; i + 1 < x_edges.size(); ++i) {
      Bin bin;
      bin.id = static_cast<int>(cover.bins.size());
      bin.base_lo = {x_edges[i], row_edges[static_cast<std::size_t>(r)]};
      bin.base_hi = {x_edges[i + 1], row_edges[static_cast<std::size_t>(r) + 1]};
      bin.grown_hi = {bin.base_hi[0] + g * w, bin.base_hi[1] + g * h};
      close_top_edge(bin, bounds);
      cover.bins.push_back(std::move(bin));
    }
  }
  return cover;
}

Cover build_cover(CoverScheme scheme, const BoundingBox& bounds, int bins_per_axis, double g) {
  return scheme == CoverScheme::Brick ? build_brick_cover(bounds, bins_per_axis, g)
                                      : build_cuboidal_cover(bounds, bins_per_axis, g);
}

Cover slice_refine(const Cover& cover, const PartitionSelector& selection, int m) {
  if (cover.scheme != CoverScheme::Cuboidal) {
    throw Error(ErrorKind::UnsupportedScheme, "slice_refine applies to cuboidal covers only");
  }
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "refinement factor must be >= 2");
  for (const int id : selection) {
    if (id < 0 || static_cast<std::size_t>(id) >= cover.bins.size()) {
      throw Error(ErrorKind::UnknownBin, "bin " + std::to_string(id) + " is not in the cover");
    }
  }
  Cover out = cover;
  out.bins.clear();
  const std::size_t d = cover.dim();
  for (const Bin& parent : cover.bins) {
    if (!selection.contains(parent.id)) {
      out.bins.push_back(parent);
      continue;
    }
    std::vector<Vec> axis_edges;
    for (std::size_t k = 0; k < d; ++k) axis_edges.push_back(edges(parent.base_lo[k], parent.base_hi[k], m));
    for_each_index(d, m, [&](const std::vector<int>& idx) {
      Bin child;
      child.level = parent.level + 1;
      for (std::size_t k = 0; k < d; ++k) {
        const auto i = static_cast<std::size_t>(idx[k]);
        child.base_lo.push_back(axis_edges[k][i]);
        child.base_hi.push_back(axis_edges[k][i + 1]);
        child.grown_hi.push_back(child.base_hi[k] + cover.g * (child.base_hi[k] - child.base_lo[k]));
      }
      close_top_edge(child, cover.bounds);
      out.bins.push_back(std::move(child));
    });
  }
  renumber(out);
  return out;
}

Cover restrict_cover(const Cover& cover, const LensMap& lens, std::span<const PointIndex> member_ids) {
  Cover out = cover;
  out.bins.clear();
  for (const Bin& bin : cover.bins) {
    if (!bin_members(bin, lens, member_ids).empty()) out.bins.push_back(bin);
  }
  renumber(out);
  out.empty_restriction = out.bins.empty();
  return out;
}

std::vector<PointIndex> bin_members(const Bin& bin, const LensMap& lens,
                                    std::optional<std::span<const PointIndex>> subset) {
  std::vector<PointIndex> out;
  if (subset) {
    Vec z(lens.dim());
    for (const PointIndex p : *subset) {
      for (std::size_t k = 0; k < lens.dim(); ++k) z[k] = lens.at(static_cast<std::size_t>(p), k);
      if (bin.contains(z)) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<std::uint8_t> mask(lens.size(), 1);
  for (std::size_t k = 0; k < lens.dim(); ++k) simd::box_mask(lens.column(k), bin.base_lo[k], bin.grown_hi[k], mask);
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (mask[j] != 0) out.push_back(static_cast<PointIndex>(j));
  }
  return out;
}

std::optional<PointIndex> first_uncovered(const Cover& cover, const LensMap& lens,
                                          std::optional<std::span<const PointIndex>> subset) {
  if (subset) {
    Vec z(lens.dim());
    for (const PointIndex p : *subset) {
      for (std::size_t k = 0; k < lens.dim(); ++k) z[k] = lens.at(static_cast<std::size_t>(p), k);
      const bool covered =
          std::any_of(cover.bins.begin(), cover.bins.end(), [&](const Bin& b) { return b.contains(z); });
      if (!covered) return p;
    }
    return std::nullopt;
  }
  std::vector<Vec> columns;
  for (std::size_t k = 0; k < lens.dim(); ++k) columns.emplace_back(lens.column(k).begin(), lens.column(k).end());
  const auto counts = membership_counts(cover, columns);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) return static_cast<PointIndex>(j);
  }
  return std::nullopt;
}

MultiplicityProbe max_multiplicity(const Cover& cover, int probes_per_axis) {
  if (probes_per_axis < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 probes per axis");
  std::vector<Vec> axis_values;
  for (std::size_t k = 0; k < cover.dim(); ++k) {
    Vec v(static_cast<std::size_t>(probes_per_axis));
    const double lo = cover.bounds.lo[k];
    const double step = cover.bounds.width(k) / (probes_per_axis - 1);
    for (int i = 0; i < probes_per_axis; ++i) v[static_cast<std::size_t>(i)] = lo + i * step;
    v.back() = cover.bounds.hi[k];
    axis_values.push_back(std::move(v));
  }
  return probe_max(cover, axis_values);
}

MultiplicityProbe exact_max_multiplicity(const Cover& cover) {
  // The depth of a family of half-open boxes peaks at a point whose every
  // coordinate is some box's lower corner, so probing those is exhaustive.
  std::vector<Vec> axis_values;
  for (std::size_t k = 0; k < cover.dim(); ++k) {
    Vec v;
    for (const Bin& b : cover.bins) v.push_back(b.base_lo[k]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    axis_values.push_back(std::move(v));
  }
  return probe_max(cover, axis_values);
}

}  // namespace mm
