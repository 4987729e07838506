#include "multimapper/clustering.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "multimapper/errors.hpp"
#include "multimapper/simd.hpp"

namespace mm {
namespace {

// Member coordinates gathered column-major for the distance kernel.
class LocalCloud {
 public:
  LocalCloud(const PointCloud& pc, std::span<const PointIndex> ids) : size_(ids.size()) {
    columns_.resize(pc.dim(), Vec(ids.size()));
    for (std::size_t k = 0; k < pc.dim(); ++k) {
      const auto col = pc.column(k);
      for (std::size_t j = 0; j < ids.size(); ++j) columns_[k][j] = col[static_cast<std::size_t>(ids[j])];
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return size_; }

  // Squared distances from member i to every member.
  void sq_distances(std::size_t i, Vec& out) const {
    out.assign(size_, 0.0);
    for (const Vec& col : columns_) simd::accumulate_sq_diff(col, col[i], out);
  }

 private:
  std::size_t size_;
  std::vector<Vec> columns_;
};

std::vector<PointIndex> sorted_unique(std::span<const PointIndex> ids) {
  std::vector<PointIndex> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ambient_diameter(const LocalCloud& local) {
  double best = 0.0;
  Vec d2;
  for (std::size_t i = 0; i < local.size(); ++i) {
    local.sq_distances(i, d2);
    for (const double v : d2) best = std::max(best, v);
  }
  return std::sqrt(best);
}

double auto_radius(const LocalCloud& local, int k, std::optional<double> fallback) {
  double r = 0.0;
  if (local.size() <= static_cast<std::size_t>(k)) {
    r = fallback ? *fallback : ambient_diameter(local);
  } else {
    std::vector<double> knn(local.size());
    Vec d2;
    for (std::size_t i = 0; i < local.size(); ++i) {
      local.sq_distances(i, d2);
      // Index 0 of the ordering is the point itself (distance 0).
      std::nth_element(d2.begin(), d2.begin() + k, d2.end());
      knn[i] = std::sqrt(d2[static_cast<std::size_t>(k)]);
    }
    r = nearest_rank_percentile(std::move(knn), 90);
  }
  return std::max(r, 1e-12);
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::vector<Cluster> single_linkage(const LocalCloud& local, std::span<const PointIndex> ids, double radius) {
  UnionFind uf(local.size());
  const double r2 = radius * radius;
  Vec d2;
  for (std::size_t i = 0; i < local.size(); ++i) {
    local.sq_distances(i, d2);
    for (std::size_t j = i + 1; j < local.size(); ++j) {
      if (d2[j] <= r2) uf.unite(i, j);
    }
  }
  // Roots are the smallest index in each component, so clusters come out
  // ordered by their smallest member.
  std::vector<int> slot(local.size(), -1);
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < local.size(); ++i) {
    const std::size_t root = uf.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(slot[root])].members.push_back(ids[i]);
  }
  return clusters;
}

std::vector<Cluster> dbscan(const LocalCloud& local, std::span<const PointIndex> ids, double eps, int min_pts) {
  const std::size_t n = local.size();
  const double r2 = eps * eps;
  std::vector<std::vector<std::size_t>> neighbours(n);
  std::vector<char> core(n, 0);
  Vec d2;
  for (std::size_t i = 0; i < n; ++i) {
    local.sq_distances(i, d2);
    for (std::size_t j = 0; j < n; ++j) {
      if (d2[j] <= r2) neighbours[i].push_back(j);
    }
    core[i] = neighbours[i].size() >= static_cast<std::size_t>(min_pts) ? 1 : 0;
  }
  std::vector<int> label(n, -1);
  int next_label = 0;
  std::vector<std::size_t> frontier;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (label[seed] >= 0 || core[seed] == 0) continue;
    const int c = next_label++;
    label[seed] = c;
    frontier.assign(1, seed);
    while (!frontier.empty()) {
      const std::size_t q = frontier.back();
      frontier.pop_back();
      for (const std::size_t nb : neighbours[q]) {
        if (label[nb] >= 0) continue;  // border points stay with the first cluster
        label[nb] = c;
        if (core[nb] != 0) frontier.push_back(nb);
      }
    }
  }
  std::vector<Cluster> clusters(static_cast<std::size_t>(next_label));
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) clusters[static_cast<std::size_t>(label[i])].members.push_back(ids[i]);
  }
  return clusters;
}

double parse_number(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::ParseError, "bad value for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

ClusterParams ClusterParams::parse(std::string_view spec) {
  ClusterParams p;
  const auto colon = spec.find(':');
  const std::string_view algo = spec.substr(0, colon);
  if (algo == "dbscan") {
    p.algorithm = ClusterAlgorithm::Dbscan;
  } else if (algo == "single") {
    p.algorithm = ClusterAlgorithm::SingleLinkage;
  } else {
    throw Error(ErrorKind::ParseError, "unknown clustering algorithm '" + std::string(algo) + "'");
  }
  p.auto_eps = true;
  if (colon == std::string_view::npos) return p;
  std::string_view rest = spec.substr(colon + 1);
  bool explicit_radius = false;
  bool saw_auto = false;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item == "auto") {
      saw_auto = true;
      continue;
    }
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::ParseError, "expected key=value, got '" + std::string(item) + "'");
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "eps" && p.algorithm == ClusterAlgorithm::Dbscan) {
      p.eps = parse_number(key, value);
      explicit_radius = true;
    } else if (key == "threshold" && p.algorithm == ClusterAlgorithm::SingleLinkage) {
      p.threshold = parse_number(key, value);
      explicit_radius = true;
    } else if (key == "min_pts" || key == "k") {
      const double v = parse_number(key, value);
      if (v != std::floor(v)) throw Error(ErrorKind::ParseError, "min_pts must be an integer");
      p.min_pts = static_cast<int>(v);
    } else {
      throw Error(ErrorKind::ParseError, "unknown clustering option '" + std::string(key) + "'");
    }
  }
  if (explicit_radius && saw_auto) throw Error(ErrorKind::ParseError, "give either auto or an explicit radius");
  p.auto_eps = !explicit_radius;
  p.validate();
  return p;
}

std::string ClusterParams::to_spec() const {
  std::string s = algorithm == ClusterAlgorithm::Dbscan ? "dbscan:" : "single:";
  if (auto_eps) {
    s += "auto";
  } else if (algorithm == ClusterAlgorithm::Dbscan) {
    s += "eps=" + format_number(eps);
  } else {
    s += "threshold=" + format_number(threshold);
  }
  if (algorithm == ClusterAlgorithm::Dbscan || min_pts != 4) s += ",min_pts=" + std::to_string(min_pts);
  return s;
}

void ClusterParams::validate() const {
  if (min_pts < 1) throw Error(ErrorKind::InvalidArgument, "min_pts must be >= 1");
  if (!auto_eps) {
    const double r = algorithm == ClusterAlgorithm::Dbscan ? eps : threshold;
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidArgument, "clustering radius must be > 0");
  }
}

std::vector<Cluster> cluster_bin(const PointCloud& pc, std::span<const PointIndex> member_ids,
                                 const ClusterParams& params, std::optional<double> fallback_radius) {
  const std::vector<PointIndex> ids = sorted_unique(member_ids);
  if (ids.empty()) return {};
  const LocalCloud local(pc, ids);
  if (params.algorithm == ClusterAlgorithm::SingleLinkage) {
    const double r = params.auto_eps ? auto_radius(local, params.min_pts, fallback_radius) : params.threshold;
    return single_linkage(local, ids, r);
  }
  const double r = params.auto_eps ? auto_radius(local, params.min_pts, fallback_radius) : params.eps;
  return dbscan(local, ids, r, params.min_pts);
}

double auto_eps(const PointCloud& pc, std::span<const PointIndex> member_ids, int k,
                std::optional<double> fallback_radius) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  const std::vector<PointIndex> ids = sorted_unique(member_ids);
  const LocalCloud local(pc, ids);
  return auto_radius(local, k, fallback_radius);
}

double nearest_rank_percentile(std::vector<double> values, int pct) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::size_t rank = (static_cast<std::size_t>(pct) * n + 99) / 100;  // ceil(pct/100 * n)
  rank = std::clamp<std::size_t>(rank, 1, n);
  return values[rank - 1];
}

}  // namespace mm
