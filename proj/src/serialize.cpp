#include "multimapper/serialize.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "multimapper/errors.hpp"

namespace mm {
namespace {

template <typename T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace

Json to_json(const MapperComplex& mc) {
  Json nodes = Json::array();
  for (const Node& n : mc.nodes) {
    nodes.push_back({{"id", n.id()},
                     {"size", n.size()},
                     {"members", n.cluster.members},
                     {"bin_id", n.cluster.bin_id},
                     {"level", n.cluster.level},
                     {"region", n.cluster.region},
                     {"lens_centroid", n.lens_centroid}});
  }
  Json simplices = Json::array();
  for (const Simplex& s : mc.simplices) simplices.push_back(s);
  return {{"nodes", std::move(nodes)},
          {"simplices", std::move(simplices)},
          {"dim_cap", mc.dim_cap},
          {"truncated", mc.truncated}};
}

Json to_json(const BuildReport& r) {
  return {{"points_total", r.points_total},
          {"points_clustered", r.points_clustered},
          {"noise_dropped", r.noise_dropped},
          {"bins_empty", r.bins_empty},
          {"truncated_simplices_count", r.truncated_simplices_count},
          {"warnings", r.warnings}};
}

Json to_json(const PersistenceReport& r) {
  Json pairs = Json::array();
  for (const auto& [birth, death] : r.pairs) pairs.push_back({birth, death});
  return {{"levels", r.levels}, {"beta0", r.beta0}, {"pairs", std::move(pairs)}, {"beta0_mode", r.beta0_mode}};
}

Json to_json(const Diagnosis& d) {
  Json violations = Json::array();
  for (const ViolationReport& v : d.violations) {
    Json item = {{"simplex", v.simplex},
                 {"method", std::string(to_string(v.method))},
                 {"beta0", v.beta0},
                 {"witness", {v.witness.first, v.witness.second}},
                 {"suggested_action", {{"kind", std::string(to_string(v.action.kind))}, {"factor", v.action.factor}}}};
    if (v.persistence) item["persistence"] = to_json(*v.persistence);
    violations.push_back(std::move(item));
  }
  return {{"bad", d.bad}, {"violations", std::move(violations)}, {"skipped", d.skipped}, {"checked", d.checked}};
}

Json to_json(const Cluster& c) {
  return {{"id", c.id}, {"members", c.members}, {"bin_id", c.bin_id}, {"level", c.level}, {"region", c.region}};
}

Json to_json(const BoundingBox& box) { return {{"lo", box.lo}, {"hi", box.hi}}; }

Json to_json(const LocalCoverSpec& spec) {
  return {{"scheme", std::string(to_string(spec.scheme))}, {"bins_per_axis", spec.bins_per_axis}, {"g", spec.g}};
}

Json to_json(const MagnifyRequest& req) {
  return {{"node_ids", req.node_ids}, {"cover", to_json(req.cover)}, {"cluster", req.params.to_spec()}};
}

Json summary_json(const MapperComplex& mc) {
  const Betti graph = graph_betti(one_skeleton(mc));
  const Betti full = complex_betti(mc);
  Json by_dim = Json::object();
  for (int d = 0; d <= mc.dim_cap; ++d) by_dim[std::to_string(d)] = mc.count_dim(d);
  return {{"nodes", mc.nodes.size()},
          {"simplices_by_dim", std::move(by_dim)},
          {"beta0", graph.b0},
          {"beta1", graph.b1},
          {"complex_beta1", full.b1},
          {"truncated", mc.truncated}};
}

BoundingBox bounds_from_json(const Json& j) {
  BoundingBox box{get_field<Vec>(j, "lo"), get_field<Vec>(j, "hi")};
  if (box.lo.size() != box.hi.size() || box.lo.empty()) throw Error(ErrorKind::ParseError, "malformed bounds");
  return box;
}

Cluster cluster_from_json(const Json& j) {
  Cluster c;
  c.id = get_field<int>(j, "id");
  c.members = get_field<std::vector<PointIndex>>(j, "members");
  c.bin_id = get_field<int>(j, "bin_id");
  c.level = get_field<int>(j, "level");
  c.region = get_field<int>(j, "region");
  if (c.members.empty() || !std::is_sorted(c.members.begin(), c.members.end())) {
    throw Error(ErrorKind::ParseError, "cluster members must be nonempty and ascending");
  }
  return c;
}

BuildReport build_report_from_json(const Json& j) {
  BuildReport r;
  r.points_total = get_field<int>(j, "points_total");
  r.points_clustered = get_field<int>(j, "points_clustered");
  r.noise_dropped = get_field<int>(j, "noise_dropped");
  r.bins_empty = get_field<int>(j, "bins_empty");
  r.truncated_simplices_count = get_field<int>(j, "truncated_simplices_count");
  r.warnings = get_field<std::vector<std::string>>(j, "warnings");
  return r;
}

LocalCoverSpec cover_spec_from_json(const Json& j) {
  LocalCoverSpec spec;
  spec.scheme = parse_scheme(get_field<std::string>(j, "scheme"));
  spec.bins_per_axis = get_field<int>(j, "bins_per_axis");
  spec.g = get_field<double>(j, "g");
  return spec;
}

MagnifyRequest magnify_request_from_json(const Json& j, const MagnifyRequest& defaults) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "magnify request must be an object");
  MagnifyRequest req = defaults;
  req.node_ids = get_field<std::vector<int>>(j, "node_ids");
  if (j.contains("cover")) {
    const Json& c = j.at("cover");
    if (!c.is_object()) throw Error(ErrorKind::ParseError, "cover must be an object");
    if (c.contains("scheme")) req.cover.scheme = parse_scheme(get_field<std::string>(c, "scheme"));
    if (c.contains("bins_per_axis")) req.cover.bins_per_axis = get_field<int>(c, "bins_per_axis");
    if (c.contains("g")) req.cover.g = get_field<double>(c, "g");
  }
  if (j.contains("cluster")) req.params = ClusterParams::parse(get_field<std::string>(j, "cluster"));
  if (req.cover.bins_per_axis < 1) throw Error(ErrorKind::InvalidArgument, "bins_per_axis must be >= 1");
  if (!(req.cover.g >= 0.0) || !(req.cover.g < 1.0)) throw Error(ErrorKind::InvalidOverlap, "overlap must lie in [0, 1)");
  return req;
}

CanonicalComplex canonical_from_json(const Json& complex) {
  const Json& nodes = complex.at("nodes");
  std::vector<std::pair<std::vector<PointIndex>, int>> keyed;
  for (const Json& n : nodes) keyed.emplace_back(n.at("members").get<std::vector<PointIndex>>(), n.at("id").get<int>());
  std::vector<std::size_t> order(keyed.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keyed[a].first < keyed[b].first; });
  CanonicalComplex out;
  std::map<int, int> position;
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.node_members.push_back(keyed[order[i]].first);
    position.emplace(keyed[order[i]].second, static_cast<int>(i));
  }
  for (const Json& s : complex.at("simplices")) {
    Simplex mapped;
    for (const Json& v : s) mapped.push_back(position.at(v.get<int>()));
    std::sort(mapped.begin(), mapped.end());
    out.simplices.insert(std::move(mapped));
  }
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mm
