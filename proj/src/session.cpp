#include "multimapper/session.hpp"

#include <cstring>
#include <fstream>

#include "multimapper/errors.hpp"

namespace mm {
namespace {

namespace fs = std::filesystem;

Json cover_json(const LocalCoverSpec& spec, const Cover& cover) {
  Json j = to_json(spec);
  if (!cover.bins.empty()) j["bounds"] = to_json(cover.bounds);
  return j;
}

Cover rebuild_cover(const LocalCoverSpec& spec, const Json& j) {
  return build_cover(spec.scheme, bounds_from_json(j.at("bounds")), spec.bins_per_axis, spec.g);
}

LensMap load_lens(const PointCloud& pc, const LensSource& source) {
  if (!source.csv.empty()) return load_lens_csv(source.csv, pc.size());
  return lens_from_spec(pc, source.spec);
}

}  // namespace

std::string lens_hash(const LensMap& lens) {
  std::string bytes;
  for (std::size_t k = 0; k < lens.dim(); ++k) {
    for (const double v : lens.column(k)) {
      char raw[sizeof(double)];
      std::memcpy(raw, &v, sizeof(double));
      bytes.append(raw, sizeof(double));
    }
  }
  return fnv1a_hex(bytes);
}

Session create_session(const SessionConfig& config) {
  auto pc = std::make_shared<const PointCloud>(load_points_csv(config.points));
  if (pc->size() == 0) throw Error(ErrorKind::ParseError, "point cloud is empty");
  Session s;
  s.dataset = {fs::absolute(config.points).lexically_normal(), pc->content_hash()};
  if (!config.lens_csv.empty()) {
    s.lens.csv = fs::absolute(config.lens_csv).lexically_normal();
  } else {
    s.lens.spec = config.lens_spec;
  }
  auto lens = std::make_shared<const LensMap>(load_lens(*pc, s.lens));
  s.lens.hash = lens_hash(*lens);
  s.base_spec = config.cover;
  const Cover cover = build_cover(config.cover.scheme, lens_bounds(*lens), config.cover.bins_per_axis, config.cover.g);
  s.state = initial_state(std::move(pc), std::move(lens), cover, config.params, config.dim_cap);
  s.reports["build"] = to_json(s.state.report);
  return s;
}

Json session_to_json(const Session& s) {
  const AnalysisState& st = s.state;
  Json lens = {{"hash", s.lens.hash}};
  if (!s.lens.csv.empty()) {
    lens["csv"] = s.lens.csv.string();
  } else {
    lens["spec"] = s.lens.spec;
  }
  Json clusters = Json::array();
  for (const Cluster& c : st.clusters) clusters.push_back(to_json(c));
  Json log = Json::array();
  for (const RegionRecord& r : st.region_log) {
    log.push_back({{"node_ids", r.node_ids}, {"cover", cover_json(r.spec, r.cover)}, {"cluster", r.params.to_spec()}});
  }
  return {{"version", kSessionVersion},
          {"dataset", {{"path", s.dataset.path.string()}, {"hash", s.dataset.hash}}},
          {"lens", std::move(lens)},
          {"cover", cover_json(s.base_spec, st.base_cover)},
          {"cluster", st.params.to_spec()},
          {"dim_cap", st.dim_cap},
          {"clusters", std::move(clusters)},
          {"noise", st.noise},
          {"region_log", std::move(log)},
          {"complex", to_json(st.complex)},
          {"report", to_json(st.report)},
          {"reports", s.reports}};
}

Session session_from_json(const Json& j) {
  Session s;
  std::shared_ptr<const PointCloud> pc;
  try {
    if (j.at("version").get<int>() != kSessionVersion) throw Error(ErrorKind::CorruptSession, "unsupported session version");
    s.dataset.path = j.at("dataset").at("path").get<std::string>();
    s.dataset.hash = j.at("dataset").at("hash").get<std::string>();
    const Json& lens = j.at("lens");
    if (lens.contains("csv")) {
      s.lens.csv = lens.at("csv").get<std::string>();
    } else {
      s.lens.spec = lens.at("spec").get<std::string>();
    }
    s.lens.hash = lens.at("hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptSession, std::string("malformed session header: ") + e.what());
  }

  try {
    pc = std::make_shared<const PointCloud>(load_points_csv(s.dataset.path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(ErrorKind::CorruptSession, std::string("dataset no longer parses: ") + e.what());
  }
  if (pc->content_hash() != s.dataset.hash) throw Error(ErrorKind::CorruptSession, "dataset hash mismatch for " + s.dataset.path.string());
  auto lens = std::make_shared<const LensMap>(load_lens(*pc, s.lens));
  if (lens_hash(*lens) != s.lens.hash) throw Error(ErrorKind::CorruptSession, "lens hash mismatch");

  try {
    AnalysisState& st = s.state;
    st.pc = pc;
    st.lens = lens;
    s.base_spec = cover_spec_from_json(j.at("cover"));
    st.base_cover = rebuild_cover(s.base_spec, j.at("cover"));
    st.params = ClusterParams::parse(j.at("cluster").get<std::string>());
    st.dim_cap = j.at("dim_cap").get<int>();
    for (const Json& c : j.at("clusters")) {
      Cluster cluster = cluster_from_json(c);
      if (cluster.members.back() >= static_cast<PointIndex>(pc->size()) || cluster.members.front() < 0) {
        throw Error(ErrorKind::CorruptSession, "cluster member out of range");
      }
      st.clusters.push_back(std::move(cluster));
    }
    for (const Json& r : j.at("region_log")) {
      RegionRecord record;
      record.node_ids = r.at("node_ids").get<std::vector<int>>();
      record.spec = cover_spec_from_json(r.at("cover"));
      record.params = ClusterParams::parse(r.at("cluster").get<std::string>());
      if (!record.node_ids.empty()) record.cover = rebuild_cover(record.spec, r.at("cover"));
      st.region_log.push_back(std::move(record));
    }
    st.noise = unclustered_points(pc->size(), st.clusters);
    if (j.at("noise").get<std::vector<PointIndex>>() != st.noise) {
      throw Error(ErrorKind::CorruptSession, "noise list does not match clusters");
    }
    st.complex = nerve(st.clusters, st.dim_cap, lens.get());
    if (to_json(st.complex) != j.at("complex")) {
      throw Error(ErrorKind::CorruptSession, "stored complex does not match its clusters");
    }
    st.report = build_report_from_json(j.at("report"));
    s.reports = j.at("reports");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptSession, std::string("malformed session: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CorruptSession || e.kind() == ErrorKind::Io) throw;
    throw Error(ErrorKind::CorruptSession, e.what());
  }
  return s;
}

void write_text_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename onto " + path.string() + ": " + ec.message());
}

void save_session(const Session& session, const fs::path& path) { write_text_file(path, dump(session_to_json(session))); }

Session load_session(const fs::path& path) {
  const std::string text = read_text_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::CorruptSession, "session is not valid JSON: " + std::string(e.what()));
  }
  return session_from_json(j);
}

MagnifyOutcome apply_magnify(const Session& session, const MagnifyRequest& req) {
  MagnifyOutcome out;
  out.degeneracy_points = degeneracy_guard(session.state, req);
  out.session = session;
  out.session.state = magnify(session.state, req);
  out.nodes_before = static_cast<int>(session.state.complex.nodes.size());
  out.nodes_after = static_cast<int>(out.session.state.complex.nodes.size());
  out.session.reports["magnify"] = {{"request", to_json(req)},
                                    {"nodes_before", out.nodes_before},
                                    {"nodes_after", out.nodes_after},
                                    {"degeneracy_points", out.degeneracy_points}};
  out.session.reports["build"] = to_json(out.session.state.report);
  return out;
}

}  // namespace mm
