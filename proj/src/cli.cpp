#include "multimapper/cli.hpp"

#include <charconv>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multimapper/errors.hpp"
#include "multimapper/fixtures.hpp"
#include "multimapper/service.hpp"
#include "multimapper/session.hpp"

namespace mm::cli {
namespace {

namespace fs = std::filesystem;

struct MapperArgs {
  std::string points;
  std::string lens;
  std::string lens_csv;
  std::string cover = "cuboidal";
  int bins = 10;
  double overlap = 0.25;
  std::string cluster = "dbscan:auto";
  int dim_cap = kDefaultDimCap;
  std::string out;
  std::string report;
  std::string session;
};

struct DiagnoseArgs {
  std::string session;
  std::string method = "clustering";
  int levels = 5;
  int max_dim = kDefaultDiagnoseDim;
  std::string out;
};

struct MagnifyArgs {
  std::string session;
  std::string select;
  std::string cover;
  std::string bins;  // empty: 2x for magnify, 0.5x for coarsen
  std::optional<double> overlap;
  std::string cluster;
  std::string out;
};

struct FixtureArgs {
  std::string name;
  std::uint64_t seed = 7;
  std::size_t n = 0;
  int k = 3;
  std::string out;
};

struct ServeArgs {
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir;
  double ttl_hours = 24.0;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> ids;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) continue;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorKind::ParseError, "bad node id '" + std::string(item) + "'");
    }
    ids.push_back(v);
  }
  return ids;
}

// "--bins 12" is absolute; "--bins 2x" is relative to the selected nodes'
// bins (2x finer, 0.5x coarser).
int resolve_bins(const std::string& text, const AnalysisState& state, const std::vector<int>& ids) {
  if (!text.empty() && (text.back() == 'x' || text.back() == 'X')) {
    double factor = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size() - 1, factor);
    if (ec != std::errc() || ptr != text.data() + text.size() - 1) throw Error(ErrorKind::ParseError, "bad --bins '" + text + "'");
    return relative_bins(state, ids, factor);
  }
  int bins = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), bins);
  if (ec != std::errc() || ptr != text.data() + text.size() || bins < 1) {
    throw Error(ErrorKind::ParseError, "bad --bins '" + text + "'");
  }
  return bins;
}

void print_summary(const MapperComplex& mc, std::ostream& out) {
  const Betti graph = graph_betti(one_skeleton(mc));
  const Betti full = complex_betti(mc);
  out << "nodes: " << mc.nodes.size() << "\n";
  out << "simplices:";
  for (int d = 1; d <= mc.dim_cap; ++d) out << " dim" << d << "=" << mc.count_dim(d);
  out << "\n";
  out << "beta0: " << graph.b0 << "\n";
  out << "beta1: " << graph.b1 << " (1-skeleton), " << full.b1 << " (complex)\n";
  out << "truncated: " << (mc.truncated ? "true" : "false") << "\n";
}

int cmd_mapper(const MapperArgs& a, std::ostream& out, std::ostream& err) {
  if (a.lens.empty() == a.lens_csv.empty()) throw Error(ErrorKind::InvalidArgument, "give exactly one of --lens or --lens-csv");
  SessionConfig cfg;
  cfg.points = a.points;
  cfg.lens_spec = a.lens;
  cfg.lens_csv = a.lens_csv;
  cfg.cover = {parse_scheme(a.cover), a.bins, a.overlap};
  if (a.bins < 1) throw Error(ErrorKind::InvalidArgument, "--bins must be >= 1");
  cfg.params = ClusterParams::parse(a.cluster);
  cfg.dim_cap = a.dim_cap;
  const Session s = create_session(cfg);
  for (const std::string& w : s.state.report.warnings) err << "warning: " << w << "\n";
  if (!a.out.empty()) emit(dump(to_json(s.state.complex)), a.out, out);
  if (!a.report.empty()) emit(dump(to_json(s.state.report)), a.report, out);
  if (!a.session.empty()) save_session(s, a.session);
  print_summary(s.state.complex, out);
  return kExitOk;
}

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out) {
  const DiagnoseMethod method = parse_method(a.method);
  if (a.levels < 2) throw Error(ErrorKind::InvalidArgument, "--levels must be >= 2");
  if (a.max_dim < 1) throw Error(ErrorKind::InvalidArgument, "--max-dim must be >= 1");
  const Session s = load_session(a.session);
  const Json result = to_json(diagnose(s.state, method, a.levels, a.max_dim));
  emit(dump(result), a.out, out);
  return kExitOk;
}

int cmd_magnify(const MagnifyArgs& a, std::ostream& out, std::ostream& err) {
  const Session s = load_session(a.session);
  MagnifyRequest req;
  req.node_ids = parse_id_list(a.select);
  req.cover.scheme = a.cover.empty() ? s.base_spec.scheme : parse_scheme(a.cover);
  req.cover.g = a.overlap.value_or(s.base_spec.g);
  req.params = a.cluster.empty() ? s.state.params : ClusterParams::parse(a.cluster);
  for (const int id : req.node_ids) (void)s.state.cluster(id);  // UnknownNode before any work
  req.cover.bins_per_axis = resolve_bins(a.bins, s.state, req.node_ids);
  const MagnifyOutcome outcome = apply_magnify(s, req);
  for (const std::string& w : outcome.session.state.report.warnings) err << "warning: " << w << "\n";
  save_session(outcome.session, a.out.empty() ? a.session : a.out);
  const int delta = outcome.nodes_after - outcome.nodes_before;
  out << "nodes: " << outcome.nodes_before << " -> " << outcome.nodes_after << " (delta " << (delta >= 0 ? "+" : "")
      << delta << ")\n";
  out << "local cover: " << to_string(req.cover.scheme) << " bins=" << req.cover.bins_per_axis << " g=" << req.cover.g
      << "\n";
  out << "degeneracy points: " << outcome.degeneracy_points.size() << "\n";
  print_summary(outcome.session.state.complex, out);
  return kExitOk;
}

int cmd_fixtures(const FixtureArgs& a, std::ostream& out) {
  const PointCloud pc = fixtures::make(a.name, a.seed, a.n, a.k);
  emit(fixtures::to_csv(pc), a.out, out);
  return kExitOk;
}

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  ServiceConfig cfg;
  cfg.data_dir = a.data_dir;
  cfg.ttl = std::chrono::seconds(static_cast<long long>(a.ttl_hours * 3600.0));
  out << "serving on http://" << a.host << ":" << a.port << " (data in " << a.data_dir << ")" << std::endl;
  return serve(cfg, a.host, a.port);
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::CorruptSession:
      return kExitIo;
    default:
      return kExitUsage;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mapper complexes with region-local rescaling and violation diagnostics", "multimapper"};
  app.require_subcommand(1);

  MapperArgs mapper;
  auto* m = app.add_subcommand("mapper", "Build a Mapper complex from a point cloud");
  m->add_option("--points", mapper.points, "Point cloud CSV")->required();
  m->add_option("--lens", mapper.lens, "Lens spec: coord:0,1 or pca:2");
  m->add_option("--lens-csv", mapper.lens_csv, "Precomputed lens values CSV");
  m->add_option("--cover", mapper.cover, "cuboidal or brick")->capture_default_str();
  m->add_option("--bins", mapper.bins, "Bins per axis")->capture_default_str();
  m->add_option("--overlap", mapper.overlap, "Overlap fraction g in [0, 1)")->capture_default_str();
  m->add_option("--cluster", mapper.cluster, "dbscan:auto, dbscan:eps=..,min_pts=.., single:threshold=..")
      ->capture_default_str();
  m->add_option("--dim-cap", mapper.dim_cap, "Highest simplex dimension kept")->capture_default_str();
  m->add_option("--out", mapper.out, "Complex JSON output");
  m->add_option("--report", mapper.report, "Build report JSON output");
  m->add_option("--session", mapper.session, "Session file to write");

  DiagnoseArgs diag;
  auto* d = app.add_subcommand("diagnose", "Report simplices whose cluster intersection is disconnected");
  d->add_option("--session", diag.session, "Session file")->required();
  d->add_option("--method", diag.method, "clustering or persistence")->capture_default_str();
  d->add_option("--levels", diag.levels, "Tower levels for the persistence method")->capture_default_str();
  d->add_option("--max-dim", diag.max_dim, "Highest simplex dimension checked")->capture_default_str();
  d->add_option("--out", diag.out, "Violations JSON output (stdout if absent)");

  MagnifyArgs mag;
  auto add_magnify = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--session", mag.session, "Session file")->required();
    sub->add_option("--select", mag.select, "Comma-separated node ids")->required();
    sub->add_option("--cover", mag.cover, "Local cover scheme (default: the session's)");
    sub->add_option("--bins", mag.bins, "Local bins per axis, or a factor like 2x (finer) or 0.5x (coarser)");
    sub->add_option("--overlap", mag.overlap, "Local overlap (default: the session's)");
    sub->add_option("--cluster", mag.cluster, "Local clustering (default: the session's)");
    sub->add_option("--out", mag.out, "Updated session file (default: overwrite --session)");
    return sub;
  };
  auto* mg = add_magnify("magnify", "Re-cover the selected nodes locally (default 2x finer)");
  auto* cg = add_magnify("coarsen", "Re-cover the selected nodes locally (default 0.5x)");

  FixtureArgs fix;
  auto* f = app.add_subcommand("fixtures", "Write a synthetic point cloud as CSV");
  f->add_option("name", fix.name, "blob_ring, blobs, circle, parallel_segments or two_blob")->required();
  f->add_option("--seed", fix.seed, "RNG seed")->capture_default_str();
  f->add_option("--n", fix.n, "Points (per part for multi-part fixtures)");
  f->add_option("--k", fix.k, "Blob count for the blobs fixture")->capture_default_str();
  f->add_option("--out", fix.out, "CSV output (stdout if absent)");

  ServeArgs srv;
  auto* s = app.add_subcommand("serve", "Run the HTTP session service");
  s->add_option("--port", srv.port, "Port")->capture_default_str();
  s->add_option("--host", srv.host, "Bind address")->capture_default_str();
  s->add_option("--data-dir", srv.data_dir, "Session storage directory")->required();
  s->add_option("--ttl-hours", srv.ttl_hours, "Idle session lifetime")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (m->parsed()) return cmd_mapper(mapper, out, err);
    if (d->parsed()) return cmd_diagnose(diag, out);
    if (mg->parsed() || cg->parsed()) {
      if (mag.bins.empty()) mag.bins = cg->parsed() ? "0.5x" : "2x";
      return cmd_magnify(mag, out, err);
    }
    if (f->parsed()) return cmd_fixtures(fix, out);
    if (s->parsed()) return cmd_serve(srv, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace mm::cli
