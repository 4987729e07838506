#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "multimapper/cli.hpp"
#include "multimapper/errors.hpp"
#include "multimapper/fixtures.hpp"
#include "multimapper/session.hpp"
#include "oracles.hpp"

using namespace mm;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "multimapper");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path write_fixture(const fs::path& dir, const std::string& name, const PointCloud& pc) {
  const fs::path p = dir / (name + ".csv");
  write_text_file(p, fixtures::to_csv(pc));
  return p;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected mm::Error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("complex json round-trips through the canonical form") {
  const PointCloud pc = fixtures::blob_ring(7);
  const LensMap lens = lens_coordinate(pc, std::vector<std::size_t>{0, 1});
  const auto b = build_mapper(pc, lens, build_brick_cover(lens_bounds(lens), 6, 0.25), ClusterParams{});
  const Json j = to_json(b.complex);
  CHECK(canonical_from_json(j) == canonical_form(b.complex));
  CHECK(canonical_from_json(Json::parse(dump(j))) == canonical_form(b.complex));
  CHECK(j.at("nodes").size() == b.complex.nodes.size());
}

TEST_CASE("small json pieces round-trip") {
  const Cluster c{1000003, {1, 4, 9}, 7, 2, 1};
  CHECK(cluster_from_json(to_json(c)) == c);
  const BoundingBox box{{-1.5, 0.1}, {2.0, 3.0 / 7.0}};
  const BoundingBox back = bounds_from_json(Json::parse(dump(to_json(box))));
  CHECK(back.lo == box.lo);
  CHECK(back.hi == box.hi);
  const LocalCoverSpec spec{CoverScheme::Brick, 5, 0.3};
  const LocalCoverSpec spec_back = cover_spec_from_json(to_json(spec));
  CHECK(spec_back.scheme == spec.scheme);
  CHECK(spec_back.bins_per_axis == spec.bins_per_axis);
  CHECK(spec_back.g == spec.g);
  BuildReport r;
  r.points_total = 10;
  r.points_clustered = 8;
  r.noise_dropped = 2;
  r.warnings = {"w"};
  const BuildReport rb = build_report_from_json(to_json(r));
  CHECK(rb.points_total == 10);
  CHECK(rb.noise_dropped == 2);
  CHECK(rb.warnings == r.warnings);
}

TEST_CASE("magnify requests fill in defaults") {
  MagnifyRequest defaults;
  defaults.cover = {CoverScheme::Brick, 4, 0.2};
  defaults.params = ClusterParams::parse("single:threshold=0.5");
  const MagnifyRequest req = magnify_request_from_json(Json::parse(R"({"node_ids":[3,1]})"), defaults);
  CHECK(req.node_ids == std::vector<int>{3, 1});
  CHECK(req.cover.scheme == CoverScheme::Brick);
  CHECK(req.cover.bins_per_axis == 4);
  CHECK(req.params.to_spec() == defaults.params.to_spec());
  const MagnifyRequest custom =
      magnify_request_from_json(Json::parse(R"({"node_ids":[],"cover":{"bins_per_axis":9},"cluster":"dbscan:auto"})"), defaults);
  CHECK(custom.cover.bins_per_axis == 9);
  CHECK(custom.cover.g == 0.2);
  CHECK(custom.params.algorithm == ClusterAlgorithm::Dbscan);
}

TEST_CASE("session save and load reproduces the state") {
  const fs::path dir = oracle::temp_dir("session_roundtrip");
  SessionConfig cfg;
  cfg.points = write_fixture(dir, "ring", fixtures::blob_ring(7));
  cfg.lens_spec = "coord:0,1";
  cfg.cover = {CoverScheme::Brick, 6, 0.25};
  const Session s = create_session(cfg);
  const fs::path file = dir / "s.json";
  save_session(s, file);
  const Session back = load_session(file);
  CHECK(back.state.clusters == s.state.clusters);
  CHECK(back.state.noise == s.state.noise);
  CHECK(canonical_form(back.state.complex) == canonical_form(s.state.complex));
  CHECK(dump(session_to_json(back)) == dump(session_to_json(s)));

  // Region logs survive as well.
  const MagnifyOutcome m = apply_magnify(s, MagnifyRequest{{s.state.clusters.front().id}, {CoverScheme::Brick, 3, 0.25}, s.state.params});
  save_session(m.session, file);
  const Session again = load_session(file);
  CHECK(again.state.region_log.size() == 1);
  CHECK(again.state.clusters == m.session.state.clusters);
  fs::remove_all(dir);
}

TEST_CASE("corrupt sessions are detected") {
  const fs::path dir = oracle::temp_dir("session_corrupt");
  SessionConfig cfg;
  cfg.points = write_fixture(dir, "blobs", fixtures::two_blob(7));
  cfg.lens_spec = "coord:0,1";
  cfg.cover = {CoverScheme::Cuboidal, 3, 0.25};
  const Session s = create_session(cfg);
  const Json good = session_to_json(s);

  Json bad_member = good;
  bad_member["clusters"][0]["members"].push_back(999999);
  CHECK(kind_of([&] { (void)session_from_json(bad_member); }) == ErrorKind::CorruptSession);

  Json bad_complex = good;
  bad_complex["complex"]["simplices"].push_back(Json::array({0, 1, 2, 3}));
  CHECK(kind_of([&] { (void)session_from_json(bad_complex); }) == ErrorKind::CorruptSession);

  Json bad_version = good;
  bad_version["version"] = 99;
  CHECK(kind_of([&] { (void)session_from_json(bad_version); }) == ErrorKind::CorruptSession);

  Json no_header = good;
  no_header.erase("dataset");
  CHECK(kind_of([&] { (void)session_from_json(no_header); }) == ErrorKind::CorruptSession);

  const fs::path file = dir / "s.json";
  write_text_file(file, "{ not json");
  CHECK(kind_of([&] { (void)load_session(file); }) == ErrorKind::CorruptSession);

  // The dataset changed underneath the session.
  write_text_file(cfg.points, fixtures::to_csv(fixtures::two_blob(8)));
  CHECK(kind_of([&] { (void)session_from_json(good); }) == ErrorKind::CorruptSession);

  fs::remove(cfg.points);
  CHECK(kind_of([&] { (void)session_from_json(good); }) == ErrorKind::Io);
  fs::remove_all(dir);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = oracle::temp_dir("cli_codes");
  const std::string pts = write_fixture(dir, "blobs", fixtures::two_blob(7)).string();
  const std::string ses = (dir / "s.json").string();

  CHECK(run_cli({"mapper", "--lens", "coord:0,1"}).code == cli::kExitUsage);
  CHECK(run_cli({"mapper", "--points", pts, "--lens", "coord:0,1", "--cluster", "kmeans:3"}).code == cli::kExitUsage);
  CHECK(run_cli({"mapper", "--points", pts, "--lens", "coord:5"}).code == cli::kExitUsage);
  CHECK(run_cli({"mapper", "--points", pts, "--lens", "coord:0,1", "--overlap", "1.5"}).code == cli::kExitUsage);
  CHECK(run_cli({"mapper", "--points", pts}).code == cli::kExitUsage);
  CHECK(run_cli({"mapper", "--points", (dir / "missing.csv").string(), "--lens", "coord:0"}).code == cli::kExitIo);
  CHECK(run_cli({"bogus"}).code == cli::kExitUsage);
  CHECK(run_cli({"--help"}).code == cli::kExitOk);

  const CliResult built = run_cli({"mapper", "--points", pts, "--lens", "coord:0,1", "--bins", "3", "--session", ses});
  REQUIRE(built.code == cli::kExitOk);
  CHECK(built.out.find("beta0: 2") != std::string::npos);

  const CliResult unknown = run_cli({"magnify", "--session", ses, "--select", "4242"});
  CHECK(unknown.code == cli::kExitUsage);
  CHECK(unknown.err.find("error:") != std::string::npos);
  CHECK(run_cli({"diagnose", "--session", ses, "--method", "banana"}).code == cli::kExitUsage);

  write_text_file(ses, "{\"version\": 1}");
  CHECK(run_cli({"diagnose", "--session", ses}).code == cli::kExitIo);
  CHECK(run_cli({"diagnose", "--session", (dir / "nope.json").string()}).code == cli::kExitIo);
  fs::remove_all(dir);
}

TEST_CASE("heavy brick overlap warns") {
  const fs::path dir = oracle::temp_dir("cli_warn");
  const std::string pts = write_fixture(dir, "ring", fixtures::blob_ring(7)).string();
  const CliResult r = run_cli({"mapper", "--points", pts, "--lens", "coord:0,1", "--cover", "brick", "--overlap", "0.6"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.err.find("warning:") != std::string::npos);
  const CliResult quiet = run_cli({"mapper", "--points", pts, "--lens", "coord:0,1", "--cover", "brick", "--overlap", "0.25"});
  CHECK(quiet.err.find("warning:") == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("outputs are byte-identical across runs") {
  const fs::path dir = oracle::temp_dir("cli_determinism");
  for (const char* name : {"blob_ring", "circle", "two_blob"}) {
    const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
    REQUIRE(run_cli({"fixtures", name, "--seed", "5", "--out", a}).code == 0);
    REQUIRE(run_cli({"fixtures", name, "--seed", "5", "--out", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(run_cli({"fixtures", name, "--seed", "5"}).out == slurp(a));
  }
  const std::string pts = write_fixture(dir, "ring", fixtures::blob_ring(7)).string();
  std::vector<std::string> outs;
  for (int run = 0; run < 2; ++run) {
    const std::string tag = std::to_string(run);
    const auto complex = dir / ("c" + tag + ".json");
    const auto report = dir / ("r" + tag + ".json");
    const auto ses = dir / ("s" + tag + ".json");
    REQUIRE(run_cli({"mapper", "--points", pts, "--lens", "coord:0,1", "--cover", "brick", "--bins", "6", "--out",
                 complex.string(), "--report", report.string(), "--session", ses.string()})
                .code == 0);
    const auto diag = dir / ("d" + tag + ".json");
    REQUIRE(run_cli({"diagnose", "--session", ses.string(), "--method", "persistence", "--out", diag.string()}).code == 0);
    outs.push_back(slurp(complex) + slurp(report) + slurp(ses) + slurp(diag));
  }
  CHECK(outs[0] == outs[1]);
  fs::remove_all(dir);
}

TEST_CASE("brick Mapper of the circle has one loop") {
  const fs::path dir = oracle::temp_dir("cli_circle");
  const std::string circle = write_fixture(dir, "circle", fixtures::circle(7)).string();
  const fs::path out = dir / "c.json";
  const CliResult r = run_cli({"mapper", "--points", circle, "--lens", "coord:0,1", "--cover", "brick", "--bins", "8",
                               "--overlap", "0.25", "--cluster", "single:threshold=0.3", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("beta0: 1\n") != std::string::npos);
  CHECK(r.out.find(", 1 (complex)") != std::string::npos);
  const Json c = Json::parse(slurp(out));
  // The written complex is the nerve of its own nodes.
  std::vector<Cluster> clusters;
  for (const Json& n : c.at("nodes")) clusters.push_back(cluster_from_json(n));
  const MapperComplex rebuilt = nerve(clusters, c.at("dim_cap").get<int>());
  CHECK(canonical_form(rebuilt) == canonical_from_json(c));
  CHECK(complex_betti(rebuilt).b1 == 1);
  fs::remove_all(dir);
}

TEST_CASE("diagnose separates the circle from two blobs") {
  const fs::path dir = oracle::temp_dir("cli_diagnose");
  const std::string circle = write_fixture(dir, "circle", fixtures::circle(7)).string();
  const std::string blobs = write_fixture(dir, "blobs", fixtures::two_blob(7)).string();
  for (const char* method : {"clustering", "persistence"}) {
    const std::string cs = (dir / "c.json").string(), bs = (dir / "b.json").string();
    REQUIRE(run_cli({"mapper", "--points", circle, "--lens", "coord:0", "--bins", "2", "--overlap", "0.4", "--cluster",
                 "single:threshold=0.3", "--session", cs})
                .code == 0);
    REQUIRE(run_cli({"mapper", "--points", blobs, "--lens", "coord:0", "--bins", "2", "--overlap", "0.4", "--cluster",
                 "single:threshold=0.3", "--session", bs})
                .code == 0);
    const CliResult c = run_cli({"diagnose", "--session", cs, "--method", method});
    const CliResult b = run_cli({"diagnose", "--session", bs, "--method", method});
    CAPTURE(method);
    REQUIRE(c.code == 0);
    REQUIRE(b.code == 0);
    const Json cj = Json::parse(c.out), bj = Json::parse(b.out);
    CHECK(cj.at("bad").get<bool>());
    CHECK(cj.at("violations").size() == 1);
    CHECK(cj.at("violations")[0].at("beta0") == 2);
    CHECK_FALSE(bj.at("bad").get<bool>());
  }
  fs::remove_all(dir);
}

TEST_CASE("magnify through the cli") {
  const fs::path dir = oracle::temp_dir("cli_magnify");
  const std::string pts = write_fixture(dir, "ring", fixtures::blob_ring(7)).string();
  const std::string ses = (dir / "s.json").string();
  REQUIRE(run_cli({"mapper", "--points", pts, "--lens", "coord:0,1", "--bins", "1", "--session", ses}).code == 0);
  const Session before = load_session(ses);

  const std::string empty_out = (dir / "e.json").string();
  const CliResult none = run_cli({"magnify", "--session", ses, "--select", "", "--out", empty_out});
  REQUIRE(none.code == 0);
  const Session unchanged = load_session(empty_out);
  CHECK(canonical_form(unchanged.state.complex) == canonical_form(before.state.complex));
  CHECK(unchanged.state.region_log.size() == 1);

  int blob = -1;
  for (const Cluster& c : before.state.clusters)
    if (c.members.back() < 500) blob = c.id;
  REQUIRE(blob >= 0);
  const CliResult r = run_cli({"magnify", "--session", ses, "--select", std::to_string(blob), "--bins", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("local cover: cuboidal bins=3") != std::string::npos);
  const Session after = load_session(ses);
  CHECK(after.state.region_log.size() == 1);
  CHECK(after.state.clusters.size() > before.state.clusters.size());
  CHECK(after.reports.contains("magnify"));

  CHECK(run_cli({"coarsen", "--session", ses, "--select", "1000000,1000001"}).code == 0);
  CHECK(load_session(ses).state.region_log.size() == 2);
  CHECK(run_cli({"magnify", "--session", ses, "--select", "1,x"}).code == cli::kExitUsage);
  fs::remove_all(dir);
}
