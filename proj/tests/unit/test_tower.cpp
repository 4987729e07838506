#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <numeric>

#include "multimapper/errors.hpp"
#include "multimapper/fixtures.hpp"
#include "multimapper/tower.hpp"
#include "oracles.hpp"

using namespace mm;

namespace {

bool box_inside(const Bin& inner, const Bin& outer) {
  for (std::size_t k = 0; k < inner.base_lo.size(); ++k)
    if (inner.base_lo[k] < outer.base_lo[k] || inner.grown_hi[k] > outer.grown_hi[k]) return false;
  return true;
}

void check_containment(const TowerOfCovers& t) {
  REQUIRE(t.maps.size() + 1 == t.size());
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    for (std::size_t a = 0; a < t.covers[i].bins.size(); ++a)
      CHECK(box_inside(t.covers[i].bins[a], t.covers[i + 1].bins[static_cast<std::size_t>(t.maps[i][a])]));
}

// Level-`to` node sharing the most members with each level-`from` node,
// preferring the composite image bin. Built from the complexes alone.
std::vector<int> direct_node_map(const MapperTower& mt, const TowerOfCovers& t, std::size_t from, std::size_t to) {
  const auto bins = compose_maps(t, from, to);
  const auto& src = mt.complexes[from].nodes;
  const auto& dst = mt.complexes[to].nodes;
  std::vector<int> out;
  for (const Node& n : src) {
    int best = -1;
    std::size_t best_shared = 0;
    for (std::size_t q = 0; q < dst.size(); ++q) {
      if (dst[q].cluster.bin_id != bins[static_cast<std::size_t>(n.cluster.bin_id)]) continue;
      std::vector<PointIndex> common;
      std::set_intersection(n.cluster.members.begin(), n.cluster.members.end(), dst[q].cluster.members.begin(),
                            dst[q].cluster.members.end(), std::back_inserter(common));
      if (common.size() > best_shared) {
        best_shared = common.size();
        best = static_cast<int>(q);
      }
    }
    out.push_back(best);
  }
  return out;
}

int union_find_b0(const MapperComplex& mc) { return graph_betti(one_skeleton(mc)).b0; }

struct TowerRun {
  TowerOfCovers tower;
  MapperTower mt;
  PersistenceReport report;
};

TowerRun run(const PointCloud& pc, const std::vector<PointIndex>& subset, double e, double g, const char* params,
             int levels = 5) {
  const LensMap lens = lens_coordinate(pc, std::vector<std::size_t>{0, 1});
  TowerRun r;
  r.tower = build_tower(lens_bounds(lens, subset), Vec{e, e}, g, TowerConfig{levels, 0.5, 1.0});
  r.mt = tower_mappers(pc, lens, subset, r.tower, ClusterParams::parse(params));
  r.report = persistence0(r.mt, r.tower.levels);
  return r;
}

}  // namespace

TEST_CASE("two-level unit grid tower nests") {
  const TowerOfCovers t = build_tower(BoundingBox{{0, 0}, {3, 3}}, 3, 0.25, 2, 1.0, 2.0);
  CHECK(t.size() == 2);
  CHECK(t.levels == std::vector<double>{1.0, 2.0});
  check_containment(t);
  for (std::size_t a = 0; a < t.covers[0].bins.size(); ++a) {
    CHECK(t.maps[0][a] == static_cast<int>(a));
    CHECK(t.covers[0].bins[a].base_lo == t.covers[1].bins[a].base_lo);
  }
}

TEST_CASE("five-level default tower") {
  const TowerOfCovers t = build_tower(BoundingBox{{0, 0}, {10, 4}}, 4, 0.25, 5);
  CHECK(t.size() == 5);
  CHECK(t.levels.front() == doctest::Approx(0.5 * 2.5));
  CHECK(t.levels.back() == doctest::Approx(2.5));
  CHECK(t.resolution() == t.levels.front());
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.levels[i] > t.levels[i - 1]);
  check_containment(t);
  // Every level covers the bounds corners.
  for (const Cover& c : t.covers) {
    CHECK(oracle::multiplicity(c, {0, 0}) >= 1);
    CHECK(oracle::multiplicity(c, {10, 4}) >= 1);
  }
}

TEST_CASE("degenerate single-cell tower") {
  const TowerOfCovers t = build_tower(BoundingBox{{1, 1}, {1, 1}}, Vec{1.0, 1.0}, 0.25, TowerConfig{});
  for (const Cover& c : t.covers) CHECK(c.bins.size() == 1);
  for (const auto& m : t.maps) CHECK(m == std::vector<int>{0});
}

TEST_CASE("tower argument checks") {
  CHECK_THROWS_AS(build_tower(BoundingBox{{0}, {1}}, 2, 0.25, 1), Error);
  CHECK_THROWS_AS(build_tower(BoundingBox{{0}, {1}}, 2, 0.25, 3, 0.8, 0.5), Error);
  CHECK_THROWS_AS(build_tower(BoundingBox{{0}, {1}}, 2, 1.0, 3), Error);
}

TEST_CASE("containment on random towers") {
  fixtures::Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const double w = 0.01 + rng.uniform() * 10, h = 0.01 + rng.uniform() * 10;
    const BoundingBox b{{rng.normal(), rng.normal()}, {0, 0}};
    const BoundingBox bounds{b.lo, {b.lo[0] + w, b.lo[1] + h}};
    const double lo = 0.1 + rng.uniform() * 0.5;
    const TowerOfCovers t = build_tower(bounds, 1 + static_cast<int>(rng.uniform() * 6), rng.uniform() * 0.9,
                                        2 + static_cast<int>(rng.uniform() * 5), lo, lo + 0.1 + rng.uniform());
    CAPTURE(trial);
    check_containment(t);
    CHECK_NOTHROW(verify_containment(t));
  }
}

TEST_CASE("cover map composition") {
  const TowerOfCovers t = build_tower(BoundingBox{{0, 0}, {5, 5}}, 3, 0.25, 3);
  std::vector<int> step = t.maps[0];
  for (int& v : step) v = t.maps[1][static_cast<std::size_t>(v)];
  CHECK(compose_maps(t, 0, 2) == step);
  std::vector<int> identity(t.covers[0].bins.size());
  std::iota(identity.begin(), identity.end(), 0);
  CHECK(compose_maps(t, 1, 1) == identity);
}

TEST_CASE("beta0 mode arithmetic") {
  CHECK(beta0_mode(std::vector<int>{4, 2, 2, 2, 1}) == 2);
  CHECK(beta0_mode(std::vector<int>{2, 2, 1, 1}) == 1);
  CHECK(beta0_mode(std::vector<int>{3}) == 3);
  CHECK(beta0_mode(std::vector<int>{5, 1, 5, 1}) == 1);
}

TEST_CASE("two blobs persist as two components") {
  const PointCloud pc = fixtures::two_blob(7);
  const auto all = oracle::iota_ids(pc.size());
  const TowerRun r = run(pc, all, 4.0, 0.25, "dbscan:auto");
  CHECK(r.report.beta0_mode == 2);
  for (int b : r.report.beta0) CHECK(b == 2);
  REQUIRE(r.report.pairs.size() == 2);
  for (const auto& [birth, death] : r.report.pairs) {
    CHECK(birth == r.tower.levels.front());
    CHECK(death == r.tower.levels.back());
  }
  // Maps keep each blob's nodes on that blob.
  for (std::size_t i = 0; i + 1 < r.mt.complexes.size(); ++i) {
    const auto& src = r.mt.complexes[i].nodes;
    const auto& dst = r.mt.complexes[i + 1].nodes;
    for (std::size_t p = 0; p < src.size(); ++p) {
      const int q = r.mt.node_maps[i][p];
      REQUIRE(q >= 0);
      CHECK((src[p].cluster.members.front() < 100) == (dst[static_cast<std::size_t>(q)].cluster.members.front() < 100));
    }
  }
}

TEST_CASE("single blob gives one component and total maps") {
  const PointCloud pc = fixtures::blobs(7, 1);
  const TowerRun r = run(pc, oracle::iota_ids(pc.size()), 4.0, 0.25, "dbscan:auto");
  for (int b : r.report.beta0) CHECK(b == 1);
  for (std::size_t i = 0; i + 1 < r.mt.complexes.size(); ++i) {
    CHECK(is_simplicial(r.mt, i));
    for (int q : r.mt.node_maps[i]) CHECK(q >= 0);
  }
}

TEST_CASE("sparse ring shatters at fine scales and merges at coarse ones") {
  const PointCloud pc = fixtures::blob_ring(7);
  std::vector<PointIndex> ring(100);
  std::iota(ring.begin(), ring.end(), 500);
  const TowerRun r = run(pc, ring, 1.5, 0.25, "single:auto");
  CHECK(r.report.beta0.front() > 1);
  CHECK(r.report.beta0.back() == 1);
  // All classes but the eldest die on the way up.
  int survivors = 0;
  for (const auto& [birth, death] : r.report.pairs) {
    CHECK(birth <= death);
    survivors += death == r.tower.levels.back();
  }
  CHECK(survivors == 1);
}

TEST_CASE("beta0 per level is the 1-skeleton component count") {
  const PointCloud pc = fixtures::blob_ring(3);
  const TowerRun r = run(pc, oracle::iota_ids(pc.size()), 2.0, 0.25, "dbscan:auto");
  for (std::size_t i = 0; i < r.mt.complexes.size(); ++i) CHECK(r.report.beta0[i] == union_find_b0(r.mt.complexes[i]));
}

TEST_CASE("node maps compose functorially on a three-level tower") {
  for (int k = 1; k <= 3; ++k) {
    const PointCloud pc = fixtures::blobs(7, k);
    const TowerRun r = run(pc, oracle::iota_ids(pc.size()), 4.0, 0.25, "dbscan:auto", 3);
    CAPTURE(k);
    CHECK(compose_node_maps(r.mt, 0, 2) == direct_node_map(r.mt, r.tower, 0, 2));
    std::vector<int> two_step = r.mt.node_maps[0];
    for (int& v : two_step)
      if (v >= 0) v = r.mt.node_maps[1][static_cast<std::size_t>(v)];
    CHECK(compose_node_maps(r.mt, 0, 2) == two_step);
    CHECK(is_simplicial(r.mt, 0));
    CHECK(is_simplicial(r.mt, 1));
  }
}

TEST_CASE("k blobs give beta0 mode k") {
  for (int k = 1; k <= 3; ++k) {
    const PointCloud pc = fixtures::blobs(7, k);
    const TowerRun r = run(pc, oracle::iota_ids(pc.size()), 4.0, 0.25, "dbscan:auto");
    CAPTURE(k);
    CHECK(r.report.beta0_mode == k);
  }
}

TEST_CASE("persistence needs matching levels") {
  MapperTower mt;
  mt.complexes.resize(1);
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(persistence0(mt, one), Error);
}
