#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "multimapper/cover.hpp"
#include "multimapper/errors.hpp"
#include "multimapper/fixtures.hpp"
#include "oracles.hpp"

using namespace mm;

namespace {

BoundingBox box(Vec lo, Vec hi) { return {std::move(lo), std::move(hi)}; }

int probe_grid_max(const Cover& cover, int probes) {
  int best = 0;
  const auto& b = cover.bounds;
  for (int i = 0; i < probes; ++i) {
    for (int j = 0; j < probes; ++j) {
      const Vec z{b.lo[0] + b.width(0) * i / (probes - 1), b.lo[1] + b.width(1) * j / (probes - 1)};
      best = std::max(best, oracle::multiplicity(cover, z));
    }
  }
  return best;
}

void check_covers(const Cover& cover, const LensMap& lens) {
  for (std::size_t i = 0; i < lens.size(); ++i) REQUIRE(oracle::multiplicity(cover, lens.value(i)) >= 1);
  CHECK_FALSE(first_uncovered(cover, lens).has_value());
}

// Base-box area sum equals the parent area and no two child interiors meet.
void check_tiles(const std::vector<Bin>& children, const Bin& parent) {
  double area = 0;
  for (const Bin& c : children) {
    double a = 1;
    for (std::size_t k = 0; k < c.base_lo.size(); ++k) {
      CHECK(c.base_lo[k] >= parent.base_lo[k]);
      CHECK(c.base_hi[k] <= parent.base_hi[k]);
      a *= c.base_width(k);
    }
    area += a;
  }
  double parent_area = 1;
  for (std::size_t k = 0; k < parent.base_lo.size(); ++k) parent_area *= parent.base_width(k);
  CHECK(area == doctest::Approx(parent_area).epsilon(1e-12));
  for (std::size_t a = 0; a < children.size(); ++a) {
    for (std::size_t b = a + 1; b < children.size(); ++b) {
      bool disjoint = false;
      for (std::size_t k = 0; k < parent.base_lo.size(); ++k) {
        disjoint = disjoint || children[a].base_hi[k] <= children[b].base_lo[k] ||
                   children[b].base_hi[k] <= children[a].base_lo[k];
      }
      CHECK(disjoint);
    }
  }
}

}  // namespace

TEST_CASE("single-bin cuboidal cover") {
  const Cover c = build_cuboidal_cover(box({0, 0}, {1, 1}), 1, 0.3);
  REQUIRE(c.bins.size() == 1);
  CHECK(c.bins[0].base_lo == Vec{0, 0});
  CHECK(c.bins[0].base_hi == Vec{1, 1});
  CHECK(c.bins[0].grown_hi == Vec{1.3, 1.3});
}

TEST_CASE("5x5 cuboidal cover geometry") {
  const Cover c = build_cuboidal_cover(box({0, 0}, {10, 10}), 5, 0.25);
  REQUIRE(c.bins.size() == 25);
  for (std::size_t i = 0; i < c.bins.size(); ++i) {
    const Bin& b = c.bins[i];
    CHECK(b.id == static_cast<int>(i));
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(b.base_width(k) == doctest::Approx(2.0));
      CHECK(b.grown_hi[k] - b.base_lo[k] == doctest::Approx(2.5));
    }
  }
  CHECK(probe_grid_max(c, 200) == 4);
  CHECK(max_multiplicity(c, 200).max_multiplicity == 4);
}

TEST_CASE("cuboidal cover rejects bad overlap") {
  CHECK_THROWS_AS(build_cuboidal_cover(box({0}, {1}), 2, 1.0), Error);
  try {
    (void)build_cuboidal_cover(box({0}, {1}), 2, 1.5);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidOverlap);
  }
}

TEST_CASE("brick rows are offset by half a brick") {
  const Cover c = build_brick_cover(box({0, 0}, {4, 2}), 4, 0.25, BrickLayout{2});
  std::vector<double> row0, row1;
  for (const Bin& b : c.bins) (b.base_lo[1] == 0.0 ? row0 : row1).push_back(b.base_lo[0]);
  CHECK(row0 == std::vector<double>{0, 1, 2, 3});
  CHECK(row1 == std::vector<double>{0, 0.5, 1.5, 2.5, 3.5});
  for (const Bin& b : c.bins) {
    CHECK(b.base_lo[0] >= 0.0);
    CHECK(b.base_hi[0] <= 4.0);
  }
  CHECK(probe_grid_max(c, 300) == 3);
}

TEST_CASE("brick cover degenerate and error cases") {
  CHECK(build_brick_cover(box({0, 0}, {1, 1}), 1, 0.0).bins.size() == 1);
  try {
    (void)build_brick_cover(box({0}, {1}), 3, 0.25);
    FAIL("expected BrickCoverDimension");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BrickCoverDimension);
  }
  CHECK_FALSE(build_brick_cover(box({0, 0}, {1, 1}), 4, 0.45).overlap_warning);
  CHECK(build_brick_cover(box({0, 0}, {1, 1}), 4, 0.6).overlap_warning);
}

TEST_CASE("random brick covers stay at most 3-fold; cuboidal reach 4") {
  fixtures::Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const double x0 = rng.normal() * 5, y0 = rng.normal() * 5;
    const BoundingBox b = box({x0, y0}, {x0 + 0.1 + rng.uniform() * 20, y0 + 0.1 + rng.uniform() * 20});
    const int bins = 2 + static_cast<int>(rng.uniform() * 9);
    const double g = rng.uniform() * 0.45;
    const Cover brick = build_brick_cover(b, bins, g);
    CAPTURE(trial);
    CHECK(exact_max_multiplicity(brick).max_multiplicity <= 3);
    const Cover cub = build_cuboidal_cover(b, bins, std::max(g, 0.01));
    CHECK(exact_max_multiplicity(cub).max_multiplicity == 4);
  }
}

TEST_CASE("exact multiplicity agrees with its witness") {
  const Cover c = build_cuboidal_cover(box({0, 0}, {3, 3}), 3, 0.4);
  const auto probe = exact_max_multiplicity(c);
  CHECK(oracle::multiplicity(c, probe.witness) == probe.max_multiplicity);
  CHECK(probe_grid_max(c, 150) <= probe.max_multiplicity);
}

TEST_CASE("every constructed cover covers its lens") {
  const PointCloud pc = fixtures::blob_ring(4);
  const LensMap lens = lens_coordinate(pc, std::vector<std::size_t>{0, 1});
  for (const int bins : {1, 2, 5, 9}) {
    for (const double g : {0.0, 0.25, 0.45}) {
      check_covers(build_cuboidal_cover(lens_bounds(lens), bins, g), lens);
      check_covers(build_brick_cover(lens_bounds(lens), bins, g), lens);
    }
  }
  // Points exactly on the upper bound with zero overlap.
  const LensMap corner({{0, 0}, {1, 1}, {1, 0}});
  check_covers(build_cuboidal_cover(lens_bounds(corner), 3, 0.0), corner);
  check_covers(build_brick_cover(lens_bounds(corner), 3, 0.0), corner);
}

TEST_CASE("degenerate axis is widened") {
  const LensMap flat({{0, 5}, {1, 5}, {2, 5}});
  const Cover c = build_cuboidal_cover(lens_bounds(flat), 2, 0.25);
  CHECK(c.bounds.width(1) == doctest::Approx(kDegenerateAxisWidth));
  check_covers(c, flat);
}

TEST_CASE("slice_refine splits a box into equal quarters") {
  const Cover c = build_cuboidal_cover(box({0, 0}, {2, 2}), 1, 0.25);
  const Cover r = slice_refine(c, {0}, 2);
  REQUIRE(r.bins.size() == 4);
  std::set<std::pair<Vec, Vec>> bases;
  for (const Bin& b : r.bins) {
    bases.insert({b.base_lo, b.base_hi});
    CHECK(b.level == 1);
    for (std::size_t k = 0; k < 2; ++k) CHECK(b.grown_hi[k] == doctest::Approx(b.base_hi[k] + 0.25 * 1.0));
  }
  const std::set<std::pair<Vec, Vec>> expect{
      {{0, 0}, {1, 1}}, {{1, 0}, {2, 1}}, {{0, 1}, {1, 2}}, {{1, 1}, {2, 2}}};
  CHECK(bases == expect);
  check_tiles(r.bins, c.bins[0]);
}

TEST_CASE("slice_refine with empty selection is a no-op") {
  const Cover c = build_cuboidal_cover(box({0, 0}, {2, 2}), 3, 0.25);
  const Cover r = slice_refine(c, {}, 2);
  REQUIRE(r.bins.size() == c.bins.size());
  for (std::size_t i = 0; i < c.bins.size(); ++i) {
    CHECK(r.bins[i].base_lo == c.bins[i].base_lo);
    CHECK(r.bins[i].grown_hi == c.bins[i].grown_hi);
  }
}

TEST_CASE("slice_refine one of 25 bins by 3") {
  const Cover c = build_cuboidal_cover(box({0, 0}, {10, 10}), 5, 0.25);
  const Cover r = slice_refine(c, {7}, 3);
  CHECK(r.bins.size() == 33);
  std::vector<Bin> children;
  for (const Bin& b : r.bins)
    if (b.level == 1) children.push_back(b);
  REQUIRE(children.size() == 9);
  check_tiles(children, c.bins[7]);
  // Grown children stay inside the grown parent.
  for (const Bin& ch : children)
    for (std::size_t k = 0; k < 2; ++k) CHECK(ch.grown_hi[k] <= c.bins[7].grown_hi[k] + 1e-12);
  for (std::size_t i = 0; i < r.bins.size(); ++i) CHECK(r.bins[i].id == static_cast<int>(i));
}

TEST_CASE("slice_refine errors") {
  const Cover c = build_cuboidal_cover(box({0, 0}, {1, 1}), 2, 0.25);
  try {
    (void)slice_refine(c, {17}, 2);
    FAIL("expected UnknownBin");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownBin);
  }
  const Cover brick = build_brick_cover(box({0, 0}, {1, 1}), 2, 0.25);
  CHECK_THROWS_AS(slice_refine(brick, {0}, 2), Error);
}

TEST_CASE("restrict_cover") {
  const LensMap lens({{0.1, 0.1}, {9.9, 9.9}, {5, 5}});
  const Cover c = build_cuboidal_cover(box({0, 0}, {10, 10}), 5, 0.0);
  const std::vector<PointIndex> corner{0};
  const Cover one = restrict_cover(c, lens, corner);
  REQUIRE(one.bins.size() == 1);
  CHECK(one.bins[0].base_lo == Vec{0, 0});

  const PointCloud pc = fixtures::blobs(1, 1, 400, 3.0);
  const LensMap spread = lens_coordinate(pc, std::vector<std::size_t>{0, 1});
  const Cover full = build_cuboidal_cover(lens_bounds(spread), 2, 0.25);
  const auto all = oracle::iota_ids(pc.size());
  CHECK(restrict_cover(full, spread, all).bins.size() == full.bins.size());
}

TEST_CASE("restrict_cover to the left half of a circle") {
  std::vector<Vec> rows;
  for (int i = 0; i < 200; ++i) {
    const double t = 2 * std::numbers::pi * i / 200;
    rows.push_back({std::cos(t), std::sin(t)});
  }
  const LensMap lens(rows);
  const Cover c = build_cuboidal_cover(lens_bounds(lens), 5, 0.25);
  std::vector<PointIndex> left;
  for (int i = 0; i < 200; ++i)
    if (rows[i][0] < 0) left.push_back(i);
  const Cover r = restrict_cover(c, lens, left);
  std::size_t expect = 0;
  for (const Bin& b : c.bins) {
    bool hit = false;
    for (PointIndex p : left) hit = hit || b.contains(rows[p]);
    expect += hit;
  }
  CHECK(r.bins.size() == expect);
  CHECK(r.bins.size() < c.bins.size());
  for (const Bin& b : r.bins) CHECK(b.base_lo[0] < 0.0);
}

TEST_CASE("bin_members honours the subset") {
  const LensMap lens({{0.5}, {1.5}, {0.7}});
  const Cover c = build_cuboidal_cover(box({0}, {2}), 2, 0.0);
  CHECK(bin_members(c.bins[0], lens) == std::vector<PointIndex>{0, 2});
  const std::vector<PointIndex> sub{2};
  CHECK(bin_members(c.bins[0], lens, sub) == std::vector<PointIndex>{2});
}
