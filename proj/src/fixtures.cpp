#include "multimapper/fixtures.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "multimapper/errors.hpp"

namespace mm::fixtures {
namespace {

PointCloud from_rows(std::vector<Vec> rows) { return PointCloud(rows); }

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

PointCloud circle(std::uint64_t seed, std::size_t n, double sigma) {
  Rng rng(seed);
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    const double x = std::cos(t) + sigma * rng.normal();
    const double y = std::sin(t) + sigma * rng.normal();
    rows.push_back({x, y});
  }
  return from_rows(std::move(rows));
}

PointCloud two_blob(std::uint64_t seed, std::size_t n_per_blob, double sigma) {
  Rng rng(seed);
  std::vector<Vec> rows;
  for (const double c : {0.0, 10.0}) {
    for (std::size_t i = 0; i < n_per_blob; ++i) {
      const double x = c + sigma * rng.normal();
      const double y = c + sigma * rng.normal();
      rows.push_back({x, y});
    }
  }
  return from_rows(std::move(rows));
}

PointCloud blob_ring(std::uint64_t seed, const BlobRing& shape) {
  Rng rng(seed);
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < shape.n_blob; ++i) {
    const double x = shape.blob_sigma * rng.normal();
    const double y = shape.blob_sigma * rng.normal();
    rows.push_back({x, y});
  }
  for (std::size_t i = 0; i < shape.n_ring; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(shape.n_ring);
    const double x = shape.ring_radius * std::cos(t) + shape.ring_sigma * rng.normal();
    const double y = shape.ring_radius * std::sin(t) + shape.ring_sigma * rng.normal();
    rows.push_back({x, y});
  }
  return from_rows(std::move(rows));
}

PointCloud parallel_segments(std::uint64_t seed, std::size_t n_per_segment, double sigma) {
  Rng rng(seed);
  std::vector<Vec> rows;
  const double denom = n_per_segment > 1 ? static_cast<double>(n_per_segment - 1) : 1.0;
  for (const double y0 : {0.0, 1.0}) {
    for (std::size_t i = 0; i < n_per_segment; ++i) {
      rows.push_back({static_cast<double>(i) / denom, y0 + sigma * rng.normal()});
    }
  }
  return from_rows(std::move(rows));
}

PointCloud blobs(std::uint64_t seed, int k, std::size_t n_per_blob, double sigma) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "blob count must be >= 1");
  Rng rng(seed);
  std::vector<Vec> rows;
  for (int j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n_per_blob; ++i) {
      const double x = 10.0 * j + sigma * rng.normal();
      const double y = sigma * rng.normal();
      rows.push_back({x, y});
    }
  }
  return from_rows(std::move(rows));
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> all = {"blob_ring", "blobs", "circle", "parallel_segments", "two_blob"};
  return all;
}

PointCloud make(std::string_view name, std::uint64_t seed, std::size_t n, int k) {
  if (name == "circle") return n == 0 ? circle(seed) : circle(seed, n);
  if (name == "two_blob") return n == 0 ? two_blob(seed) : two_blob(seed, n);
  if (name == "blob_ring") {
    BlobRing shape;
    if (n != 0) shape.n_blob = n;
    return blob_ring(seed, shape);
  }
  if (name == "parallel_segments") return n == 0 ? parallel_segments(seed) : parallel_segments(seed, n);
  if (name == "blobs") return n == 0 ? blobs(seed, k) : blobs(seed, k, n);
  throw Error(ErrorKind::InvalidArgument, "unknown fixture '" + std::string(name) + "'");
}

std::string to_csv(const PointCloud& pc) {
  std::string out;
  for (std::size_t k = 0; k < pc.dim(); ++k) {
    if (k > 0) out += ',';
    out += 'x';
    out += std::to_string(k);
  }
  out += '\n';
  for (std::size_t i = 0; i < pc.size(); ++i) {
    for (std::size_t k = 0; k < pc.dim(); ++k) {
      if (k > 0) out += ',';
      append_number(out, pc.at(i, k));
    }
    out += '\n';
  }
  return out;
}

}  // namespace mm::fixtures
