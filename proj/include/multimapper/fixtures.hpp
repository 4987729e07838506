#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "multimapper/geometry.hpp"

namespace mm::fixtures {

// Platform-independent normal deviates: std::normal_distribution output is
// implementation-defined, so the transform is done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double normal();   // standard normal, Box-Muller

 private:
  std::mt19937_64 engine_;
};

// Unit circle, angles evenly spaced, Gaussian noise on both coordinates.
PointCloud circle(std::uint64_t seed, std::size_t n = 500, double sigma = 0.02);

// Two isotropic blobs centred at (0,0) and (10,10).
PointCloud two_blob(std::uint64_t seed, std::size_t n_per_blob = 100, double sigma = 0.5);

// Dense blob at the origin (indices 0..n_blob-1) followed by a sparse ring.
struct BlobRing {
  std::size_t n_blob = 500;
  double blob_sigma = 0.3;
  std::size_t n_ring = 100;
  double ring_radius = 5.0;
  double ring_sigma = 0.2;
};
PointCloud blob_ring(std::uint64_t seed, const BlobRing& shape = {});

// Segments y = 0 and y = 1 over x in [0, 1] with identical x samples, noise in
// y only; the first n points form the lower segment.
PointCloud parallel_segments(std::uint64_t seed, std::size_t n_per_segment = 100, double sigma = 0.01);

// k blobs centred at (10 j, 0).
PointCloud blobs(std::uint64_t seed, int k, std::size_t n_per_blob = 100, double sigma = 0.5);

const std::vector<std::string>& names();

// Generates a named fixture. n == 0 keeps the fixture's default size (for
// multi-part fixtures n is per part). Throws InvalidArgument on unknown names.
PointCloud make(std::string_view name, std::uint64_t seed, std::size_t n = 0, int k = 3);

std::string to_csv(const PointCloud& pc);

}  // namespace mm::fixtures
