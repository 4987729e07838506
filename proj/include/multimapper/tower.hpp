#pragma once

#include <span>
#include <utility>
#include <vector>

#include "multimapper/clustering.hpp"
#include "multimapper/complex.hpp"
#include "multimapper/cover.hpp"

namespace mm {

// Covers at increasing scales over one fixed grid of cells. Cell c at level i
// is the box anchored at the cell's lower corner with side scale_i * base
// width per axis, grown by g; so every bin contains the same cell's bin at
// the previous level and the cover maps are the identity on cell index.
struct TowerOfCovers {
  std::vector<double> levels;      // ascending scale values
  std::vector<double> fractions;   // scale / reference width, per level
  Vec base_width;                  // reference bin width per axis
  std::vector<Cover> covers;       // one per level, bin id == cell index
  std::vector<std::vector<int>> maps;  // maps[i][bin at level i] -> bin at level i + 1

  [[nodiscard]] std::size_t size() const noexcept { return covers.size(); }
  [[nodiscard]] double resolution() const { return levels.front(); }
};

struct TowerConfig {
  int levels = 5;
  double lo_fraction = 0.5;
  double hi_fraction = 1.0;
};

// Reference width per axis is bounds width / base_cells_per_axis; scales run
// linearly over [lo_fraction, hi_fraction] times that width.
TowerOfCovers build_tower(const BoundingBox& bounds, int base_cells_per_axis, double g, int levels,
                          double lo_fraction = 0.5, double hi_fraction = 1.0);
TowerOfCovers build_tower(const BoundingBox& bounds, const Vec& base_width, double g,
                          const TowerConfig& config);

// Throws std::logic_error if some bin is not contained in its image bin.
void verify_containment(const TowerOfCovers& tower);

// Composite cover map from level `from` to level `to` (from <= to).
std::vector<int> compose_maps(const TowerOfCovers& tower, std::size_t from, std::size_t to);

struct MapperTower {
  std::vector<MapperComplex> complexes;
  // node_maps[i][p] is the position in level i+1 of the image of node
  // position p at level i, or -1 when nothing at level i+1 shares a point.
  std::vector<std::vector<int>> node_maps;
  int soft_warnings = 0;
};

// One Mapper per tower level over `subset`. Cluster maps follow the cover map
// and pick the image-bin cluster sharing the most members (ties to the lower
// position), falling back to the best-overlapping cluster anywhere.
MapperTower tower_mappers(const PointCloud& pc, const LensMap& lens, std::span<const PointIndex> subset,
                          const TowerOfCovers& tower, const ClusterParams& params, int dim_cap = 1);

std::vector<int> compose_node_maps(const MapperTower& mt, std::size_t from, std::size_t to);

// True when the node map from `level` to level + 1 sends every simplex onto a
// simplex (or vertex) of the next level.
bool is_simplicial(const MapperTower& mt, std::size_t level);

struct PersistenceReport {
  std::vector<double> levels;
  std::vector<int> beta0;
  std::vector<std::pair<double, double>> pairs;  // (birth, death), sorted
  int beta0_mode = 0;
};

// argmax over b of |{levels with beta0 == b}|, ties to the smaller b.
int beta0_mode(std::span<const int> beta0_per_level);

// Zero-dimensional persistence along the tower. Components are tracked through
// the node maps; when several tracked classes land in one component the
// oldest survives and the rest die at the previous level.
PersistenceReport persistence0(const MapperTower& mt, std::span<const double> levels);

}  // namespace mm
