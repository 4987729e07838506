#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "multimapper/multimapper.hpp"
#include "multimapper/tower.hpp"

namespace mm {

enum class DiagnoseMethod { Clustering, Persistence };

std::string_view to_string(DiagnoseMethod method) noexcept;
DiagnoseMethod parse_method(std::string_view text);

enum class ActionKind { Refine, Coarsen };

std::string_view to_string(ActionKind kind) noexcept;

struct SuggestedAction {
  ActionKind kind = ActionKind::Refine;
  double factor = 2.0;
};

struct ViolationReport {
  Simplex simplex;
  DiagnoseMethod method = DiagnoseMethod::Clustering;
  int beta0 = 0;
  std::pair<PointIndex, PointIndex> witness{-1, -1};
  // Point sets of the components found in the intersection.
  std::vector<std::vector<PointIndex>> components;
  SuggestedAction action;
  std::optional<PersistenceReport> persistence;
};

struct Diagnosis {
  bool bad = false;
  std::vector<ViolationReport> violations;
  int skipped = 0;
  int checked = 0;
};

inline constexpr int kDefaultDiagnoseDim = 1;

// Members common to every node of the simplex, ascending.
std::vector<PointIndex> simplex_intersection(const AnalysisState& state, const Simplex& simplex);

// Clusters every simplex intersection (dims 1..max_dim) with `params` and
// reports those that split into more than one cluster.
Diagnosis check_clustering(const AnalysisState& state, const ClusterParams& params, int max_dim = kDefaultDiagnoseDim);

// Builds a tower over each intersection's lens bounds, with reference bin
// size taken from the smallest bin among the simplex's nodes, and reports
// simplices whose zero-dimensional mode exceeds one. Intersections of fewer
// than two points are skipped.
Diagnosis check_persistence(const AnalysisState& state, const TowerConfig& config,
                            int max_dim = kDefaultDiagnoseDim);

Diagnosis diagnose(const AnalysisState& state, DiagnoseMethod method, int levels, int max_dim);

// Refine by two on the violating nodes. Coarsen by two instead when every
// component already lies mostly (at least half its points) inside one node
// outside the simplex: the split is then visible elsewhere at the current
// scale and a coarser local cover can reconnect it.
SuggestedAction choose_action(const ViolationReport& v, const AnalysisState& state);
MagnifyRequest suggest_action(const ViolationReport& v, const AnalysisState& state);

}  // namespace mm
