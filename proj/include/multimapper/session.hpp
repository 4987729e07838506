#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "multimapper/multimapper.hpp"
#include "multimapper/serialize.hpp"

namespace mm {

inline constexpr int kSessionVersion = 1;

struct DatasetRef {
  std::filesystem::path path;  // absolute
  std::string hash;            // PointCloud::content_hash
};

// Either a lens spec ("coord:0,1", "pca:2") or a lens CSV file.
struct LensSource {
  std::string spec;
  std::filesystem::path csv;
  std::string hash;  // digest of the lens values
};

struct SessionConfig {
  std::filesystem::path points;
  std::string lens_spec;  // used when lens_csv is empty
  std::filesystem::path lens_csv;
  LocalCoverSpec cover{CoverScheme::Cuboidal, 10, 0.25};
  ClusterParams params;
  int dim_cap = kDefaultDimCap;
};

struct Session {
  AnalysisState state;
  DatasetRef dataset;
  LensSource lens;
  LocalCoverSpec base_spec;
  Json reports = Json::object();  // latest "build", "magnify", "diagnose" reports
};

std::string lens_hash(const LensMap& lens);

// Loads the dataset and lens, builds the base Mapper. Throws mm::Error.
Session create_session(const SessionConfig& config);

Json session_to_json(const Session& session);

// Re-reads the dataset, checks its hash, rebuilds covers and the nerve from
// the stored clusters and checks them against the stored complex. Any
// inconsistency throws CorruptSession; unreadable files throw Io.
Session session_from_json(const Json& j);

// Writes through a temporary file and rename.
void save_session(const Session& session, const std::filesystem::path& path);
Session load_session(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

struct MagnifyOutcome {
  Session session;
  std::vector<PointIndex> degeneracy_points;
  int nodes_before = 0;
  int nodes_after = 0;
};

// magnify plus bookkeeping: degeneracy points and the "magnify" report.
MagnifyOutcome apply_magnify(const Session& session, const MagnifyRequest& req);

}  // namespace mm
