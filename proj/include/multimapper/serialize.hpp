#pragma once

#include <string>

#include <json.hpp>

#include "multimapper/complex.hpp"
#include "multimapper/cover.hpp"
#include "multimapper/diagnostics.hpp"
#include "multimapper/multimapper.hpp"
#include "multimapper/tower.hpp"

namespace mm {

// Object keys are kept in a std::map, so output is key-sorted; doubles are
// written as the shortest decimal that round-trips.
using Json = nlohmann::json;

Json to_json(const MapperComplex& mc);
Json to_json(const BuildReport& report);
Json to_json(const PersistenceReport& report);
Json to_json(const Diagnosis& diagnosis);
Json to_json(const Cluster& cluster);
Json to_json(const BoundingBox& box);
Json to_json(const LocalCoverSpec& spec);
Json to_json(const MagnifyRequest& req);

// Betti numbers and simplex counts printed by the CLI and served with every
// complex.
Json summary_json(const MapperComplex& mc);

BoundingBox bounds_from_json(const Json& j);
Cluster cluster_from_json(const Json& j);
BuildReport build_report_from_json(const Json& j);
LocalCoverSpec cover_spec_from_json(const Json& j);
// {"node_ids":[...], "cover":{"scheme","bins_per_axis","g"}, "cluster":"..."};
// missing cover fields and cluster fall back to `defaults`.
MagnifyRequest magnify_request_from_json(const Json& j, const MagnifyRequest& defaults);

// Label-free comparison form of a serialized complex.
CanonicalComplex canonical_from_json(const Json& complex);

// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

}  // namespace mm
