#pragma once

#include <string>

#include <json.hpp>

#include "ramified/flow.hpp"
#include "ramified/measures.hpp"
#include "ramified/network.hpp"
#include "ramified/plan.hpp"

namespace ramified {

using Json = nlohmann::ordered_json;

// Fixed interchange schemas:
//   measure: {"dim": d, "atoms": [{"p": [..], "m": ..}, ...]}
//   network: {"dim": d, "vertices": [[..]..], "edges": [[tail,head]..]}
//   flow:    network fields plus "weights": [..]
//   plan:    {"network": <network>, "curves": [{"w": .., "path": [..]}, ...]}

Json measure_to_json(const AtomicMeasure& m);
AtomicMeasure measure_from_json(const Json& j, bool require_probability = false);

Json network_to_json(const EmbeddedNetwork& n);
EmbeddedNetwork network_from_json(const Json& j);

Json flow_to_json(const FlowField& f);
FlowField flow_from_json(const Json& j);

Json plan_to_json(const IrrigationPlan& p);
IrrigationPlan plan_from_json(const Json& j);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

/// FNV-1a 64-bit hash of a byte string, as fixed-width hex.
std::string content_digest(const std::string& bytes);
std::string file_digest(const std::string& path);

}  // namespace ramified
