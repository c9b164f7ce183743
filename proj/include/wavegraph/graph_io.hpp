#pragma once

#include <filesystem>

#include "json.hpp"
#include "wavegraph/graph.hpp"

namespace wavegraph {

/// Reads `{"nodes":[{id, mass, coord, boundary:"V0"|"V1"}], "edges":[{tail, head, weight}]}`.
/// Ids may be strings or integers; `coord` defaults to empty, `boundary` to V0.
GraphSpec parse_graph_spec(const nlohmann::json& doc);
GraphSpec load_graph_spec(const std::filesystem::path& path);
nlohmann::json to_json(const GraphSpec& spec);

}  // namespace wavegraph
