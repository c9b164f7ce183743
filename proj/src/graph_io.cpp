#include "wavegraph/graph_io.hpp"

#include <fstream>
#include <stdexcept>

namespace wavegraph {

namespace {

std::string id_string(const nlohmann::json& v, const char* what) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    throw std::invalid_argument(std::string(what) + " must be a string or integer");
}

}  // namespace

GraphSpec parse_graph_spec(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("nodes"))
        throw std::invalid_argument("graph spec requires a 'nodes' array");
    GraphSpec spec;
    for (const auto& n : doc.at("nodes")) {
        NodeSpec node;
        node.id = id_string(n.at("id"), "node id");
        node.mass = n.value("mass", 1.0);
        if (n.contains("coord")) node.coord = n.at("coord").get<std::vector<double>>();
        std::string b = n.value("boundary", std::string("V0"));
        if (b == "V0") {
            node.boundary = Boundary::free;
        } else if (b == "V1") {
            node.boundary = Boundary::fixed;
        } else {
            throw std::invalid_argument("node '" + node.id + "' boundary must be V0 or V1");
        }
        spec.nodes.push_back(std::move(node));
    }
    if (doc.contains("edges")) {
        for (const auto& e : doc.at("edges")) {
            EdgeSpec edge;
            edge.tail = id_string(e.at("tail"), "edge tail");
            edge.head = id_string(e.at("head"), "edge head");
            edge.weight = e.value("weight", 1.0);
            spec.edges.push_back(std::move(edge));
        }
    }
    return spec;
}

GraphSpec load_graph_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open graph file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("graph file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_graph_spec(doc);
}

nlohmann::json to_json(const GraphSpec& spec) {
    nlohmann::json doc;
    doc["nodes"] = nlohmann::json::array();
    for (const auto& n : spec.nodes) {
        doc["nodes"].push_back({{"id", n.id},
                                {"mass", n.mass},
                                {"coord", n.coord},
                                {"boundary", n.boundary == Boundary::fixed ? "V1" : "V0"}});
    }
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : spec.edges) {
        doc["edges"].push_back({{"tail", e.tail}, {"head", e.head}, {"weight", e.weight}});
    }
    return doc;
}

}  // namespace wavegraph
