#pragma once
// Graph snapshots as JSON: every node with its payload and parent edge, nav
// edges, and the stat counters. Field order is fixed so identical graphs
// serialize to identical bytes, and load(save(g)) reproduces g exactly.

#include <map>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "graph.hpp"

namespace scout {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kGraphSchemaVersion = 1;

inline const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Observed: return "observed";
        case NodeKind::Hypothesis: return "hypothesis";
        case NodeKind::ObjectHypothesis: return "object_hypothesis";
    }
    return "?";
}

inline NodeKind node_kind_from_name(const std::string& s) {
    if (s == "observed") return NodeKind::Observed;
    if (s == "hypothesis") return NodeKind::Hypothesis;
    if (s == "object_hypothesis") return NodeKind::ObjectHypothesis;
    throw std::invalid_argument("unknown node kind: " + s);
}

inline ordered_json graph_to_json(const HypothesisGraph& g) {
    ordered_json j;
    j["schema_version"] = kGraphSchemaVersion;
    j["merge_radius"] = g.merge_radius();
    j["next_id"] = g.next_id();
    ordered_json nodes = ordered_json::array();
    for (const auto& [id, n] : g.nodes()) {
        ordered_json jn;
        jn["id"] = id;
        jn["kind"] = node_kind_name(n.kind);
        jn["position"] = {n.position.x, n.position.y};
        jn["category"] = n.category;
        jn["objects"] = n.objects;
        jn["embedding"] = n.embedding;
        jn["distribution"] = n.distribution;
        jn["frontier_id"] = n.frontier_id;
        jn["object"] = n.object;
        jn["parent"] = n.parent;
        jn["rho"] = n.rho;
        nodes.push_back(std::move(jn));
    }
    j["nodes"] = std::move(nodes);
    ordered_json nav = ordered_json::array();
    for (const auto& [a, b] : g.nav_edges()) nav.push_back({a, b});
    j["nav_edges"] = std::move(nav);
    const GraphStats& s = g.stats();
    ordered_json js;
    js["peak"] = s.peak;
    js["creations"] = s.creations;
    js["confirmations"] = s.confirmations;
    js["refutations"] = s.refutations;
    js["removed_total"] = s.removed_total;
    ordered_json ev = ordered_json::array();
    for (const CascadeEvent& e : s.cascade_events) ev.push_back({e.depth, e.removed});
    js["cascade_events"] = std::move(ev);
    j["stats"] = std::move(js);
    return j;
}

inline std::string save_graph(const HypothesisGraph& g) { return graph_to_json(g).dump(1) + "\n"; }

inline HypothesisGraph graph_from_json(const ordered_json& j) {
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != kGraphSchemaVersion)
        throw std::runtime_error("unsupported graph schema version");
    HypothesisGraph g(j.at("merge_radius").get<double>());
    std::map<int, Node> nodes;
    for (const auto& jn : j.at("nodes")) {
        Node n;
        n.id = jn.at("id").get<int>();
        n.kind = node_kind_from_name(jn.at("kind").get<std::string>());
        n.position = {jn.at("position")[0].get<double>(), jn.at("position")[1].get<double>()};
        n.category = jn.at("category").get<int>();
        n.objects = jn.at("objects").get<std::vector<int>>();
        n.embedding = jn.at("embedding").get<std::vector<double>>();
        n.distribution = jn.at("distribution").get<std::vector<double>>();
        n.frontier_id = jn.at("frontier_id").get<int>();
        n.object = jn.at("object").get<int>();
        n.parent = jn.at("parent").get<int>();
        n.rho = jn.at("rho").get<double>();
        nodes.emplace(n.id, std::move(n));
    }
    // Children lists are derived, not serialized.
    for (auto& [id, n] : nodes) {
        if (n.parent < 0) continue;
        auto p = nodes.find(n.parent);
        if (p == nodes.end()) throw std::runtime_error("snapshot has a dangling parent");
        p->second.children.push_back(id);
    }
    for (auto& [id, n] : nodes) std::sort(n.children.begin(), n.children.end());
    std::vector<std::pair<int, int>> nav;
    for (const auto& je : j.at("nav_edges")) nav.push_back({je[0].get<int>(), je[1].get<int>()});
    const auto& js = j.at("stats");
    GraphStats s;
    s.peak = js.at("peak").get<int>();
    s.creations = js.at("creations").get<long long>();
    s.confirmations = js.at("confirmations").get<long long>();
    s.refutations = js.at("refutations").get<long long>();
    s.removed_total = js.at("removed_total").get<long long>();
    for (const auto& je : js.at("cascade_events"))
        s.cascade_events.push_back({je[0].get<int>(), je[1].get<int>()});
    g.restore(std::move(nodes), std::move(nav), std::move(s), j.at("next_id").get<int>());
    return g;
}

inline HypothesisGraph load_graph(const std::string& text) {
    return graph_from_json(ordered_json::parse(text));
}

} // namespace scout
