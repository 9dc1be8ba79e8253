#pragma once
// Episode traces: one record per agent step plus goal outcomes and final
// graph counters. Traces carry everything the metrics layer needs so that
// evaluation never has to re-run an episode, and they serialize to JSONL
// (header line, one line per step, summary line) for the CLI.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geometry.hpp"
#include "graph.hpp"
#include "scenario_io.hpp"

namespace scout {

inline constexpr int kTraceSchemaVersion = 1;

struct TraceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TargetKind { None, Frontier, MemoryNode, Goal };

inline const char* target_kind_name(TargetKind k) {
    switch (k) {
    case TargetKind::None: return "none";
    case TargetKind::Frontier: return "frontier";
    case TargetKind::MemoryNode: return "memory";
    case TargetKind::Goal: return "goal";
    }
    return "none";
}

inline TargetKind target_kind_from_name(const std::string& s) {
    if (s == "none") return TargetKind::None;
    if (s == "frontier") return TargetKind::Frontier;
    if (s == "memory") return TargetKind::MemoryNode;
    if (s == "goal") return TargetKind::Goal;
    throw TraceError("unknown target kind: " + s);
}

struct StepRecord {
    int step = 0;
    Vec2 position;                 // pose after this step's movement
    TargetKind target_kind = TargetKind::None;
    int frontier_id = -1;          // valid when target_kind == Frontier
    int node_id = -1;              // hypothesis node backing the target, if any
    Vec2 target;                   // selected target position (meters)
    int newly_known = 0;           // occupancy cells resolved this step
    int frontiers = 0;             // frontier clusters present this step
    int judged = 0;                // hypotheses judged on arrival this step
    int confirmations = 0;
    int refutations = 0;
    int removed = 0;               // nodes removed by correction this step
    int live_nodes = 0;            // graph size after the step
    bool oracle_fallback = false;  // external oracle failed; uniform used
    std::vector<Vec2> refuted_at;  // positions of hypotheses refuted this step
};

struct GoalOutcome {
    int index = 0;
    std::string kind;     // "object" or "category"
    std::string name;
    std::string status;   // "success", "budget", or "stuck"
    bool success = false;
    double l_star = 0.0;  // shortest feasible path for this segment (m)
    double path_len = 0.0; // executed path length for this segment (m)
    int steps = 0;
};

struct EpisodeTrace {
    int schema_version = kTraceSchemaVersion;
    std::uint64_t seed = 0;
    std::string arm;
    std::string error;  // non-empty when the episode aborted
    int steps = 0;
    bool all_goals_done = false;
    std::vector<StepRecord> records;
    std::vector<GoalOutcome> goals;
    std::vector<std::pair<int, int>> cascades;  // (depth, removed) per event
    // Final graph counters.
    std::size_t hyp_creations = 0;
    std::size_t confirmations = 0;
    std::size_t refutations = 0;
    std::size_t removed_total = 0;
    std::size_t live_at_end = 0;
    std::size_t live_unverified_at_end = 0;
    std::size_t peak_live = 0;
    // Oracle accounting.
    std::size_t oracle_calls = 0;
    std::size_t oracle_expensive = 0;
    std::size_t oracle_fallbacks = 0;
    // Selection diagnostics.
    std::size_t mem_selections = 0;    // distinct memory-node targeting decisions
    std::size_t mem_failures = 0;      // memory arrivals that did not meet the goal
    std::size_t stale_selections = 0;  // frontier decisions anchored to a refuted node
    std::size_t iz_live = 0;           // in-zone frontier decisions, live anchor
    std::size_t iz_judged = 0;         // in-zone frontier decisions, refuted anchor
    std::size_t iz_bare = 0;           // in-zone frontier decisions, no anchor
    std::size_t iz_mem = 0;            // in-zone memory-node decisions
};

inline std::string trace_to_jsonl(const EpisodeTrace& t) {
    std::string out;
    {
        ordered_json h;
        h["schema_version"] = t.schema_version;
        h["seed"] = t.seed;
        h["arm"] = t.arm;
        out += h.dump();
        out += '\n';
    }
    for (const StepRecord& r : t.records) {
        ordered_json j;
        j["t"] = r.step;
        j["pos"] = {r.position.x, r.position.y};
        j["kind"] = target_kind_name(r.target_kind);
        j["frontier"] = r.frontier_id;
        j["node"] = r.node_id;
        j["target"] = {r.target.x, r.target.y};
        j["known"] = r.newly_known;
        j["nf"] = r.frontiers;
        j["judged"] = r.judged;
        j["conf"] = r.confirmations;
        j["ref"] = r.refutations;
        j["rm"] = r.removed;
        j["live"] = r.live_nodes;
        j["fallback"] = r.oracle_fallback;
        ordered_json ra = ordered_json::array();
        for (Vec2 p : r.refuted_at) ra.push_back({p.x, p.y});
        j["ref_at"] = std::move(ra);
        out += j.dump();
        out += '\n';
    }
    {
        ordered_json s;
        s["steps"] = t.steps;
        s["error"] = t.error;
        s["all_goals_done"] = t.all_goals_done;
        ordered_json cas = ordered_json::array();
        for (auto [depth, removed] : t.cascades) cas.push_back({depth, removed});
        s["cascades"] = std::move(cas);
        ordered_json goals = ordered_json::array();
        for (const GoalOutcome& g : t.goals) {
            ordered_json j;
            j["index"] = g.index;
            j["kind"] = g.kind;
            j["name"] = g.name;
            j["status"] = g.status;
            j["success"] = g.success;
            j["l_star"] = g.l_star;
            j["path_len"] = g.path_len;
            j["steps"] = g.steps;
            goals.push_back(std::move(j));
        }
        s["goals"] = std::move(goals);
        s["hyp_creations"] = t.hyp_creations;
        s["confirmations"] = t.confirmations;
        s["refutations"] = t.refutations;
        s["removed_total"] = t.removed_total;
        s["live_at_end"] = t.live_at_end;
        s["live_unverified_at_end"] = t.live_unverified_at_end;
        s["peak_live"] = t.peak_live;
        s["oracle_calls"] = t.oracle_calls;
        s["oracle_expensive"] = t.oracle_expensive;
        s["oracle_fallbacks"] = t.oracle_fallbacks;
        s["mem_selections"] = t.mem_selections;
        s["mem_failures"] = t.mem_failures;
        s["stale_selections"] = t.stale_selections;
        s["iz_live"] = t.iz_live;
        s["iz_judged"] = t.iz_judged;
        s["iz_bare"] = t.iz_bare;
        s["iz_mem"] = t.iz_mem;
        out += s.dump();
        out += '\n';
    }
    return out;
}

inline EpisodeTrace trace_from_jsonl(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) nl = text.size();
        if (nl > start) lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    if (lines.size() < 2) throw TraceError("trace needs header and summary lines");
    EpisodeTrace t;
    try {
        ordered_json h = ordered_json::parse(lines.front());
        int ver = h.at("schema_version").get<int>();
        if (ver != kTraceSchemaVersion)
            throw TraceError("unsupported trace schema_version " + std::to_string(ver));
        t.schema_version = ver;
        t.seed = h.at("seed").get<std::uint64_t>();
        t.arm = h.at("arm").get<std::string>();
        for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
            ordered_json j = ordered_json::parse(lines[i]);
            StepRecord r;
            r.step = j.at("t").get<int>();
            r.position = {j.at("pos").at(0).get<double>(), j.at("pos").at(1).get<double>()};
            r.target_kind = target_kind_from_name(j.at("kind").get<std::string>());
            r.frontier_id = j.at("frontier").get<int>();
            r.node_id = j.at("node").get<int>();
            r.target = {j.at("target").at(0).get<double>(), j.at("target").at(1).get<double>()};
            r.newly_known = j.at("known").get<int>();
            r.frontiers = j.at("nf").get<int>();
            r.judged = j.at("judged").get<int>();
            r.confirmations = j.at("conf").get<int>();
            r.refutations = j.at("ref").get<int>();
            r.removed = j.at("rm").get<int>();
            r.live_nodes = j.at("live").get<int>();
            r.oracle_fallback = j.at("fallback").get<bool>();
            for (const auto& p : j.at("ref_at"))
                r.refuted_at.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            t.records.push_back(std::move(r));
        }
        ordered_json s = ordered_json::parse(lines.back());
        t.steps = s.at("steps").get<int>();
        t.error = s.at("error").get<std::string>();
        t.all_goals_done = s.at("all_goals_done").get<bool>();
        for (const auto& c : s.at("cascades"))
            t.cascades.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
        for (const auto& j : s.at("goals")) {
            GoalOutcome g;
            g.index = j.at("index").get<int>();
            g.kind = j.at("kind").get<std::string>();
            g.name = j.at("name").get<std::string>();
            g.status = j.at("status").get<std::string>();
            g.success = j.at("success").get<bool>();
            g.l_star = j.at("l_star").get<double>();
            g.path_len = j.at("path_len").get<double>();
            g.steps = j.at("steps").get<int>();
            t.goals.push_back(std::move(g));
        }
        t.hyp_creations = s.at("hyp_creations").get<std::size_t>();
        t.confirmations = s.at("confirmations").get<std::size_t>();
        t.refutations = s.at("refutations").get<std::size_t>();
        t.removed_total = s.at("removed_total").get<std::size_t>();
        t.live_at_end = s.at("live_at_end").get<std::size_t>();
        t.live_unverified_at_end = s.at("live_unverified_at_end").get<std::size_t>();
        t.peak_live = s.at("peak_live").get<std::size_t>();
        t.oracle_calls = s.at("oracle_calls").get<std::size_t>();
        t.oracle_expensive = s.at("oracle_expensive").get<std::size_t>();
        t.oracle_fallbacks = s.at("oracle_fallbacks").get<std::size_t>();
        t.mem_selections = s.at("mem_selections").get<std::size_t>();
        t.mem_failures = s.at("mem_failures").get<std::size_t>();
        t.stale_selections = s.at("stale_selections").get<std::size_t>();
        t.iz_live = s.at("iz_live").get<std::size_t>();
        t.iz_judged = s.at("iz_judged").get<std::size_t>();
        t.iz_bare = s.at("iz_bare").get<std::size_t>();
        t.iz_mem = s.at("iz_mem").get<std::size_t>();
    } catch (const TraceError&) {
        throw;
    } catch (const std::exception& e) {
        throw TraceError(std::string("bad trace: ") + e.what());
    }
    return t;
}

} // namespace scout
