#pragma once
// Evaluation over episode traces: success rate, path-efficiency-weighted
// success, revisit rate to refuted zones, hypothesis lifecycle summaries,
// and matched-seed paired comparisons with a one-sided sign test. Pure
// functions of immutable traces; aggregation order is canonicalized so the
// same trace multiset always yields byte-identical tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "policy.hpp"
#include "scenario_io.hpp"
#include "trace.hpp"

namespace scout {

struct MetricsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Success weighted by path efficiency: success * l_star / max(l_star, l).
inline double spl(int success, double l_star, double l) {
    if (!(l_star > 0.0)) throw MetricsError("spl needs a positive optimal length");
    if (l < 0.0) throw MetricsError("spl needs a nonnegative path length");
    if (!success) return 0.0;
    return l_star / std::max(l_star, l);
}

// Fraction of exploration selections aimed into a zone (default 1.0 m)
// around any earlier-refuted hypothesis site.
// The selection stream is every distinct targeting decision the policy
// makes while exploring — a frontier to open or a remembered node to chase;
// both draw the agent across the map, so both enter the stream, and the
// same zone test applies to each. A selection is a distinct decision: the
// step where the target jumps to a new place, not each later step spent
// walking toward it, and not the drift of a wavefront being consumed —
// pursuing a frontier that recedes within the zone scale re-affirms one
// decision, so the dedupe distance matches the zone radius. A revisit is a
// *return*: the decision counts only when the agent stands outside the zone
// it targets — finishing the sweep of a room one is already inside is not a
// revisit. Zones open the step after their refutation, so the decision that
// triggered the verification does not count against itself.
inline double revisit_rate(const EpisodeTrace& t, double zone_radius = 1.0,
                           double same_target = 1.0) {
    struct Zone {
        int step;
        Vec2 position;
    };
    std::vector<Zone> zones;
    long long selections = 0;
    long long revisits = 0;
    TargetKind prev_kind = TargetKind::None;
    Vec2 prev_target{};
    int prev_node = -1;
    for (const StepRecord& r : t.records) {
        for (Vec2 p : r.refuted_at) zones.push_back({r.step, p});
        if (r.target_kind != TargetKind::Frontier &&
            r.target_kind != TargetKind::MemoryNode) {
            prev_kind = r.target_kind;
            continue;
        }
        bool fresh;
        if (r.target_kind == TargetKind::Frontier)
            fresh = prev_kind != TargetKind::Frontier ||
                    distance(prev_target, r.target) > same_target;
        else
            fresh = prev_kind != TargetKind::MemoryNode || r.node_id != prev_node;
        prev_kind = r.target_kind;
        prev_target = r.target;
        prev_node = r.node_id;
        if (!fresh) continue;
        selections += 1;
        for (const Zone& z : zones) {
            if (z.step >= r.step) continue;
            if (distance(z.position, r.target) <= zone_radius &&
                distance(z.position, r.position) > zone_radius) {
                revisits += 1;
                break;
            }
        }
    }
    if (selections == 0) return 0.0;
    return static_cast<double>(revisits) / static_cast<double>(selections);
}

struct EpisodeMetrics {
    std::uint64_t seed = 0;
    std::string arm;
    std::vector<int> success;   // per goal
    std::vector<double> spl;    // per goal, 0 on failure
    double mean_spl = 0.0;      // over goals
    double frac_success = 0.0;  // over goals
    bool all_success = false;
    double revisit = 0.0;
    long long created = 0;
    long long confirmed = 0;
    long long refuted = 0;
    long long removed = 0;
    std::vector<std::pair<int, int>> cascades;
    std::size_t peak = 0;
    std::size_t final_live = 0;
    int steps = 0;
};

inline EpisodeMetrics episode_metrics(const EpisodeTrace& t) {
    if (t.schema_version != kTraceSchemaVersion)
        throw MetricsError("trace schema_version mismatch");
    EpisodeMetrics m;
    m.seed = t.seed;
    m.arm = t.arm;
    m.all_success = !t.goals.empty();
    for (const GoalOutcome& g : t.goals) {
        m.success.push_back(g.success ? 1 : 0);
        m.spl.push_back(g.success ? spl(1, g.l_star, g.path_len) : 0.0);
        m.all_success = m.all_success && g.success;
    }
    if (!m.spl.empty()) {
        double s = 0.0, w = 0.0;
        for (double v : m.spl) s += v;
        for (int v : m.success) w += v;
        m.mean_spl = s / static_cast<double>(m.spl.size());
        m.frac_success = w / static_cast<double>(m.success.size());
    }
    m.revisit = revisit_rate(t);
    m.created = static_cast<long long>(t.hyp_creations);
    m.confirmed = static_cast<long long>(t.confirmations);
    m.refuted = static_cast<long long>(t.refutations);
    m.removed = static_cast<long long>(t.removed_total);
    m.cascades = t.cascades;
    m.peak = t.peak_live;
    m.final_live = t.live_at_end;
    m.steps = t.steps;
    return m;
}

struct LifecycleSummary {
    long long created = 0;
    long long confirmed = 0;
    long long refuted = 0;
    long long removed = 0;
    long long live_unverified = 0;
    double frac_confirmed = 0.0;  // of created
    double frac_refuted = 0.0;
    std::map<int, long long> depth_histogram;
    long long cascade_count = 0;
    double mean_removed_per_cascade = 0.0;
    int max_depth = 0;
};

inline LifecycleSummary lifecycle(const std::vector<EpisodeTrace>& traces) {
    LifecycleSummary s;
    long long removed_by_cascades = 0;
    for (const EpisodeTrace& t : traces) {
        if (t.schema_version != kTraceSchemaVersion)
            throw MetricsError("trace schema_version mismatch");
        if (!t.error.empty()) continue;
        s.created += static_cast<long long>(t.hyp_creations);
        s.confirmed += static_cast<long long>(t.confirmations);
        s.refuted += static_cast<long long>(t.refutations);
        s.removed += static_cast<long long>(t.removed_total);
        s.live_unverified += static_cast<long long>(t.live_unverified_at_end);
        for (auto [depth, removed] : t.cascades) {
            if (depth < 1) throw MetricsError("cascade event with depth < 1");
            s.depth_histogram[depth] += 1;
            s.cascade_count += 1;
            removed_by_cascades += removed;
            s.max_depth = std::max(s.max_depth, depth);
        }
    }
    if (s.created > 0) {
        s.frac_confirmed = static_cast<double>(s.confirmed) / static_cast<double>(s.created);
        s.frac_refuted = static_cast<double>(s.refuted) / static_cast<double>(s.created);
    }
    if (s.cascade_count > 0)
        s.mean_removed_per_cascade =
            static_cast<double>(removed_by_cascades) / static_cast<double>(s.cascade_count);
    return s;
}

struct ArmSummary {
    std::string arm;
    int n = 0;       // episodes included
    int errors = 0;  // aborted episodes, excluded from means
    double sr = 0.0;       // mean per-goal success fraction
    double sr_all = 0.0;   // fraction of episodes completing every goal
    double spl = 0.0;      // mean episode SPL
    double revisit = 0.0;
    LifecycleSummary life;
    double peak = 0.0;
    double final_live = 0.0;
    double steps = 0.0;
    double oracle_calls = 0.0;
    double oracle_expensive = 0.0;
};

struct SummaryTable {
    std::vector<ArmSummary> rows;  // canonical arm order
};

inline SummaryTable aggregate(const std::vector<EpisodeTrace>& traces) {
    // Canonicalize: bucket by arm, sort each bucket by seed, so the result
    // is independent of input order.
    std::map<int, std::vector<const EpisodeTrace*>> by_arm;
    for (const EpisodeTrace& t : traces) {
        if (t.schema_version != kTraceSchemaVersion)
            throw MetricsError("trace schema_version mismatch");
        by_arm[static_cast<int>(arm_from_name(t.arm))].push_back(&t);
    }
    SummaryTable table;
    for (auto& [arm_id, list] : by_arm) {
        std::sort(list.begin(), list.end(),
                  [](const EpisodeTrace* a, const EpisodeTrace* b) { return a->seed < b->seed; });
        ArmSummary row;
        row.arm = arm_name(static_cast<PolicyArm>(arm_id));
        std::vector<EpisodeTrace> ok;
        for (const EpisodeTrace* t : list) {
            if (!t->error.empty()) {
                row.errors += 1;
                continue;
            }
            ok.push_back(*t);
        }
        row.n = static_cast<int>(ok.size());
        for (const EpisodeTrace& t : ok) {
            EpisodeMetrics m = episode_metrics(t);
            row.sr += m.frac_success;
            row.sr_all += m.all_success ? 1.0 : 0.0;
            row.spl += m.mean_spl;
            row.revisit += m.revisit;
            row.peak += static_cast<double>(m.peak);
            row.final_live += static_cast<double>(m.final_live);
            row.steps += static_cast<double>(m.steps);
            row.oracle_calls += static_cast<double>(t.oracle_calls);
            row.oracle_expensive += static_cast<double>(t.oracle_expensive);
        }
        if (row.n > 0) {
            double n = row.n;
            row.sr /= n;
            row.sr_all /= n;
            row.spl /= n;
            row.revisit /= n;
            row.peak /= n;
            row.final_live /= n;
            row.steps /= n;
            row.oracle_calls /= n;
            row.oracle_expensive /= n;
        }
        row.life = lifecycle(ok);
        table.rows.push_back(std::move(row));
    }
    return table;
}

// One-sided sign test: probability of at least `wins` successes in
// wins+losses fair coin flips. Ties are excluded by the caller.
inline double sign_test_p(int wins, int losses) {
    if (wins < 0 || losses < 0) throw MetricsError("negative sign counts");
    const int n = wins + losses;
    if (n == 0) return 1.0;
    double p = 0.0;
    for (int k = wins; k <= n; ++k) {
        double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        p += std::exp(logc - n * std::log(2.0));
    }
    return std::min(p, 1.0);
}

struct PairedComparison {
    std::string arm_a;
    std::string arm_b;
    std::string metric;
    int n = 0;  // matched seeds with both arms valid
    int wins = 0;
    int losses = 0;
    int ties = 0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double mean_diff = 0.0;  // a - b
    double p_sign = 1.0;     // one-sided, H1: a > b (for "lower is better"
                             // metrics the caller flips the arguments)
};

// Matched-seed comparison on a per-episode statistic; `higher_wins` selects
// the direction counted as a win for arm a.
template <typename Fn>
inline PairedComparison paired_compare(const std::vector<EpisodeTrace>& traces, PolicyArm a,
                                       PolicyArm b, const std::string& metric, Fn value,
                                       bool higher_wins = true) {
    std::map<std::uint64_t, const EpisodeTrace*> ta, tb;
    for (const EpisodeTrace& t : traces) {
        if (!t.error.empty()) continue;
        if (t.arm == arm_name(a)) ta[t.seed] = &t;
        if (t.arm == arm_name(b)) tb[t.seed] = &t;
    }
    PairedComparison cmp;
    cmp.arm_a = arm_name(a);
    cmp.arm_b = arm_name(b);
    cmp.metric = metric;
    for (const auto& [seed, pa] : ta) {
        auto it = tb.find(seed);
        if (it == tb.end()) continue;
        double va = value(*pa);
        double vb = value(*it->second);
        cmp.n += 1;
        cmp.mean_a += va;
        cmp.mean_b += vb;
        double diff = higher_wins ? va - vb : vb - va;
        if (diff > 0)
            cmp.wins += 1;
        else if (diff < 0)
            cmp.losses += 1;
        else
            cmp.ties += 1;
    }
    if (cmp.n > 0) {
        cmp.mean_a /= cmp.n;
        cmp.mean_b /= cmp.n;
        cmp.mean_diff = cmp.mean_a - cmp.mean_b;
    }
    cmp.p_sign = sign_test_p(cmp.wins, cmp.losses);
    return cmp;
}

inline PairedComparison paired_spl(const std::vector<EpisodeTrace>& traces, PolicyArm a,
                                   PolicyArm b) {
    return paired_compare(traces, a, b, "spl",
                          [](const EpisodeTrace& t) { return episode_metrics(t).mean_spl; });
}

inline PairedComparison paired_revisit(const std::vector<EpisodeTrace>& traces, PolicyArm a,
                                       PolicyArm b) {
    // Lower revisit is better; a "win" for arm a means a smaller rate.
    return paired_compare(traces, a, b, "revisit",
                          [](const EpisodeTrace& t) { return revisit_rate(t); },
                          /*higher_wins=*/false);
}

namespace detail {

inline std::string fmt_num(double v) { return ordered_json(v).dump(); }

} // namespace detail

// Stable column order; one row per arm.
inline std::string summary_csv(const SummaryTable& table) {
    std::string out =
        "arm,n,errors,sr,sr_all,spl,revisit,created,confirmed,refuted,removed,"
        "frac_confirmed,frac_refuted,cascades,mean_removed_per_cascade,max_depth,"
        "peak,final,steps,oracle_calls,oracle_expensive\n";
    for (const ArmSummary& r : table.rows) {
        out += r.arm;
        out += ',' + std::to_string(r.n);
        out += ',' + std::to_string(r.errors);
        out += ',' + detail::fmt_num(r.sr);
        out += ',' + detail::fmt_num(r.sr_all);
        out += ',' + detail::fmt_num(r.spl);
        out += ',' + detail::fmt_num(r.revisit);
        out += ',' + std::to_string(r.life.created);
        out += ',' + std::to_string(r.life.confirmed);
        out += ',' + std::to_string(r.life.refuted);
        out += ',' + std::to_string(r.life.removed);
        out += ',' + detail::fmt_num(r.life.frac_confirmed);
        out += ',' + detail::fmt_num(r.life.frac_refuted);
        out += ',' + std::to_string(r.life.cascade_count);
        out += ',' + detail::fmt_num(r.life.mean_removed_per_cascade);
        out += ',' + std::to_string(r.life.max_depth);
        out += ',' + detail::fmt_num(r.peak);
        out += ',' + detail::fmt_num(r.final_live);
        out += ',' + detail::fmt_num(r.steps);
        out += ',' + detail::fmt_num(r.oracle_calls);
        out += ',' + detail::fmt_num(r.oracle_expensive);
        out += '\n';
    }
    return out;
}

inline ordered_json summary_json(const SummaryTable& table) {
    ordered_json rows = ordered_json::array();
    for (const ArmSummary& r : table.rows) {
        ordered_json j;
        j["arm"] = r.arm;
        j["n"] = r.n;
        j["errors"] = r.errors;
        j["sr"] = r.sr;
        j["sr_all"] = r.sr_all;
        j["spl"] = r.spl;
        j["revisit"] = r.revisit;
        ordered_json life;
        life["created"] = r.life.created;
        life["confirmed"] = r.life.confirmed;
        life["refuted"] = r.life.refuted;
        life["removed"] = r.life.removed;
        life["live_unverified"] = r.life.live_unverified;
        life["frac_confirmed"] = r.life.frac_confirmed;
        life["frac_refuted"] = r.life.frac_refuted;
        ordered_json hist = ordered_json::object();
        for (auto [depth, count] : r.life.depth_histogram)
            hist[std::to_string(depth)] = count;
        life["depth_histogram"] = std::move(hist);
        life["cascade_count"] = r.life.cascade_count;
        life["mean_removed_per_cascade"] = r.life.mean_removed_per_cascade;
        life["max_depth"] = r.life.max_depth;
        j["lifecycle"] = std::move(life);
        j["peak"] = r.peak;
        j["final"] = r.final_live;
        j["steps"] = r.steps;
        j["oracle_calls"] = r.oracle_calls;
        j["oracle_expensive"] = r.oracle_expensive;
        rows.push_back(std::move(j));
    }
    ordered_json out;
    out["schema_version"] = kTraceSchemaVersion;
    out["arms"] = std::move(rows);
    return out;
}

inline ordered_json comparison_json(const PairedComparison& c) {
    ordered_json j;
    j["arm_a"] = c.arm_a;
    j["arm_b"] = c.arm_b;
    j["metric"] = c.metric;
    j["n"] = c.n;
    j["wins"] = c.wins;
    j["losses"] = c.losses;
    j["ties"] = c.ties;
    j["mean_a"] = c.mean_a;
    j["mean_b"] = c.mean_b;
    j["mean_diff"] = c.mean_diff;
    j["p_sign"] = c.p_sign;
    return j;
}

} // namespace scout
