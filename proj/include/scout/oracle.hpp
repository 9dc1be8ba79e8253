#pragma once
// Hypothesis generators. The ground-truth oracle answers from the world with
// controlled error injection; the co-occurrence heuristic reasons only from
// nearby objects; the hybrid spends the expensive oracle on frontiers the
// heuristic finds ambiguous. All draws are keyed by the noise seed and the
// frontier's centroid cell, never by call order, so every arm of a matched
// experiment sees the same realizations.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "frontier.hpp"
#include "graph.hpp"
#include "policy.hpp"
#include "rng.hpp"
#include "taxonomy.hpp"
#include "world.hpp"

namespace scout {

struct OracleContext {
    Frontier frontier;
    int perceived_region = -1;        // what perception claims lies beyond, -1 if nothing
    std::vector<int> local_objects;   // object ids within r_context of the agent
    std::vector<int> explored_categories;
    int goal_category = -1;           // -1 when the goal is not a category
    std::vector<Cell> beyond_cells;   // unknown-side neighbors of the frontier
    int attempt = 0;                  // prior predictions at this site; keys fresh draws
};

struct NoiseConfig {
    double error_rate = 0.3;
    double w_mirror = 0.38;
    double w_glass = 0.29;
    double w_artwork = 0.18;
    double w_occlusion = 0.15;
    std::uint64_t rng_seed = 0;

    bool weights_ok() const {
        double s = w_mirror + w_glass + w_artwork + w_occlusion;
        return w_mirror >= 0 && w_glass >= 0 && w_artwork >= 0 && w_occlusion >= 0 &&
               std::abs(s - 1.0) <= 1e-9;
    }
};

struct OracleStats {
    long long calls = 0;
    long long expensive_calls = 0;
};

// The region a frontier actually leads to: plurality vote of the true-free
// cells on its unknown side, ties to the smallest region id; falls back to
// the plurality region of the member cells themselves.
inline int frontier_target_region(const World& w, const OracleContext& ctx) {
    auto plurality = [&](const std::vector<Cell>& cells, bool free_only) {
        std::vector<int> votes(w.regions.size(), 0);
        bool any = false;
        for (Cell c : cells) {
            if (free_only && w.at(c) != CellKind::Free) continue;
            int r = w.region_at(c);
            if (r >= 0) {
                ++votes[r];
                any = true;
            }
        }
        if (!any) return -1;
        int best = 0;
        for (int r = 1; r < static_cast<int>(votes.size()); ++r)
            if (votes[r] > votes[best]) best = r;
        return best;
    };
    int t = plurality(ctx.beyond_cells, true);
    if (t >= 0) return t;
    return plurality(ctx.frontier.member_cells, false);
}

namespace detail {

// Purpose tags for keyed draws.
enum : std::uint64_t {
    kDrawError = 1,
    kDrawKind = 2,
    kDrawPick = 3,
    kDrawConfidence = 4,
};

inline std::uint64_t draw_key(const World& w, const NoiseConfig& noise,
                              const OracleContext& ctx, std::uint64_t purpose) {
    Cell cc = point_cell(ctx.frontier.centroid, w.resolution);
    return hash_key(noise.rng_seed, static_cast<std::uint64_t>(cc.x) + 0x10000ULL,
                    static_cast<std::uint64_t>(cc.y) + 0x10000ULL,
                    purpose | (static_cast<std::uint64_t>(ctx.attempt) << 16));
}

inline double rho_draw(const World& w, const NoiseConfig& noise, const OracleContext& ctx) {
    return 0.6 + 0.3 * keyed_unit(draw_key(w, noise, ctx, kDrawConfidence));
}

// Region-level prediction payload: the region's real semantics, objects
// ordered by their conditional confidence.
inline HypothesisPrediction predict_region(const World& w, const Taxonomy& tax,
                                           int region, double rho, int frontier_id) {
    const Region& r = w.regions[region];
    HypothesisPrediction p;
    p.confidence = rho;
    p.frontier_id = frontier_id;
    p.distribution = peaked_distribution(tax, r.category, rho);
    struct Item {
        int object;
        double rho_k;
    };
    std::vector<Item> items;
    for (int oidx : r.objects) {
        int o = w.objects[oidx].object;
        items.push_back({o, tax.co_occ[o][r.category]});
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.rho_k != b.rho_k) return a.rho_k > b.rho_k;
        return a.object < b.object;
    });
    for (const Item& it : items) {
        p.objects.push_back(it.object);
        p.object_rhos.push_back(it.rho_k);
    }
    p.embedding = r.embedding;
    return p;
}

// Synthetic payload for a category claim not backed by a real region.
inline HypothesisPrediction predict_category(const Taxonomy& tax, int category,
                                             const std::vector<int>& objects, double rho,
                                             int frontier_id) {
    HypothesisPrediction p;
    p.confidence = rho;
    p.frontier_id = frontier_id;
    p.distribution = peaked_distribution(tax, category, rho);
    p.objects = objects;
    for (int o : objects) p.object_rhos.push_back(tax.co_occ[o][category]);
    p.embedding = make_region_embedding(tax, category, objects);
    return p;
}

// Regions reachable from `region` through one door.
inline std::vector<int> door_adjacent_regions(const World& w, int region) {
    std::vector<int> out;
    for (int y = 0; y < w.height; ++y) {
        for (int x = 0; x < w.width; ++x) {
            Cell c{x, y};
            if (w.at(c) != CellKind::Door) continue;
            int a = -1, b = -1;
            for (Cell n : neighbors4(c)) {
                int r = w.region_at(n);
                if (r < 0) continue;
                if (a < 0)
                    a = r;
                else if (r != a)
                    b = r;
            }
            if (a == region && b >= 0) out.push_back(b);
            else if (b == region && a >= 0) out.push_back(a);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace detail

// Ground truth with error injection. An illusion in the sight line forces a
// structural error: the oracle reports the region perception showed, not the
// region the frontier leads to. Otherwise errors fire at rate epsilon and
// take a form sampled from the error taxonomy. Draws are keyed by frontier
// position, so re-querying the same frontier in any arm or step reproduces
// the same outcome.
inline HypothesisPrediction predict_ground_truth_noisy(const OracleContext& ctx,
                                                       const World& w,
                                                       const NoiseConfig& noise,
                                                       const Taxonomy& tax) {
    const int target = frontier_target_region(w, ctx);
    const int fid = ctx.frontier.id;
    const double rho = detail::rho_draw(w, noise, ctx);
    const int R = static_cast<int>(w.regions.size());

    if (ctx.perceived_region >= 0 && ctx.perceived_region != target)
        return detail::predict_region(w, tax, ctx.perceived_region, rho, fid);

    if (target < 0) {
        // Frontier into nothing attributable: uniform guess.
        HypothesisPrediction p;
        p.confidence = 1.0 / tax.num_categories();
        p.frontier_id = fid;
        p.distribution.assign(tax.num_categories(), 1.0 / tax.num_categories());
        p.embedding = make_region_embedding(tax, 0, {});
        return p;
    }

    const double u_err = keyed_unit(detail::draw_key(w, noise, ctx, detail::kDrawError));
    if (u_err >= noise.error_rate)
        return detail::predict_region(w, tax, target, rho, fid);

    const double u_kind = keyed_unit(detail::draw_key(w, noise, ctx, detail::kDrawKind));
    const double u_pick = keyed_unit(detail::draw_key(w, noise, ctx, detail::kDrawPick));
    double edge = noise.w_mirror;
    if (u_kind < edge && R >= 2) {
        // Phantom reflection: some other room entirely.
        int pick = static_cast<int>(u_pick * (R - 1));
        pick = std::min(pick, R - 2);
        if (pick >= target) ++pick;
        return detail::predict_region(w, tax, pick, rho, fid);
    }
    edge += noise.w_glass;
    if (u_kind < edge && R >= 2) {
        // See-through confusion: a room one door away from the target.
        std::vector<int> adj = detail::door_adjacent_regions(w, target);
        if (!adj.empty()) {
            int pick = static_cast<int>(u_pick * adj.size());
            pick = std::min(pick, static_cast<int>(adj.size()) - 1);
            return detail::predict_region(w, tax, adj[pick], rho, fid);
        }
        int pick = static_cast<int>(u_pick * (R - 1));
        pick = std::min(pick, R - 2);
        if (pick >= target) ++pick;
        return detail::predict_region(w, tax, pick, rho, fid);
    }
    edge += noise.w_artwork;
    if (u_kind < edge || R < 2) {
        // Pictured room mistaken for a real one: wrong category, its
        // most typical furniture.
        const int K = tax.num_categories();
        int truec = w.regions[target].category;
        int pick = static_cast<int>(u_pick * (K - 1));
        pick = std::min(pick, K - 2);
        if (pick >= truec) ++pick;
        return detail::predict_category(tax, pick, tax.top_objects(pick, 3), rho, fid);
    }
    // Occlusion: right room, half the furniture missed.
    const Region& reg = w.regions[target];
    std::vector<int> names;
    for (int oidx : reg.objects) names.push_back(w.objects[oidx].object);
    std::sort(names.begin(), names.end());
    names.resize((names.size() + 1) / 2);
    return detail::predict_category(tax, reg.category, names, rho, fid);
}

// Pure heuristic: a naive Bayes posterior from nearby objects. Never reads
// the world.
inline HypothesisPrediction predict_cooccurrence(const OracleContext& ctx,
                                                 const Taxonomy& tax) {
    HypothesisPrediction p;
    p.frontier_id = ctx.frontier.id;
    p.distribution = classify_by_objects(tax, ctx.local_objects);
    int argmax = 0;
    for (int c = 1; c < tax.num_categories(); ++c)
        if (p.distribution[c] > p.distribution[argmax]) argmax = c;
    p.confidence = p.distribution[argmax];
    p.objects = tax.top_objects(argmax, 5);
    for (int o : p.objects) p.object_rhos.push_back(tax.co_occ[o][argmax]);
    p.embedding = make_region_embedding(tax, argmax, p.objects);
    return p;
}

// Entropy-gated: cheap heuristic unless it is too uncertain, then the
// expensive oracle. The gate is in nats.
inline HypothesisPrediction predict_hybrid(const OracleContext& ctx, const World& w,
                                           const Taxonomy& tax, const NoiseConfig& noise,
                                           double entropy_gate, OracleStats& stats) {
    stats.calls += 1;
    HypothesisPrediction cheap = predict_cooccurrence(ctx, tax);
    if (entropy(cheap.distribution) > entropy_gate) {
        stats.expensive_calls += 1;
        return predict_ground_truth_noisy(ctx, w, noise, tax);
    }
    return cheap;
}

} // namespace scout
