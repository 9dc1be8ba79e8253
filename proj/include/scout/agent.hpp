#pragma once
// The exploring agent: perceive, maintain occupancy and the hypothesis
// graph, predict what lies beyond each frontier, navigate, verify
// hypotheses on arrival, and apply the arm-specific correction on
// refutation. One call runs one full episode and returns its trace.
//
// Ground-truth boundaries: the agent reads the world only through
// perceive(), region geometry (which room a cell belongs to — observable
// segmentation), and the simulated-oracle predictors. Region semantics
// reach it exclusively via perception and oracle predictions, both of
// which illusions and injected errors can distort. Goal success and
// verification payloads are refereed against the true world, as the
// environment would.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "frontier.hpp"
#include "geometry.hpp"
#include "graph.hpp"
#include "oracle.hpp"
#include "policy.hpp"
#include "rng.hpp"
#include "taxonomy.hpp"
#include "trace.hpp"
#include "world.hpp"

namespace scout {

struct GoalSpec {
    bool is_object = true;  // false: category goal
    std::string name;
    int object = -1;    // valid when is_object
    int category = -1;  // valid when !is_object; for object goals, the
                        // strongest co-occurring category (used in scoring)
};

struct Task {
    std::vector<GoalSpec> goals;
    double success_radius = 1.0;  // meters, geodesic, object goals
    int step_budget = 500;        // shared across the goal sequence
};

enum class OracleMode { GroundTruthNoisy, CoOccurrence, Hybrid, External };

inline const char* oracle_mode_name(OracleMode m) {
    switch (m) {
    case OracleMode::GroundTruthNoisy: return "gt_noisy";
    case OracleMode::CoOccurrence: return "cooccurrence";
    case OracleMode::Hybrid: return "hybrid";
    case OracleMode::External: return "external";
    }
    return "gt_noisy";
}

inline OracleMode oracle_mode_from_name(const std::string& s) {
    if (s == "gt_noisy") return OracleMode::GroundTruthNoisy;
    if (s == "cooccurrence") return OracleMode::CoOccurrence;
    if (s == "hybrid") return OracleMode::Hybrid;
    if (s == "external") return OracleMode::External;
    throw std::invalid_argument("unknown oracle mode: " + s);
}

struct AgentParams {
    double perceive_range = 2.0;      // meters
    double context_radius = 3.0;      // meters, perception object context
    double arrival_radius = 0.5;      // meters, verification trigger
    double merge_radius = 0.5;        // meters, observed-node dedup
    double frontier_eps = 0.5;        // meters, frontier clustering
    int frontier_min_samples = 3;
    double predict_separation = 0.5;  // min distance between predicted centroids
    double anchor_radius = 1.0;       // hypothesis-to-frontier association reach
    int cells_per_step = 5;           // movement per step along the plan
    double decay_gamma = 0.3;         // SoftDecay subtree factor
    double attenuate_factor = 0.3;    // NoCascade single-node factor
    ScoringParams scoring;
    ResidualWeights residuals;
    OracleMode oracle_mode = OracleMode::GroundTruthNoisy;
    double hybrid_entropy_gate = 2.9;  // nats; above it, hybrid escalates
    // Set when oracle_mode == External; throws on failure -> uniform fallback.
    std::function<HypothesisPrediction(const OracleContext&)> external_predict;
};

// Uniform prediction: the fallback when no informative oracle answer exists.
inline HypothesisPrediction uniform_prediction(const Taxonomy& tax, int frontier_id) {
    HypothesisPrediction p;
    const int K = tax.num_categories();
    p.distribution.assign(K, 1.0 / K);
    p.confidence = 1.0 / K;
    p.frontier_id = frontier_id;
    p.embedding.assign(static_cast<std::size_t>(K) + tax.num_objects(), 0.0);
    for (int c = 0; c < K; ++c) p.embedding[c] = 1.0 / K;
    return p;
}

// Deterministic start pose: a free (non-door) cell drawn from the seed.
inline Pose start_pose(const World& w, std::uint64_t seed) {
    std::vector<Cell> free;
    for (int y = 0; y < w.height; ++y)
        for (int x = 0; x < w.width; ++x)
            if (w.at({x, y}) == CellKind::Free) free.push_back({x, y});
    if (free.empty()) throw GenerationError("world has no free cell");
    Rng rng(hash_key(seed, 0x6167656e74ULL));
    Pose p;
    p.position = cell_center(free[rng.below(free.size())], w.resolution);
    p.heading = static_cast<int>(rng.below(8));
    return p;
}

namespace detail {

// Multi-source BFS over true-traversable cells; distances in cells, -1
// where unreachable.
inline std::vector<int> multi_distance_field(const World& w, const std::vector<Cell>& sources) {
    std::vector<int> dist(w.grid.size(), -1);
    std::queue<Cell> q;
    for (Cell s : sources) {
        if (!w.in_bounds(s) || !w.traversable(s)) continue;
        if (dist[w.index(s)] == 0) continue;
        dist[w.index(s)] = 0;
        q.push(s);
    }
    while (!q.empty()) {
        Cell c = q.front();
        q.pop();
        for (Cell n : neighbors4(c)) {
            if (!w.in_bounds(n) || !w.traversable(n)) continue;
            if (dist[w.index(n)] != -1) continue;
            dist[w.index(n)] = dist[w.index(c)] + 1;
            q.push(n);
        }
    }
    return dist;
}

// Cells any instance of the goal occupies (object) or any cell of a
// goal-category region (category).
inline std::vector<Cell> goal_cells(const World& w, const GoalSpec& g) {
    std::vector<Cell> cells;
    if (g.is_object) {
        for (const ObjectInstance& oi : w.objects)
            if (oi.object == g.object) cells.push_back(oi.cell);
    } else {
        for (const Region& r : w.regions)
            if (r.category == g.category)
                cells.insert(cells.end(), r.cells.begin(), r.cells.end());
    }
    return cells;
}

} // namespace detail

// Shortest feasible path (meters) from `from` to the goal, through the true
// world; 0 when unreachable.
inline double goal_l_star(const World& w, Cell from, const GoalSpec& g) {
    std::vector<int> field = detail::multi_distance_field(w, detail::goal_cells(w, g));
    if (!w.in_bounds(from)) return 0.0;
    int d = field[w.index(from)];
    if (d < 0) return 0.0;
    return std::max(static_cast<double>(d) * w.resolution, w.resolution);
}

// A deterministic sequence of object goals whose legs are each at least
// min_leg meters of travel; relaxes the leg constraint if the world is too
// tight rather than failing.
inline Task make_task(const World& w, const Taxonomy& tax, std::uint64_t seed,
                      int n_goals = 3, double min_leg = 1.5) {
    if (w.objects.empty()) throw GenerationError("world has no objects");
    Rng rng(hash_key(seed, 0x7461736bULL));
    Task task;
    Cell prev = point_cell(start_pose(w, seed).position, w.resolution);
    for (int k = 0; k < n_goals; ++k) {
        int picked = -1;
        for (double leg = min_leg; picked < 0; leg = std::max(leg - 0.5, 0.0)) {
            for (int attempt = 0; attempt < 64 && picked < 0; ++attempt) {
                int i = static_cast<int>(rng.below(w.objects.size()));
                const ObjectInstance& oi = w.objects[i];
                bool dup = false;
                for (const GoalSpec& g : task.goals) dup = dup || g.object == oi.object;
                if (dup) continue;
                std::vector<int> field = detail::multi_distance_field(w, {prev});
                int d = field[w.index(oi.cell)];
                if (d < 0 || static_cast<double>(d) * w.resolution < leg) continue;
                picked = i;
            }
            if (leg == 0.0) break;
        }
        if (picked < 0) break;
        const ObjectInstance& oi = w.objects[picked];
        GoalSpec g;
        g.is_object = true;
        g.object = oi.object;
        g.name = tax.objects.at(oi.object);
        int best_cat = 0;
        for (int c = 1; c < tax.num_categories(); ++c)
            if (tax.co_occ[oi.object][c] > tax.co_occ[oi.object][best_cat]) best_cat = c;
        g.category = best_cat;
        task.goals.push_back(std::move(g));
        prev = oi.cell;
    }
    if (task.goals.empty()) throw GenerationError("could not place any goal");
    return task;
}

namespace detail {

// BFS over known-free occupancy from one cell; dist in cells (-1
// unreachable) plus parents for path reconstruction.
struct NavField {
    std::vector<int> dist;
    std::vector<int> parent;
    int width = 0;

    int at(Cell c, const OccupancyMap& occ) const {
        return occ.in_bounds(c) ? dist[occ.index(c)] : -1;
    }
};

inline NavField nav_field(const OccupancyMap& occ, Cell from) {
    NavField f;
    f.width = occ.width;
    f.dist.assign(occ.grid.size(), -1);
    f.parent.assign(occ.grid.size(), -1);
    if (!occ.in_bounds(from) || occ.at(from) != OccState::Free) return f;
    std::queue<Cell> q;
    f.dist[occ.index(from)] = 0;
    q.push(from);
    while (!q.empty()) {
        Cell c = q.front();
        q.pop();
        for (Cell n : neighbors4(c)) {
            if (!occ.in_bounds(n) || occ.at(n) != OccState::Free) continue;
            std::size_t ni = occ.index(n);
            if (f.dist[ni] != -1) continue;
            f.dist[ni] = f.dist[occ.index(c)] + 1;
            f.parent[ni] = static_cast<int>(occ.index(c));
            q.push(n);
        }
    }
    return f;
}

inline std::vector<Cell> nav_path(const NavField& f, const OccupancyMap& occ, Cell to) {
    std::vector<Cell> path;
    if (!occ.in_bounds(to) || f.dist[occ.index(to)] < 0) return path;
    int idx = static_cast<int>(occ.index(to));
    while (f.parent[idx] != -1) {
        path.push_back({idx % occ.width, idx / occ.width});
        idx = f.parent[idx];
    }
    std::reverse(path.begin(), path.end());
    return path;
}

// Nearest known-free cell within reach_m of a point that the nav field can
// reach; (found, cell, dist_cells).
struct ReachTarget {
    bool found = false;
    Cell cell{0, 0};
    int dist = 0;
};

inline ReachTarget nearest_reachable(const NavField& f, const OccupancyMap& occ, Vec2 p,
                                     double reach_m) {
    ReachTarget best;
    Cell pc = point_cell(p, occ.resolution);
    int r = static_cast<int>(reach_m / occ.resolution + 1e-9);
    for (int y = pc.y - r; y <= pc.y + r; ++y) {
        for (int x = pc.x - r; x <= pc.x + r; ++x) {
            Cell c{x, y};
            if (!occ.in_bounds(c) || occ.at(c) != OccState::Free) continue;
            if (distance(cell_center(c, occ.resolution), p) > reach_m + 1e-12) continue;
            int d = f.dist[occ.index(c)];
            if (d < 0) continue;
            if (!best.found || d < best.dist) {
                best.found = true;
                best.cell = c;
                best.dist = d;
            }
        }
    }
    return best;
}

inline int heading_octant(Vec2 delta, int fallback) {
    if (delta.x == 0.0 && delta.y == 0.0) return fallback;
    double angle = std::atan2(delta.y, delta.x);
    int oct = static_cast<int>(std::llround(angle / (3.14159265358979323846 / 4.0)));
    return ((oct % 8) + 8) % 8;
}

} // namespace detail

inline EpisodeTrace run_episode(const World& w, const Taxonomy& tax, const Task& task,
                                PolicyArm arm, const NoiseConfig& noise,
                                const AgentParams& params, std::uint64_t seed) {
    if (task.goals.empty()) throw std::invalid_argument("task needs at least one goal");
    if (!(task.success_radius > 0.0))
        throw std::invalid_argument("success radius must be positive");
    if (!noise.weights_ok()) throw std::invalid_argument("error taxonomy weights must sum to 1");

    const bool use_graph = arm != PolicyArm::GeometryOnly;
    const bool semantic = arm_semantic(arm);

    EpisodeTrace trace;
    trace.seed = seed;
    trace.arm = arm_name(arm);

    Pose pose = start_pose(w, seed);
    OccupancyMap occ(w.width, w.height, w.resolution);
    HypothesisGraph graph(params.merge_radius);
    OracleStats ostats;

    struct Pending {
        int target_region = -1;
    };
    std::map<int, Pending> pending;          // hypothesis id -> arrival info
    std::set<int> judged;                    // verified or corrected once
    std::set<int> visited_memory;            // memory targets reached, per goal
    std::vector<Vec2> predicted_at;          // permanent prediction sites
    std::vector<std::pair<Vec2, int>> visit_log;  // frontier arrival counts
    std::set<Cell, CellLess> revealed;       // surfaces contact proved solid
    std::map<Cell, int, CellLess> phantom_ref;  // apparent openings -> shown region
    TargetKind last_kind = TargetKind::None;  // previous step's choice, for
    int last_node = -1;                       // distinct-decision accounting
    Vec2 last_target{};
    std::vector<std::pair<Vec2, int>> zone_log;  // refutation sites and steps
    std::map<int, std::vector<Vec2>> seen_objects;  // object id -> sighting positions
    std::vector<Vec2> dead_sightings;        // positions that failed the goal check

    std::size_t goal_idx = 0;
    Cell seg_start = point_cell(pose.position, w.resolution);
    double seg_lstar = goal_l_star(w, seg_start, task.goals[0]);
    double seg_path = 0.0;
    int seg_steps = 0;
    std::vector<int> goal_field =
        detail::multi_distance_field(w, detail::goal_cells(w, task.goals[0]));

    auto finish_goal = [&](const char* status, bool success) {
        GoalOutcome g;
        g.index = static_cast<int>(goal_idx);
        const GoalSpec& spec = task.goals[goal_idx];
        g.kind = spec.is_object ? "object" : "category";
        g.name = spec.name;
        g.status = status;
        g.success = success;
        g.l_star = seg_lstar;
        g.path_len = seg_path;
        g.steps = seg_steps;
        trace.goals.push_back(std::move(g));
    };

    auto advance_goal = [&]() {
        goal_idx += 1;
        visited_memory.clear();
        // The memoryless baseline forgets object sightings between goals;
        // every other arm carries them (its graph is the point of comparison).
        if (!use_graph) seen_objects.clear();
        if (goal_idx >= task.goals.size()) return;
        seg_start = point_cell(pose.position, w.resolution);
        seg_lstar = goal_l_star(w, seg_start, task.goals[goal_idx]);
        seg_path = 0.0;
        seg_steps = 0;
        goal_field = detail::multi_distance_field(w, detail::goal_cells(w, task.goals[goal_idx]));
    };

    auto goal_met = [&]() {
        const GoalSpec& g = task.goals[goal_idx];
        Cell pc = point_cell(pose.position, w.resolution);
        if (g.is_object) {
            int d = goal_field[w.index(pc)];
            return d >= 0 && static_cast<double>(d) * w.resolution <= task.success_radius;
        }
        int r = w.region_at(pc);
        return r >= 0 && w.regions[r].category == g.category;
    };

    auto correct = [&](int id) -> int {
        // Arm-specific response to a refuted hypothesis; returns removals.
        switch (arm) {
        case PolicyArm::Full:
        case PolicyArm::NoSemantic:
            return static_cast<int>(graph.cascade_correct(id).size());
        case PolicyArm::LocalDelete: {
            // The deletion orphans the children: they survive, but the
            // premise that justified them is gone, so their support drops
            // to the same residual level a decayed belief keeps.
            std::vector<int> kids = graph.node(id).children;
            int removed = static_cast<int>(graph.local_delete(id).size());
            for (int c : kids)
                if (graph.live(c)) graph.scale_confidence(c, params.decay_gamma);
            return removed;
        }
        case PolicyArm::SoftDecay:
            graph.decay(id, params.decay_gamma);
            judged.insert(id);
            return 0;
        case PolicyArm::NoCascade:
            graph.scale_confidence(id, params.attenuate_factor);
            judged.insert(id);
            return 0;
        case PolicyArm::GeometryOnly:
            return 0;
        }
        return 0;
    };

    // One touch — or one look at the back — settles the whole contiguous
    // surface: every connected cell of it is marked solid for good.
    auto reveal_surface = [&](Cell hit) {
        if (!revealed.insert(hit).second) return;
        phantom_ref.erase(hit);
        occ.grid[occ.index(hit)] = OccState::Occupied;
        std::vector<Cell> pane{hit};
        for (std::size_t q = 0; q < pane.size(); ++q) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    Cell nb{pane[q].x + dx, pane[q].y + dy};
                    if ((dx == 0 && dy == 0) || !w.in_bounds(nb)) continue;
                    if (w.illusion_at(nb) < 0) continue;
                    if (!revealed.insert(nb).second) continue;
                    phantom_ref.erase(nb);
                    occ.grid[occ.index(nb)] = OccState::Occupied;
                    pane.push_back(nb);
                }
            }
        }
    };

    bool stuck = false;
    for (int step = 0; step < task.step_budget && goal_idx < task.goals.size(); ++step) {
        StepRecord rec;
        rec.step = step;

        // Perceive and integrate.
        Observation obs = perceive(w, pose, params.perceive_range, params.context_radius);
        rec.newly_known = static_cast<int>(update_occupancy(occ, obs).size());

        // Apparent openings enter the map as free space at face value;
        // only a surface this agent has already seen through is known solid.
        for (const PhantomOpening& po : obs.phantom_open) {
            if (revealed.count(po.cell)) continue;
            phantom_ref[po.cell] = po.shown_region;
            OccState& s = occ.grid[occ.index(po.cell)];
            if (s == OccState::Unknown) {
                s = OccState::Free;
                rec.newly_known += 1;
            }
        }

        // The surfaces are one-way: a pane sighted from its far side is
        // plain wall, and that sighting disproves the opening outright —
        // including one this agent painted free from the front earlier.
        for (Cell c : obs.visible_blocked)
            if (w.illusion_at(c) >= 0 && !revealed.count(c)) reveal_surface(c);

        int current_observed = -1;
        if (use_graph && obs.true_region >= 0 && obs.region_category >= 0) {
            current_observed =
                graph.add_observed(w.regions[obs.true_region].centroid, obs.region_category,
                                   obs.local_objects, obs.embedding);
        }

        // Record object sightings (true positions, plus mirror phantoms).
        for (const SeenObject& so : obs.visible_objects) {
            bool dead = false;
            for (Vec2 d : dead_sightings)
                if (distance(d, so.position) <= 0.25) dead = true;
            if (dead) continue;
            auto& s = seen_objects[so.object];
            bool dup = false;
            for (Vec2 p : s)
                if (distance(p, so.position) <= 0.2) dup = true;
            if (!dup) s.push_back(so.position);
        }

        // Frontiers from the current occupancy.
        std::vector<Frontier> frontiers =
            cluster_frontiers(detect_frontiers(occ), params.frontier_eps,
                              params.frontier_min_samples, w.resolution, step);
        rec.frontiers = static_cast<int>(frontiers.size());

        const GoalSpec& goal = task.goals[goal_idx];
        const int goal_category = goal.category;

        // Nearest live hypothesis per frontier (judged ones still anchor).
        auto frontier_node = [&](const Frontier& f) -> int {
            int best = -1;
            double best_d = 0.0;
            if (!use_graph) return best;
            for (const auto& [id, n] : graph.nodes()) {
                if (n.kind != NodeKind::Hypothesis) continue;
                double d = distance(n.position, f.centroid);
                if (d > params.anchor_radius) continue;
                if (best < 0 || d < best_d) {
                    best = id;
                    best_d = d;
                }
            }
            return best;
        };

        // New predictions for uncovered frontiers.
        if (semantic) {
            for (const Frontier& f : frontiers) {
                if (frontier_node(f) >= 0) continue;
                if (current_observed < 0 && graph.live_count() == 0) continue;
                // Sites whose claim was settled in place (confirmed nodes
                // become observations here) stay covered. One claim per
                // site: a frontier that advances earns fresh claims at its
                // new ground, while a site that never opens — its first
                // claim broken — is left as bare geometry, not asked again.
                bool settled = false;
                for (const auto& [id, n] : graph.nodes())
                    if (n.kind == NodeKind::Observed &&
                        distance(n.position, f.centroid) < params.predict_separation)
                        settled = true;
                for (Vec2 p : predicted_at)
                    if (distance(p, f.centroid) < params.predict_separation) settled = true;
                if (settled) continue;

                OracleContext ctx;
                ctx.frontier = f;
                // Structural misperception is local to apparent openings: a
                // frontier lying mostly on an illusion surface shows that
                // surface's scene. Solid ground carries no override.
                {
                    int shown = -1;
                    std::size_t on_phantom = 0;
                    for (Cell m : f.member_cells) {
                        auto it = phantom_ref.find(m);
                        if (it == phantom_ref.end()) continue;
                        on_phantom += 1;
                        if (shown < 0) shown = it->second;
                    }
                    if (2 * on_phantom >= f.member_cells.size())
                        ctx.perceived_region = shown;
                }
                ctx.local_objects = obs.local_objects;
                {
                    std::set<int> cats;
                    for (const auto& [id, n] : graph.nodes())
                        if (n.kind == NodeKind::Observed && n.category >= 0)
                            cats.insert(n.category);
                    ctx.explored_categories.assign(cats.begin(), cats.end());
                }
                ctx.goal_category = goal_category;
                {
                    std::set<Cell, CellLess> beyond;
                    for (Cell m : f.member_cells)
                        for (Cell n : neighbors4(m))
                            if (occ.in_bounds(n) && occ.at(n) == OccState::Unknown)
                                beyond.insert(n);
                    ctx.beyond_cells.assign(beyond.begin(), beyond.end());
                }

                HypothesisPrediction pred;
                bool fallback = false;
                switch (params.oracle_mode) {
                case OracleMode::GroundTruthNoisy:
                    ostats.calls += 1;
                    pred = predict_ground_truth_noisy(ctx, w, noise, tax);
                    break;
                case OracleMode::CoOccurrence:
                    ostats.calls += 1;
                    pred = predict_cooccurrence(ctx, tax);
                    break;
                case OracleMode::Hybrid:
                    pred = predict_hybrid(ctx, w, tax, noise, params.hybrid_entropy_gate,
                                          ostats);
                    break;
                case OracleMode::External:
                    ostats.calls += 1;
                    try {
                        if (!params.external_predict)
                            throw std::runtime_error("no external predictor configured");
                        pred = params.external_predict(ctx);
                    } catch (const std::exception&) {
                        pred = uniform_prediction(tax, f.id);
                        fallback = true;
                    }
                    break;
                }
                if (fallback) {
                    trace.oracle_fallbacks += 1;
                    rec.oracle_fallback = true;
                }

                // Parent: nearest observed node.
                int parent = -1;
                double parent_d = 0.0;
                for (const auto& [id, n] : graph.nodes()) {
                    if (n.kind != NodeKind::Observed) continue;
                    double d = distance(n.position, f.centroid);
                    if (parent < 0 || d < parent_d) {
                        parent = id;
                        parent_d = d;
                    }
                }
                if (parent < 0) continue;

                double rho = std::clamp(pred.confidence, 0.0, 1.0);
                int id = graph.add_hypothesis(parent, f.centroid, pred, rho);
                trace.hyp_creations += 1;
                pending[id] = Pending{frontier_target_region(w, ctx)};
                predicted_at.push_back(f.centroid);
                std::size_t n_obj = std::min<std::size_t>(3, pred.objects.size());
                for (std::size_t k = 0; k < n_obj; ++k) {
                    double rk = k < pred.object_rhos.size()
                                    ? std::clamp(pred.object_rhos[k], 0.0, 1.0)
                                    : 0.0;
                    graph.add_object_hypothesis(id, pred.objects[k], rk);
                    trace.hyp_creations += 1;
                }
            }
        }

        // Verification: a pending claim is judged on site — reaching the
        // claimed spot settles it. Two more ways a claim comes due without
        // the visit: its ground is proved solid (the opening never existed),
        // or the agent stands in its target room after the frontier it was
        // made at has dissolved, so no on-site look will ever come. Claims
        // whose frontier is still open keep waiting for the visit.
        if (use_graph) {
            auto frontier_near = [&](Vec2 p, double radius) {
                Cell pc = point_cell(p, w.resolution);
                int r = static_cast<int>(radius / w.resolution + 1e-9) + 1;
                for (int dy = -r; dy <= r; ++dy)
                    for (int dx = -r; dx <= r; ++dx) {
                        Cell c{pc.x + dx, pc.y + dy};
                        if (!occ.in_bounds(c)) continue;
                        if (occ.grid[occ.index(c)] != OccState::Free) continue;
                        if (distance(cell_center(c, w.resolution), p) > radius)
                            continue;
                        for (Cell nb : neighbors4(c))
                            if (occ.in_bounds(nb) &&
                                occ.grid[occ.index(nb)] == OccState::Unknown)
                                return true;
                    }
                return false;
            };
            auto site_solid = [&](Vec2 p) {
                Cell pc = point_cell(p, w.resolution);
                return occ.in_bounds(pc) &&
                       occ.grid[occ.index(pc)] == OccState::Occupied;
            };
            std::vector<int> due;
            for (const auto& [id, p] : pending) {
                if (!graph.nodes().count(id)) continue;
                const Node& n = graph.node(id);
                if (n.kind != NodeKind::Hypothesis) continue;
                if (distance(pose.position, n.position) <= params.arrival_radius ||
                    site_solid(n.position) ||
                    (p.target_region >= 0 && obs.true_region == p.target_region &&
                     !frontier_near(n.position, 0.5 * params.predict_separation)))
                    due.push_back(id);
            }
            for (int id : due) {
                if (!graph.nodes().count(id)) continue;
                const Node& n = graph.node(id);

                // The referee reads what is actually at the site: the true
                // ground beyond the frontier when any exists, otherwise the
                // room the agent is standing in — never the percept, which
                // the very surface under test may be corrupting.
                ActualRegion actual;
                int r = pending.at(id).target_region;
                if (r < 0) r = obs.true_region;
                if (r >= 0) {
                    const Region& reg = w.regions[r];
                    actual.category = reg.category;
                    std::set<int> objs;
                    for (int oi : reg.objects) objs.insert(w.objects[oi].object);
                    actual.objects.assign(objs.begin(), objs.end());
                    actual.embedding = reg.embedding;
                } else {
                    actual.category = obs.region_category;
                    actual.objects = obs.local_objects;
                    actual.embedding = obs.embedding;
                }

                HypothesisPrediction pred;
                pred.distribution = n.distribution;
                pred.objects = n.objects;
                pred.embedding = n.embedding;
                ResidualReport rep = residual(pred, actual, params.residuals);

                rec.judged += 1;
                if (rep.verdict == Verdict::Confirmed) {
                    std::vector<int> kids = n.children;
                    for (int kid : kids) {
                        if (!graph.nodes().count(kid)) continue;
                        const Node& c = graph.node(kid);
                        if (c.kind != NodeKind::ObjectHypothesis) continue;
                        bool present = std::binary_search(actual.objects.begin(),
                                                          actual.objects.end(), c.object);
                        if (present) {
                            graph.confirm(kid, actual.category, actual.objects,
                                          actual.embedding);
                            if (r >= 0) graph.relocate(kid, w.regions[r].centroid);
                            trace.confirmations += 1;
                            rec.confirmations += 1;
                        } else {
                            rec.removed += correct(kid);
                        }
                    }
                    graph.confirm(id, actual.category, actual.objects, actual.embedding);
                    if (r >= 0) graph.relocate(id, w.regions[r].centroid);
                    trace.confirmations += 1;
                    rec.confirmations += 1;
                } else {
                    trace.refutations += 1;
                    rec.refutations += 1;
                    // A zone quarantines a surface that misled — ground the
                    // map shows solid. A claim refuted across open floor was
                    // merely wrong, and its doorway still works.
                    Cell sc = point_cell(n.position, w.resolution);
                    if (occ.in_bounds(sc) &&
                        occ.grid[occ.index(sc)] == OccState::Occupied)
                        rec.refuted_at.push_back(n.position);
                    rec.removed += correct(id);
                }
                pending.erase(id);
            }
        }

        // Candidate targets.
        detail::NavField nav = detail::nav_field(occ, point_cell(pose.position, w.resolution));

        TargetKind target_kind = TargetKind::None;
        Vec2 target{};
        Cell target_cell{0, 0};
        int target_frontier = -1;
        int target_node = -1;
        bool have_target = false;

        // Direct sighting of the goal object wins outright.
        if (goal.is_object) {
            auto it = seen_objects.find(goal.object);
            if (it != seen_objects.end()) {
                bool found = false;
                double best_d = 0.0;
                Vec2 best_p{};
                detail::ReachTarget best_t;
                for (Vec2 p : it->second) {
                    detail::ReachTarget t =
                        detail::nearest_reachable(nav, occ, p, params.arrival_radius);
                    if (!t.found) continue;
                    if (!found || t.dist < best_d) {
                        found = true;
                        best_d = t.dist;
                        best_p = p;
                        best_t = t;
                    }
                }
                if (found) {
                    target_kind = TargetKind::Goal;
                    target = best_p;
                    target_cell = best_t.cell;
                    have_target = true;
                }
            }
        }

        if (!have_target) {
            // Frontier candidates.
            std::vector<FrontierCandidate> cands;
            std::vector<Cell> cand_cells;
            std::vector<int> cand_nodes;
            std::vector<double> cand_child;  // strongest matching object claim
            const int K = tax.num_categories();
            for (const Frontier& f : frontiers) {
                int best_d = -1;
                Cell best_c{0, 0};
                for (Cell m : f.member_cells) {
                    int d = nav.at(m, occ);
                    if (d < 0) continue;
                    if (best_d < 0 || d < best_d) {
                        best_d = d;
                        best_c = m;
                    }
                }
                if (best_d < 0) continue;
                FrontierCandidate c;
                c.frontier = f;
                c.dist_m = static_cast<double>(best_d) * w.resolution;
                int node = frontier_node(f);
                double child_rho = 0.0;
                if (semantic && node >= 0) {
                    // Belief transfers at edge confidence: the claim's
                    // distribution is blended against ignorance, so a
                    // weakly held claim reads as mostly-unknown rather
                    // than as a confident answer — but it still anchors
                    // the site, standing in for a fresh prediction.
                    const Node& n = graph.node(node);
                    const double rho = std::clamp(n.rho, 0.0, 1.0);
                    c.prediction.distribution.assign(K, (1.0 - rho) / K);
                    for (std::size_t k = 0; k < n.distribution.size(); ++k)
                        c.prediction.distribution[k] += rho * n.distribution[k];
                    if (goal.is_object) {
                        for (int ch : n.children) {
                            if (!graph.nodes().count(ch)) continue;
                            const Node& cn = graph.node(ch);
                            if (cn.kind == NodeKind::ObjectHypothesis &&
                                cn.object == goal.object)
                                child_rho = std::max(child_rho, cn.rho);
                        }
                    }
                } else {
                    c.prediction.distribution.assign(K, 1.0 / K);
                }
                c.prediction.frontier_id = f.id;
                for (const auto& [p, cnt] : visit_log)
                    if (distance(p, f.centroid) <= params.merge_radius) c.n_visits += cnt;
                cands.push_back(std::move(c));
                cand_cells.push_back(best_c);
                cand_nodes.push_back(node);
                cand_child.push_back(child_rho);
            }

            // Memory candidates: any live node the goal could cash in on,
            // discounted by its confidence. A node already judged still
            // pulls as long as it is in the graph — a stale claim nobody
            // cleaned up reads exactly like a lead worth walking back to.
            struct MemoryCandidate {
                int id = -1;
                double score = 0.0;
                Cell cell{0, 0};
                Vec2 position{};
            };
            MemoryCandidate best_mem;
            bool have_mem = false;
            if (use_graph) {
                for (const auto& [id, n] : graph.nodes()) {
                    if (visited_memory.count(id)) continue;
                    double base = -1.0;
                    if (n.kind == NodeKind::Observed) {
                        bool has = goal.is_object
                                       ? std::binary_search(n.objects.begin(),
                                                            n.objects.end(), goal.object)
                                       : n.category == goal_category;
                        if (has) base = 1.0;
                    } else if (semantic && n.kind == NodeKind::ObjectHypothesis) {
                        if (goal.is_object && n.object == goal.object) base = n.rho;
                    } else if (semantic && n.kind == NodeKind::Hypothesis &&
                               !n.distribution.empty()) {
                        // An unresolved room claim answers a category goal by
                        // its believed category, an object goal through the
                        // co-occurrence of that object with what it believes.
                        if (goal.is_object) {
                            double fold = 0.0;
                            for (std::size_t k = 0; k < n.distribution.size(); ++k)
                                fold += n.distribution[k] * tax.co_occ[goal.object][k];
                            base = n.rho * fold;
                        } else if (goal_category >= 0 &&
                                   goal_category <
                                       static_cast<int>(n.distribution.size())) {
                            base = n.rho * n.distribution[goal_category];
                        }
                    }
                    if (base <= 0.0) continue;
                    detail::ReachTarget t =
                        detail::nearest_reachable(nav, occ, n.position, params.merge_radius);
                    if (!t.found) continue;
                    double score = base - params.scoring.lambda_d *
                                              (static_cast<double>(t.dist) * w.resolution);
                    if (!have_mem || score > best_mem.score ||
                        (score == best_mem.score && id < best_mem.id)) {
                        have_mem = true;
                        best_mem = {id, score, t.cell, n.position};
                    }
                }
            }

            double frontier_score = 0.0;
            std::size_t best_f = 0;
            bool have_frontier = false;
            if (!cands.empty() && !semantic) {
                best_f = select_frontier_index(cands, std::max(goal_category, 0),
                                               params.scoring, arm);
                have_frontier = true;
            } else if (!cands.empty()) {
                // Hypothesized frontiers carry their node's claim; bare ones
                // (hypothesis removed or never made) fall back to a uniform
                // prior, so the unknown outranks the known-irrelevant.
                // For an object goal the match term is the expected presence
                // of that object beyond the frontier: category belief folded
                // through the co-occurrence table, overridden by an explicit
                // surviving object claim of the anchoring hypothesis.
                ScoringParams eff = params.scoring;
                if (arm != PolicyArm::SoftDecay) eff.lambda_r = 0.0;
                for (std::size_t i = 0; i < cands.size(); ++i) {
                    double s;
                    if (goal.is_object) {
                        const auto& P = cands[i].prediction.distribution;
                        double match = 0.0;
                        for (std::size_t k = 0; k < P.size(); ++k)
                            match += P[k] * tax.co_occ[goal.object][k];
                        match = std::max(match, cand_child[i]);
                        s = match - eff.lambda_d * cands[i].dist_m +
                            eff.lambda_h * entropy(P) - eff.lambda_r * cands[i].n_visits;
                    } else {
                        s = exploration_score(cands[i].prediction,
                                              std::max(goal_category, 0),
                                              cands[i].dist_m, eff, cands[i].n_visits);
                    }
                    if (!have_frontier || s > frontier_score ||
                        (s == frontier_score &&
                         cands[i].frontier.id < cands[best_f].frontier.id)) {
                        have_frontier = true;
                        frontier_score = s;
                        best_f = i;
                    }
                }
            }

            bool pick_memory = false;
            if (have_mem && have_frontier)
                pick_memory = semantic ? best_mem.score > frontier_score : true;
            else if (have_mem)
                pick_memory = true;

            if (pick_memory) {
                target_kind = TargetKind::MemoryNode;
                target = best_mem.position;
                target_cell = best_mem.cell;
                target_node = best_mem.id;
                have_target = true;
            } else if (have_frontier) {
                target_kind = TargetKind::Frontier;
                target = cands[best_f].frontier.centroid;
                target_cell = cand_cells[best_f];
                target_frontier = cands[best_f].frontier.id;
                target_node = cand_nodes[best_f];
                have_target = true;
            }
        }

        if (!have_target) {
            stuck = true;
            rec.position = pose.position;
            rec.live_nodes = use_graph ? graph.live_count() : 0;
            trace.records.push_back(std::move(rec));
            break;
        }

        // Move along the planned path, stopping short where the believed-free
        // ground turns out solid: contact disproves an apparent opening, and
        // one touch settles the whole contiguous surface.
        std::vector<Cell> path = detail::nav_path(nav, occ, target_cell);
        Vec2 before = pose.position;
        int limit = std::min<int>(params.cells_per_step, static_cast<int>(path.size()));
        int took = 0;
        for (int i = 0; i < limit; ++i) {
            if (!w.traversable(path[i])) {
                Cell hit = path[i];
                occ.grid[occ.index(hit)] = OccState::Occupied;
                if (w.illusion_at(hit) >= 0) reveal_surface(hit);
                break;
            }
            took = i + 1;
        }
        if (took > 0) {
            Cell reached = path[took - 1];
            pose.position = cell_center(reached, w.resolution);
            seg_path += static_cast<double>(took) * w.resolution;
        }
        pose.heading = detail::heading_octant(pose.position - before, pose.heading);
        seg_steps += 1;

        // A sighting that cannot pass the goal check is a phantom: drop it.
        if (target_kind == TargetKind::Goal &&
            distance(pose.position, target) <= params.arrival_radius && !goal_met()) {
            dead_sightings.push_back(target);
            auto& s = seen_objects[goal.object];
            s.erase(std::remove_if(s.begin(), s.end(),
                                   [&](Vec2 p) { return distance(p, target) <= 0.25; }),
                    s.end());
        }
        if (target_kind == TargetKind::MemoryNode &&
            distance(pose.position, target) <= params.arrival_radius) {
            visited_memory.insert(target_node);
            if (!goal_met()) trace.mem_failures += 1;
            // Pursuing an object hypothesis to its site settles it: the room
            // the agent is standing in either holds such an object or not.
            if (use_graph && graph.nodes().count(target_node) &&
                !judged.count(target_node)) {
                const Node& n = graph.node(target_node);
                if (n.kind == NodeKind::ObjectHypothesis) {
                    int r = w.region_at(point_cell(n.position, w.resolution));
                    if (r < 0) r = w.region_at(point_cell(pose.position, w.resolution));
                    bool present = false;
                    if (r >= 0) {
                        const Region& reg = w.regions[r];
                        for (int oi : reg.objects)
                            if (w.objects[oi].object == n.object) present = true;
                    }
                    rec.judged += 1;
                    if (present) {
                        const Region& reg = w.regions[r];
                        std::set<int> objs;
                        for (int oi : reg.objects) objs.insert(w.objects[oi].object);
                        std::vector<int> obj_list(objs.begin(), objs.end());
                        graph.confirm(target_node, reg.category, obj_list,
                                      reg.embedding);
                        graph.relocate(target_node, reg.centroid);
                        trace.confirmations += 1;
                        rec.confirmations += 1;
                    } else {
                        // No attributable room counts as absence: the claim
                        // pointed nowhere, and an unsettled node would be
                        // chased again on every later matching goal.
                        trace.refutations += 1;
                        rec.refutations += 1;
                        rec.removed += correct(target_node);
                    }
                }
            }
        }

        // A visit means physically reaching the frontier, not merely
        // steering toward it for a step.
        if (target_kind == TargetKind::Frontier &&
            distance(pose.position, target) <= params.arrival_radius) {
            bool logged = false;
            for (auto& [p, cnt] : visit_log) {
                if (distance(p, target) <= params.merge_radius) {
                    cnt += 1;
                    logged = true;
                    break;
                }
            }
            if (!logged) visit_log.push_back({target, 1});
        }

        // Distinct targeting decisions, for the selection diagnostics.
        auto in_zone_now = [&]() {
            for (const auto& [z, zs] : zone_log)
                if (distance(z, target) <= 1.0 && distance(z, pose.position) > 1.0)
                    return true;
            return false;
        };
        if (target_kind == TargetKind::MemoryNode &&
            (last_kind != TargetKind::MemoryNode || last_node != target_node)) {
            trace.mem_selections += 1;
            if (in_zone_now()) trace.iz_mem += 1;
        }
        if (target_kind == TargetKind::Frontier &&
            (last_kind != TargetKind::Frontier || distance(last_target, target) > 1.0)) {
            if (target_node >= 0 && judged.count(target_node))
                trace.stale_selections += 1;
            if (in_zone_now()) {
                if (target_node < 0)
                    trace.iz_bare += 1;
                else if (judged.count(target_node))
                    trace.iz_judged += 1;
                else
                    trace.iz_live += 1;
            }
        }
        last_kind = target_kind;
        last_node = target_node;
        last_target = target;
        for (Vec2 z : rec.refuted_at) zone_log.push_back({z, step});

        trace.removed_total += rec.removed;
        rec.position = pose.position;
        rec.target_kind = target_kind;
        rec.frontier_id = target_frontier;
        rec.node_id = target_node;
        rec.target = target;
        rec.live_nodes = use_graph ? graph.live_count() : 0;
        trace.records.push_back(std::move(rec));
        trace.steps = step + 1;

        if (goal_met()) {
            finish_goal("success", true);
            advance_goal();
        }
    }

    if (goal_idx < task.goals.size()) {
        finish_goal(stuck ? "stuck" : "budget", false);
        for (std::size_t g = goal_idx + 1; g < task.goals.size(); ++g) {
            GoalOutcome out;
            out.index = static_cast<int>(g);
            out.kind = task.goals[g].is_object ? "object" : "category";
            out.name = task.goals[g].name;
            out.status = stuck ? "stuck" : "budget";
            out.success = false;
            trace.goals.push_back(std::move(out));
        }
    } else {
        trace.all_goals_done = true;
    }

    if (use_graph) {
        trace.live_at_end = static_cast<std::size_t>(graph.live_count());
        std::size_t unverified = 0;
        for (const auto& [id, n] : graph.nodes())
            if (n.kind != NodeKind::Observed) unverified += 1;
        trace.live_unverified_at_end = unverified;
        trace.peak_live = graph.stats().peak;
        for (const CascadeEvent& e : graph.stats().cascade_events)
            trace.cascades.push_back({e.depth, e.removed});
    }
    trace.oracle_calls = static_cast<std::size_t>(ostats.calls);
    trace.oracle_expensive = static_cast<std::size_t>(ostats.expensive_calls);
    return trace;
}

// Convenience for tests and the CLI: world, task, and episode from one seed.
inline EpisodeTrace run_seed(std::uint64_t seed, PolicyArm arm, const WorldConfig& wc,
                             const Taxonomy& tax, const NoiseConfig& noise_in,
                             const AgentParams& params, int n_goals = 3,
                             int step_budget = 500) {
    World w = generate_world(wc, seed, tax);
    Task task = make_task(w, tax, seed, n_goals);
    task.step_budget = step_budget;
    NoiseConfig noise = noise_in;
    if (noise.rng_seed == 0) noise.rng_seed = hash_key(seed, 0x6e6f697365ULL);
    return run_episode(w, tax, task, arm, noise, params, seed);
}

} // namespace scout
