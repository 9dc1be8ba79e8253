#pragma once
// Hypothesis graph memory. Observed nodes are physically verified places;
// hypothesis nodes are semantic predictions projected onto frontiers; object
// hypotheses hang off rooms. Dependency edges form a single-parent forest
// with a confidence on each edge. Refutation responses range from full
// cascade removal to local deletion to confidence decay; confirmation
// promotes a node in place, keeping its children.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace scout {

struct WrongKindError : std::logic_error {
    using std::logic_error::logic_error;
};
struct DeadParentError : std::logic_error {
    using std::logic_error::logic_error;
};

enum class NodeKind : std::uint8_t { Observed, Hypothesis, ObjectHypothesis };

// Distribution over the K categories; must sum to 1 within 1e-9.
using SemanticDistribution = std::vector<double>;

inline bool distribution_ok(const SemanticDistribution& d) {
    double sum = 0.0;
    for (double p : d) {
        if (!(p >= 0.0 && p <= 1.0)) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= 1e-9;
}

struct HypothesisPrediction {
    SemanticDistribution distribution;
    std::vector<int> objects;          // predicted object ids, most confident first
    std::vector<double> object_rhos;   // conditional confidence per object
    std::vector<double> embedding;     // predicted region appearance
    double confidence = 1.0;           // rho of the room-level claim
    int frontier_id = -1;
};

struct Node {
    int id = -1;
    NodeKind kind = NodeKind::Observed;
    Vec2 position;
    // Observed payload (verified), reused for the prediction payload of
    // hypotheses; which fields are meaningful depends on kind.
    int category = -1;
    std::vector<int> objects;
    std::vector<double> embedding;
    SemanticDistribution distribution; // empty unless kind == Hypothesis
    int frontier_id = -1;
    int object = -1;                   // ObjectHypothesis payload
    // Dependency structure.
    int parent = -1;
    double rho = 1.0;                  // confidence on the parent edge
    std::vector<int> children;         // sorted by id
};

struct CascadeEvent {
    int depth = 0;   // 1 = only the refuted node itself
    int removed = 0;
};

struct GraphStats {
    int peak = 0;
    long long creations = 0;
    long long confirmations = 0;
    long long refutations = 0;
    long long removed_total = 0;
    std::vector<CascadeEvent> cascade_events;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

class HypothesisGraph {
public:
    explicit HypothesisGraph(double merge_radius = 0.5) : merge_radius_(merge_radius) {}

    const std::map<int, Node>& nodes() const { return nodes_; }
    const std::vector<std::pair<int, int>>& nav_edges() const { return nav_edges_; }
    const GraphStats& stats() const { return stats_; }
    double merge_radius() const { return merge_radius_; }

    bool live(int id) const { return nodes_.count(id) > 0; }
    const Node& node(int id) const { return nodes_.at(id); }
    int live_count() const { return static_cast<int>(nodes_.size()); }

    // New observed node, unless one lies within the merge radius: then that
    // node absorbs the observation (objects unioned, category and embedding
    // refreshed) and keeps its id and position.
    int add_observed(Vec2 position, int category, const std::vector<int>& objects,
                     const std::vector<double>& embedding) {
        for (auto& [id, n] : nodes_) {
            if (n.kind != NodeKind::Observed) continue;
            if (distance(n.position, position) <= merge_radius_) {
                for (int o : objects)
                    if (std::find(n.objects.begin(), n.objects.end(), o) == n.objects.end())
                        n.objects.push_back(o);
                std::sort(n.objects.begin(), n.objects.end());
                n.category = category;
                n.embedding = embedding;
                return id;
            }
        }
        Node n;
        n.id = next_id_++;
        n.kind = NodeKind::Observed;
        n.position = position;
        n.category = category;
        n.objects = objects;
        std::sort(n.objects.begin(), n.objects.end());
        n.embedding = embedding;
        insert_node(std::move(n));
        return next_id_ - 1;
    }

    int add_hypothesis(int parent, Vec2 position, const HypothesisPrediction& pred,
                       double rho) {
        require_live(parent);
        if (!distribution_ok(pred.distribution))
            throw std::invalid_argument("semantic distribution must sum to 1");
        if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho outside [0,1]");
        Node n;
        n.id = next_id_++;
        n.kind = NodeKind::Hypothesis;
        n.position = position;
        n.distribution = pred.distribution;
        n.objects = pred.objects;
        n.embedding = pred.embedding;
        n.frontier_id = pred.frontier_id;
        link_parent(n, parent, rho);
        insert_node(std::move(n));
        return next_id_ - 1;
    }

    int add_object_hypothesis(int parent, int object, double rho_k) {
        require_live(parent);
        if (nodes_.at(parent).kind == NodeKind::ObjectHypothesis)
            throw WrongKindError("object hypotheses cannot parent objects");
        Node n;
        n.id = next_id_++;
        n.kind = NodeKind::ObjectHypothesis;
        n.position = nodes_.at(parent).position;
        n.object = object;
        link_parent(n, parent, rho_k);
        insert_node(std::move(n));
        return next_id_ - 1;
    }

    void add_nav_edge(int a, int b) {
        require_live(a);
        require_live(b);
        if (a == b) return;
        std::pair<int, int> e{std::min(a, b), std::max(a, b)};
        auto it = std::lower_bound(nav_edges_.begin(), nav_edges_.end(), e);
        if (it == nav_edges_.end() || *it != e) nav_edges_.insert(it, e);
    }

    // Promotion: the node's claim checked out on arrival. Kind flips to
    // Observed with the verified payload; children and the parent edge are
    // preserved. Verified object nodes promote the same way, carrying just
    // their object.
    void confirm(int id, int actual_category, const std::vector<int>& actual_objects,
                 const std::vector<double>& actual_embedding) {
        Node& n = mutable_unverified(id);
        if (n.kind == NodeKind::ObjectHypothesis) {
            n.objects = {n.object};
        } else {
            n.category = actual_category;
            n.objects = actual_objects;
            std::sort(n.objects.begin(), n.objects.end());
            n.embedding = actual_embedding;
        }
        n.kind = NodeKind::Observed;
        n.distribution.clear();
        n.frontier_id = -1;
        stats_.confirmations += 1;
    }

    // A verified claim's knowledge lives in the place that verified it:
    // moving the node there makes later recall lead into the room rather
    // than to the doorway or surface the claim was made at.
    void relocate(int id, Vec2 position) {
        require_live(id);
        nodes_.at(id).position = position;
    }

    // Cascade correction: the refuted node and every transitive dependent is
    // removed, breadth-first. Returns the removed ids, ascending.
    std::vector<int> cascade_correct(int id) {
        mutable_unverified(id);
        std::vector<int> frontier{id};
        std::vector<int> removed;
        int depth = 0;
        while (!frontier.empty()) {
            ++depth;
            std::vector<int> next;
            for (int u : frontier) {
                removed.push_back(u);
                for (int c : nodes_.at(u).children) next.push_back(c);
            }
            frontier = std::move(next);
        }
        for (int u : removed) erase_node(u, /*detach_children=*/false);
        std::sort(removed.begin(), removed.end());
        stats_.refutations += 1;
        stats_.removed_total += static_cast<long long>(removed.size());
        stats_.cascade_events.push_back({depth, static_cast<int>(removed.size())});
        return removed;
    }

    // Local deletion: only the refuted node goes; orphans re-parent to its
    // parent with their confidences kept.
    std::vector<int> local_delete(int id) {
        Node& n = mutable_unverified(id);
        const int grandparent = n.parent;
        for (int c : std::vector<int>(n.children)) {
            Node& ch = nodes_.at(c);
            detach_from_parent(c);
            ch.parent = -1;
            if (grandparent >= 0) link_parent_existing(c, grandparent, ch.rho);
        }
        erase_node(id, /*detach_children=*/false);
        stats_.refutations += 1;
        stats_.removed_total += 1;
        return {id};
    }

    // Soft decay: the node's own confidence shrinks by gamma, a descendant
    // at dependency depth d by gamma^d. Nothing is removed. Factors build by
    // repeated multiplication so the arithmetic matches hand computation.
    void decay(int id, double gamma) {
        require_live(id);
        std::vector<int> level{id};
        double factor = gamma;
        int depth = 0;
        while (!level.empty()) {
            std::vector<int> next;
            for (int u : level) {
                Node& n = nodes_.at(u);
                n.rho *= factor;
                for (int c : n.children) next.push_back(c);
            }
            level = std::move(next);
            ++depth;
            if (depth >= 2) factor *= gamma; // depth 0 and 1 both scale by gamma
        }
    }

    // One-off confidence scaling, used by the no-cascade arm to dampen a
    // refuted node it refuses to remove.
    void scale_confidence(int id, double factor) {
        require_live(id);
        nodes_.at(id).rho *= factor;
    }

    ValidationReport validate() const {
        ValidationReport rep;
        for (const auto& [id, n] : nodes_) {
            if (n.parent >= 0) {
                auto p = nodes_.find(n.parent);
                if (p == nodes_.end()) {
                    rep.violations.push_back("node " + std::to_string(id) +
                                             " has a dead parent");
                } else {
                    const std::vector<int>& ch = p->second.children;
                    if (std::find(ch.begin(), ch.end(), id) == ch.end())
                        rep.violations.push_back("node " + std::to_string(id) +
                                                 " missing from parent's children");
                }
            }
            for (int c : n.children) {
                auto cit = nodes_.find(c);
                if (cit == nodes_.end())
                    rep.violations.push_back("node " + std::to_string(id) +
                                             " lists dead child");
                else if (cit->second.parent != id)
                    rep.violations.push_back("child " + std::to_string(c) +
                                             " does not point back to " + std::to_string(id));
            }
            if (!(n.rho >= 0.0 && n.rho <= 1.0))
                rep.violations.push_back("node " + std::to_string(id) + " rho outside [0,1]");
            if (n.kind == NodeKind::Observed && !n.distribution.empty())
                rep.violations.push_back("observed node " + std::to_string(id) +
                                         " carries a distribution");
            if (n.kind == NodeKind::Hypothesis && !distribution_ok(n.distribution))
                rep.violations.push_back("hypothesis " + std::to_string(id) +
                                         " distribution malformed");
            // Acyclicity: the parent chain must terminate.
            int hops = 0, cur = n.parent;
            while (cur >= 0 && hops <= static_cast<int>(nodes_.size())) {
                auto it = nodes_.find(cur);
                if (it == nodes_.end()) break;
                cur = it->second.parent;
                ++hops;
            }
            if (hops > static_cast<int>(nodes_.size()))
                rep.violations.push_back("dependency cycle through node " + std::to_string(id));
        }
        for (const auto& [a, b] : nav_edges_)
            if (!live(a) || !live(b))
                rep.violations.push_back("nav edge references a dead node");
        if (stats_.peak < live_count())
            rep.violations.push_back("peak counter below live count");
        if (stats_.creations != live_count() + stats_.removed_total)
            rep.violations.push_back("creation/removal accounting broken");
        return rep;
    }

    // Snapshot support: enough state to rebuild the graph exactly.
    int next_id() const { return next_id_; }
    void restore(std::map<int, Node> nodes, std::vector<std::pair<int, int>> nav_edges,
                 GraphStats stats, int next_id) {
        nodes_ = std::move(nodes);
        nav_edges_ = std::move(nav_edges);
        stats_ = std::move(stats);
        next_id_ = next_id;
    }

private:
    void require_live(int id) const {
        if (!live(id)) throw DeadParentError("node " + std::to_string(id) + " is not live");
    }

    Node& mutable_unverified(int id) {
        require_live(id);
        Node& n = nodes_.at(id);
        if (n.kind == NodeKind::Observed)
            throw WrongKindError("observed nodes cannot be re-judged");
        return n;
    }

    void insert_node(Node&& n) {
        int id = n.id;
        nodes_.emplace(id, std::move(n));
        stats_.creations += 1;
        stats_.peak = std::max(stats_.peak, live_count());
    }

    void link_parent(Node& child, int parent, double rho) {
        child.parent = parent;
        child.rho = rho;
        std::vector<int>& ch = nodes_.at(parent).children;
        ch.insert(std::upper_bound(ch.begin(), ch.end(), child.id), child.id);
    }

    void link_parent_existing(int child, int parent, double rho) {
        Node& c = nodes_.at(child);
        if (c.parent >= 0) throw std::logic_error("node already has a parent");
        c.parent = parent;
        c.rho = rho;
        std::vector<int>& ch = nodes_.at(parent).children;
        ch.insert(std::upper_bound(ch.begin(), ch.end(), child), child);
    }

    void detach_from_parent(int id) {
        Node& n = nodes_.at(id);
        if (n.parent < 0) return;
        auto p = nodes_.find(n.parent);
        if (p != nodes_.end()) {
            std::vector<int>& ch = p->second.children;
            ch.erase(std::remove(ch.begin(), ch.end(), id), ch.end());
        }
    }

    void erase_node(int id, bool detach_children) {
        detach_from_parent(id);
        if (detach_children) {
            for (int c : std::vector<int>(nodes_.at(id).children))
                nodes_.at(c).parent = -1;
        }
        nodes_.erase(id);
        nav_edges_.erase(std::remove_if(nav_edges_.begin(), nav_edges_.end(),
                                        [&](const std::pair<int, int>& e) {
                                            return e.first == id || e.second == id;
                                        }),
                         nav_edges_.end());
    }

    double merge_radius_;
    std::map<int, Node> nodes_;
    std::vector<std::pair<int, int>> nav_edges_;
    GraphStats stats_;
    int next_id_ = 0;
};

} // namespace scout
