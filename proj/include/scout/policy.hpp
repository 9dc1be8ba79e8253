#pragma once
// Exploration scoring, frontier selection, and the residual verdicts that
// decide whether a hypothesis survives contact with reality. Everything here
// is a pure function; the ablation arms only switch which pieces apply.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "frontier.hpp"
#include "graph.hpp"

namespace scout {

enum class PolicyArm { Full, NoSemantic, NoCascade, LocalDelete, SoftDecay, GeometryOnly };

inline const char* arm_name(PolicyArm a) {
    switch (a) {
        case PolicyArm::Full: return "full";
        case PolicyArm::NoSemantic: return "no_semantic";
        case PolicyArm::NoCascade: return "no_cascade";
        case PolicyArm::LocalDelete: return "local_delete";
        case PolicyArm::SoftDecay: return "soft_decay";
        case PolicyArm::GeometryOnly: return "geometry_only";
    }
    return "?";
}

inline PolicyArm arm_from_name(const std::string& s) {
    for (PolicyArm a : {PolicyArm::Full, PolicyArm::NoSemantic, PolicyArm::NoCascade,
                        PolicyArm::LocalDelete, PolicyArm::SoftDecay, PolicyArm::GeometryOnly})
        if (s == arm_name(a)) return a;
    throw std::invalid_argument("unknown arm: " + s);
}

// Arms that build and consult hypotheses at all.
inline bool arm_semantic(PolicyArm a) {
    return a != PolicyArm::NoSemantic && a != PolicyArm::GeometryOnly;
}

struct ScoringParams {
    double lambda_d = 0.15; // travel cost per meter
    double lambda_h = 0.10; // uncertainty bonus per nat
    double lambda_r = 0.15; // revisit penalty, applied only by the decay arm
};

// Shannon entropy in nats, 0 ln 0 = 0.
inline double entropy(const SemanticDistribution& d) {
    double h = 0.0;
    for (double p : d)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

// Goal-match mass, minus travel cost, plus an uncertainty bonus, minus the
// revisit penalty when active.
inline double exploration_score(const HypothesisPrediction& hyp, int goal_category,
                                double dist_m, const ScoringParams& params,
                                int n_visits) {
    if (goal_category < 0 || goal_category >= static_cast<int>(hyp.distribution.size()))
        throw std::invalid_argument("goal category outside the taxonomy");
    return hyp.distribution[goal_category] - params.lambda_d * dist_m +
           params.lambda_h * entropy(hyp.distribution) - params.lambda_r * n_visits;
}

struct FrontierCandidate {
    Frontier frontier;
    HypothesisPrediction prediction;
    double dist_m = 0.0;
    int n_visits = 0;
};

// Semantic arms take the score argmax; the geometry arms take the nearest
// frontier. Exact ties go to the smallest frontier id.
inline std::size_t select_frontier_index(const std::vector<FrontierCandidate>& candidates,
                                         int goal_category, const ScoringParams& params,
                                         PolicyArm arm) {
    if (candidates.empty()) throw std::invalid_argument("no frontier candidates");
    ScoringParams eff = params;
    if (arm != PolicyArm::SoftDecay) eff.lambda_r = 0.0;
    const bool semantic = arm_semantic(arm);
    std::size_t best = 0;
    double best_key = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const FrontierCandidate& c = candidates[i];
        double key = semantic ? exploration_score(c.prediction, goal_category, c.dist_m,
                                                  eff, c.n_visits)
                              : -c.dist_m;
        bool better = first || key > best_key ||
                      (key == best_key &&
                       c.frontier.id < candidates[best].frontier.id);
        if (better) {
            best = i;
            best_key = key;
            first = false;
        }
    }
    return best;
}

inline Frontier select_frontier(const std::vector<FrontierCandidate>& candidates,
                                int goal_category, const ScoringParams& params,
                                PolicyArm arm) {
    return candidates[select_frontier_index(candidates, goal_category, params, arm)].frontier;
}

// ---------------------------------------------------------------------------
// Residuals

struct ResidualWeights {
    double omega_c = 0.4;
    double omega_f = 0.3;
    double omega_o = 0.3;
    double theta_refute = 0.5;
};

enum class Verdict { Confirmed, Refuted };

struct ResidualReport {
    double delta_c = 0.0;
    double delta_f = 0.0;
    double delta_o = 0.0;
    double delta_sem = 0.0;
    Verdict verdict = Verdict::Confirmed;
};

struct ActualRegion {
    int category = -1;
    std::vector<int> objects;
    std::vector<double> embedding;
};

inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("embedding length mismatch");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 && nb == 0.0) return 1.0; // both degenerate: identical
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Jaccard dissimilarity on object id sets; empty vs empty matches, empty vs
// non-empty is maximal.
inline double object_dissimilarity(std::vector<int> a, std::vector<int> b) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return 1.0;
    std::size_t inter = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    std::size_t uni = a.size() + b.size() - inter;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

namespace detail {
inline ResidualReport residual_weighted(const HypothesisPrediction& pred,
                                        const ActualRegion& actual, double wc, double wf,
                                        double wo, double theta) {
    ResidualReport r;
    double p_actual = 0.0;
    if (actual.category >= 0 &&
        actual.category < static_cast<int>(pred.distribution.size()))
        p_actual = pred.distribution[actual.category];
    r.delta_c = 1.0 - p_actual;
    double sim = cosine_similarity(pred.embedding, actual.embedding);
    r.delta_f = 1.0 - std::clamp(sim, 0.0, 1.0);
    r.delta_o = object_dissimilarity(pred.objects, actual.objects);
    r.delta_sem = wc * r.delta_c + wf * r.delta_f + wo * r.delta_o;
    r.verdict = r.delta_sem > theta ? Verdict::Refuted : Verdict::Confirmed;
    return r;
}
} // namespace detail

inline ResidualReport residual(const HypothesisPrediction& pred, const ActualRegion& actual,
                               const ResidualWeights& w) {
    return detail::residual_weighted(pred, actual, w.omega_c, w.omega_f, w.omega_o,
                                     w.theta_refute);
}

enum class ResidualTerm { Category, Feature, Objects };

// Drop one term; the remaining weights are renormalized proportionally.
inline ResidualReport residual_ablated(const HypothesisPrediction& pred,
                                       const ActualRegion& actual,
                                       const ResidualWeights& w, ResidualTerm drop) {
    double wc = w.omega_c, wf = w.omega_f, wo = w.omega_o;
    switch (drop) {
        case ResidualTerm::Category: wc = 0; break;
        case ResidualTerm::Feature: wf = 0; break;
        case ResidualTerm::Objects: wo = 0; break;
    }
    double rest = wc + wf + wo;
    if (rest <= 0.0) throw std::invalid_argument("all residual weight dropped");
    return detail::residual_weighted(pred, actual, wc / rest, wf / rest, wo / rest,
                                     w.theta_refute);
}

} // namespace scout
