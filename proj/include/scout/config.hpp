#pragma once
// Run configuration: one struct covering world generation, oracle noise,
// agent parameters, task shape, and batch execution, with strict JSON
// loading (unknown keys are hard errors) and a stable echo for provenance.
// Precedence is defaults < config file < command-line flags; the CLI
// applies its flags after load_config.

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "agent.hpp"
#include "batch.hpp"
#include "oracle.hpp"
#include "scenario_io.hpp"
#include "world.hpp"

namespace scout {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    WorldConfig world;
    NoiseConfig noise;
    AgentParams agent;
    int n_goals = 3;
    double min_leg = 1.5;
    double success_radius = 1.0;
    int step_budget = 500;
    int workers = 1;
    std::string external_endpoint;  // used when agent.oracle_mode == External
};

namespace detail {

template <typename T>
inline void take(const ordered_json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline void reject_unknown(const ordered_json& j, const char* section,
                           std::initializer_list<const char*> known) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok)
            throw ConfigError("unknown config key: " + std::string(section) + "." + key);
    }
}

} // namespace detail

// Strict merge of a (possibly partial) JSON config into cfg.
inline void load_config(const ordered_json& j, RunConfig& cfg) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown(j, "$",
                           {"world", "noise", "agent", "scoring", "residuals", "task", "batch"});
    if (j.contains("world")) {
        const auto& w = j.at("world");
        detail::reject_unknown(w, "world",
                               {"width", "height", "resolution", "min_rooms", "max_rooms",
                                "min_room_side", "illusion_density", "mirror_fraction",
                                "door_margin"});
        detail::take(w, "width", cfg.world.width);
        detail::take(w, "height", cfg.world.height);
        detail::take(w, "resolution", cfg.world.resolution);
        detail::take(w, "min_rooms", cfg.world.min_rooms);
        detail::take(w, "max_rooms", cfg.world.max_rooms);
        detail::take(w, "min_room_side", cfg.world.min_room_side);
        detail::take(w, "illusion_density", cfg.world.illusion_density);
        detail::take(w, "mirror_fraction", cfg.world.mirror_fraction);
        detail::take(w, "door_margin", cfg.world.door_margin);
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        detail::reject_unknown(
            n, "noise", {"error_rate", "w_mirror", "w_glass", "w_artwork", "w_occlusion",
                         "rng_seed"});
        detail::take(n, "error_rate", cfg.noise.error_rate);
        detail::take(n, "w_mirror", cfg.noise.w_mirror);
        detail::take(n, "w_glass", cfg.noise.w_glass);
        detail::take(n, "w_artwork", cfg.noise.w_artwork);
        detail::take(n, "w_occlusion", cfg.noise.w_occlusion);
        detail::take(n, "rng_seed", cfg.noise.rng_seed);
    }
    if (j.contains("agent")) {
        const auto& a = j.at("agent");
        detail::reject_unknown(a, "agent",
                               {"perceive_range", "context_radius", "arrival_radius",
                                "merge_radius", "frontier_eps", "frontier_min_samples",
                                "predict_separation", "cells_per_step", "decay_gamma",
                                "attenuate_factor", "hybrid_entropy_gate", "oracle_mode",
                                "external_endpoint"});
        detail::take(a, "perceive_range", cfg.agent.perceive_range);
        detail::take(a, "context_radius", cfg.agent.context_radius);
        detail::take(a, "arrival_radius", cfg.agent.arrival_radius);
        detail::take(a, "merge_radius", cfg.agent.merge_radius);
        detail::take(a, "frontier_eps", cfg.agent.frontier_eps);
        detail::take(a, "frontier_min_samples", cfg.agent.frontier_min_samples);
        detail::take(a, "predict_separation", cfg.agent.predict_separation);
        detail::take(a, "cells_per_step", cfg.agent.cells_per_step);
        detail::take(a, "decay_gamma", cfg.agent.decay_gamma);
        detail::take(a, "attenuate_factor", cfg.agent.attenuate_factor);
        detail::take(a, "hybrid_entropy_gate", cfg.agent.hybrid_entropy_gate);
        if (a.contains("oracle_mode"))
            cfg.agent.oracle_mode = oracle_mode_from_name(a.at("oracle_mode").get<std::string>());
        detail::take(a, "external_endpoint", cfg.external_endpoint);
    }
    if (j.contains("scoring")) {
        const auto& s = j.at("scoring");
        detail::reject_unknown(s, "scoring", {"lambda_d", "lambda_h", "lambda_r"});
        detail::take(s, "lambda_d", cfg.agent.scoring.lambda_d);
        detail::take(s, "lambda_h", cfg.agent.scoring.lambda_h);
        detail::take(s, "lambda_r", cfg.agent.scoring.lambda_r);
    }
    if (j.contains("residuals")) {
        const auto& r = j.at("residuals");
        detail::reject_unknown(r, "residuals", {"omega_c", "omega_f", "omega_o", "theta"});
        detail::take(r, "omega_c", cfg.agent.residuals.omega_c);
        detail::take(r, "omega_f", cfg.agent.residuals.omega_f);
        detail::take(r, "omega_o", cfg.agent.residuals.omega_o);
        detail::take(r, "theta", cfg.agent.residuals.theta_refute);
    }
    if (j.contains("task")) {
        const auto& t = j.at("task");
        detail::reject_unknown(t, "task",
                               {"n_goals", "min_leg", "success_radius", "step_budget"});
        detail::take(t, "n_goals", cfg.n_goals);
        detail::take(t, "min_leg", cfg.min_leg);
        detail::take(t, "success_radius", cfg.success_radius);
        detail::take(t, "step_budget", cfg.step_budget);
    }
    if (j.contains("batch")) {
        const auto& b = j.at("batch");
        detail::reject_unknown(b, "batch", {"workers"});
        detail::take(b, "workers", cfg.workers);
    }
}

inline RunConfig config_from_text(const std::string& text) {
    RunConfig cfg;
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    load_config(j, cfg);
    return cfg;
}

// Full echo in the same shape load_config accepts; round-trips losslessly.
inline ordered_json config_to_json(const RunConfig& cfg) {
    ordered_json j;
    ordered_json w;
    w["width"] = cfg.world.width;
    w["height"] = cfg.world.height;
    w["resolution"] = cfg.world.resolution;
    w["min_rooms"] = cfg.world.min_rooms;
    w["max_rooms"] = cfg.world.max_rooms;
    w["min_room_side"] = cfg.world.min_room_side;
    w["illusion_density"] = cfg.world.illusion_density;
    w["mirror_fraction"] = cfg.world.mirror_fraction;
    w["door_margin"] = cfg.world.door_margin;
    j["world"] = std::move(w);
    ordered_json n;
    n["error_rate"] = cfg.noise.error_rate;
    n["w_mirror"] = cfg.noise.w_mirror;
    n["w_glass"] = cfg.noise.w_glass;
    n["w_artwork"] = cfg.noise.w_artwork;
    n["w_occlusion"] = cfg.noise.w_occlusion;
    n["rng_seed"] = cfg.noise.rng_seed;
    j["noise"] = std::move(n);
    ordered_json a;
    a["perceive_range"] = cfg.agent.perceive_range;
    a["context_radius"] = cfg.agent.context_radius;
    a["arrival_radius"] = cfg.agent.arrival_radius;
    a["merge_radius"] = cfg.agent.merge_radius;
    a["frontier_eps"] = cfg.agent.frontier_eps;
    a["frontier_min_samples"] = cfg.agent.frontier_min_samples;
    a["predict_separation"] = cfg.agent.predict_separation;
    a["cells_per_step"] = cfg.agent.cells_per_step;
    a["decay_gamma"] = cfg.agent.decay_gamma;
    a["attenuate_factor"] = cfg.agent.attenuate_factor;
    a["hybrid_entropy_gate"] = cfg.agent.hybrid_entropy_gate;
    a["oracle_mode"] = oracle_mode_name(cfg.agent.oracle_mode);
    a["external_endpoint"] = cfg.external_endpoint;
    j["agent"] = std::move(a);
    ordered_json s;
    s["lambda_d"] = cfg.agent.scoring.lambda_d;
    s["lambda_h"] = cfg.agent.scoring.lambda_h;
    s["lambda_r"] = cfg.agent.scoring.lambda_r;
    j["scoring"] = std::move(s);
    ordered_json r;
    r["omega_c"] = cfg.agent.residuals.omega_c;
    r["omega_f"] = cfg.agent.residuals.omega_f;
    r["omega_o"] = cfg.agent.residuals.omega_o;
    r["theta"] = cfg.agent.residuals.theta_refute;
    j["residuals"] = std::move(r);
    ordered_json t;
    t["n_goals"] = cfg.n_goals;
    t["min_leg"] = cfg.min_leg;
    t["success_radius"] = cfg.success_radius;
    t["step_budget"] = cfg.step_budget;
    j["task"] = std::move(t);
    ordered_json b;
    b["workers"] = cfg.workers;
    j["batch"] = std::move(b);
    return j;
}

// Evaluation preset: a floor plan large enough that exploration order and
// remembered structure dominate outcomes, rather than a single sweep of
// line of sight. Type defaults stay at their small documented values; this
// is the configuration the benchmark and ablation commands use.
inline RunConfig benchmark_config() {
    RunConfig cfg;
    cfg.world.width = 160;
    cfg.world.height = 160;
    cfg.world.min_rooms = 7;
    cfg.world.max_rooms = 10;
    cfg.n_goals = 4;
    cfg.min_leg = 3.0;
    return cfg;
}

inline BatchConfig batch_config(const RunConfig& cfg) {
    BatchConfig b;
    b.world = cfg.world;
    b.noise = cfg.noise;
    b.params = cfg.agent;
    b.n_goals = cfg.n_goals;
    b.min_leg = cfg.min_leg;
    b.success_radius = cfg.success_radius;
    b.step_budget = cfg.step_budget;
    b.workers = cfg.workers;
    return b;
}

} // namespace scout
