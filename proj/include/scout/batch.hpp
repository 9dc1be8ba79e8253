#pragma once
// Matched-seed batches: every arm replays the identical (world, task,
// oracle-noise) realization per seed, so cross-arm comparisons are paired.
// Episodes are independent; a small worker pool pulls jobs from an atomic
// counter and writes into pre-sized slots, which keeps the output order
// (and bytes) independent of scheduling.

#include <atomic>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "agent.hpp"
#include "oracle.hpp"
#include "policy.hpp"
#include "taxonomy.hpp"
#include "trace.hpp"
#include "world.hpp"

namespace scout {

struct BatchConfig {
    WorldConfig world;
    NoiseConfig noise;   // rng_seed == 0 derives a per-seed stream shared by arms
    AgentParams params;
    int n_goals = 3;
    double min_leg = 1.5;
    double success_radius = 1.0;
    int step_budget = 500;
    int workers = 1;
};

inline std::uint64_t derive_noise_seed(std::uint64_t seed) {
    return hash_key(seed, 0x6e6f697365ULL);
}

// Seeds [seed_begin, seed_end) crossed with the arm list, ordered seed-major
// then by the arm list. A failed episode yields a trace whose `error` field
// carries the reason; the batch never aborts.
inline std::vector<EpisodeTrace> run_batch(std::uint64_t seed_begin, std::uint64_t seed_end,
                                           const std::vector<PolicyArm>& arms,
                                           const BatchConfig& cfg, const Taxonomy& tax) {
    if (arms.empty()) throw std::invalid_argument("batch needs at least one arm");
    if (seed_end < seed_begin) throw std::invalid_argument("empty seed range");

    struct Job {
        std::uint64_t seed;
        PolicyArm arm;
    };
    std::vector<Job> jobs;
    for (std::uint64_t s = seed_begin; s < seed_end; ++s)
        for (PolicyArm a : arms) jobs.push_back({s, a});

    std::vector<EpisodeTrace> traces(jobs.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            EpisodeTrace t;
            try {
                World w = generate_world(cfg.world, job.seed, tax);
                Task task = make_task(w, tax, job.seed, cfg.n_goals, cfg.min_leg);
                task.success_radius = cfg.success_radius;
                task.step_budget = cfg.step_budget;
                NoiseConfig noise = cfg.noise;
                if (noise.rng_seed == 0) noise.rng_seed = derive_noise_seed(job.seed);
                t = run_episode(w, tax, task, job.arm, noise, cfg.params, job.seed);
            } catch (const std::exception& e) {
                t = EpisodeTrace{};
                t.seed = job.seed;
                t.arm = arm_name(job.arm);
                t.error = e.what();
            }
            traces[i] = std::move(t);
        }
    };

    int n_workers = std::max(1, cfg.workers);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    return traces;
}

} // namespace scout
