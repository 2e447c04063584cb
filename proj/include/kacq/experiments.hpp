#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "kacq/bounds.hpp"
#include "kacq/classical_attack.hpp"
#include "kacq/grover.hpp"
#include "kacq/hybrid.hpp"
#include "kacq/walk.hpp"

namespace kacq {

// Batch drivers behind the CLI and the python module. Every driver derives
// per-trial RNG streams from (seed, trial index), so results are identical
// for any worker count.
struct BatchConfig {
    std::uint64_t seed = 1;
    int trials = 1;
    int workers = 1;
};

nlohmann::ordered_json run_classical_batch(int n, int t, double beta, const BatchConfig& cfg);

enum class GroverAttackKind { SameKey, FirstLastEqual, RepeatedKeys };
nlohmann::ordered_json run_grover_batch(GroverAttackKind kind, int n, int t, int repeated_index,
                                        const BatchConfig& cfg, int max_tries = 16);

struct WalkBatchOptions {
    std::optional<int> r_override;      // default: desk profile
    int mixed_access_index = -1;        // quantum access through P_j only
    std::optional<int> step_budget;     // default: ceil(50/sqrt(eps_formula))
    int epsilon_samples = 0;            // measure empirical marked fraction per trial
    bool planted = false;               // planted single-vertex instance
};
nlohmann::ordered_json run_walk_batch(int n, int t, const WalkBatchOptions& options,
                                      const BatchConfig& cfg);

// Cost-model sweep over r = 1..T at the plan sizes for (n, t); CSV rows.
std::string walk_cost_sweep_csv(int n, int t);

nlohmann::ordered_json run_hybrid_report(int n, int q_e, int q_p1, int q_p2, int samples,
                                         std::uint64_t seed);

// Exhaustive cross-checks at small n: attack outputs confirmed against
// brute-force key search over the full key space. Caps n at 6.
nlohmann::ordered_json run_verify_suite(int n, std::uint64_t seed);

// Minimal f(trial_index) fan-out preserving per-index determinism.
void parallel_for_trials(int trials, int workers, const std::function<void(int)>& body);

}  // namespace kacq
