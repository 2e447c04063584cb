#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kacq/classical_attack.hpp"
#include "kacq/oracle.hpp"

namespace kacq {

// Parameters of the Johnson-product walk:
//   |S_0| = alpha*N_c, |S_i| = alpha*N_q, N_c*N_q^t = 2^{nt},
//   N_c = N_q^{m/(m+1)} with m = t(t+1), alpha = (t+1)^{1/(t+1)}.
// The balanced solution gives the query exponent gamma = m/((t+1)^2+1).
struct WalkPlan {
    int n = 0;
    int t = 0;
    double alpha = 0.0;
    double n_c = 0.0;  // classical query budget scale (real-valued solution)
    double n_q = 0.0;
    int set_size = 0;  // |S_1| = ... = |S_t| = ceil(alpha*N_q)
    int s0_size = 0;   // |S_0| = ceil(alpha*N_c)
    int r = 0;         // walk subset size
    int mixed_access_index = -1;  // quantum access restricted to P_j if >= 1
    std::vector<std::vector<Word>> sets;  // S_0 .. S_t once sampled

    double gamma() const {
        return static_cast<double>(t * (t + 1)) / static_cast<double>((t + 1) * (t + 1) + 1);
    }
    // Marked-fraction lower bound (r/T)^{t(t+1)} used for cost and budgets.
    double epsilon_formula() const;
};

// Sizes and the closed-form r = round(T^{m/(m+1)}); sets are left empty.
WalkPlan plan_parameters(int n, int t, int mixed_access_index = -1);
// Desk-scale profile for running the emulation at small n: same sizes, but a
// larger subset fraction so the budgeted walk has a workable hit rate.
WalkPlan desk_profile(int n, int t, int mixed_access_index = -1);
void sample_plan_sets(WalkPlan& plan, Rng& rng);

// MNRS cost record: total = S + (1/sqrt(eps)) * (U/sqrt(delta) + C).
struct WalkCostModel {
    double setup = 0.0;   // t*r
    double update = 0.0;  // t
    double check = 0.0;   // 0
    double delta = 0.0;   // spectral gap, min over the t Johnson components
    double epsilon = 0.0;
    double total = 0.0;
};

WalkCostModel walk_cost_model(const WalkPlan& plan);
// Same model for an arbitrary subset size; used for sweeps over r.
WalkCostModel walk_cost_for_r(int t, int set_size, int r);
double johnson_spectral_gap(int set_size, int r);

// A walk vertex: one size-r subset per permutation plus the cached images
// d(V) = { P_i(x) : x in V_i }.
struct WalkVertex {
    std::vector<std::vector<Word>> elems;  // V_1 .. V_t
    std::vector<std::vector<Word>> data;   // data[i][k] = P_{i+1}(elems[i][k])
};

struct VertexWitness {
    PackedKey key = 0;
    std::uint32_t multiplicity = 0;
    bool refuted = false;  // some cache-covered tuple contradicts the candidate
};

struct MarkedCheck {
    bool marked = false;
    std::vector<VertexWitness> witnesses;  // candidates with multiplicity >= t+1
};

// Enumerates S_0 x V_1 x ... x V_t against the cached transcript. Issues no
// oracle queries. A vertex is marked when some candidate is generated by at
// least t+1 distinct tuples.
MarkedCheck is_marked_vertex(const WalkVertex& vertex, std::span<const Word> s0,
                             std::span<const Word> e_of_s0, int n, int t);

struct WalkResult {
    int n = 0;
    int t = 0;
    int r = 0;
    int set_size = 0;
    int s0_size = 0;
    int steps_taken = 0;
    int budget = 0;
    bool success = false;
    std::optional<std::vector<Word>> key;
    double epsilon_formula = 0.0;
    WalkCostModel cost;
    int marked_seen = 0;    // marked vertices visited (including refuted ones)
    int refuted_stops = 0;  // marked vertices whose every witness was refuted
    std::string stop_reason;
    QueryLedger ledger;
    std::optional<WalkVertex> final_vertex;  // where the walk ended
};

// Classical emulation of the walk search: random start vertex (t*r quantum
// queries), each step exchanges one element in every component (t quantum
// queries), marked check after every step (0 queries). At a marked vertex the
// key is extracted from the unrefuted witnesses of highest multiplicity; if
// every witness is refuted the walk keeps going. Budget defaults to
// ceil(50/sqrt(epsilon_formula)).
WalkResult emulate_walk_search(const KacInstance& inst, const WalkPlan& plan, Rng& rng,
                               std::optional<int> step_budget = std::nullopt);

struct MarkedFraction {
    int samples = 0;
    int marked = 0;
    double fraction = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// Fraction of uniformly random vertices that are marked, with a normal-
// approximation confidence interval.
MarkedFraction measure_marked_fraction(const KacInstance& inst, const WalkPlan& plan, int samples,
                                       Rng& rng);

// Instance + plan where the sets contain `chains` full true-key chains and
// r = |S_i|, so the single vertex of the graph is marked at step 0.
struct PlantedWalk {
    KacInstance inst;
    WalkPlan plan;
};
PlantedWalk make_planted_walk(int n, int t, Rng& rng, int chains = 0);  // default t+2

}  // namespace kacq
