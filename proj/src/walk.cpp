#include "kacq/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace kacq {

namespace {

// Open-addressing counter for packed keys; the vertex scan is the hot loop
// of the whole emulation (|S_0| * r^t increments per step).
class FlatCounter {
public:
    void reset(std::size_t expected) {
        std::size_t want = 16;
        while (want < expected * 2) want <<= 1;
        if (want != keys_.size()) {
            keys_.assign(want, 0);
            counts_.assign(want, 0);
            stamps_.assign(want, 0);
            mask_ = want - 1;
        }
        ++epoch_;
        entries_.clear();
    }

    std::uint32_t increment(PackedKey key) {
        std::size_t slot = static_cast<std::size_t>(mix64(key)) & mask_;
        for (;;) {
            if (stamps_[slot] != epoch_) {
                stamps_[slot] = epoch_;
                keys_[slot] = key;
                counts_[slot] = 1;
                entries_.push_back(slot);
                return 1;
            }
            if (keys_[slot] == key) return ++counts_[slot];
            slot = (slot + 1) & mask_;
        }
    }

    std::uint32_t count(PackedKey key) const {
        std::size_t slot = static_cast<std::size_t>(mix64(key)) & mask_;
        for (;;) {
            if (stamps_[slot] != epoch_) return 0;
            if (keys_[slot] == key) return counts_[slot];
            slot = (slot + 1) & mask_;
        }
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t slot : entries_) fn(keys_[slot], counts_[slot]);
    }

private:
    std::vector<PackedKey> keys_;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint32_t> stamps_;
    std::vector<std::size_t> entries_;
    std::size_t mask_ = 0;
    std::uint32_t epoch_ = 0;
};

}  // namespace

double WalkPlan::epsilon_formula() const {
    return std::pow(static_cast<double>(r) / static_cast<double>(set_size), t * (t + 1));
}

WalkPlan plan_parameters(int n, int t, int mixed_access_index) {
    if (n < kMinRandomBlockBits || n > kMaxBlockBits || t < 1) {
        throw std::invalid_argument("plan_parameters: unsupported (n, t)");
    }
    if (mixed_access_index != -1 && (mixed_access_index < 1 || mixed_access_index > t)) {
        throw std::invalid_argument("plan_parameters: mixed access index must name one of P_1..P_t");
    }
    const int m = t * (t + 1);
    const double denom = static_cast<double>((t + 1) * (t + 1) + 1);
    WalkPlan plan;
    plan.n = n;
    plan.t = t;
    plan.alpha = std::pow(static_cast<double>(t + 1), 1.0 / (t + 1));
    // N_c * N_q^t = 2^{nt} and N_c = N_q^{m/(m+1)} give
    // N_q = 2^{n(m+1)/((t+1)^2+1)} and N_c = 2^{n*m/((t+1)^2+1)} = 2^{gamma*n}.
    plan.n_q = std::exp2(static_cast<double>(n) * (m + 1) / denom);
    plan.n_c = std::exp2(static_cast<double>(n) * m / denom);
    plan.set_size = static_cast<int>(std::ceil(plan.alpha * plan.n_q));
    plan.s0_size = static_cast<int>(std::ceil(plan.alpha * plan.n_c));
    const double domain = std::ldexp(1.0, n);
    if (plan.set_size > domain || plan.s0_size > domain) {
        throw std::invalid_argument("plan_parameters: sets do not fit in the domain at this (n, t)");
    }
    plan.r = std::max(t + 1, static_cast<int>(std::llround(
                                 std::pow(static_cast<double>(plan.set_size),
                                          static_cast<double>(m) / (m + 1)))));
    plan.r = std::min(plan.r, plan.set_size);
    plan.mixed_access_index = mixed_access_index;
    return plan;
}

WalkPlan desk_profile(int n, int t, int mixed_access_index) {
    WalkPlan plan = plan_parameters(n, t, mixed_access_index);
    // Larger subsets trade queries for reliability at small n: the accidental
    // (t+1)-collision marks that stop the walk on a wrong candidate grow more
    // slowly with r than the true-key marks, so the recovery rate climbs with
    // r. 0.86*T was tuned on seeded runs of the n=8, t=2 profile.
    plan.r = std::clamp(static_cast<int>(std::llround(0.86 * plan.set_size)), t + 2, plan.set_size);
    return plan;
}

void sample_plan_sets(WalkPlan& plan, Rng& rng) {
    plan.sets.clear();
    plan.sets.reserve(static_cast<std::size_t>(plan.t) + 1);
    const std::uint64_t domain = std::uint64_t{1} << plan.n;
    plan.sets.push_back(sample_distinct(domain, static_cast<std::size_t>(plan.s0_size), rng));
    for (int i = 1; i <= plan.t; ++i) {
        plan.sets.push_back(sample_distinct(domain, static_cast<std::size_t>(plan.set_size), rng));
    }
}

double johnson_spectral_gap(int set_size, int r) {
    if (r < 1 || r > set_size) throw std::invalid_argument("johnson_spectral_gap: need 1 <= r <= |S|");
    if (r == set_size) return 0.0;  // single-vertex component
    return static_cast<double>(set_size - r) /
           (static_cast<double>(r) * static_cast<double>(set_size - r + 1));
}

WalkCostModel walk_cost_for_r(int t, int set_size, int r) {
    if (r > set_size) throw std::invalid_argument("walk_cost_for_r: r exceeds |S|");
    WalkCostModel c;
    c.setup = static_cast<double>(t) * r;
    c.update = static_cast<double>(t);
    c.check = 0.0;
    c.delta = johnson_spectral_gap(set_size, r);  // product gap = min over equal components
    c.epsilon = std::pow(static_cast<double>(r) / static_cast<double>(set_size), t * (t + 1));
    if (c.delta <= 0.0) {
        c.total = c.setup;  // degenerate one-vertex walk: setup only
    } else {
        c.total = c.setup + (1.0 / std::sqrt(c.epsilon)) * (c.update / std::sqrt(c.delta) + c.check);
    }
    return c;
}

WalkCostModel walk_cost_model(const WalkPlan& plan) {
    return walk_cost_for_r(plan.t, plan.set_size, plan.r);
}

namespace {

// Shared tuple scan. Counts full candidates and their (kappa_0..kappa_{t-1})
// prefixes; a winner whose prefix coverage exceeds its multiplicity is
// contradicted by a cached tuple.
struct VertexScan {
    FlatCounter cand_counts;
    FlatCounter prefix_counts;

    void run(const WalkVertex& vertex, std::span<const Word> s0, std::span<const Word> e_of_s0,
             int n, int t) {
        if ((t + 1) * n > 64) throw std::invalid_argument("vertex scan: (t+1)*n exceeds 64 bits");
        std::size_t tuples = s0.size();
        for (const auto& comp : vertex.elems) tuples *= comp.size();
        cand_counts.reset(tuples);
        prefix_counts.reset(tuples);

        std::vector<std::size_t> idx(static_cast<std::size_t>(t), 0);
        for (;;) {
            PackedKey mid = 0;  // kappa_1 .. kappa_{t-1}
            for (int i = 1; i < t; ++i) {
                const Word kappa = vertex.data[static_cast<std::size_t>(i - 1)][idx[static_cast<std::size_t>(i - 1)]] ^
                                   vertex.elems[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
                mid = (mid << n) | kappa;
            }
            const Word x1 = vertex.elems[0][idx[0]];
            const Word pt_last = vertex.data[static_cast<std::size_t>(t - 1)][idx[static_cast<std::size_t>(t - 1)]];
            for (std::size_t i0 = 0; i0 < s0.size(); ++i0) {
                const Word kappa0 = s0[i0] ^ x1;
                const PackedKey prefix = (static_cast<PackedKey>(kappa0) << ((t - 1) * n)) | mid;
                const PackedKey cand = (prefix << n) | (pt_last ^ e_of_s0[i0]);
                cand_counts.increment(cand);
                prefix_counts.increment(prefix);
            }
            int pos = t - 1;
            while (pos >= 0) {
                if (++idx[static_cast<std::size_t>(pos)] < vertex.elems[static_cast<std::size_t>(pos)].size()) break;
                idx[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }

    MarkedCheck collect(int n, int t) const {
        MarkedCheck out;
        const auto threshold = static_cast<std::uint32_t>(t + 1);
        cand_counts.for_each([&](PackedKey cand, std::uint32_t count) {
            if (count < threshold) return;
            VertexWitness w;
            w.key = cand;
            w.multiplicity = count;
            w.refuted = prefix_counts.count(cand >> n) != count;
            out.witnesses.push_back(w);
        });
        out.marked = !out.witnesses.empty();
        return out;
    }
};

}  // namespace

MarkedCheck is_marked_vertex(const WalkVertex& vertex, std::span<const Word> s0,
                             std::span<const Word> e_of_s0, int n, int t) {
    if (vertex.elems.size() != static_cast<std::size_t>(t) || vertex.data.size() != vertex.elems.size()) {
        throw std::invalid_argument("is_marked_vertex: vertex has wrong arity");
    }
    if (s0.size() != e_of_s0.size()) throw std::invalid_argument("is_marked_vertex: transcript incomplete");
    for (std::size_t i = 0; i < vertex.elems.size(); ++i) {
        if (vertex.elems[i].size() != vertex.data[i].size()) {
            throw std::invalid_argument("is_marked_vertex: cached data incomplete");
        }
    }
    VertexScan scan;
    scan.run(vertex, s0, e_of_s0, n, t);
    return scan.collect(n, t);
}

namespace {

std::optional<PackedKey> pick_witness(const MarkedCheck& check, Rng& rng) {
    std::uint32_t best = 0;
    std::vector<PackedKey> top;
    for (const auto& w : check.witnesses) {
        if (w.refuted) continue;
        if (w.multiplicity > best) {
            best = w.multiplicity;
            top.clear();
        }
        if (w.multiplicity == best) top.push_back(w.key);
    }
    if (top.empty()) return std::nullopt;
    return top[rng.below(top.size())];
}

}  // namespace

WalkResult emulate_walk_search(const KacInstance& inst, const WalkPlan& plan, Rng& rng,
                               std::optional<int> step_budget) {
    if (plan.sets.size() != static_cast<std::size_t>(plan.t) + 1) {
        throw std::invalid_argument("emulate_walk_search: plan sets not sampled");
    }
    WalkResult result;
    result.n = plan.n;
    result.t = plan.t;
    result.r = plan.r;
    result.set_size = plan.set_size;
    result.s0_size = plan.s0_size;
    result.epsilon_formula = plan.epsilon_formula();
    result.cost = walk_cost_model(plan);
    result.budget = step_budget.value_or(
        static_cast<int>(std::ceil(50.0 / std::sqrt(result.epsilon_formula))));
    result.ledger = QueryLedger(plan.t);

    const AccessPolicy policy = plan.mixed_access_index >= 1
                                    ? AccessPolicy::mixed(plan.t, {plan.mixed_access_index})
                                    : AccessPolicy::q1(plan.t);
    OracleSuite suite(inst, policy, result.ledger);

    // Classical initialization: the full E transcript on S_0.
    const auto& s0 = plan.sets[0];
    std::vector<Word> e_vals;
    e_vals.reserve(s0.size());
    for (Word x : s0) e_vals.push_back(suite.cipher().classical(Dir::Forward, x));

    // Fetch one cached image; quantum through the coherent oracles, classical
    // through the rest under a mixed policy. Totals are identical either way.
    const auto fetch = [&](int comp, Word x) {
        OracleHandle& h = suite.perm(comp + 1);
        const bool coherent = plan.mixed_access_index < 1 || plan.mixed_access_index == comp + 1;
        return coherent ? h.quantum_point(Dir::Forward, x) : h.classical(Dir::Forward, x);
    };

    // Setup: a random r-subset per component, one query per cached element.
    WalkVertex vertex;
    std::vector<std::vector<Word>> outside(static_cast<std::size_t>(plan.t));
    vertex.elems.resize(static_cast<std::size_t>(plan.t));
    vertex.data.resize(static_cast<std::size_t>(plan.t));
    for (int c = 0; c < plan.t; ++c) {
        auto pool = plan.sets[static_cast<std::size_t>(c) + 1];
        shuffle(pool, rng);
        auto& elems = vertex.elems[static_cast<std::size_t>(c)];
        elems.assign(pool.begin(), pool.begin() + plan.r);
        outside[static_cast<std::size_t>(c)].assign(pool.begin() + plan.r, pool.end());
        auto& data = vertex.data[static_cast<std::size_t>(c)];
        data.reserve(elems.size());
        for (Word x : elems) data.push_back(fetch(c, x));
    }

    VertexScan scan;
    for (int step = 0;; ++step) {
        result.steps_taken = step;
        scan.run(vertex, s0, e_vals, plan.n, plan.t);
        const MarkedCheck check = scan.collect(plan.n, plan.t);
        if (check.marked) {
            ++result.marked_seen;
            if (auto key = pick_witness(check, rng)) {
                result.success = true;
                result.key = unpack_words(*key, plan.n, plan.t + 1);
                result.stop_reason = "key-recovered";
                result.final_vertex = std::move(vertex);
                return result;
            }
            ++result.refuted_stops;
        }
        if (step >= result.budget) break;
        // Product-graph move: every component exchanges one element.
        for (int c = 0; c < plan.t; ++c) {
            auto& elems = vertex.elems[static_cast<std::size_t>(c)];
            auto& data = vertex.data[static_cast<std::size_t>(c)];
            auto& out = outside[static_cast<std::size_t>(c)];
            if (out.empty()) continue;  // r = |S_i|: the component graph is a point
            const std::size_t drop = rng.below(elems.size());
            const std::size_t add = rng.below(out.size());
            std::swap(elems[drop], out[add]);
            data[drop] = fetch(c, elems[drop]);
        }
    }
    result.stop_reason = "budget-exhausted";
    result.final_vertex = std::move(vertex);
    return result;
}

MarkedFraction measure_marked_fraction(const KacInstance& inst, const WalkPlan& plan, int samples,
                                       Rng& rng) {
    if (plan.sets.size() != static_cast<std::size_t>(plan.t) + 1) {
        throw std::invalid_argument("measure_marked_fraction: plan sets not sampled");
    }
    const auto& s0 = plan.sets[0];
    std::vector<Word> e_vals;
    e_vals.reserve(s0.size());
    for (Word x : s0) e_vals.push_back(inst.encrypt(x));

    MarkedFraction out;
    out.samples = samples;
    VertexScan scan;
    WalkVertex vertex;
    vertex.elems.resize(static_cast<std::size_t>(plan.t));
    vertex.data.resize(static_cast<std::size_t>(plan.t));
    for (int s = 0; s < samples; ++s) {
        for (int c = 0; c < plan.t; ++c) {
            auto pool = plan.sets[static_cast<std::size_t>(c) + 1];
            for (int k = 0; k < plan.r; ++k) {
                const auto j = k + static_cast<int>(rng.below(pool.size() - static_cast<std::size_t>(k)));
                std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(j)]);
            }
            pool.resize(static_cast<std::size_t>(plan.r));
            auto& elems = vertex.elems[static_cast<std::size_t>(c)];
            elems = std::move(pool);
            auto& data = vertex.data[static_cast<std::size_t>(c)];
            data.clear();
            for (Word x : elems) data.push_back(inst.perms[static_cast<std::size_t>(c)].forward(x));
        }
        scan.run(vertex, s0, e_vals, plan.n, plan.t);
        bool marked = false;
        const auto threshold = static_cast<std::uint32_t>(plan.t + 1);
        scan.cand_counts.for_each([&](PackedKey, std::uint32_t count) {
            marked |= (count >= threshold);
        });
        out.marked += marked;
    }
    out.fraction = samples > 0 ? static_cast<double>(out.marked) / samples : 0.0;
    const double se = samples > 0 ? std::sqrt(std::max(out.fraction * (1.0 - out.fraction), 1e-12) /
                                              samples)
                                  : 0.0;
    out.ci_low = std::max(0.0, out.fraction - 1.96 * se);
    out.ci_high = std::min(1.0, out.fraction + 1.96 * se);
    return out;
}

PlantedWalk make_planted_walk(int n, int t, Rng& rng, int chains) {
    if (chains <= 0) chains = t + 2;
    PlantedWalk planted;
    planted.inst = sample_kac_instance(n, t, KeyDistribution::independent(), rng);
    planted.plan = plan_parameters(n, t);
    WalkPlan& plan = planted.plan;
    const KacInstance& inst = planted.inst;
    if (chains > plan.s0_size) throw std::invalid_argument("make_planted_walk: too many chains");

    // Chains are determined by their x_0: x_1 = x_0 ^ k_0, x_{i+1} = P_i(x_i) ^ k_i.
    const auto x0s = sample_distinct(std::uint64_t{1} << n, static_cast<std::size_t>(chains), rng);
    std::vector<std::unordered_set<Word>> members(static_cast<std::size_t>(t) + 1);
    for (Word x0 : x0s) {
        members[0].insert(x0);
        Word v = x0;
        for (int i = 0; i < t; ++i) {
            v ^= inst.schedule.keys[static_cast<std::size_t>(i)];
            members[static_cast<std::size_t>(i) + 1].insert(v);
            v = inst.perms[static_cast<std::size_t>(i)].forward(v);
        }
    }

    // Fill each set to size with fresh random elements around the planted ones.
    plan.sets.assign(static_cast<std::size_t>(t) + 1, {});
    const std::uint64_t domain = std::uint64_t{1} << n;
    for (int i = 0; i <= t; ++i) {
        const std::size_t want = static_cast<std::size_t>(i == 0 ? plan.s0_size : plan.set_size);
        auto& set = plan.sets[static_cast<std::size_t>(i)];
        auto& present = members[static_cast<std::size_t>(i)];
        set.assign(present.begin(), present.end());
        while (set.size() < want) {
            const auto v = static_cast<Word>(rng.below(domain));
            if (present.insert(v).second) set.push_back(v);
        }
    }
    plan.r = plan.set_size;  // single-vertex graph: the start vertex is marked
    return planted;
}

}  // namespace kacq
