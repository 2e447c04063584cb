#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kacq/oracle.hpp"

namespace kacq {

// Oracle traffic of one predicate evaluation, constant across evaluations.
struct OracleCost {
    OracleId oracle;
    Dir dir;
    std::uint32_t count = 1;
};

// A boolean function on [0, 2^bits) together with its per-evaluation cost.
struct PredicateOracle {
    int domain_bits = 0;
    std::function<bool(Word)> eval;
    std::vector<OracleCost> cost_per_eval;

    std::uint64_t domain_size() const { return std::uint64_t{1} << domain_bits; }
};

struct GroverReport {
    std::uint64_t domain = 0;
    std::uint64_t marked_count = 0;
    std::uint64_t iterations = 0;
    double theta = 0.0;         // arcsin(sqrt(|M|/N))
    double success_prob = 0.0;  // sin^2((2m+1) theta)
    std::optional<Word> sample;
};

// Exact Grover dynamics in the two-dimensional invariant subspace.
//
// The marked set is found by exhaustively evaluating the predicate; that
// pass is charged to `verification_ledger` (if given), never to the attack:
// the attack pays `iterations` times the per-evaluation cost into `ledger`.
// When |M| = 0 the report carries success_prob 0 and no sample.
GroverReport grover_run(const PredicateOracle& pred, std::optional<std::uint64_t> iterations, Rng& rng,
                        QueryLedger* ledger = nullptr, QueryLedger* verification_ledger = nullptr);

struct GroverAttackResult {
    std::string attack_name;
    int n = 0;
    int t = 0;
    bool success = false;         // sampled candidate passed verification
    std::vector<Word> keys;       // recovered key words (layout depends on the attack)
    std::uint64_t iterations = 0; // summed over retries
    int tries = 0;
    double success_prob_theoretical = 0.0;  // single-run engine probability
    QueryLedger ledger;
    QueryLedger verification_ledger;
};

// Same-key t-KAC: one classical pair (x, y), Grover over key candidates i
// with f(i) = [ i ^ P_t(i ^ ... P_1(i ^ x)) == y ]; each evaluation costs one
// quantum query to each P_i. A sampled candidate is verified against a second
// classical pair; on mismatch the search reruns (up to max_tries).
GroverAttackResult attack_same_key(const KacInstance& inst, Rng& rng, int max_tries = 16);

// 2-KAC with schedule (k0, k1, k0): two classical pairs, Grover over k0
// candidates with f1(i) = P_1(x1^i) ^ P_2^{-1}(y1^i) proposing k1 and
// f2(i) = [ P_2(P_1(x2^i) ^ f1(i)) ^ i == y2 ]; 4 quantum queries per
// evaluation (P_1, P_2^{-1}, P_1, P_2). Returns (k0, k1).
GroverAttackResult attack_first_last_equal(const KacInstance& inst, Rng& rng, int max_tries = 16);

// t-KAC with all keys equal except slot j: Grover over the repeated key i,
// tracing forward from x1 through P_1..P_j and backward from y1 through
// P_t^{-1}..P_{j+1}^{-1}; the distinct key candidate is the XOR of the two
// trace values at slot j, checked by re-encrypting x2. Returns (k*, k_j).
GroverAttackResult attack_repeated_keys(const KacInstance& inst, Rng& rng, int max_tries = 16);

}  // namespace kacq
