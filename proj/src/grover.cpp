#include "kacq/grover.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kacq {

namespace {

void charge(QueryLedger* ledger, const std::vector<OracleCost>& costs, std::uint64_t times) {
    if (!ledger || times == 0) return;
    for (const auto& c : costs) ledger->add_quantum(c.oracle, c.dir, c.count * times);
}

}  // namespace

GroverReport grover_run(const PredicateOracle& pred, std::optional<std::uint64_t> iterations, Rng& rng,
                        QueryLedger* ledger, QueryLedger* verification_ledger) {
    if (pred.domain_bits < 1 || pred.domain_bits > kMaxBlockBits) {
        throw std::invalid_argument("grover_run: domain must be a power of two within 2^1..2^24");
    }
    const std::uint64_t N = pred.domain_size();

    // Exhaustive pass locating the marked set. This is the desk-scale
    // verification oracle, bookkept apart from the attack's own cost.
    std::vector<Word> marked;
    std::vector<Word> unmarked;
    for (std::uint64_t x = 0; x < N; ++x) {
        if (pred.eval(static_cast<Word>(x))) marked.push_back(static_cast<Word>(x));
        else unmarked.push_back(static_cast<Word>(x));
    }
    charge(verification_ledger, pred.cost_per_eval, N);

    GroverReport report;
    report.domain = N;
    report.marked_count = marked.size();
    if (marked.empty()) {
        report.iterations = iterations.value_or(0);
        charge(ledger, pred.cost_per_eval, report.iterations);
        return report;
    }

    report.theta = std::asin(std::sqrt(static_cast<double>(marked.size()) / static_cast<double>(N)));
    report.iterations = iterations.value_or(static_cast<std::uint64_t>(
        std::floor(std::numbers::pi / 4.0 *
                   std::sqrt(static_cast<double>(N) / static_cast<double>(marked.size())))));
    const double angle = (2.0 * static_cast<double>(report.iterations) + 1.0) * report.theta;
    const double s = std::sin(angle);
    report.success_prob = s * s;
    charge(ledger, pred.cost_per_eval, report.iterations);

    // Measurement: the state lives in span{uniform-marked, uniform-unmarked},
    // so the outcome is uniform within whichever class is sampled.
    if (unmarked.empty() || rng.bernoulli(report.success_prob)) {
        report.sample = marked[rng.below(marked.size())];
    } else {
        report.sample = unmarked[rng.below(unmarked.size())];
    }
    return report;
}

namespace {

struct ClassicalPair {
    Word x;
    Word y;
};

// Fetch a fresh classical plaintext/ciphertext pair, distinct from any in `used`.
ClassicalPair fresh_pair(OracleSuite& suite, const KacInstance& inst, Rng& rng,
                         const std::vector<ClassicalPair>& used) {
    for (;;) {
        const Word x = static_cast<Word>(rng.below(std::uint64_t{1} << inst.n));
        bool clash = false;
        for (const auto& p : used) clash |= (p.x == x);
        if (clash) continue;
        return {x, suite.cipher().classical(Dir::Forward, x)};
    }
}

void run_verified_grover(const KacInstance& inst, Rng& rng, int max_tries, const std::string& name,
                         const PredicateOracle& pred, const std::function<bool(Word)>& verify,
                         const std::function<std::vector<Word>(Word)>& extract_keys,
                         GroverAttackResult& result) {
    result.attack_name = name;
    result.n = inst.n;
    result.t = inst.t;
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        const GroverReport report =
            grover_run(pred, std::nullopt, rng, &result.ledger, &result.verification_ledger);
        result.iterations += report.iterations;
        result.tries = attempt + 1;
        result.success_prob_theoretical = report.success_prob;
        if (!report.sample) break;  // nothing marked; retrying cannot help
        if (verify(*report.sample)) {
            result.success = true;
            result.keys = extract_keys(*report.sample);
            break;
        }
    }
}

}  // namespace

GroverAttackResult attack_same_key(const KacInstance& inst, Rng& rng, int max_tries) {
    if (inst.dist.tag != KeyDistTag::AllEqual) {
        throw std::invalid_argument("attack_same_key requires an all-equal key schedule");
    }
    GroverAttackResult result;
    result.ledger = QueryLedger(inst.t);
    result.verification_ledger = QueryLedger(inst.t);
    const AccessPolicy policy = AccessPolicy::q1(inst.t);
    OracleSuite suite(inst, policy, result.ledger);

    const ClassicalPair pair1 = fresh_pair(suite, inst, rng, {});
    const ClassicalPair pair2 = fresh_pair(suite, inst, rng, {pair1});

    const auto chain = [&inst](Word i, Word x) {
        Word v = x;
        for (int l = 0; l < inst.t; ++l) v = inst.perms[static_cast<std::size_t>(l)].forward(v ^ i);
        return static_cast<Word>(v ^ i);
    };

    PredicateOracle pred;
    pred.domain_bits = inst.n;
    pred.eval = [&chain, pair1](Word i) { return chain(i, pair1.x) == pair1.y; };
    for (int l = 1; l <= inst.t; ++l) pred.cost_per_eval.push_back({OracleId::perm(l), Dir::Forward, 1});

    // Verification re-encrypts the held-out pair with the candidate key,
    // paying t classical permutation queries per attempt.
    const auto verify = [&](Word i) {
        Word v = pair2.x;
        for (int l = 1; l <= inst.t; ++l) v = suite.perm(l).classical(Dir::Forward, v ^ i);
        return static_cast<Word>(v ^ i) == pair2.y;
    };
    const auto extract = [](Word i) { return std::vector<Word>{i}; };
    run_verified_grover(inst, rng, max_tries, "samekey", pred, verify, extract, result);
    return result;
}

GroverAttackResult attack_first_last_equal(const KacInstance& inst, Rng& rng, int max_tries) {
    if (inst.t != 2 || inst.dist.tag != KeyDistTag::FirstLastEqual) {
        throw std::invalid_argument("attack_first_last_equal requires 2-KAC with keys (k0, k1, k0)");
    }
    GroverAttackResult result;
    result.ledger = QueryLedger(inst.t);
    result.verification_ledger = QueryLedger(inst.t);
    const AccessPolicy policy = AccessPolicy::q1(inst.t);
    OracleSuite suite(inst, policy, result.ledger);

    const ClassicalPair pair1 = fresh_pair(suite, inst, rng, {});
    const ClassicalPair pair2 = fresh_pair(suite, inst, rng, {pair1});
    // The marked condition P1(x1^i)^P2^{-1}(y1^i) = P1(x2^i)^P2^{-1}(y2^i) is
    // symmetric in the two pairs, so verification needs a held-out third pair.
    const ClassicalPair pair3 = fresh_pair(suite, inst, rng, {pair1, pair2});

    const Permutation& p1 = inst.perms[0];
    const Permutation& p2 = inst.perms[1];
    const auto f1 = [&](Word i) { return static_cast<Word>(p1.forward(pair1.x ^ i) ^ p2.inverse(pair1.y ^ i)); };
    const auto f2 = [&](Word i) {
        return static_cast<Word>(p2.forward(static_cast<Word>(p1.forward(pair2.x ^ i) ^ f1(i))) ^ i) == pair2.y;
    };

    PredicateOracle pred;
    pred.domain_bits = inst.n;
    pred.eval = f2;
    pred.cost_per_eval = {{OracleId::perm(1), Dir::Forward, 2},
                          {OracleId::perm(2), Dir::Inverse, 1},
                          {OracleId::perm(2), Dir::Forward, 1}};

    const auto verify = [&](Word i) {
        const Word k1 = static_cast<Word>(suite.perm(1).classical(Dir::Forward, pair1.x ^ i) ^
                                          suite.perm(2).classical(Dir::Inverse, pair1.y ^ i));
        const Word out = static_cast<Word>(
            suite.perm(2).classical(Dir::Forward,
                                    static_cast<Word>(suite.perm(1).classical(Dir::Forward, pair3.x ^ i) ^ k1)) ^ i);
        return out == pair3.y;
    };
    const auto extract = [&](Word i) { return std::vector<Word>{i, f1(i)}; };
    run_verified_grover(inst, rng, max_tries, "firstlast", pred, verify, extract, result);
    return result;
}

GroverAttackResult attack_repeated_keys(const KacInstance& inst, Rng& rng, int max_tries) {
    if (inst.dist.tag != KeyDistTag::RepeatedExceptIndex) {
        throw std::invalid_argument("attack_repeated_keys requires a repeated-except-one schedule");
    }
    const int j = inst.dist.index;
    const int t = inst.t;
    GroverAttackResult result;
    result.ledger = QueryLedger(t);
    result.verification_ledger = QueryLedger(t);
    const AccessPolicy policy = AccessPolicy::q1(t);
    OracleSuite suite(inst, policy, result.ledger);

    const ClassicalPair pair1 = fresh_pair(suite, inst, rng, {});
    const ClassicalPair pair2 = fresh_pair(suite, inst, rng, {pair1});
    // The marked condition (trace(pair1) == trace(pair2) on the distinct-key
    // slot) is symmetric in the pairs; verification uses a held-out third.
    const ClassicalPair pair3 = fresh_pair(suite, inst, rng, {pair1, pair2});

    // Value leaving P_j when tracing x1 forward with every key before slot j
    // set to the repeated candidate i (x1 itself for j = 0).
    const auto trace_forward = [&](Word i) {
        if (j == 0) return pair1.x;
        Word v = static_cast<Word>(pair1.x ^ i);
        for (int l = 1; l <= j; ++l) {
            v = inst.perms[static_cast<std::size_t>(l - 1)].forward(v);
            if (l < j) v ^= i;
        }
        return v;
    };
    // Value entering slot j when tracing y1 backward with every key after
    // slot j set to i (y1 itself for j = t).
    const auto trace_backward = [&](Word i) {
        if (j == t) return pair1.y;
        Word v = static_cast<Word>(pair1.y ^ i);
        for (int l = t; l >= j + 1; --l) {
            v = inst.perms[static_cast<std::size_t>(l - 1)].inverse(v);
            if (l > j + 1) v ^= i;
        }
        return v;
    };
    const auto distinct_key = [&](Word i) { return static_cast<Word>(trace_forward(i) ^ trace_backward(i)); };
    const auto encrypt_with = [&](Word i, Word kj, Word x) {
        Word v = x;
        for (int l = 0; l < t; ++l) {
            v = inst.perms[static_cast<std::size_t>(l)].forward(v ^ (l == j ? kj : i));
        }
        return static_cast<Word>(v ^ (j == t ? kj : i));
    };

    PredicateOracle pred;
    pred.domain_bits = inst.n;
    pred.eval = [&](Word i) { return encrypt_with(i, distinct_key(i), pair2.x) == pair2.y; };
    // trace: P_1..P_j forward, P_{j+1}..P_t inverse; check: all P_l forward
    for (int l = 1; l <= t; ++l) {
        std::uint32_t fwd = 1 + (l <= j ? 1u : 0u);
        pred.cost_per_eval.push_back({OracleId::perm(l), Dir::Forward, fwd});
        if (l > j) pred.cost_per_eval.push_back({OracleId::perm(l), Dir::Inverse, 1});
    }

    const auto verify = [&](Word i) {
        Word a = pair1.x;
        if (j > 0) {
            a = static_cast<Word>(pair1.x ^ i);
            for (int l = 1; l <= j; ++l) {
                a = suite.perm(l).classical(Dir::Forward, a);
                if (l < j) a ^= i;
            }
        }
        Word b = pair1.y;
        if (j < t) {
            b = static_cast<Word>(pair1.y ^ i);
            for (int l = t; l >= j + 1; --l) {
                b = suite.perm(l).classical(Dir::Inverse, b);
                if (l > j + 1) b ^= i;
            }
        }
        const Word kj = static_cast<Word>(a ^ b);
        Word v = pair3.x;
        for (int l = 0; l < t; ++l) {
            v = suite.perm(l + 1).classical(Dir::Forward, v ^ (l == j ? kj : i));
        }
        return static_cast<Word>(v ^ (j == t ? kj : i)) == pair3.y;
    };
    const auto extract = [&](Word i) { return std::vector<Word>{i, distinct_key(i)}; };
    run_verified_grover(inst, rng, max_tries, "repeated", pred, verify, extract, result);
    return result;
}

}  // namespace kacq
