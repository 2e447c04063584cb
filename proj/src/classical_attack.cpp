#include "kacq/classical_attack.hpp"

#include <cmath>
#include <stdexcept>

namespace kacq {

PackedKey pack_words(std::span<const Word> words, int n) {
    if (static_cast<int>(words.size()) * n > 64) {
        throw std::invalid_argument("pack_words: (t+1)*n exceeds 64 bits");
    }
    PackedKey k = 0;
    for (Word w : words) k = (k << n) | w;
    return k;
}

std::vector<Word> unpack_words(PackedKey key, int n, int count) {
    std::vector<Word> words(static_cast<std::size_t>(count));
    const PackedKey mask = (PackedKey{1} << n) - 1;
    for (int i = count - 1; i >= 0; --i) {
        words[static_cast<std::size_t>(i)] = static_cast<Word>(key & mask);
        key >>= n;
    }
    return words;
}

SampleSets sample_input_sets(int n, int t, double beta, Rng& rng,
                             const std::vector<std::size_t>& explicit_sizes) {
    if (beta < t + 1) throw std::invalid_argument("sample_input_sets: beta must be >= t+1");
    const double domain = std::ldexp(1.0, n);
    const double target = beta * std::ldexp(1.0, t * n);

    std::vector<std::size_t> sizes;
    if (explicit_sizes.empty()) {
        const double balanced = std::pow(target, 1.0 / (t + 1));
        const auto s = static_cast<std::size_t>(std::ceil(balanced));
        if (static_cast<double>(s) > domain) {
            throw std::invalid_argument("sample_input_sets: balanced size exceeds 2^n (beta*2^{tn} > 2^{n(t+1)})");
        }
        sizes.assign(static_cast<std::size_t>(t) + 1, s);
    } else {
        if (explicit_sizes.size() != static_cast<std::size_t>(t) + 1) {
            throw std::invalid_argument("sample_input_sets: need t+1 explicit sizes");
        }
        double product = 1.0;
        for (auto s : explicit_sizes) {
            if (s == 0 || static_cast<double>(s) > domain) {
                throw std::invalid_argument("sample_input_sets: explicit size out of range");
            }
            product *= static_cast<double>(s);
        }
        if (product < target) {
            throw std::invalid_argument("sample_input_sets: size product below beta*2^{tn}");
        }
        sizes = explicit_sizes;
    }

    SampleSets out;
    out.n = n;
    out.t = t;
    out.beta = beta;
    out.sets.reserve(sizes.size());
    for (auto s : sizes) out.sets.push_back(sample_distinct(std::uint64_t{1} << n, s, rng));
    return out;
}

CandidateMultiset generate_key_candidates(const SampleSets& sets, OracleSuite& oracles) {
    const int n = sets.n;
    const int t = sets.t;
    if ((t + 1) * n > 64) throw std::invalid_argument("generate_key_candidates: (t+1)*n exceeds 64 bits");

    // Query each set element once and cache the responses (Step 2).
    std::vector<Word> e_vals;
    e_vals.reserve(sets.sets[0].size());
    for (Word x : sets.sets[0]) e_vals.push_back(oracles.cipher().classical(Dir::Forward, x));
    std::vector<std::vector<Word>> p_vals(static_cast<std::size_t>(t));
    for (int i = 1; i <= t; ++i) {
        auto& vals = p_vals[static_cast<std::size_t>(i - 1)];
        vals.reserve(sets.sets[static_cast<std::size_t>(i)].size());
        for (Word x : sets.sets[static_cast<std::size_t>(i)]) {
            vals.push_back(oracles.perm(i).classical(Dir::Forward, x));
        }
    }

    CandidateMultiset multiset;
    const double expected = std::min(sets.size_product(), 8.0e6);
    multiset.counts.reserve(static_cast<std::size_t>(expected * 1.3) + 16);

    // Odometer over (x_1 .. x_t); the inner loop runs over x_0 so the
    // shared (kappa_1 .. kappa_{t-1}) part is computed once per tail tuple.
    std::vector<std::size_t> idx(static_cast<std::size_t>(t), 0);
    const auto& s0 = sets.sets[0];
    for (;;) {
        PackedKey mid = 0;  // kappa_1 .. kappa_{t-1}
        for (int i = 1; i < t; ++i) {
            const Word kappa = p_vals[static_cast<std::size_t>(i - 1)][idx[static_cast<std::size_t>(i - 1)]] ^
                               sets.sets[static_cast<std::size_t>(i + 1)][idx[static_cast<std::size_t>(i)]];
            mid = (mid << n) | kappa;
        }
        const Word x1 = sets.sets[1][idx[0]];
        const Word pt_last = p_vals[static_cast<std::size_t>(t - 1)][idx[static_cast<std::size_t>(t - 1)]];
        for (std::size_t i0 = 0; i0 < s0.size(); ++i0) {
            const Word kappa0 = s0[i0] ^ x1;
            const Word kappat = pt_last ^ e_vals[i0];
            const PackedKey cand = ((((static_cast<PackedKey>(kappa0) << ((t - 1) * n)) | mid) << n) | kappat);
            ++multiset.counts[cand];
            ++multiset.total_tuples;
        }
        int pos = t - 1;
        while (pos >= 0) {
            if (++idx[static_cast<std::size_t>(pos)] < sets.sets[static_cast<std::size_t>(pos + 1)].size()) break;
            idx[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return multiset;
}

ClassicalAttackResult run_classical_attack(const KacInstance& inst, double beta, Rng& rng) {
    ClassicalAttackResult result;
    result.ledger = QueryLedger(inst.t);
    const AccessPolicy policy = AccessPolicy::classical_only(inst.t);
    OracleSuite suite(inst, policy, result.ledger);

    const SampleSets sets = sample_input_sets(inst.n, inst.t, beta, rng);
    const CandidateMultiset multiset = generate_key_candidates(sets, suite);
    result.queries = result.ledger.grand_total();

    const auto threshold = static_cast<std::uint32_t>(inst.t + 1);
    std::uint32_t best = 0;
    std::vector<PackedKey> top;
    for (const auto& [cand, count] : multiset.counts) {
        ++result.multiplicity_histogram[count];
        if (count < threshold) continue;
        if (count > best) {
            best = count;
            top.clear();
        }
        if (count == best) top.push_back(cand);
    }
    if (top.empty()) {
        result.success = false;  // caller may retry with a larger beta
        return result;
    }
    const PackedKey pick = top[rng.below(top.size())];
    result.success = true;
    result.guess = unpack_words(pick, inst.n, inst.t + 1);
    return result;
}

}  // namespace kacq
