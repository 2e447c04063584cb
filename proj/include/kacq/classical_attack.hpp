#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "kacq/oracle.hpp"

namespace kacq {

// A (t+1)-word key candidate packed into a u64, kappa_0 in the high bits.
// Requires (t+1)*n <= 64, which covers every desk-scale configuration.
using PackedKey = std::uint64_t;

PackedKey pack_words(std::span<const Word> words, int n);
std::vector<Word> unpack_words(PackedKey key, int n, int count);

// One random input set per oracle. The product of the sizes meets
// beta * 2^{tn} so each key-candidate prefix is generated about beta times.
struct SampleSets {
    int n = 0;
    int t = 0;
    double beta = 0.0;
    std::vector<std::vector<Word>> sets;  // S_0 .. S_t, distinct words each

    std::uint64_t total_queries() const {
        std::uint64_t s = 0;
        for (const auto& v : sets) s += v.size();
        return s;
    }
    double size_product() const {
        double p = 1.0;
        for (const auto& v : sets) p *= static_cast<double>(v.size());
        return p;
    }
};

// Balanced profile: every |S_i| = ceil((beta * 2^{tn})^{1/(t+1)}).
// Explicit sizes must each fit in the domain and their product must reach
// beta * 2^{tn}.
SampleSets sample_input_sets(int n, int t, double beta, Rng& rng,
                             const std::vector<std::size_t>& explicit_sizes = {});

struct CandidateMultiset {
    std::unordered_map<PackedKey, std::uint32_t> counts;
    std::uint64_t total_tuples = 0;

    std::uint32_t multiplicity(PackedKey k) const {
        auto it = counts.find(k);
        return it == counts.end() ? 0 : it->second;
    }
};

// One candidate per tuple in S_0 x ... x S_t via
//   kappa_0 = x_0 ^ x_1,  kappa_i = P_i(x_i) ^ x_{i+1},  kappa_t = P_t(x_t) ^ E(x_0).
// Issues exactly sum |S_i| classical queries (each set element queried once).
CandidateMultiset generate_key_candidates(const SampleSets& sets, OracleSuite& oracles);

struct ClassicalAttackResult {
    bool success = false;                    // a candidate reached multiplicity >= t+1
    std::optional<std::vector<Word>> guess;  // the emitted key words
    std::uint64_t queries = 0;
    std::map<std::uint32_t, std::uint64_t> multiplicity_histogram;
    QueryLedger ledger;
};

// Algorithm: sample sets, generate all candidates, then output a candidate of
// maximal multiplicity among those generated by at least t+1 tuples (ties
// broken uniformly). Returns a failure result when no candidate reaches t+1.
ClassicalAttackResult run_classical_attack(const KacInstance& inst, double beta, Rng& rng);

}  // namespace kacq
