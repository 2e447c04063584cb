#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kacq/permutation.hpp"
#include "kacq/rng.hpp"

namespace kacq {

// Round-key joint distributions. Marginals are uniform in all four cases.
enum class KeyDistTag {
    IndependentUniform,   // t+1 i.i.d. uniform words
    AllEqual,             // one uniform word in every slot
    FirstLastEqual,       // (k0, k1, k0); only valid for t = 2
    RepeatedExceptIndex,  // one uniform word everywhere except an independent word at slot j
};

struct KeyDistribution {
    KeyDistTag tag = KeyDistTag::IndependentUniform;
    int index = -1;  // slot j for RepeatedExceptIndex

    static KeyDistribution independent() { return {KeyDistTag::IndependentUniform, -1}; }
    static KeyDistribution all_equal() { return {KeyDistTag::AllEqual, -1}; }
    static KeyDistribution first_last_equal() { return {KeyDistTag::FirstLastEqual, -1}; }
    static KeyDistribution repeated_except(int j) { return {KeyDistTag::RepeatedExceptIndex, j}; }

    void validate(int t) const;
    std::string name() const;
};

struct KeySchedule {
    std::vector<Word> keys;  // k_0 .. k_t

    int t() const { return static_cast<int>(keys.size()) - 1; }
    bool operator==(const KeySchedule& o) const { return keys == o.keys; }
};

KeySchedule sample_key_schedule(const KeyDistribution& dist, int t, int n, Rng& rng);

// The t-round key-alternating cipher
//   E_k(x) = k_t ^ P_t(k_{t-1} ^ P_{t-1}(... P_1(k_0 ^ x) ...)).
// Immutable after construction; safe to share across workers.
struct KacInstance {
    int n = 0;
    int t = 0;
    std::vector<Permutation> perms;  // P_1 .. P_t
    KeySchedule schedule;
    KeyDistribution dist;

    Word encrypt(Word x) const {
        Word v = x;
        for (int i = 0; i < t; ++i) v = perms[i].forward(v ^ schedule.keys[i]);
        return v ^ schedule.keys[t];
    }

    Word decrypt(Word y) const {
        Word v = y ^ schedule.keys[t];
        for (int i = t - 1; i >= 0; --i) v = perms[i].inverse(v) ^ schedule.keys[i];
        return v;
    }

    Word apply(Dir d, Word x) const { return d == Dir::Forward ? encrypt(x) : decrypt(x); }
};

KacInstance sample_kac_instance(int n, int t, const KeyDistribution& dist, Rng& rng);

// JSON forms: a permutation is its forward table; an instance is
// {n, t, perm_tables, keys, dist}.
nlohmann::ordered_json permutation_to_json(const Permutation& p);
Permutation permutation_from_json(int n, const nlohmann::json& j);
nlohmann::ordered_json instance_to_json(const KacInstance& inst);
KacInstance instance_from_json(const nlohmann::json& j);

}  // namespace kacq
