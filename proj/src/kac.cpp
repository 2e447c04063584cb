#include "kacq/kac.hpp"

#include <stdexcept>

namespace kacq {

void KeyDistribution::validate(int t) const {
    if (t < 1) throw std::invalid_argument("KeyDistribution: t must be >= 1");
    switch (tag) {
        case KeyDistTag::IndependentUniform:
        case KeyDistTag::AllEqual:
            return;
        case KeyDistTag::FirstLastEqual:
            if (t != 2) throw std::invalid_argument("FirstLastEqual is only defined for t = 2");
            return;
        case KeyDistTag::RepeatedExceptIndex:
            if (index < 0 || index > t) {
                throw std::invalid_argument("RepeatedExceptIndex: slot must be in [0, t]");
            }
            return;
    }
    throw std::invalid_argument("KeyDistribution: unknown tag");
}

std::string KeyDistribution::name() const {
    switch (tag) {
        case KeyDistTag::IndependentUniform: return "independent";
        case KeyDistTag::AllEqual: return "all-equal";
        case KeyDistTag::FirstLastEqual: return "first-last-equal";
        case KeyDistTag::RepeatedExceptIndex: return "repeated-except-" + std::to_string(index);
    }
    return "?";
}

KeySchedule sample_key_schedule(const KeyDistribution& dist, int t, int n, Rng& rng) {
    dist.validate(t);
    const std::uint64_t size = std::uint64_t{1} << n;
    KeySchedule s;
    s.keys.resize(static_cast<std::size_t>(t) + 1);
    switch (dist.tag) {
        case KeyDistTag::IndependentUniform:
            for (auto& k : s.keys) k = static_cast<Word>(rng.below(size));
            break;
        case KeyDistTag::AllEqual: {
            const Word k = static_cast<Word>(rng.below(size));
            for (auto& slot : s.keys) slot = k;
            break;
        }
        case KeyDistTag::FirstLastEqual: {
            const Word k0 = static_cast<Word>(rng.below(size));
            const Word k1 = static_cast<Word>(rng.below(size));
            s.keys = {k0, k1, k0};
            break;
        }
        case KeyDistTag::RepeatedExceptIndex: {
            const Word shared = static_cast<Word>(rng.below(size));
            const Word unique = static_cast<Word>(rng.below(size));
            for (auto& slot : s.keys) slot = shared;
            s.keys[static_cast<std::size_t>(dist.index)] = unique;
            break;
        }
    }
    return s;
}

KacInstance sample_kac_instance(int n, int t, const KeyDistribution& dist, Rng& rng) {
    KacInstance inst;
    inst.n = n;
    inst.t = t;
    inst.dist = dist;
    inst.perms.reserve(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) inst.perms.push_back(Permutation::random(n, rng));
    inst.schedule = sample_key_schedule(dist, t, n, rng);
    return inst;
}

nlohmann::ordered_json permutation_to_json(const Permutation& p) {
    return nlohmann::ordered_json(p.table());
}

Permutation permutation_from_json(int n, const nlohmann::json& j) {
    return Permutation::from_table(n, j.get<std::vector<Word>>());
}

nlohmann::ordered_json instance_to_json(const KacInstance& inst) {
    nlohmann::ordered_json j;
    j["n"] = inst.n;
    j["t"] = inst.t;
    auto tables = nlohmann::ordered_json::array();
    for (const auto& p : inst.perms) tables.push_back(permutation_to_json(p));
    j["perm_tables"] = std::move(tables);
    j["keys"] = inst.schedule.keys;
    j["dist"] = inst.dist.name();
    return j;
}

KacInstance instance_from_json(const nlohmann::json& j) {
    KacInstance inst;
    inst.n = j.at("n").get<int>();
    inst.t = j.at("t").get<int>();
    for (const auto& tbl : j.at("perm_tables")) {
        inst.perms.push_back(permutation_from_json(inst.n, tbl));
    }
    inst.schedule.keys = j.at("keys").get<std::vector<Word>>();
    const auto name = j.at("dist").get<std::string>();
    if (name == "independent") inst.dist = KeyDistribution::independent();
    else if (name == "all-equal") inst.dist = KeyDistribution::all_equal();
    else if (name == "first-last-equal") inst.dist = KeyDistribution::first_last_equal();
    else if (name.rfind("repeated-except-", 0) == 0) {
        inst.dist = KeyDistribution::repeated_except(std::stoi(name.substr(16)));
    } else {
        throw std::invalid_argument("unknown key distribution: " + name);
    }
    if (static_cast<int>(inst.perms.size()) != inst.t ||
        static_cast<int>(inst.schedule.keys.size()) != inst.t + 1) {
        throw std::invalid_argument("instance JSON has inconsistent shapes");
    }
    return inst;
}

}  // namespace kacq
