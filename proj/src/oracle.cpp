#include "kacq/oracle.hpp"

#include <numeric>

namespace kacq {

namespace {

std::string mixed_label(const std::vector<int>& perms, bool cipher_quantum) {
    std::string label = "mixed:";
    bool first = true;
    if (cipher_quantum) {
        label += "E";
        first = false;
    }
    for (int i : perms) {
        if (!first) label += ",";
        label += "P" + std::to_string(i);
        first = false;
    }
    return label;
}

}  // namespace

AccessPolicy AccessPolicy::classical_only(int t) {
    return AccessPolicy(std::vector<bool>(static_cast<std::size_t>(t) + 1, false), "classical");
}

AccessPolicy AccessPolicy::q1(int t) {
    std::vector<bool> q(static_cast<std::size_t>(t) + 1, true);
    q[0] = false;
    return AccessPolicy(std::move(q), "q1");
}

AccessPolicy AccessPolicy::q2(int t) {
    return AccessPolicy(std::vector<bool>(static_cast<std::size_t>(t) + 1, true), "q2");
}

AccessPolicy AccessPolicy::mixed(int t, const std::vector<int>& quantum_perms, bool cipher_quantum) {
    std::vector<bool> q(static_cast<std::size_t>(t) + 1, false);
    q[0] = cipher_quantum;
    for (int i : quantum_perms) {
        if (i < 1 || i > t) throw std::invalid_argument("AccessPolicy::mixed: bad permutation index");
        q[static_cast<std::size_t>(i)] = true;
    }
    return AccessPolicy(std::move(q), mixed_label(quantum_perms, cipher_quantum));
}

std::uint64_t QueryLedger::classical_total() const {
    std::uint64_t sum = 0;
    for (const auto& oracle : counts_) {
        sum += oracle[0].classical + oracle[1].classical;
    }
    return sum;
}

std::uint64_t QueryLedger::quantum_total() const {
    std::uint64_t sum = 0;
    for (const auto& oracle : counts_) {
        sum += oracle[0].quantum + oracle[1].quantum;
    }
    return sum;
}

std::uint64_t QueryLedger::perm_quantum_total() const {
    std::uint64_t sum = 0;
    for (std::size_t i = 1; i < counts_.size(); ++i) {
        sum += counts_[i][0].quantum + counts_[i][1].quantum;
    }
    return sum;
}

void QueryLedger::merge(const QueryLedger& other) {
    if (counts_.empty()) {
        counts_ = other.counts_;
        return;
    }
    if (other.counts_.empty()) return;
    if (counts_.size() != other.counts_.size()) {
        throw std::invalid_argument("QueryLedger::merge: mismatched oracle sets");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        for (int d = 0; d < 2; ++d) {
            counts_[i][d].classical += other.counts_[i][d].classical;
            counts_[i][d].quantum += other.counts_[i][d].quantum;
        }
    }
}

nlohmann::ordered_json QueryLedger::to_json(const std::string& policy_label) const {
    nlohmann::ordered_json j;
    if (!policy_label.empty()) j["policy"] = policy_label;
    nlohmann::ordered_json counts;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        const OracleId id{static_cast<int>(i)};
        nlohmann::ordered_json per_dir;
        per_dir["forward"] = {{"classical", counts_[i][0].classical}, {"quantum", counts_[i][0].quantum}};
        per_dir["inverse"] = {{"classical", counts_[i][1].classical}, {"quantum", counts_[i][1].quantum}};
        counts[id.name()] = std::move(per_dir);
    }
    j["counts"] = std::move(counts);
    j["totals"] = {{"classical", classical_total()},
                   {"quantum", quantum_total()},
                   {"grand", grand_total()}};
    return j;
}

QueryLedger ledger_report(std::span<const QueryLedger> ledgers) {
    QueryLedger merged;
    for (const auto& l : ledgers) merged.merge(l);
    return merged;
}

OracleSuite::OracleSuite(const KacInstance& inst, const AccessPolicy& policy, QueryLedger& ledger) {
    handles_.reserve(static_cast<std::size_t>(inst.t) + 1);
    handles_.emplace_back(OracleId::cipher(),
                          [&inst](Dir d, Word x) { return inst.apply(d, x); }, &ledger, &policy);
    for (int i = 1; i <= inst.t; ++i) {
        const Permutation& p = inst.perms[static_cast<std::size_t>(i - 1)];
        handles_.emplace_back(OracleId::perm(i),
                              [&p](Dir d, Word x) { return p.apply(d, x); }, &ledger, &policy);
    }
}

}  // namespace kacq
