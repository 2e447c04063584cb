#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kacq/kac.hpp"

namespace kacq {

// Oracle index: 0 is the keyed cipher E, 1..t are the public permutations.
struct OracleId {
    int index = 0;

    static OracleId cipher() { return {0}; }
    static OracleId perm(int i) { return {i}; }

    bool is_cipher() const { return index == 0; }
    std::string name() const { return index == 0 ? "E" : "P_" + std::to_string(index); }
    bool operator==(const OracleId& o) const { return index == o.index; }
};

// Which oracles may be queried in superposition. Classical access is always
// granted to everything.
class AccessPolicy {
public:
    static AccessPolicy classical_only(int t);
    static AccessPolicy q1(int t);  // all P_i quantum, E classical
    static AccessPolicy q2(int t);  // everything quantum
    // Quantum access to an arbitrary subset of permutations (and optionally E).
    static AccessPolicy mixed(int t, const std::vector<int>& quantum_perms, bool cipher_quantum = false);

    bool quantum_allowed(OracleId id) const { return quantum_[static_cast<std::size_t>(id.index)]; }
    int t() const { return static_cast<int>(quantum_.size()) - 1; }
    const std::string& label() const { return label_; }

private:
    AccessPolicy(std::vector<bool> quantum, std::string label)
        : quantum_(std::move(quantum)), label_(std::move(label)) {}

    std::vector<bool> quantum_;
    std::string label_;
};

struct PolicyViolation : std::runtime_error {
    explicit PolicyViolation(const std::string& what) : std::runtime_error(what) {}
};

struct QueryCounts {
    std::uint64_t classical = 0;
    std::uint64_t quantum = 0;
};

// Per-oracle, per-direction query counts for one experiment session.
// A quantum query is counted once regardless of its support size.
class QueryLedger {
public:
    QueryLedger() = default;
    explicit QueryLedger(int t) : counts_(static_cast<std::size_t>(t) + 1) {}

    int t() const { return static_cast<int>(counts_.size()) - 1; }

    void record_classical(OracleId id, Dir d) { ++at(id, d).classical; }
    void record_quantum(OracleId id, Dir d) { ++at(id, d).quantum; }
    void add_classical(OracleId id, Dir d, std::uint64_t k) { at(id, d).classical += k; }
    void add_quantum(OracleId id, Dir d, std::uint64_t k) { at(id, d).quantum += k; }

    const QueryCounts& counts(OracleId id, Dir d) const {
        return counts_[static_cast<std::size_t>(id.index)][d == Dir::Forward ? 0 : 1];
    }
    // forward + inverse, as the oracle is one object with both directions
    QueryCounts combined(OracleId id) const {
        const auto& f = counts(id, Dir::Forward);
        const auto& i = counts(id, Dir::Inverse);
        return {f.classical + i.classical, f.quantum + i.quantum};
    }

    std::uint64_t classical_total() const;
    std::uint64_t quantum_total() const;
    std::uint64_t grand_total() const { return classical_total() + quantum_total(); }
    std::uint64_t perm_quantum_total() const;

    // Componentwise sum. Throws on mismatched oracle sets.
    void merge(const QueryLedger& other);

    nlohmann::ordered_json to_json(const std::string& policy_label = "") const;

private:
    QueryCounts& at(OracleId id, Dir d) {
        return counts_[static_cast<std::size_t>(id.index)][d == Dir::Forward ? 0 : 1];
    }

    std::vector<std::array<QueryCounts, 2>> counts_;
};

QueryLedger ledger_report(std::span<const QueryLedger> ledgers);

// Query-counted access to one oracle. Classical queries return one value;
// a quantum query evaluates the oracle on the whole amplitude support and
// counts as a single query.
class OracleHandle {
public:
    using Eval = std::function<Word(Dir, Word)>;

    OracleHandle(OracleId id, Eval eval, QueryLedger* ledger, const AccessPolicy* policy)
        : id_(id), eval_(std::move(eval)), ledger_(ledger), policy_(policy) {}

    OracleId id() const { return id_; }

    Word classical(Dir d, Word x) {
        ledger_->record_classical(id_, d);
        return eval_(d, x);
    }

    std::vector<Word> quantum(Dir d, std::span<const Word> support) {
        if (!policy_->quantum_allowed(id_)) {
            throw PolicyViolation("quantum query to " + id_.name() + " not allowed under policy " +
                                  policy_->label());
        }
        ledger_->record_quantum(id_, d);
        std::vector<Word> out;
        out.reserve(support.size());
        for (Word x : support) out.push_back(eval_(d, x));
        return out;
    }

    Word quantum_point(Dir d, Word x) {
        const Word arr[1] = {x};
        return quantum(d, std::span<const Word>(arr, 1))[0];
    }

private:
    OracleId id_;
    Eval eval_;
    QueryLedger* ledger_;
    const AccessPolicy* policy_;
};

// Handles for E and P_1..P_t of one instance, sharing a ledger and policy.
class OracleSuite {
public:
    OracleSuite(const KacInstance& inst, const AccessPolicy& policy, QueryLedger& ledger);

    OracleHandle& cipher() { return handles_[0]; }
    OracleHandle& perm(int i) { return handles_[static_cast<std::size_t>(i)]; }

private:
    std::vector<OracleHandle> handles_;
};

}  // namespace kacq
