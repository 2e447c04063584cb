#include "kacq/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace kacq {

namespace {

constexpr std::size_t kBranchLimit = std::size_t{1} << 22;
constexpr double kNormTolerance = 1e-12;

}  // namespace

SparseQuery SparseQuery::uniform(int n) {
    const std::uint64_t size = std::uint64_t{1} << n;
    SparseQuery q;
    q.support.resize(size);
    for (std::uint64_t x = 0; x < size; ++x) q.support[x] = static_cast<Word>(x);
    q.amps.assign(size, std::complex<double>(1.0 / std::sqrt(static_cast<double>(size)), 0.0));
    return q;
}

SparseQuery SparseQuery::point(Word x) {
    SparseQuery q;
    q.support = {x};
    q.amps = {std::complex<double>(1.0, 0.0)};
    return q;
}

SparseQuery SparseQuery::uniform_over(std::vector<Word> support) {
    SparseQuery q;
    q.support = std::move(support);
    q.amps.assign(q.support.size(),
                  std::complex<double>(1.0 / std::sqrt(static_cast<double>(q.support.size())), 0.0));
    return q;
}

void SparseQuery::validate(int n) const {
    if (support.empty() || support.size() != amps.size()) {
        throw std::invalid_argument("SparseQuery: support/amplitude shape mismatch");
    }
    const std::uint64_t size = std::uint64_t{1} << n;
    std::unordered_set<Word> seen;
    double norm = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] >= size) throw std::invalid_argument("SparseQuery: support point out of range");
        if (!seen.insert(support[i]).second) {
            throw std::invalid_argument("SparseQuery: duplicate support point");
        }
        norm += std::norm(amps[i]);
    }
    if (std::abs(norm - 1.0) > kNormTolerance) {
        throw std::invalid_argument("SparseQuery: amplitudes not L2-normalized");
    }
}

std::size_t AdversaryScript::branch_count() const {
    std::size_t count = 1;
    for (const auto& q : p1_queries) count *= q.support.size();
    for (const auto& q : p2_queries) count *= q.support.size();
    return count;
}

void AdversaryScript::validate() const {
    if (n < 1 || n > kMaxBlockBits) throw std::invalid_argument("AdversaryScript: unsupported n");
    std::unordered_set<Word> seen;
    for (Word x : x_list) {
        if (x >= (std::uint64_t{1} << n)) throw std::invalid_argument("AdversaryScript: x out of range");
        if (!seen.insert(x).second) {
            throw std::invalid_argument("AdversaryScript: repeated classical query");
        }
    }
    for (const auto& q : p1_queries) q.validate(n);
    for (const auto& q : p2_queries) q.validate(n);
    if (branch_count() > kBranchLimit) {
        throw std::runtime_error("AdversaryScript: branch count " + std::to_string(branch_count()) +
                                 " exceeds limit " + std::to_string(kBranchLimit));
    }
}

AdversaryScript AdversaryScript::uniform(int n, int q_e, int q_p1, int q_p2, Rng& rng) {
    AdversaryScript s;
    s.n = n;
    s.x_list = sample_distinct(std::uint64_t{1} << n, static_cast<std::size_t>(q_e), rng);
    for (int i = 0; i < q_p1; ++i) s.p1_queries.push_back(SparseQuery::uniform(n));
    for (int i = 0; i < q_p2; ++i) s.p2_queries.push_back(SparseQuery::uniform(n));
    s.validate();
    return s;
}

HybridSample HybridSample::draw(int n, Rng& rng) {
    HybridSample s;
    const std::uint64_t size = std::uint64_t{1} << n;
    for (auto& k : s.keys) k = static_cast<Word>(rng.below(size));
    s.p1 = Permutation::random(n, rng);
    s.p2 = Permutation::random(n, rng);
    s.r = Permutation::random(n, rng);
    return s;
}

ReprogramRecord compute_reprogram_targets(const std::array<Word, 3>& keys, const Permutation& p1,
                                          const Permutation& p2, const Permutation& r,
                                          std::span<const Word> x_list) {
    ReprogramRecord rec;
    rec.x_targets.reserve(x_list.size());
    rec.y_targets.reserve(x_list.size());
    for (Word x : x_list) {
        rec.x_targets.push_back(static_cast<Word>(p1.forward(x ^ keys[0]) ^ keys[1]));
        rec.y_targets.push_back(p2.inverse(static_cast<Word>(r.forward(x) ^ keys[2])));
    }
    std::unordered_set<Word> xs(rec.x_targets.begin(), rec.x_targets.end());
    for (Word y : rec.y_targets) {
        if (xs.count(y)) {
            rec.collision = true;
            break;
        }
    }
    return rec;
}

Permutation reprogram_permutation(const Permutation& p2,
                                  std::span<const std::pair<Word, Word>> swaps,
                                  const std::vector<bool>& active_flags) {
    if (swaps.size() != active_flags.size()) {
        throw std::invalid_argument("reprogram_permutation: flags/swaps shape mismatch");
    }
    std::vector<Word> table = p2.table();
    for (std::size_t r = 0; r < swaps.size(); ++r) {
        if (!active_flags[r]) continue;
        std::swap(table[swaps[r].first], table[swaps[r].second]);
    }
    return Permutation::from_table(p2.n(), std::move(table));
}

std::vector<bool> flag_bits(Word a_point, std::span<const Word> x_list, Word k0) {
    std::vector<bool> bits(x_list.size());
    for (std::size_t r = 0; r < x_list.size(); ++r) bits[r] = (a_point == (x_list[r] ^ k0));
    return bits;
}

std::uint32_t flag_mask(std::span<const Word> a_points, std::span<const Word> x_list, Word k0) {
    if (x_list.size() > 32) throw std::invalid_argument("flag_mask: more than 32 classical queries");
    std::uint32_t mask = 0;
    for (std::size_t r = 0; r < x_list.size(); ++r) {
        const Word probe = x_list[r] ^ k0;
        for (Word a : a_points) {
            if (a == probe) {
                mask |= (1u << r);
                break;
            }
        }
    }
    return mask;
}

double JointState::norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return s;
}

namespace {

// Sparse overlay of the P_2 table for one active-flag mask: the swaps for the
// set bits applied in ascending r.
struct TableDiff {
    std::vector<std::pair<Word, Word>> entries;  // sorted by position
    Word lookup(const Permutation& base, Word x) const {
        for (const auto& [pos, val] : entries) {
            if (pos == x) return val;
        }
        return base.forward(x);
    }
};

TableDiff diff_for_mask(const Permutation& p2, const ReprogramRecord& targets, std::uint32_t mask) {
    std::map<Word, Word> overlay;
    const auto value_at = [&](Word x) {
        auto it = overlay.find(x);
        return it == overlay.end() ? p2.forward(x) : it->second;
    };
    for (std::size_t r = 0; r < targets.x_targets.size(); ++r) {
        if (!(mask & (1u << r))) continue;
        const Word a = targets.x_targets[r];
        const Word b = targets.y_targets[r];
        const Word va = value_at(a);
        const Word vb = value_at(b);
        overlay[a] = vb;
        overlay[b] = va;
    }
    TableDiff diff;
    for (const auto& [pos, val] : overlay) {
        if (val != p2.forward(pos)) diff.entries.emplace_back(pos, val);
    }
    return diff;
}

}  // namespace

JointState build_joint_state(HybridWorld world, const AdversaryScript& script,
                             const HybridSample& sample) {
    script.validate();
    const std::size_t branches = script.branch_count();
    const std::size_t q1 = script.p1_queries.size();
    const std::size_t q2 = script.p2_queries.size();

    JointState state;
    state.n = script.n;
    state.q_e = script.q_e();
    state.q_p1 = q1;
    state.q_p2 = q2;
    state.amps.reserve(branches);
    state.b_out.reserve(branches * q1);
    state.d_out.reserve(branches * q2);
    state.register_tag_id.reserve(branches);
    state.reprogram_diff_id.reserve(branches);
    state.tag_table.push_back({});   // id 0: base register content
    state.diff_table.push_back({});  // id 0: oracle answered with plain P_2

    // Classical answers are world-determined and shared across branches.
    for (Word x : script.x_list) {
        state.y_out.push_back(world == HybridWorld::H0 ? sample.cipher(x) : sample.r.forward(x));
    }

    ReprogramRecord targets;
    std::unordered_map<std::uint32_t, std::uint16_t> mask_to_diff;
    if (world == HybridWorld::H1) {
        targets = compute_reprogram_targets(sample.keys, sample.p1, sample.p2, sample.r, script.x_list);
        mask_to_diff.emplace(0u, 0);
    }

    // Odometer over the sparse supports: p1 queries first, then p2 queries.
    std::vector<std::size_t> idx(q1 + q2, 0);
    std::vector<Word> a_points(q1);
    const auto support_size = [&](std::size_t pos) {
        return pos < q1 ? script.p1_queries[pos].support.size()
                        : script.p2_queries[pos - q1].support.size();
    };
    for (;;) {
        std::complex<double> amp(1.0, 0.0);
        for (std::size_t i = 0; i < q1; ++i) {
            a_points[i] = script.p1_queries[i].support[idx[i]];
            amp *= script.p1_queries[i].amps[idx[i]];
        }

        std::uint16_t diff_id = 0;
        if (world == HybridWorld::H1) {
            const std::uint32_t mask = flag_mask(a_points, script.x_list, sample.keys[0]);
            auto it = mask_to_diff.find(mask);
            if (it == mask_to_diff.end()) {
                TableDiff d = diff_for_mask(sample.p2, targets, mask);
                state.diff_table.push_back(d.entries);
                it = mask_to_diff.emplace(mask, static_cast<std::uint16_t>(state.diff_table.size() - 1)).first;
            }
            diff_id = it->second;
        }

        for (std::size_t i = 0; i < q1; ++i) state.b_out.push_back(sample.p1.forward(a_points[i]));
        for (std::size_t j = 0; j < q2; ++j) {
            const Word c = script.p2_queries[j].support[idx[q1 + j]];
            amp *= script.p2_queries[j].amps[idx[q1 + j]];
            Word out = sample.p2.forward(c);
            if (diff_id != 0) {
                for (const auto& [pos, val] : state.diff_table[diff_id]) {
                    if (pos == c) {
                        out = val;
                        break;
                    }
                }
            }
            state.d_out.push_back(out);
        }
        state.amps.push_back(amp);
        state.register_tag_id.push_back(0);  // swaps undone before hand-back
        state.reprogram_diff_id.push_back(diff_id);

        if (idx.empty()) break;
        int pos = static_cast<int>(idx.size()) - 1;
        while (pos >= 0) {
            if (++idx[static_cast<std::size_t>(pos)] < support_size(static_cast<std::size_t>(pos))) break;
            idx[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return state;
}

StateDistance trace_distance(const JointState& a, const JointState& b) {
    if (a.n != b.n || a.q_e != b.q_e || a.q_p1 != b.q_p1 || a.q_p2 != b.q_p2 ||
        a.branches() != b.branches()) {
        throw std::invalid_argument("trace_distance: mismatched script shapes");
    }
    const bool y_equal = a.y_out == b.y_out;
    std::complex<double> overlap(0.0, 0.0);
    if (y_equal) {
        const std::size_t q1 = a.q_p1;
        const std::size_t q2 = a.q_p2;
        for (std::size_t i = 0; i < a.branches(); ++i) {
            bool equal = a.tag_table[a.register_tag_id[i]] == b.tag_table[b.register_tag_id[i]];
            for (std::size_t k = 0; equal && k < q1; ++k) {
                equal = a.b_out[i * q1 + k] == b.b_out[i * q1 + k];
            }
            for (std::size_t k = 0; equal && k < q2; ++k) {
                equal = a.d_out[i * q2 + k] == b.d_out[i * q2 + k];
            }
            if (equal) overlap += std::conj(a.amps[i]) * b.amps[i];
        }
    }
    StateDistance out;
    out.overlap = overlap;
    out.trace_distance = std::sqrt(std::max(0.0, 1.0 - std::norm(overlap)));
    return out;
}

nlohmann::ordered_json HybridTrialsReport::to_json() const {
    nlohmann::ordered_json j;
    j["params"] = {{"n", n}, {"q_E", q_e}, {"q_P1", q_p1}, {"q_P2", q_p2}, {"samples", samples}};
    j["mean_td_h1h2"] = mean_td_h1h2;
    j["max_td_h1h2"] = max_td_h1h2;
    j["bound_h1h2"] = bound_h1h2;
    j["mean_td_h0h1"] = mean_td_h0h1;
    j["p_coll_formula"] = p_coll_formula;
    j["p_coll_empirical"] = p_coll_empirical;
    j["certificate_violations"] = certificate_violations;
    j["reprogram_identity_violations"] = reprogram_identity_violations;
    j["mean_certificate"] = mean_certificate;
    return j;
}

HybridTrialsReport run_hybrid_trials(const AdversaryScript& script, int trials, Rng& rng) {
    script.validate();
    HybridTrialsReport report;
    report.n = script.n;
    report.q_e = script.q_e();
    report.q_p1 = script.p1_queries.size();
    report.q_p2 = script.p2_queries.size();
    report.samples = trials;
    const double domain = std::ldexp(1.0, script.n);
    report.bound_h1h2 = 2.0 * static_cast<double>(report.q_p2) * static_cast<double>(report.q_p1) *
                        std::sqrt(static_cast<double>(report.q_e)) / domain;
    report.p_coll_formula =
        std::min(1.0, static_cast<double>(report.q_e) * static_cast<double>(report.q_e) / domain);

    int collisions = 0;
    for (int s = 0; s < trials; ++s) {
        const HybridSample sample = HybridSample::draw(script.n, rng);
        const ReprogramRecord targets =
            compute_reprogram_targets(sample.keys, sample.p1, sample.p2, sample.r, script.x_list);

        const JointState h1 = build_joint_state(HybridWorld::H1, script, sample);
        const JointState h2 = build_joint_state(HybridWorld::H2, script, sample);
        const double td12 = trace_distance(h1, h2).trace_distance;
        report.mean_td_h1h2 += td12;
        report.max_td_h1h2 = std::max(report.max_td_h1h2, td12);

        // Certificate: S covers every point any branch's reprogramming can
        // move, i.e. {X_r, Y_r} over the r reachable from the P_1 supports.
        std::unordered_set<Word> cover;
        for (std::size_t r = 0; r < script.x_list.size(); ++r) {
            const Word probe = script.x_list[r] ^ sample.keys[0];
            bool reachable = false;
            for (const auto& q : script.p1_queries) {
                for (Word a : q.support) {
                    if (a == probe) {
                        reachable = true;
                        break;
                    }
                }
                if (reachable) break;
            }
            if (reachable) {
                cover.insert(targets.x_targets[r]);
                cover.insert(targets.y_targets[r]);
            }
        }
        double certificate = 0.0;
        for (const auto& q : script.p2_queries) {
            double p_hit = 0.0;
            for (std::size_t i = 0; i < q.support.size(); ++i) {
                if (cover.count(q.support[i])) p_hit += std::norm(q.amps[i]);
            }
            certificate += std::sqrt(p_hit);
        }
        certificate *= std::sqrt(2.0);
        report.mean_certificate += certificate;
        if (td12 > certificate + 1e-9) ++report.certificate_violations;

        collisions += targets.collision;
        if (!targets.collision) {
            // Exact reprogramming: P_2'(X_r) = R(x_r) ^ k_2 for every r.
            std::vector<std::pair<Word, Word>> swaps;
            for (std::size_t r = 0; r < targets.x_targets.size(); ++r) {
                swaps.emplace_back(targets.x_targets[r], targets.y_targets[r]);
            }
            const std::vector<bool> all_active(swaps.size(), true);
            const Permutation p2p = reprogram_permutation(sample.p2, swaps, all_active);
            for (std::size_t r = 0; r < script.x_list.size(); ++r) {
                const Word want = static_cast<Word>(sample.r.forward(script.x_list[r]) ^ sample.keys[2]);
                if (p2p.forward(targets.x_targets[r]) != want) {
                    ++report.reprogram_identity_violations;
                    break;
                }
            }
            // Coupled real world: same keys, (P_1, P_2'), cipher E' built on
            // them. Collision-free, E'(x_r) = R(x_r) so only the unswapped
            // branches can differ.
            HybridSample coupled = sample;
            coupled.p2 = p2p;
            const JointState h0p = build_joint_state(HybridWorld::H0, script, coupled);
            report.mean_td_h0h1 += trace_distance(h0p, h1).trace_distance;
        } else {
            HybridSample coupled = sample;
            std::vector<std::pair<Word, Word>> swaps;
            for (std::size_t r = 0; r < targets.x_targets.size(); ++r) {
                swaps.emplace_back(targets.x_targets[r], targets.y_targets[r]);
            }
            const std::vector<bool> all_active(swaps.size(), true);
            coupled.p2 = reprogram_permutation(sample.p2, swaps, all_active);
            const JointState h0p = build_joint_state(HybridWorld::H0, script, coupled);
            report.mean_td_h0h1 += trace_distance(h0p, h1).trace_distance;
        }
    }
    if (trials > 0) {
        report.mean_td_h1h2 /= trials;
        report.mean_td_h0h1 /= trials;
        report.mean_certificate /= trials;
        report.p_coll_empirical = static_cast<double>(collisions) / trials;
    }
    return report;
}

double advantage_bound_q1(int t, int n, double q_e, std::span<const double> q_p) {
    if (static_cast<int>(q_p.size()) != t) throw std::invalid_argument("advantage_bound_q1: need t counts");
    double prod = 1.0;
    for (double q : q_p) prod *= q;
    return 4.0 * prod * std::sqrt(q_e) / std::exp2(static_cast<double>(t) * n / 2.0);
}

double advantage_bound_q2(int t, int n, std::span<const double> q_all) {
    if (static_cast<int>(q_all.size()) != t + 1) {
        throw std::invalid_argument("advantage_bound_q2: need q_{P_0}..q_{P_t}");
    }
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= t; ++i) {
        double prod = 1.0;
        for (int l = 0; l <= t; ++l) {
            if (l != i) prod *= q_all[static_cast<std::size_t>(l)];
        }
        best = std::min(best, prod);
    }
    return 4.0 * best / std::exp2(static_cast<double>(t - 1) * n / 2.0);
}

double advantage_bound_lifted_cipher(int t, int n, std::span<const double> q_p) {
    return advantage_bound_q1(t, n, std::exp2(n), q_p);
}

SumCaptureResult sum_capture_expectation(std::span<const int> set_sizes, int n, Word target,
                                         int trials, Rng& rng) {
    const int t = static_cast<int>(set_sizes.size());
    if (t < 1) throw std::invalid_argument("sum_capture_expectation: need at least one set");
    const std::uint64_t domain = std::uint64_t{1} << n;
    SumCaptureResult out;
    out.trials = trials;
    out.expected = 1.0;
    for (int m : set_sizes) {
        if (m < 0 || static_cast<std::uint64_t>(m) > domain) {
            throw std::invalid_argument("sum_capture_expectation: set size out of range");
        }
        out.expected *= static_cast<double>(m);
    }
    out.expected /= static_cast<double>(domain);

    double sum = 0.0, sum_sq = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<std::vector<Word>> sets;
        sets.reserve(static_cast<std::size_t>(t));
        bool empty = false;
        for (int i = 0; i < t; ++i) {
            sets.push_back(sample_distinct(domain, static_cast<std::size_t>(set_sizes[i]), rng));
            empty |= sets.back().empty();
        }
        std::uint64_t count = 0;
        if (!empty) {
            std::vector<bool> last_member(domain, false);
            for (Word w : sets.back()) last_member[w] = true;
            // enumerate the first t-1 sets; membership test closes the equation
            std::vector<std::size_t> idx(static_cast<std::size_t>(t - 1), 0);
            for (;;) {
                Word acc = target;
                for (int i = 0; i < t - 1; ++i) acc ^= sets[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
                count += last_member[acc];
                int pos = t - 2;
                while (pos >= 0) {
                    if (++idx[static_cast<std::size_t>(pos)] < sets[static_cast<std::size_t>(pos)].size()) break;
                    idx[static_cast<std::size_t>(pos)] = 0;
                    --pos;
                }
                if (pos < 0) break;
            }
        }
        sum += static_cast<double>(count);
        sum_sq += static_cast<double>(count) * static_cast<double>(count);
    }
    if (trials > 0) {
        out.empirical_mean = sum / trials;
        const double var = std::max(0.0, sum_sq / trials - out.empirical_mean * out.empirical_mean);
        out.empirical_std = std::sqrt(var);
    }
    return out;
}

}  // namespace kacq
