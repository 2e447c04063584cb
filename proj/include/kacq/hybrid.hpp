#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kacq/kac.hpp"
#include "kacq/oracle.hpp"

namespace kacq {

// One quantum query committed in advance: a normalized amplitude vector with
// explicit sparse support.
struct SparseQuery {
    std::vector<Word> support;
    std::vector<std::complex<double>> amps;

    static SparseQuery uniform(int n);
    static SparseQuery point(Word x);
    static SparseQuery uniform_over(std::vector<Word> support);
    void validate(int n) const;  // support in range & distinct, L2 norm within 1e-12
};

// Non-adaptive adversary against 2-KAC in the Q1 model: q_E distinct
// classical inputs plus product-form amplitude vectors for the P_1 and P_2
// queries, all fixed before any interaction.
struct AdversaryScript {
    int n = 0;
    std::vector<Word> x_list;
    std::vector<SparseQuery> p1_queries;
    std::vector<SparseQuery> p2_queries;

    std::size_t q_e() const { return x_list.size(); }
    std::size_t branch_count() const;
    void validate() const;

    static AdversaryScript uniform(int n, int q_e, int q_p1, int q_p2, Rng& rng);
};

// One draw of the simulator's randomness.
struct HybridSample {
    std::array<Word, 3> keys{};  // k_0, k_1, k_2
    Permutation p1, p2, r;

    static HybridSample draw(int n, Rng& rng);
    Word cipher(Word x) const {  // E_k through (P_1, P_2)
        return static_cast<Word>(p2.forward(static_cast<Word>(p1.forward(x ^ keys[0]) ^ keys[1])) ^ keys[2]);
    }
};

// Swap targets X_r = P_1(x_r^k_0)^k_1 and Y_r = P_2^{-1}(R(x_r)^k_2), plus
// the swap-collision predicate {X_r} ∩ {Y_r} != {}.
struct ReprogramRecord {
    std::vector<Word> x_targets;
    std::vector<Word> y_targets;
    bool collision = false;
};

ReprogramRecord compute_reprogram_targets(const std::array<Word, 3>& keys, const Permutation& p1,
                                          const Permutation& p2, const Permutation& r,
                                          std::span<const Word> x_list);

// P_2 composed with the transpositions swap_{X_r,Y_r} whose flag is set,
// applied in ascending r. Always a permutation.
Permutation reprogram_permutation(const Permutation& p2,
                                  std::span<const std::pair<Word, Word>> swaps,
                                  const std::vector<bool>& active_flags);

// Per-r indicator [a == x_r ^ k_0] for one support point.
std::vector<bool> flag_bits(Word a_point, std::span<const Word> x_list, Word k0);
// Branch-level g_r(a-vector) = OR over the points of the branch, as a bitmask.
std::uint32_t flag_mask(std::span<const Word> a_points, std::span<const Word> x_list, Word k0);

enum class HybridWorld { H0, H1, H2 };

// Post-interaction joint state over the script's sparse branch space.
// Branch order is the odometer over (p1 supports..., p2 supports...), so
// states built from the same script are index-aligned.
//
// The simulator computes flags and targets into ancillas, applies the
// controlled swaps to the P_2 table register, answers the P_2 queries, then
// re-applies the swaps and uncomputes the ancillas. The register therefore
// returns to its base content in every branch (register_tag_id stays 0) and
// the branch dependence lives in the D outputs; reprogram_diff_id records
// which table diff answered each branch.
struct JointState {
    int n = 0;
    std::size_t q_e = 0, q_p1 = 0, q_p2 = 0;
    std::vector<Word> y_out;                   // classical answers, shared by all branches
    std::vector<std::complex<double>> amps;    // per branch
    std::vector<Word> b_out;                   // branches x q_p1
    std::vector<Word> d_out;                   // branches x q_p2
    std::vector<std::uint16_t> register_tag_id;  // per branch, into tag_table
    std::vector<std::vector<std::pair<Word, Word>>> tag_table;  // canonical register diffs vs base P_2
    std::vector<std::uint16_t> reprogram_diff_id;  // per branch, into diff_table
    std::vector<std::vector<std::pair<Word, Word>>> diff_table;

    std::size_t branches() const { return amps.size(); }
    double norm_sq() const;
};

JointState build_joint_state(HybridWorld world, const AdversaryScript& script,
                             const HybridSample& sample);

struct StateDistance {
    std::complex<double> overlap;
    double trace_distance = 0.0;  // sqrt(1 - |overlap|^2)
};

// Branch-wise overlap: a branch contributes amp_A* amp_B when every output
// word and the register tag agree, else 0.
StateDistance trace_distance(const JointState& a, const JointState& b);

struct HybridTrialsReport {
    int n = 0;
    std::size_t q_e = 0, q_p1 = 0, q_p2 = 0;
    int samples = 0;
    double mean_td_h1h2 = 0.0;
    double max_td_h1h2 = 0.0;
    double bound_h1h2 = 0.0;  // 2 q_{P2} q_{P1} sqrt(q_E) / 2^n
    double mean_td_h0h1 = 0.0;
    double p_coll_formula = 0.0;  // min(1, q_E^2/2^n)
    double p_coll_empirical = 0.0;
    int certificate_violations = 0;
    int reprogram_identity_violations = 0;
    double mean_certificate = 0.0;

    nlohmann::ordered_json to_json() const;
};

// For each sample: build H1/H2, record TD(H1,H2) against the Lemma bound and
// the per-sample certificate sqrt(2)*sum_j sqrt(p_j(S)); check the
// no-collision reprogramming identity P_2'(X_r) = R(x_r)^k_2 exactly; record
// TD between H1 and the real world rebuilt on (P_1, P_2', E') as td_h0h1.
HybridTrialsReport run_hybrid_trials(const AdversaryScript& script, int trials, Rng& rng);

// Closed-form advantage bounds.
// Q1: 4 * prod q_{P_i} * sqrt(q_E) / 2^{tn/2}.
double advantage_bound_q1(int t, int n, double q_e, std::span<const double> q_p);
// Q2: (4 / 2^{(t-1)n/2}) * min_i prod_{l != i} q_{P_l}, q_{P_0} = quantum E queries.
double advantage_bound_q2(int t, int n, std::span<const double> q_all);
// Q1 formula with one oracle's count replaced by the full codebook 2^n.
double advantage_bound_lifted_cipher(int t, int n, std::span<const double> q_p);

struct SumCaptureResult {
    double expected = 0.0;  // prod m_i / 2^n
    double empirical_mean = 0.0;
    double empirical_std = 0.0;
    int trials = 0;
};

// Brute-force count of solutions to x_1 ^ ... ^ x_t = a over random sets of
// the given sizes, against the closed form.
SumCaptureResult sum_capture_expectation(std::span<const int> set_sizes, int n, Word target,
                                         int trials, Rng& rng);

}  // namespace kacq
