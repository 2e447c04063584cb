// Acceptance suite: one numbered criterion per function, each printing a
// single PASS/FAIL line with the measured numbers. Run all or --criterion N.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "grover_reference.hpp"
#include "kacq/experiments.hpp"

using namespace kacq;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::cout << "criterion " << id << (pass ? " PASS: " : " FAIL: ") << detail << "\n";
    if (!pass) ++g_failures;
}

// 1. Classical attack at n=8, t=2, beta=3: 100 seeded trials recover the key
//    at rate >= 0.40, mean classical queries within 2x of 3*(3*2^16)^{1/3},
//    wall time under a minute.
void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    int recovered = 0;
    double queries = 0.0;
    const int trials = 100;
    for (int i = 0; i < trials; ++i) {
        Rng rng = trial_rng(2000006, static_cast<std::uint64_t>(i));
        const KacInstance inst = sample_kac_instance(8, 2, KeyDistribution::independent(), rng);
        const ClassicalAttackResult r = run_classical_attack(inst, 3.0, rng);
        recovered += (r.success && r.guess == inst.schedule.keys);
        queries += static_cast<double>(r.queries);
    }
    const double rate = recovered / 100.0;
    const double mean_queries = queries / trials;
    const double target = 3.0 * std::pow(3.0 * 65536.0, 1.0 / 3.0);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = rate >= 0.40 && mean_queries <= 2.0 * target && mean_queries >= target / 2.0 &&
                      secs < 60.0;
    std::ostringstream os;
    os << "success " << rate << " (>=0.40), mean queries " << mean_queries << " vs 2x" << target
       << ", " << secs << "s";
    report(1, pass, os.str());
}

// 2. Candidate-frequency law at n=6, t=2, beta=3: the true key's mean
//    multiplicity over 200 trials lies in [beta-1, beta+1].
void criterion_2() {
    const int trials = 200;
    double mean_mult = 0.0;
    for (int i = 0; i < trials; ++i) {
        Rng rng = trial_rng(7070, static_cast<std::uint64_t>(i));
        const KacInstance inst = sample_kac_instance(6, 2, KeyDistribution::independent(), rng);
        const SampleSets sets = sample_input_sets(6, 2, 3.0, rng);
        QueryLedger ledger(2);
        const AccessPolicy policy = AccessPolicy::classical_only(2);
        OracleSuite suite(inst, policy, ledger);
        const CandidateMultiset multiset = generate_key_candidates(sets, suite);
        mean_mult += multiset.multiplicity(pack_words(inst.schedule.keys, 6));
    }
    mean_mult /= trials;
    const bool pass = mean_mult >= 2.0 && mean_mult <= 4.0;
    std::ostringstream os;
    os << "mean true-key multiplicity " << mean_mult << " (target [2, 4])";
    report(2, pass, os.str());
}

// 3. Sum-capture: empirical mean within 3 sigma of prod(m_i)/2^n for t=2 over
//    2000 trials; covers (n=3, m=4), (n=6, m=4), (n=6, m=16).
void criterion_3() {
    struct Case {
        int n;
        int m;
    };
    bool pass = true;
    std::ostringstream os;
    Rng rng(515151);
    for (const Case c : {Case{3, 4}, Case{6, 4}, Case{6, 16}}) {
        const std::vector<int> sizes = {c.m, c.m};
        const SumCaptureResult r = sum_capture_expectation(sizes, c.n, 1, 2000, rng);
        const double sigma = r.empirical_std / std::sqrt(2000.0);
        const bool ok = std::abs(r.empirical_mean - r.expected) <= 3.0 * sigma + 1e-12;
        pass &= ok;
        os << "(n=" << c.n << ",m=" << c.m << ": " << r.empirical_mean << " vs " << r.expected
           << " +-" << 3.0 * sigma << ") ";
    }
    report(3, pass, os.str());
}

// 4. Grover engine vs statevector: auto-iteration success probabilities agree
//    within 1e-9 for all n <= 6 and |M| in {1, 2, 4}.
void criterion_4() {
    Rng rng(99);
    double worst = 0.0;
    for (int bits = 1; bits <= 6; ++bits) {
        const std::uint64_t N = std::uint64_t{1} << bits;
        for (std::uint64_t m_count : {1ull, 2ull, 4ull}) {
            if (m_count > N) continue;
            std::vector<bool> marked(N, false);
            std::uint64_t placed = 0;
            while (placed < m_count) {
                const std::uint64_t x = rng.below(N);
                if (!marked[x]) {
                    marked[x] = true;
                    ++placed;
                }
            }
            PredicateOracle pred;
            pred.domain_bits = bits;
            pred.eval = [&marked](Word x) { return marked[x]; };
            const GroverReport r = grover_run(pred, std::nullopt, rng);
            const double ref = testing::grover_statevector_success(N, marked, r.iterations);
            worst = std::max(worst, std::abs(r.success_prob - ref));
        }
    }
    std::ostringstream os;
    os << "max |analytic - statevector| = " << worst << " (< 1e-9)";
    report(4, worst < 1e-9, os.str());
}

// 5. Same-key attack at n=10, t=3: 50 trials, success >= 0.9; per trial
//    E.classical <= 2, E.quantum = 0, permutation quantum = 3 * iterations.
void criterion_5() {
    int recovered = 0;
    bool ledger_ok = true;
    const int trials = 50;
    for (int i = 0; i < trials; ++i) {
        Rng rng = trial_rng(424242, static_cast<std::uint64_t>(i));
        const KacInstance inst = sample_kac_instance(10, 3, KeyDistribution::all_equal(), rng);
        const GroverAttackResult r = attack_same_key(inst, rng);
        recovered += (r.success && r.keys[0] == inst.schedule.keys[0]);
        ledger_ok &= r.ledger.combined(OracleId::cipher()).classical <= 2;
        ledger_ok &= r.ledger.combined(OracleId::cipher()).quantum == 0;
        ledger_ok &= r.ledger.perm_quantum_total() == 3 * r.iterations;
    }
    const double rate = recovered / static_cast<double>(trials);
    std::ostringstream os;
    os << "success " << rate << " (>=0.9), ledger constraints " << (ledger_ok ? "hold" : "VIOLATED");
    report(5, rate >= 0.9 && ledger_ok, os.str());
}

// 6. First/last-key attack at n=10: 50 trials recover (k0, k1) at rate >= 0.9
//    with at most 3 classical cipher queries.
void criterion_6() {
    int recovered = 0;
    bool ledger_ok = true;
    const int trials = 50;
    for (int i = 0; i < trials; ++i) {
        Rng rng = trial_rng(515, static_cast<std::uint64_t>(i));
        const KacInstance inst = sample_kac_instance(10, 2, KeyDistribution::first_last_equal(), rng);
        const GroverAttackResult r = attack_first_last_equal(inst, rng);
        recovered += (r.success && r.keys[0] == inst.schedule.keys[0] &&
                      r.keys[1] == inst.schedule.keys[1]);
        ledger_ok &= r.ledger.combined(OracleId::cipher()).classical <= 3;
        ledger_ok &= r.ledger.combined(OracleId::cipher()).quantum == 0;
    }
    const double rate = recovered / static_cast<double>(trials);
    std::ostringstream os;
    os << "success " << rate << " (>=0.9), E.classical <= 3 " << (ledger_ok ? "holds" : "VIOLATED");
    report(6, rate >= 0.9 && ledger_ok, os.str());
}

// 7. Walk attack: planted instance recovered deterministically; desk profile
//    n=8, t=2 recovers >= 40% of 30 trials within budget 50/sqrt(eps); the
//    marked check issues zero queries.
void criterion_7() {
    Rng prng(818181);
    PlantedWalk planted = make_planted_walk(8, 2, prng);
    const WalkResult planted_run = emulate_walk_search(planted.inst, planted.plan, prng);
    const bool planted_ok = planted_run.success && planted_run.steps_taken == 0 &&
                            planted_run.key == planted.inst.schedule.keys;

    // zero-query check: ledger snapshot around is_marked on cached data
    bool zero_query_ok = false;
    {
        QueryLedger ledger(2);
        const AccessPolicy policy = AccessPolicy::q1(2);
        OracleSuite suite(planted.inst, policy, ledger);
        std::vector<Word> e_vals;
        for (Word x : planted.plan.sets[0]) e_vals.push_back(suite.cipher().classical(Dir::Forward, x));
        WalkVertex vertex;
        vertex.elems = {planted.plan.sets[1], planted.plan.sets[2]};
        vertex.data.resize(2);
        for (int c = 0; c < 2; ++c) {
            for (Word x : vertex.elems[static_cast<std::size_t>(c)]) {
                vertex.data[static_cast<std::size_t>(c)].push_back(
                    suite.perm(c + 1).quantum_point(Dir::Forward, x));
            }
        }
        const auto before = ledger.to_json();
        (void)is_marked_vertex(vertex, planted.plan.sets[0], e_vals, 8, 2);
        zero_query_ok = (ledger.to_json() == before);
    }

    int recovered = 0;
    const int trials = 30;
    for (int i = 0; i < trials; ++i) {
        Rng rng = trial_rng(2000006, static_cast<std::uint64_t>(i));
        const KacInstance inst = sample_kac_instance(8, 2, KeyDistribution::independent(), rng);
        WalkPlan plan = desk_profile(8, 2);
        sample_plan_sets(plan, rng);
        const WalkResult r = emulate_walk_search(inst, plan, rng);
        recovered += (r.success && r.key == inst.schedule.keys);
    }
    const double rate = recovered / static_cast<double>(trials);
    std::ostringstream os;
    os << "planted " << (planted_ok ? "ok" : "FAILED") << ", desk success " << rate
       << " (>=0.40), marked-check queries " << (zero_query_ok ? "zero" : "NONZERO");
    report(7, planted_ok && zero_query_ok && rate >= 0.40, os.str());
}

// 8. Walk exponent: cost-model log slope over n in {12,16,20} within 0.02 of
//    gamma for t in {1,2,3}; numeric argmin over r at T=64, t=2 within +-1 of
//    T^{t(t+1)/(t(t+1)+1)}.
void criterion_8() {
    bool slope_ok = true;
    std::ostringstream os;
    for (int t : {1, 2, 3}) {
        const double gamma = plan_parameters(12, t).gamma();
        double prev_log = 0.0;
        int prev_n = 0;
        for (int n : {12, 16, 20}) {
            const WalkPlan plan = plan_parameters(n, t);
            const double log_cost = std::log2(walk_cost_model(plan).total);
            if (prev_n != 0) {
                const double slope = (log_cost - prev_log) / (n - prev_n);
                slope_ok &= std::abs(slope - gamma) < 0.02;
            }
            prev_log = log_cost;
            prev_n = n;
        }
        os << "t=" << t << " gamma=" << gamma << " ";
    }

    const int T = 64, t2 = 2;
    int argmin = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 1; r < T; ++r) {
        const double total = walk_cost_for_r(t2, T, r).total;
        if (total < best) {
            best = total;
            argmin = r;
        }
    }
    const double r_star = std::pow(static_cast<double>(T), 6.0 / 7.0);
    const bool argmin_ok = std::abs(argmin - r_star) <= 1.0;
    os << "| slopes " << (slope_ok ? "ok" : "OFF") << "; sweep argmin r=" << argmin
       << " vs T^(6/7)=" << r_star << " (sum-minimum sits at ((m-1)/2)^(2/7)*T^(6/7)="
       << std::pow(2.5, 2.0 / 7.0) * r_star << ", so the +-1 match to the balance point fails)";
    report(8, slope_ok && argmin_ok, os.str());
}

// 9. Marked fraction: pooled empirical epsilon over 1000 vertex samples is at
//    least 0.5 * (r/T)^{t(t+1)} at the desk profile.
void criterion_9() {
    const int instances = 50;
    const int per_instance = 20;
    int marked = 0;
    double eps_formula = 0.0;
    for (int i = 0; i < instances; ++i) {
        Rng rng = trial_rng(36963, static_cast<std::uint64_t>(i));
        const KacInstance inst = sample_kac_instance(8, 2, KeyDistribution::independent(), rng);
        WalkPlan plan = desk_profile(8, 2);
        sample_plan_sets(plan, rng);
        eps_formula = plan.epsilon_formula();
        const MarkedFraction mf = measure_marked_fraction(inst, plan, per_instance, rng);
        marked += mf.marked;
    }
    const double empirical = marked / static_cast<double>(instances * per_instance);
    const double floor = 0.5 * eps_formula;
    std::ostringstream os;
    os << "empirical eps " << empirical << " vs floor " << floor << " over "
       << instances * per_instance << " samples";
    report(9, empirical >= floor, os.str());
}

// 10. Hybrid bound at n=8, q_E=1, q_P1=q_P2=1, uniform supports, 500 samples:
//     mean TD(H1,H2) <= 2 q_P2 q_P1 sqrt(q_E)/2^n and the per-sample
//     certificate is never violated.
void criterion_10() {
    Rng rng(778899);
    const AdversaryScript script = AdversaryScript::uniform(8, 1, 1, 1, rng);
    const HybridTrialsReport r = run_hybrid_trials(script, 500, rng);
    const bool pass = r.mean_td_h1h2 <= r.bound_h1h2 + 1e-15 && r.certificate_violations == 0;
    std::ostringstream os;
    os << "mean TD " << r.mean_td_h1h2 << " <= bound " << r.bound_h1h2 << ", certificate violations "
       << r.certificate_violations;
    report(10, pass, os.str());
}

// 11. Collision rate: empirical Pr[{X_r} cap {Y_r} != {}] <= min(1, q_E^2/2^n)
//     + 3 sigma at n=8, q_E in {2,4,8}; collision-free samples satisfy the
//     reprogramming identity exactly.
void criterion_11() {
    bool pass = true;
    std::ostringstream os;
    for (int q_e : {2, 4, 8}) {
        Rng rng(606060 + static_cast<std::uint64_t>(q_e));
        const int samples = 2000;
        int collisions = 0;
        int identity_violations = 0;
        for (int s = 0; s < samples; ++s) {
            const HybridSample sample = HybridSample::draw(8, rng);
            const auto xs = sample_distinct(256, static_cast<std::size_t>(q_e), rng);
            const ReprogramRecord rec =
                compute_reprogram_targets(sample.keys, sample.p1, sample.p2, sample.r, xs);
            if (rec.collision) {
                ++collisions;
                continue;
            }
            std::vector<std::pair<Word, Word>> swaps;
            for (std::size_t r = 0; r < xs.size(); ++r) {
                swaps.emplace_back(rec.x_targets[r], rec.y_targets[r]);
            }
            const std::vector<bool> active(swaps.size(), true);
            const Permutation p2p = reprogram_permutation(sample.p2, swaps, active);
            for (std::size_t r = 0; r < xs.size(); ++r) {
                if (p2p.forward(rec.x_targets[r]) != (sample.r.forward(xs[r]) ^ sample.keys[2])) {
                    ++identity_violations;
                    break;
                }
            }
        }
        const double rate = collisions / static_cast<double>(samples);
        const double formula = std::min(1.0, q_e * q_e / 256.0);
        const double sigma = std::sqrt(formula * (1.0 - formula) / samples);
        const bool ok = rate <= formula + 3.0 * sigma && identity_violations == 0;
        pass &= ok;
        os << "(q_E=" << q_e << ": " << rate << " <= " << formula << "+3s, idviol "
           << identity_violations << ") ";
    }
    report(11, pass, os.str());
}

// 12. Bound calculators: Q1 at t=1, q=2^{n/3} evaluates to the constant 4;
//     Q2 at t=2, q=2^{n/4} is the constant 4; lifted(E) equals the Q2 i=0
//     term exactly.
void criterion_12() {
    bool pass = true;
    for (int n : {6, 12, 24}) {
        const double q = std::exp2(n / 3.0);
        const std::vector<double> qp = {q};
        pass &= std::abs(advantage_bound_q1(1, n, q, qp) - 4.0) < 1e-9;
    }
    for (int n : {8, 16, 24}) {
        const double q = std::exp2(n / 4.0);
        const std::vector<double> q_all = {q, q, q};
        pass &= std::abs(advantage_bound_q2(2, n, q_all) - 4.0) < 1e-9;
    }
    bool lifted_ok = true;
    for (int n : {8, 10}) {
        for (double q1 : {2.0, 5.0}) {
            for (double q2 : {3.0, 9.0}) {
                const std::vector<double> qp = {q1, q2};
                const double lifted = advantage_bound_lifted_cipher(2, n, qp);
                const double i0 = 4.0 * q1 * q2 / std::exp2((2 - 1) * n / 2.0);
                lifted_ok &= std::abs(lifted - i0) < 1e-12;
            }
        }
    }
    pass &= lifted_ok;
    std::ostringstream os;
    os << "Q1 constant 4, Q2 constant 4, lifted(E) == Q2 i=0 term "
       << (lifted_ok ? "exactly" : "MISMATCH");
    report(12, pass, os.str());
}

// 13. Table pinning: the emitted families match the published exponents as
//     exact rationals on every formulaic cell.
void criterion_13() {
    struct Expect {
        int t;
        Setting setting;
        BoundKind kind;
        Rational value;
    };
    // frozen from the published summary table
    const std::vector<Expect> expected = {
        {1, Setting::Classical, BoundKind::Upper, {1, 2}},
        {1, Setting::Classical, BoundKind::Lower, {1, 2}},
        {1, Setting::Q1, BoundKind::Lower, {1, 3}},
        {2, Setting::Classical, BoundKind::Upper, {2, 3}},
        {2, Setting::Classical, BoundKind::Lower, {2, 3}},
        {2, Setting::Q1, BoundKind::Upper, {3, 5}},
        {2, Setting::Q1, BoundKind::Lower, {2, 5}},
        {2, Setting::Q2, BoundKind::Lower, {1, 4}},
    };
    const auto records = exponent_table(2);
    bool pass = true;
    for (const auto& e : expected) {
        bool found = false;
        for (const auto& rec : records) {
            if (rec.t == e.t && rec.setting == e.setting && rec.kind == e.kind) {
                found = rec.exponent && *rec.exponent == e.value;
                break;
            }
        }
        pass &= found;
    }
    // generic-t rows: spot check the families at t = 5
    pass &= classical_exponent(5) == Rational{5, 6};
    pass &= q1_lower_exponent(5) == Rational{5, 11};
    pass &= q1_upper_exponent(5) == Rational{30, 37};
    pass &= q2_lower_exponent(5) == Rational{2, 5};
    report(13, pass, pass ? "all formulaic cells match exactly" : "a cell mismatched");
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
    }
    using Fn = void (*)();
    const Fn criteria[] = {criterion_1, criterion_2,  criterion_3,  criterion_4, criterion_5,
                           criterion_6, criterion_7,  criterion_8,  criterion_9, criterion_10,
                           criterion_11, criterion_12, criterion_13};
    for (int i = 0; i < 13; ++i) {
        if (only == 0 || only == i + 1) criteria[i]();
    }
    return g_failures;
}
