#include "kacq/experiments.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

namespace kacq {

namespace {

nlohmann::ordered_json words_json(const std::vector<Word>& words) {
    return nlohmann::ordered_json(words);
}

nlohmann::ordered_json histogram_json(const std::map<std::uint32_t, std::uint64_t>& hist) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [mult, count] : hist) j[std::to_string(mult)] = count;
    return j;
}

}  // namespace

void parallel_for_trials(int trials, int workers, const std::function<void(int)>& body) {
    workers = std::max(1, std::min(workers, trials));
    if (workers == 1) {
        for (int i = 0; i < trials; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= trials) return;
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

nlohmann::ordered_json run_classical_batch(int n, int t, double beta, const BatchConfig& cfg) {
    struct Trial {
        ClassicalAttackResult result;
        bool recovered = false;
        std::vector<Word> true_key;
    };
    std::vector<Trial> trials(static_cast<std::size_t>(cfg.trials));
    parallel_for_trials(cfg.trials, cfg.workers, [&](int i) {
        Rng rng = trial_rng(cfg.seed, static_cast<std::uint64_t>(i));
        const KacInstance inst = sample_kac_instance(n, t, KeyDistribution::independent(), rng);
        auto& trial = trials[static_cast<std::size_t>(i)];
        trial.result = run_classical_attack(inst, beta, rng);
        trial.true_key = inst.schedule.keys;
        trial.recovered = trial.result.success && trial.result.guess == inst.schedule.keys;
    });

    int recovered = 0;
    double total_queries = 0.0;
    QueryLedger merged;
    auto detail = nlohmann::ordered_json::array();
    for (const auto& trial : trials) {
        recovered += trial.recovered;
        total_queries += static_cast<double>(trial.result.queries);
        merged.merge(trial.result.ledger);
        nlohmann::ordered_json j;
        j["success"] = trial.result.success;
        j["recovered"] = trial.recovered;
        j["guessed_key"] = trial.result.guess ? words_json(*trial.result.guess) : nlohmann::ordered_json(nullptr);
        j["true_key"] = words_json(trial.true_key);
        j["queries"] = trial.result.queries;
        j["multiplicities_histogram"] = histogram_json(trial.result.multiplicity_histogram);
        j["ledger"] = trial.result.ledger.to_json();
        detail.push_back(std::move(j));
    }

    nlohmann::ordered_json out;
    out["subcommand"] = "attack-classical";
    out["config"] = {{"n", n}, {"t", t}, {"beta", beta}, {"trials", cfg.trials},
                     {"seed", cfg.seed}, {"workers", cfg.workers}};
    out["success_rate"] = cfg.trials > 0 ? static_cast<double>(recovered) / cfg.trials : 0.0;
    out["recovered"] = recovered;
    out["mean_queries_per_trial"] = cfg.trials > 0 ? total_queries / cfg.trials : 0.0;
    out["ledger_total"] = merged.to_json("classical");
    out["trials"] = std::move(detail);
    return out;
}

nlohmann::ordered_json run_grover_batch(GroverAttackKind kind, int n, int t, int repeated_index,
                                        const BatchConfig& cfg, int max_tries) {
    struct Trial {
        GroverAttackResult result;
        bool recovered = false;
        std::vector<Word> true_keys;
    };
    std::vector<Trial> trials(static_cast<std::size_t>(cfg.trials));
    parallel_for_trials(cfg.trials, cfg.workers, [&](int i) {
        Rng rng = trial_rng(cfg.seed, static_cast<std::uint64_t>(i));
        auto& trial = trials[static_cast<std::size_t>(i)];
        switch (kind) {
            case GroverAttackKind::SameKey: {
                const KacInstance inst = sample_kac_instance(n, t, KeyDistribution::all_equal(), rng);
                trial.result = attack_same_key(inst, rng, max_tries);
                trial.true_keys = {inst.schedule.keys[0]};
                break;
            }
            case GroverAttackKind::FirstLastEqual: {
                const KacInstance inst =
                    sample_kac_instance(n, 2, KeyDistribution::first_last_equal(), rng);
                trial.result = attack_first_last_equal(inst, rng, max_tries);
                trial.true_keys = {inst.schedule.keys[0], inst.schedule.keys[1]};
                break;
            }
            case GroverAttackKind::RepeatedKeys: {
                const KacInstance inst = sample_kac_instance(
                    n, t, KeyDistribution::repeated_except(repeated_index), rng);
                trial.result = attack_repeated_keys(inst, rng, max_tries);
                const int other = repeated_index == 0 ? 1 : 0;
                trial.true_keys = {inst.schedule.keys[static_cast<std::size_t>(other)],
                                   inst.schedule.keys[static_cast<std::size_t>(repeated_index)]};
                break;
            }
        }
        trial.recovered = trial.result.success && trial.result.keys == trial.true_keys;
    });

    int recovered = 0;
    double total_iterations = 0.0;
    QueryLedger merged;
    auto detail = nlohmann::ordered_json::array();
    std::string name;
    for (const auto& trial : trials) {
        recovered += trial.recovered;
        total_iterations += static_cast<double>(trial.result.iterations);
        merged.merge(trial.result.ledger);
        name = trial.result.attack_name;
        nlohmann::ordered_json j;
        j["attack_name"] = trial.result.attack_name;
        j["n"] = trial.result.n;
        j["t"] = trial.result.t;
        j["success"] = trial.result.success;
        j["recovered"] = trial.recovered;
        j["keys"] = words_json(trial.result.keys);
        j["true_keys"] = words_json(trial.true_keys);
        j["iterations"] = trial.result.iterations;
        j["tries"] = trial.result.tries;
        j["success_prob_theoretical"] = trial.result.success_prob_theoretical;
        j["ledger"] = trial.result.ledger.to_json();
        j["verification_ledger"] = trial.result.verification_ledger.to_json();
        detail.push_back(std::move(j));
    }

    nlohmann::ordered_json out;
    out["subcommand"] = "attack-grover";
    out["attack_name"] = name;
    out["config"] = {{"n", n}, {"t", t}, {"repeated_index", repeated_index}, {"trials", cfg.trials},
                     {"seed", cfg.seed}, {"workers", cfg.workers}, {"max_tries", max_tries}};
    out["success_rate"] = cfg.trials > 0 ? static_cast<double>(recovered) / cfg.trials : 0.0;
    out["recovered"] = recovered;
    out["mean_iterations"] = cfg.trials > 0 ? total_iterations / cfg.trials : 0.0;
    out["ledger_total"] = merged.to_json("q1");
    out["trials"] = std::move(detail);
    return out;
}

nlohmann::ordered_json run_walk_batch(int n, int t, const WalkBatchOptions& options,
                                      const BatchConfig& cfg) {
    struct Trial {
        WalkResult result;
        bool recovered = false;
        std::vector<Word> true_key;
        double epsilon_empirical = -1.0;
    };
    std::vector<Trial> trials(static_cast<std::size_t>(cfg.trials));
    parallel_for_trials(cfg.trials, cfg.workers, [&](int i) {
        Rng rng = trial_rng(cfg.seed, static_cast<std::uint64_t>(i));
        auto& trial = trials[static_cast<std::size_t>(i)];
        KacInstance inst;
        WalkPlan plan;
        if (options.planted) {
            PlantedWalk planted = make_planted_walk(n, t, rng);
            inst = std::move(planted.inst);
            plan = std::move(planted.plan);
        } else {
            inst = sample_kac_instance(n, t, KeyDistribution::independent(), rng);
            plan = desk_profile(n, t, options.mixed_access_index);
            if (options.r_override) plan.r = std::min(*options.r_override, plan.set_size);
            sample_plan_sets(plan, rng);
        }
        trial.result = emulate_walk_search(inst, plan, rng, options.step_budget);
        trial.true_key = inst.schedule.keys;
        trial.recovered = trial.result.success && trial.result.key == inst.schedule.keys;
        if (options.epsilon_samples > 0) {
            trial.epsilon_empirical =
                measure_marked_fraction(inst, plan, options.epsilon_samples, rng).fraction;
        }
    });

    int recovered = 0;
    QueryLedger merged;
    double eps_sum = 0.0;
    int eps_count = 0;
    auto detail = nlohmann::ordered_json::array();
    for (const auto& trial : trials) {
        recovered += trial.recovered;
        merged.merge(trial.result.ledger);
        nlohmann::ordered_json j;
        j["success"] = trial.result.success;
        j["recovered"] = trial.recovered;
        j["steps_taken"] = trial.result.steps_taken;
        j["budget"] = trial.result.budget;
        j["key"] = trial.result.key ? words_json(*trial.result.key) : nlohmann::ordered_json(nullptr);
        j["true_key"] = words_json(trial.true_key);
        j["marked_seen"] = trial.result.marked_seen;
        j["refuted_stops"] = trial.result.refuted_stops;
        j["stop_reason"] = trial.result.stop_reason;
        if (trial.epsilon_empirical >= 0.0) {
            j["epsilon_empirical"] = trial.epsilon_empirical;
            eps_sum += trial.epsilon_empirical;
            ++eps_count;
        }
        j["ledger"] = trial.result.ledger.to_json();
        detail.push_back(std::move(j));
    }

    const WalkResult first = trials.empty() ? WalkResult{} : trials.front().result;
    nlohmann::ordered_json out;
    out["subcommand"] = "attack-walk";
    out["config"] = {{"n", n}, {"t", t}, {"trials", cfg.trials}, {"seed", cfg.seed},
                     {"workers", cfg.workers},
                     {"r", first.r},
                     {"mixed_access_index", options.mixed_access_index},
                     {"planted", options.planted}};
    out["plan"] = {{"n", n}, {"t", t}, {"r", first.r}, {"set_size", first.set_size},
                   {"s0_size", first.s0_size}, {"budget", first.budget}};
    out["epsilon_formula"] = first.epsilon_formula;
    if (eps_count > 0) out["epsilon_empirical_mean"] = eps_sum / eps_count;
    out["cost_model"] = {{"setup", first.cost.setup}, {"update", first.cost.update},
                         {"check", first.cost.check}, {"delta", first.cost.delta},
                         {"epsilon", first.cost.epsilon}, {"total", first.cost.total}};
    out["success_rate"] = cfg.trials > 0 ? static_cast<double>(recovered) / cfg.trials : 0.0;
    out["recovered"] = recovered;
    out["ledger_total"] = merged.to_json(options.mixed_access_index >= 1 ? "mixed" : "q1");
    out["trials"] = std::move(detail);
    return out;
}

std::string walk_cost_sweep_csv(int n, int t) {
    const WalkPlan plan = plan_parameters(n, t);
    std::ostringstream out;
    out << "n,t,r,setup,update,check,delta,epsilon,total\n";
    for (int r = 1; r <= plan.set_size; ++r) {
        const WalkCostModel c = walk_cost_for_r(t, plan.set_size, r);
        out << n << ',' << t << ',' << r << ',' << c.setup << ',' << c.update << ',' << c.check << ','
            << c.delta << ',' << c.epsilon << ',' << c.total << '\n';
    }
    return out.str();
}

nlohmann::ordered_json run_hybrid_report(int n, int q_e, int q_p1, int q_p2, int samples,
                                         std::uint64_t seed) {
    Rng rng(mix64(seed));
    const AdversaryScript script = AdversaryScript::uniform(n, q_e, q_p1, q_p2, rng);
    const HybridTrialsReport report = run_hybrid_trials(script, samples, rng);
    nlohmann::ordered_json out;
    out["subcommand"] = "hybrid";
    out["config"] = {{"n", n}, {"q_E", q_e}, {"q_P1", q_p1}, {"q_P2", q_p2},
                     {"samples", samples}, {"seed", seed}};
    out.update(report.to_json());
    return out;
}

namespace {

// All keys consistent with a handful of plaintext/ciphertext pairs, found by
// exhaustive search over the schedule space of the distribution.
std::vector<std::vector<Word>> brute_force_keys(const KacInstance& inst,
                                                const std::vector<std::pair<Word, Word>>& pairs) {
    const std::uint64_t size = std::uint64_t{1} << inst.n;
    std::vector<std::vector<Word>> found;
    const auto consistent = [&](const std::vector<Word>& keys) {
        for (const auto& [x, y] : pairs) {
            Word v = x;
            for (int i = 0; i < inst.t; ++i) {
                v = inst.perms[static_cast<std::size_t>(i)].forward(v ^ keys[static_cast<std::size_t>(i)]);
            }
            if ((v ^ keys[static_cast<std::size_t>(inst.t)]) != y) return false;
        }
        return true;
    };
    switch (inst.dist.tag) {
        case KeyDistTag::AllEqual: {
            std::vector<Word> keys(static_cast<std::size_t>(inst.t) + 1);
            for (std::uint64_t k = 0; k < size; ++k) {
                std::fill(keys.begin(), keys.end(), static_cast<Word>(k));
                if (consistent(keys)) found.push_back(keys);
            }
            break;
        }
        case KeyDistTag::FirstLastEqual: {
            for (std::uint64_t k0 = 0; k0 < size; ++k0) {
                for (std::uint64_t k1 = 0; k1 < size; ++k1) {
                    std::vector<Word> keys = {static_cast<Word>(k0), static_cast<Word>(k1),
                                              static_cast<Word>(k0)};
                    if (consistent(keys)) found.push_back(keys);
                }
            }
            break;
        }
        case KeyDistTag::RepeatedExceptIndex: {
            for (std::uint64_t shared = 0; shared < size; ++shared) {
                for (std::uint64_t unique = 0; unique < size; ++unique) {
                    std::vector<Word> keys(static_cast<std::size_t>(inst.t) + 1,
                                           static_cast<Word>(shared));
                    keys[static_cast<std::size_t>(inst.dist.index)] = static_cast<Word>(unique);
                    if (consistent(keys)) found.push_back(keys);
                }
            }
            break;
        }
        case KeyDistTag::IndependentUniform: {
            if (inst.t != 2) throw std::invalid_argument("brute force supports t = 2 for independent keys");
            for (std::uint64_t k0 = 0; k0 < size; ++k0) {
                for (std::uint64_t k1 = 0; k1 < size; ++k1) {
                    // close the last key from the first pair, then check the rest
                    const auto& [x0, y0] = pairs.front();
                    const Word mid = inst.perms[1].forward(static_cast<Word>(
                        inst.perms[0].forward(static_cast<Word>(x0 ^ k0)) ^ k1));
                    const Word k2 = static_cast<Word>(mid ^ y0);
                    const std::vector<Word> keys = {static_cast<Word>(k0), static_cast<Word>(k1), k2};
                    if (consistent(keys)) found.push_back(keys);
                }
            }
            break;
        }
    }
    return found;
}

}  // namespace

nlohmann::ordered_json run_verify_suite(int n, std::uint64_t seed) {
    if (n > 6) throw std::invalid_argument("verify: exhaustive search is capped at n = 6");
    auto checks = nlohmann::ordered_json::array();
    bool all_pass = true;
    const auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        checks.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
        all_pass &= pass;
    };

    {  // cipher round-trips exhaustively
        Rng rng = trial_rng(seed, 0);
        const KacInstance inst = sample_kac_instance(n, 2, KeyDistribution::independent(), rng);
        bool ok = true;
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
            ok &= inst.decrypt(inst.encrypt(static_cast<Word>(x))) == static_cast<Word>(x);
        }
        add("encrypt-decrypt-roundtrip", ok, "exhaustive over the domain");
    }

    {  // classical attack vs brute force
        Rng rng = trial_rng(seed, 1);
        const KacInstance inst = sample_kac_instance(n, 2, KeyDistribution::independent(), rng);
        const ClassicalAttackResult result = run_classical_attack(inst, 3.0, rng);
        bool ok = true;
        std::string detail = "attack reported failure (allowed)";
        if (result.success) {
            std::vector<std::pair<Word, Word>> pairs;
            Rng prng = trial_rng(seed, 101);
            for (int i = 0; i < 4; ++i) {
                const Word x = static_cast<Word>(prng.below(std::uint64_t{1} << n));
                pairs.emplace_back(x, inst.encrypt(x));
            }
            if (*result.guess == inst.schedule.keys) {
                const auto keys = brute_force_keys(inst, pairs);
                ok = std::find(keys.begin(), keys.end(), *result.guess) != keys.end();
                detail = "recovered key confirmed by exhaustive search";
            } else {
                detail = "attack missed (probabilistic output, allowed)";
            }
        }
        add("classical-attack-brute-force", ok, detail);
    }

    {  // same-key attack vs brute force
        Rng rng = trial_rng(seed, 2);
        const KacInstance inst = sample_kac_instance(n, 2, KeyDistribution::all_equal(), rng);
        const GroverAttackResult result = attack_same_key(inst, rng);
        bool ok = true;
        std::string detail = "attack reported failure (allowed)";
        if (result.success) {
            std::vector<std::pair<Word, Word>> pairs;
            Rng prng = trial_rng(seed, 102);
            for (int i = 0; i < 4; ++i) {
                const Word x = static_cast<Word>(prng.below(std::uint64_t{1} << n));
                pairs.emplace_back(x, inst.encrypt(x));
            }
            const auto keys = brute_force_keys(inst, pairs);
            std::vector<Word> full(static_cast<std::size_t>(inst.t) + 1, result.keys[0]);
            ok = std::find(keys.begin(), keys.end(), full) != keys.end();
            detail = ok ? "recovered key confirmed by exhaustive search" : "claimed key not in solution set";
        }
        add("samekey-attack-brute-force", ok, detail);
    }

    {  // first/last attack vs brute force
        Rng rng = trial_rng(seed, 3);
        const KacInstance inst = sample_kac_instance(n, 2, KeyDistribution::first_last_equal(), rng);
        const GroverAttackResult result = attack_first_last_equal(inst, rng);
        bool ok = true;
        std::string detail = "attack reported failure (allowed)";
        if (result.success) {
            std::vector<std::pair<Word, Word>> pairs;
            Rng prng = trial_rng(seed, 103);
            for (int i = 0; i < 4; ++i) {
                const Word x = static_cast<Word>(prng.below(std::uint64_t{1} << n));
                pairs.emplace_back(x, inst.encrypt(x));
            }
            const auto keys = brute_force_keys(inst, pairs);
            const std::vector<Word> full = {result.keys[0], result.keys[1], result.keys[0]};
            ok = std::find(keys.begin(), keys.end(), full) != keys.end();
            detail = ok ? "recovered key confirmed by exhaustive search" : "claimed key not in solution set";
        }
        add("firstlast-attack-brute-force", ok, detail);
    }

    {  // planted walk recovers deterministically
        Rng rng = trial_rng(seed, 4);
        PlantedWalk planted = make_planted_walk(n, 2, rng);
        const WalkResult result = emulate_walk_search(planted.inst, planted.plan, rng);
        const bool ok = result.success && result.key == planted.inst.schedule.keys &&
                        result.steps_taken == 0;
        add("walk-planted-recovery", ok, "single-vertex planted instance, step 0");
    }

    nlohmann::ordered_json out;
    out["subcommand"] = "verify";
    out["config"] = {{"n", n}, {"seed", seed}};
    out["checks"] = std::move(checks);
    out["all_pass"] = all_pass;
    return out;
}

}  // namespace kacq
