// Batch front door for the cryptanalysis workbench: every experiment is
// configured by flags (or a JSON config file), seeded explicitly, and emits
// one JSON/CSV document. Exit codes: 0 success, 1 usage error, 2 attack
// failure (no trial succeeded).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kacq/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAttackFailure = 2;

struct CommonOpts {
    int n = 8;
    int t = 2;
    std::uint64_t seed = 1;
    int trials = 1;
    int workers = 1;
    std::string format = "json";
    std::string output;  // empty: stdout
    std::string config_file;
};

// flags > config file > defaults: config values are applied only to options
// the user did not pass on the command line.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open config file " + path);
    nlohmann::json values = nlohmann::json::parse(in);
    for (const auto& [key, value] : values.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (!opt || opt->count() > 0) continue;
        const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
        opt->add_result(text);
        opt->run_callback();
    }
}

std::string resolve_output_path(const std::string& output) {
    if (output.empty()) return output;
    std::filesystem::path p(output);
    if (p.is_absolute()) return output;
    if (const char* dir = std::getenv("KACQ_OUTPUT_DIR")) {
        return (std::filesystem::path(dir) / p).string();
    }
    return output;
}

int emit(const std::string& doc, const std::string& output) {
    const std::string path = resolve_output_path(output);
    if (path.empty()) {
        std::cout << doc;
        if (doc.empty() || doc.back() != '\n') std::cout << '\n';
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return kExitUsage;
    }
    out << doc;
    if (doc.empty() || doc.back() != '\n') out << '\n';
    return kExitOk;
}

int emit_json_doc(nlohmann::ordered_json doc, const CommonOpts& opts, bool attack_failed) {
    const int rc = emit(doc.dump(2), opts.output);
    if (rc != kExitOk) return rc;
    return attack_failed ? kExitAttackFailure : kExitOk;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_nt = true) {
    if (with_nt) {
        cmd->add_option("--n", opts.n, "block size in bits");
        cmd->add_option("--t", opts.t, "round count");
    }
    cmd->add_option("--seed", opts.seed, "root seed; trial i uses a stream derived from (seed, i)");
    cmd->add_option("--trials", opts.trials, "number of independent trials");
    cmd->add_option("--workers", opts.workers, "worker threads (deterministic for any value)");
    cmd->add_option("--format", opts.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--output", opts.output, "output path (default stdout; KACQ_OUTPUT_DIR prefixes relative paths)");
    cmd->add_option("--config", opts.config_file, "JSON config file; flags take precedence");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale key-alternating cipher attack and bound workbench"};
    app.require_subcommand(1);

    CommonOpts opts;
    double beta = 3.0;
    int repeated_index = 1;
    int max_tries = 16;
    std::string policy = "q1";
    int r_override = 0;
    int step_budget = 0;
    int epsilon_samples = 0;
    bool planted = false;
    bool cost_sweep = false;
    int q_e = 1, q_p1 = 1, q_p2 = 1, samples = 500;
    int t_max = 4;
    bool include_cited = false;
    bool gnuplot = false;

    auto* classical = app.add_subcommand("attack-classical", "classical candidate-collision key recovery");
    add_common(classical, opts);
    classical->add_option("--beta", beta, "sampling ratio (>= t+1)");

    auto* walk = app.add_subcommand("attack-walk", "quantum-walk key recovery (classical emulation, exact query ledger)");
    add_common(walk, opts);
    walk->add_option("--policy", policy, "q1 or mixed:Pj (quantum access through P_j only)");
    walk->add_option("--r", r_override, "override walk subset size r");
    walk->add_option("--budget", step_budget, "override step budget (default ceil(50/sqrt(eps)))");
    walk->add_option("--epsilon-samples", epsilon_samples, "vertex samples per trial for empirical marked fraction");
    walk->add_flag("--planted", planted, "planted single-vertex instance (deterministic recovery)");
    walk->add_flag("--cost-sweep", cost_sweep, "emit the cost-model sweep over r as CSV and exit");

    auto* samekey = app.add_subcommand("attack-grover-samekey", "Grover key recovery for the same-key construction");
    add_common(samekey, opts);
    samekey->add_option("--max-tries", max_tries, "Grover reruns before giving up");

    auto* firstlast = app.add_subcommand("attack-grover-firstlast", "Grover key recovery for 2 rounds with first = last key");
    add_common(firstlast, opts);
    firstlast->add_option("--max-tries", max_tries, "Grover reruns before giving up");

    auto* repeated = app.add_subcommand("attack-grover-repeated", "Grover key recovery with one distinct key among t+1");
    add_common(repeated, opts);
    repeated->add_option("--j", repeated_index, "slot of the distinct key (0..t)");
    repeated->add_option("--max-tries", max_tries, "Grover reruns before giving up");

    auto* hybrid = app.add_subcommand("hybrid", "reprogramming hybrid: trace distances, certificates, collision rates");
    add_common(hybrid, opts);
    hybrid->add_option("--q-e", q_e, "classical cipher queries");
    hybrid->add_option("--q-p1", q_p1, "quantum P_1 queries");
    hybrid->add_option("--q-p2", q_p2, "quantum P_2 queries");
    hybrid->add_option("--samples", samples, "sampled (k, P_1, P_2, R) draws");

    auto* bounds = app.add_subcommand("bounds", "query-exponent tables");
    add_common(bounds, opts);
    bounds->add_option("--t-max", t_max, "emit families for t = 1..t_max");
    bounds->add_flag("--include-cited", include_cited, "append the cited/unknown literal rows");
    bounds->add_flag("--gnuplot", gnuplot, "emit two-column (t, exponent) series instead");

    auto* verify = app.add_subcommand("verify", "brute-force confirmation suite (n <= 6)");
    add_common(verify, opts);

    CLI::App* chosen = nullptr;
    try {
        app.parse(argc, argv);
        chosen = app.get_subcommands().front();
        if (!opts.config_file.empty()) {
            apply_config_file(chosen, opts.config_file);
        }
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const kacq::BatchConfig cfg{opts.seed, opts.trials, opts.workers};
        if (chosen == classical) {
            auto doc = kacq::run_classical_batch(opts.n, opts.t, beta, cfg);
            const bool missed = doc["recovered"].get<int>() == 0;
            return emit_json_doc(std::move(doc), opts, missed);
        }
        if (chosen == walk) {
            if (cost_sweep) {
                std::string doc = "# config: n=" + std::to_string(opts.n) +
                                  " t=" + std::to_string(opts.t) + "\n" +
                                  kacq::walk_cost_sweep_csv(opts.n, opts.t);
                return emit(doc, opts.output);
            }
            kacq::WalkBatchOptions w;
            if (r_override > 0) w.r_override = r_override;
            if (step_budget > 0) w.step_budget = step_budget;
            w.epsilon_samples = epsilon_samples;
            w.planted = planted;
            if (policy.rfind("mixed:P", 0) == 0) {
                w.mixed_access_index = std::stoi(policy.substr(7));
            } else if (policy != "q1") {
                std::cerr << "error: --policy must be q1 or mixed:Pj\n";
                return kExitUsage;
            }
            auto doc = kacq::run_walk_batch(opts.n, opts.t, w, cfg);
            const bool missed = doc["recovered"].get<int>() == 0;
            return emit_json_doc(std::move(doc), opts, missed);
        }
        if (chosen == samekey || chosen == firstlast || chosen == repeated) {
            kacq::GroverAttackKind kind = kacq::GroverAttackKind::SameKey;
            int t = opts.t;
            if (chosen == firstlast) {
                kind = kacq::GroverAttackKind::FirstLastEqual;
                t = 2;
            } else if (chosen == repeated) {
                kind = kacq::GroverAttackKind::RepeatedKeys;
            }
            auto doc = kacq::run_grover_batch(kind, opts.n, t, repeated_index, cfg, max_tries);
            const bool missed = doc["recovered"].get<int>() == 0;
            return emit_json_doc(std::move(doc), opts, missed);
        }
        if (chosen == hybrid) {
            auto doc = kacq::run_hybrid_report(opts.n, q_e, q_p1, q_p2, samples, opts.seed);
            return emit_json_doc(std::move(doc), opts, false);
        }
        if (chosen == bounds) {
            auto records = kacq::exponent_table(t_max);
            if (include_cited) {
                for (auto& rec : kacq::table1_records()) records.push_back(rec);
            }
            const std::string provenance = "# config: t_max=" + std::to_string(t_max) +
                                           " include_cited=" + (include_cited ? "true" : "false") + "\n";
            if (gnuplot) return emit(provenance + kacq::emit_gnuplot(records), opts.output);
            if (opts.format == "csv") return emit(provenance + kacq::emit_csv(records), opts.output);
            nlohmann::ordered_json doc;
            doc["subcommand"] = "bounds";
            doc["config"] = {{"t_max", t_max}, {"include_cited", include_cited}};
            doc["records"] = kacq::emit_json(records);
            return emit_json_doc(std::move(doc), opts, false);
        }
        if (chosen == verify) {
            auto doc = kacq::run_verify_suite(opts.n, opts.seed);
            const bool ok = doc["all_pass"].get<bool>();
            const int rc = emit_json_doc(std::move(doc), opts, false);
            return rc != kExitOk ? rc : (ok ? kExitOk : kExitAttackFailure);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
