#pragma once

// Scenario runner behind the `kcq` executable.
//
//   kcq run --config F --seed S [--out P] [--meta]
//   kcq attack STRATEGY --config F --trials T --seed S [--threads N] [--out P] [--meta]
//   kcq sweep M_LIST [--out P] [--no-keyless] [--labeling fixed|alternating]
//   kcq rate-window P_C
//
// Exit codes: 0 success, 1 usage or config error, 2 protocol abort.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kcq/adversary.hpp"
#include "kcq/analysis.hpp"
#include "kcq/protocol.hpp"
#include "kcq/serialize.hpp"

namespace kcq::cli {

enum ExitCode : int { success = 0, usage_error = 1, protocol_abort = 2 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline ProtocolConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    try {
        return config_from_json(json::parse(in));
    } catch (const std::exception& e) {
        throw UsageError("invalid config '" + path + "': " + e.what());
    }
}

inline std::vector<std::uint32_t> parse_m_list(const std::string& text) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::uint32_t m = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), m);
        if (ec != std::errc{} || ptr != item.data() + item.size() || m < 2 || (m & (m - 1)) != 0)
            throw UsageError("basis count '" + item + "' is not a power of two >= 2");
        out.push_back(m);
    }
    if (out.empty()) throw UsageError("empty basis-count list");
    return out;
}

class Output {
public:
    Output(std::string path, std::ostream& fallback) : path_(std::move(path)), fallback_(fallback) {}

    void write(const std::string& text) const {
        if (path_.empty()) {
            fallback_ << text;
            return;
        }
        std::ofstream f(path_, std::ios::binary);
        if (!f) throw UsageError("cannot write '" + path_ + "'");
        f << text;
    }

    // Wall-clock metadata goes to a sidecar so primary outputs stay reproducible.
    void write_meta(int argc, const char* const* argv) const {
        if (path_.empty()) throw UsageError("--meta needs --out");
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::ostringstream ts;
        ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
        json args = json::array();
        for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
        std::ofstream f(path_ + ".meta.json");
        f << json{{"created_utc", ts.str()}, {"argv", args}}.dump(2) << '\n';
    }

private:
    std::string path_;
    std::ostream& fallback_;
};

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Keyed-basis qubit key generation simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, strategy_text, m_list;
    std::uint64_t seed = 0, trials = 1;
    unsigned threads = 1;
    bool meta = false, no_keyless = false;
    std::string labeling = "alternating";
    double p_c = 0.0;

    auto* run = app.add_subcommand("run", "run the key-generation protocol once");
    run->add_option("--config", config_path, "protocol config JSON")->required();
    run->add_option("--seed", seed, "random seed")->required();
    run->add_option("--out,-o", out_path, "outcome JSON path (stdout if omitted)");
    run->add_flag("--meta", meta, "write a wall-clock metadata sidecar");

    auto* attack = app.add_subcommand("attack", "Monte Carlo evaluation of an eavesdropping strategy");
    attack->add_option("strategy", strategy_text, "intercept[:f] | fixed:<phi> | breidbart | keyguess | blockguess:<k>")
        ->required();
    attack->add_option("--config", config_path, "protocol config JSON")->required();
    attack->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    attack->add_option("--seed", seed, "random seed")->required();
    attack->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    attack->add_option("--out,-o", out_path, "report JSON path (stdout if omitted)");
    attack->add_flag("--meta", meta, "write a wall-clock metadata sidecar");

    auto* sweep = app.add_subcommand("sweep", "eavesdropper error rates versus basis count");
    sweep->add_option("m_list", m_list, "comma-separated powers of two, e.g. 2,4,8")->required();
    sweep->add_option("--out,-o", out_path, "CSV path (stdout if omitted)");
    sweep->add_flag("--no-keyless", no_keyless, "skip the keyless column");
    sweep->add_option("--labeling", labeling, "bit labeling")->check(CLI::IsMember({"fixed", "alternating"}));

    auto* window = app.add_subcommand("rate-window", "admissible code rates for a channel error rate");
    window->add_option("p_c", p_c, "channel error rate in [0, 0.5)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return success;
    } catch (const CLI::ParseError& e) {
        // Subcommand help also arrives here.
        if (e.get_exit_code() == 0) {
            out << app.help();
            return success;
        }
        err << "error: " << e.what() << '\n';
        return usage_error;
    }

    try {
        const Output output(out_path, out);
        if (*run) {
            const ProtocolConfig config = load_config(config_path);
            Rng rng(seed);
            int code = success;
            json doc;
            if (config.mode == Mode::key_generation) {
                const ProtocolOutcome outcome = run_protocol(config, rng);
                doc = to_json(outcome);
                doc["net_key_rate"] = sig9(net_key_rate(outcome, config.n));
                code = outcome.verified ? success : protocol_abort;
            } else {
                const auto length = static_cast<std::size_t>(std::floor(static_cast<double>(config.n) * config.code_rate));
                const BitVector plaintext = random_bits(rng, length);
                const DirectEncryptionResult result = run_direct_encryption(config, plaintext, rng);
                doc = to_json(result, plaintext);
                code = result.success() ? success : protocol_abort;
            }
            output.write(doc.dump(2) + "\n");
            if (meta) output.write_meta(argc, argv);
            return code;
        }
        if (*attack) {
            AttackStrategy strategy;
            try {
                strategy = AttackStrategy::parse(strategy_text);
            } catch (const std::exception& e) {
                throw UsageError(e.what());
            }
            const ProtocolConfig config = load_config(config_path);
            const AttackReport report = run_attack(strategy, config, trials, seed, threads);
            output.write(to_json(report).dump(2) + "\n");
            if (meta) output.write_meta(argc, argv);
            return success;
        }
        if (*sweep) {
            const auto ms = parse_m_list(m_list);
            const auto rows = sweep_m(ms, !no_keyless, labeling == "fixed" ? BitLabeling::fixed : BitLabeling::alternating);
            std::ostringstream csv;
            write_sweep_csv(csv, rows);
            output.write(csv.str());
            return success;
        }
        if (*window) {
            if (!(p_c >= 0.0 && p_c < 0.5)) throw UsageError("p_c must lie in [0, 0.5)");
            out << to_json(rate_window(p_c)).dump(2) << '\n';
            return success;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
    return usage_error;
}

}  // namespace kcq::cli
