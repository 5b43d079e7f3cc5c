#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "abrsim/scenario.hpp"

namespace {

using namespace abrsim;

int do_run(const std::string& config_path, const std::string& policy_override,
           const std::string& out_dir) {
    ScenarioConfig cfg = load_config(config_path);
    if (!policy_override.empty()) {
        if (!policy_kind_from_name(policy_override, cfg.policy.kind)) {
            throw ConfigError("--policy", "unknown policy '" + policy_override + "'");
        }
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    auto sc = build_scenario(cfg);
    MetricsSummary sum = run_scenario(*sc, cfg);
    std::cout << "ran " << policy_kind_name(cfg.policy.kind) << " for "
              << ms_from_ns(cfg.run_ns) << " ms, " << sum.dispatched_events
              << " events dispatched";
    if (!cfg.output_dir.empty()) std::cout << ", traces in " << cfg.output_dir;
    std::cout << "\n";
    return 0;
}

int do_sweep(const std::string& config_path, const std::string& policies,
             const std::string& out_dir) {
    std::vector<PolicyKind> kinds;
    std::stringstream ss(policies);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        PolicyKind k;
        if (!policy_kind_from_name(tok, k)) {
            throw ConfigError("--policies", "unknown policy '" + tok + "'");
        }
        kinds.push_back(k);
    }
    if (kinds.empty()) throw ConfigError("--policies", "empty policy list");

    // Scenario state is fully isolated per run, so policies can go in parallel.
    std::vector<std::thread> workers;
    std::vector<std::string> errors(kinds.size());
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        workers.emplace_back([&, i]() {
            try {
                ScenarioConfig cfg = load_config(config_path);
                cfg.policy.kind = kinds[i];
                cfg.output_dir =
                    (std::filesystem::path(out_dir) / policy_kind_name(kinds[i])).string();
                auto sc = build_scenario(cfg);
                run_scenario(*sc, cfg);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });
    }
    for (auto& w : workers) w.join();
    int rc = 0;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (!errors[i].empty()) {
            std::cerr << policy_kind_name(kinds[i]) << ": " << errors[i] << "\n";
            rc = 1;
        } else {
            std::cout << policy_kind_name(kinds[i]) << ": traces in "
                      << (std::filesystem::path(out_dir) / policy_kind_name(kinds[i])).string()
                      << "\n";
        }
    }
    return rc;
}

int do_presets(const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto write = [&](const std::string& name, const ScenarioConfig& cfg) {
        std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
        f << config_to_json_text(cfg);
        std::cout << (fs::path(out_dir) / name).string() << "\n";
    };
    write("five_sources.json", five_sources_preset());
    write("single_client.json", single_client_preset());
    return 0;
}

int do_validate(const std::string& config_path) {
    ScenarioConfig cfg = load_config(config_path);
    (void)cfg;
    std::cout << "ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-event simulator of ABR explicit-rate control with "
                 "use-it-or-lose-it policies"};
    app.require_subcommand(1);

    std::string config_path, policy_override, out_dir = "out", policies;

    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("--config", config_path, "Scenario config (JSON)")->required();
    run->add_option("--policy", policy_override, "Override the configured policy kind");
    std::string run_out;
    run->add_option("--out", run_out, "Output directory for traces");

    auto* sweep = app.add_subcommand("sweep", "Run one scenario under several policies");
    sweep->add_option("--config", config_path, "Scenario config (JSON)")->required();
    sweep->add_option("--policies", policies, "Comma-separated policy kinds")->required();
    sweep->add_option("--out", out_dir, "Output root (one subdirectory per policy)");

    auto* presets = app.add_subcommand("presets", "Write the canonical scenario configs");
    std::string presets_out = ".";
    presets->add_option("--out", presets_out, "Directory for the preset JSON files");

    auto* validate = app.add_subcommand("validate", "Check a config and exit");
    validate->add_option("--config", config_path, "Scenario config (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(config_path, policy_override, run_out);
        if (sweep->parsed()) return do_sweep(config_path, policies, out_dir);
        if (presets->parsed()) return do_presets(presets_out);
        if (validate->parsed()) return do_validate(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
