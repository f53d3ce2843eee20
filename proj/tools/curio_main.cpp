#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curio/analysis.hpp"
#include "curio/errors.hpp"
#include "curio/run.hpp"

namespace {

using nlohmann::json;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw curio::IoError("cannot read file '" + path + "'");
    json j;
    in >> j;
    return j;
}

// CLI flags take precedence over the config file.
curio::harness::RunConfig build_config(const std::string& config_file, const std::string& env,
                                       const std::string& explorer, std::optional<std::uint64_t> budget,
                                       std::optional<std::uint64_t> seed, const std::string& out) {
    json base = json::object();
    if (!config_file.empty()) base = load_json_file(config_file);
    if (!env.empty()) base["env"] = env;
    if (!explorer.empty()) base["explorer"] = explorer;
    if (budget) base["budget"] = *budget;
    if (seed) base["seed"] = *seed;
    if (!out.empty()) base["out"] = out;
    return curio::harness::RunConfig::from_json(base);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"curio: learning-progress-driven exploration experiments"};
    app.require_subcommand(1);

    std::string env, explorer, config_file, out_dir, metric, log_file, report_dir;
    std::optional<std::uint64_t> budget, seed;
    std::uint64_t seeds = 1;
    std::vector<std::string> group_dirs;

    auto add_run_options = [&](CLI::App* cmd) {
        cmd->add_option("--env", env, "environment id (synthetic|atb)");
        cmd->add_option("--explorer", explorer, "explorer id (random|iac|imgep|hillclimb)");
        cmd->add_option("--budget", budget, "total rollouts");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--config", config_file, "JSON config file");
        cmd->add_option("--out", out_dir, "output directory");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "execute one experiment");
    add_run_options(run_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run seeds 0..N-1");
    add_run_options(sweep_cmd);
    sweep_cmd->add_option("--seeds", seeds, "number of seeds")->required();

    CLI::App* compare_cmd = app.add_subcommand("compare", "compare run groups on a metric");
    compare_cmd->add_option("--metric", metric, "summary metric, e.g. coverage.ball")->required();
    compare_cmd->add_option("dirs", group_dirs, "one directory per group")->required();

    CLI::App* replay_cmd = app.add_subcommand("replay", "verify a rollout log reproduces bit-exact");
    replay_cmd->add_option("--log", log_file, "rollouts.jsonl")->required();
    replay_cmd->add_option("--config", config_file, "config.json of the run")->required();

    CLI::App* report_cmd = app.add_subcommand("report", "emit a CSV table of run summaries");
    report_cmd->add_option("dir", report_dir, "directory of runs")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto config = build_config(config_file, env, explorer, budget, seed, out_dir);
            const auto result = curio::harness::run_experiment(config);
            std::cout << result.summary.dump(2) << std::endl;
        } else if (sweep_cmd->parsed()) {
            auto config = build_config(config_file, env, explorer, budget, seed, out_dir);
            if (config.out_dir.empty()) throw curio::ConfigError("sweep requires --out");
            const auto results = curio::harness::run_sweep(config, seeds, config.out_dir);
            std::cout << "completed " << results.size() << " runs under " << config.out_dir << std::endl;
        } else if (compare_cmd->parsed()) {
            std::vector<std::pair<std::string, std::vector<std::optional<double>>>> groups;
            for (const auto& dir : group_dirs) {
                std::vector<std::optional<double>> values;
                for (const auto& [path, summary] : curio::harness::collect_summaries(dir))
                    values.push_back(curio::harness::summary_metric(summary, metric));
                groups.emplace_back(dir, std::move(values));
            }
            std::cout << curio::harness::compare_groups(groups, metric).dump(2) << std::endl;
        } else if (replay_cmd->parsed()) {
            const bool ok = curio::harness::replay(log_file, load_json_file(config_file));
            std::cout << (ok ? "replay: ok" : "replay: mismatch") << std::endl;
            return ok ? 0 : 1;
        } else if (report_cmd->parsed()) {
            std::cout << curio::harness::report_csv(curio::harness::collect_summaries(report_dir));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
