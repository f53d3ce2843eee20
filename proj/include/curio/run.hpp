#pragma once

#include <string>

#include <json.hpp>

#include "curio/explorers.hpp"

namespace curio::harness {

struct RunConfig {
    std::string env_id = "atb";
    nlohmann::json env_overrides = nlohmann::json::object();
    std::string explorer = "random";
    explorers::ExplorerConfig params;
    std::uint64_t budget = 1000;
    std::uint64_t seed = 0;
    std::string out_dir; // empty: keep everything in memory, write nothing
    double control_delta = 0.05;
    std::size_t coverage_grid = 20;

    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
};

struct RunResult {
    nlohmann::json summary;
    std::string rollout_log_path; // empty when out_dir was empty
    std::string metrics_path;
    std::string summary_path;
    std::string config_path;
};

// Executes exactly config.budget rollouts and emits the run artifacts
// (rollouts.jsonl, metrics.csv, summary.json, config.json) under out_dir.
RunResult run_experiment(const RunConfig& config);

// Runs seeds 0..seeds-1 into out_dir/seed_<i>/; returns one result per seed.
std::vector<RunResult> run_sweep(RunConfig config, std::uint64_t seeds, const std::string& out_dir);

// All summary.json files under a directory tree, sorted by path.
std::vector<std::pair<std::string, nlohmann::json>> collect_summaries(const std::string& dir);

// Flat CSV table (one row per run summary) for `report`.
std::string report_csv(const std::vector<std::pair<std::string, nlohmann::json>>& summaries);

} // namespace curio::harness
