#include "curio/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "curio/analysis.hpp"
#include "curio/errors.hpp"
#include "curio/rollout_store.hpp"

namespace curio::harness {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "env") c.env_id = value.get<std::string>();
        else if (key == "env_overrides") c.env_overrides = value;
        else if (key == "explorer") c.explorer = value.get<std::string>();
        else if (key == "budget") c.budget = value.get<std::uint64_t>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "out") c.out_dir = value.get<std::string>();
        else if (key == "control_delta") c.control_delta = value.get<double>();
        else if (key == "coverage_grid") c.coverage_grid = value.get<std::size_t>();
        else if (key == "params") {
            for (const auto& [pk, pv] : value.items()) {
                if (pk == "theta") c.params.theta = pv.get<std::size_t>();
                else if (pk == "epsilon") c.params.epsilon = pv.get<double>();
                else if (pk == "bootstrap") c.params.bootstrap = pv.get<double>();
                else if (pk == "region_capacity") c.params.region_capacity = pv.get<std::size_t>();
                else if (pk == "split_candidates") c.params.split_candidates = pv.get<std::size_t>();
                else if (pk == "knn") c.params.knn = pv.get<std::size_t>();
                else if (pk == "sigma") c.params.sigma = pv.get<double>();
                else if (pk == "rho") c.params.rho = pv.get<double>();
                else if (pk == "sigma_hill") c.params.sigma_hill = pv.get<double>();
                else if (pk == "reward") c.params.reward = pv.get<std::string>();
                else throw ConfigError("unknown config key 'params." + pk + "'");
            }
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

json RunConfig::to_json() const {
    json j;
    j["env"] = env_id;
    j["env_overrides"] = env_overrides;
    j["explorer"] = explorer;
    j["budget"] = budget;
    j["seed"] = seed;
    j["out"] = out_dir;
    j["control_delta"] = control_delta;
    j["coverage_grid"] = coverage_grid;
    j["params"] = {{"theta", params.theta},
                   {"epsilon", params.epsilon},
                   {"bootstrap", params.bootstrap},
                   {"region_capacity", params.region_capacity},
                   {"split_candidates", params.split_candidates},
                   {"knn", params.knn},
                   {"sigma", params.sigma},
                   {"rho", params.rho},
                   {"sigma_hill", params.sigma_hill},
                   {"reward", params.reward}};
    return j;
}

void RunConfig::validate() const {
    if (budget < 1) throw ConfigError("config key 'budget' must be >= 1");
    if (params.theta < 1) throw ConfigError("config key 'params.theta' must be >= 1");
    if (params.epsilon < 0.0 || params.epsilon > 1.0)
        throw ConfigError("config key 'params.epsilon' must be in [0, 1]");
    if (params.bootstrap < 0.0) throw ConfigError("config key 'params.bootstrap' must be >= 0");
    if (params.region_capacity < 2) throw ConfigError("config key 'params.region_capacity' must be >= 2");
    if (params.split_candidates < 1)
        throw ConfigError("config key 'params.split_candidates' must be >= 1");
    if (params.knn < 1) throw ConfigError("config key 'params.knn' must be >= 1");
    if (params.sigma < 0.0) throw ConfigError("config key 'params.sigma' must be >= 0");
    if (params.rho < 0.0 || params.rho > 1.0) throw ConfigError("config key 'params.rho' must be in [0, 1]");
    if (params.sigma_hill < 0.0) throw ConfigError("config key 'params.sigma_hill' must be >= 0");
    if (control_delta <= 0.0) throw ConfigError("config key 'control_delta' must be positive");
    if (coverage_grid < 1) throw ConfigError("config key 'coverage_grid' must be >= 1");
}

namespace {

std::string format_interests(const std::vector<std::pair<std::string, double>>& interests,
                             std::size_t cap) {
    // Top-`cap` interests by value; keeps metrics rows bounded when the arm
    // set is a growing region tree.
    std::vector<std::pair<std::string, double>> top = interests;
    std::stable_sort(top.begin(), top.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (top.size() > cap) top.resize(cap);
    std::ostringstream os;
    for (std::size_t i = 0; i < top.size(); ++i) {
        if (i) os << '|';
        os << top[i].first << ':' << top[i].second;
    }
    return os.str();
}

} // namespace

RunResult run_experiment(const RunConfig& config) {
    config.validate();
    auto env = envs::make_environment(config.env_id, config.env_overrides);
    const envs::EnvSpec& spec = env->spec();

    RngStream env_rng(config.seed, "env");
    auto explorer =
        explorers::make_explorer(config.explorer, spec, config.params, RngStream(config.seed, "explorer"));

    RunResult result;
    std::unique_ptr<RolloutStore> store;
    std::ofstream metrics;
    if (!config.out_dir.empty()) {
        fs::create_directories(config.out_dir);
        result.rollout_log_path = (fs::path(config.out_dir) / "rollouts.jsonl").string();
        result.metrics_path = (fs::path(config.out_dir) / "metrics.csv").string();
        result.summary_path = (fs::path(config.out_dir) / "summary.json").string();
        result.config_path = (fs::path(config.out_dir) / "config.json").string();
        store = std::make_unique<RolloutStore>(result.rollout_log_path);

        metrics.open(result.metrics_path, std::ios::out | std::ios::trunc);
        if (!metrics) throw IoError("cannot open metrics file '" + result.metrics_path + "'");
        metrics << "tick,arm,arm_count,best_reward";
        for (const auto& e : spec.entities) metrics << ",controlled_" << e.id << ",coverage_" << e.id;
        metrics << ",interests\n";

        std::ofstream cfg(result.config_path);
        if (!cfg) throw IoError("cannot write config file");
        cfg << config.to_json().dump(2) << '\n';
    } else {
        store = std::make_unique<RolloutStore>();
    }

    std::vector<CoverageTracker> trackers;
    std::vector<std::optional<std::uint64_t>> first_control(spec.entities.size());
    for (const auto& e : spec.entities) trackers.emplace_back(e.lo, e.hi, config.coverage_grid);

    // Selections per arm per budget quartile.
    std::map<std::string, std::array<std::uint64_t, 4>> allocation;

    for (std::uint64_t tick = 0; tick < config.budget; ++tick) {
        const Rollout r = explorer->step(*env, tick, env_rng);
        store->record(r);
        const auto& info = explorer->last_step();

        if (!info.arm.empty()) {
            const auto quartile = std::min<std::uint64_t>(3, tick * 4 / config.budget);
            auto& counts = allocation.try_emplace(info.arm).first->second;
            ++counts[quartile];
        }

        if (metrics.is_open()) metrics << tick << ',' << info.arm << ',' << info.arm_count << ',';
        if (metrics.is_open()) {
            if (std::isnan(info.best_reward)) metrics << "";
            else metrics << info.best_reward;
        }
        for (std::size_t i = 0; i < spec.entities.size(); ++i) {
            const auto& e = spec.entities[i];
            const auto& v = r.outcome.at(e.id);
            double d2 = 0.0;
            for (std::size_t d = 0; d < v.size(); ++d) {
                const double diff = v[d] - e.rest[d];
                d2 += diff * diff;
            }
            const bool controlled = std::sqrt(d2) > config.control_delta;
            if (controlled && !first_control[i]) first_control[i] = tick;
            trackers[i].add(v);
            if (metrics.is_open()) metrics << ',' << (controlled ? 1 : 0) << ',' << trackers[i].count();
        }
        if (metrics.is_open())
            metrics << ',' << format_interests(info.interests, 8) << '\n';
    }
    store->flush();

    json summary;
    summary["env"] = spec.env_id;
    summary["explorer"] = explorer->name();
    summary["seed"] = config.seed;
    summary["budget"] = config.budget;
    json fc = json::object();
    json cov = json::object();
    for (std::size_t i = 0; i < spec.entities.size(); ++i) {
        const auto& id = spec.entities[i].id;
        fc[id] = first_control[i] ? json(*first_control[i]) : json(nullptr);
        cov[id] = trackers[i].count();
    }
    summary["first_control"] = fc;
    summary["coverage"] = cov;

    json alloc = json::object();
    for (const auto& [arm, counts] : allocation) {
        const std::uint64_t total = counts[0] + counts[1] + counts[2] + counts[3];
        json a;
        a["overall"] = static_cast<double>(total) / static_cast<double>(config.budget);
        for (int q = 0; q < 4; ++q) {
            // Fraction of the quartile's steps spent on this arm.
            const std::uint64_t q_begin = config.budget * q / 4;
            const std::uint64_t q_end = config.budget * (q + 1) / 4;
            const auto q_len = std::max<std::uint64_t>(1, q_end - q_begin);
            a["q" + std::to_string(q + 1)] =
                static_cast<double>(counts[q]) / static_cast<double>(q_len);
        }
        alloc[arm] = std::move(a);
    }
    summary["allocation"] = alloc;

    const auto& info = explorer->last_step();
    if (!std::isnan(info.best_reward)) summary["best_reward"] = info.best_reward;

    result.summary = summary;
    if (!config.out_dir.empty()) {
        std::ofstream out(result.summary_path);
        if (!out) throw IoError("cannot write summary file");
        out << summary.dump(2) << '\n';
    }
    return result;
}

std::vector<RunResult> run_sweep(RunConfig config, std::uint64_t seeds, const std::string& out_dir) {
    if (seeds < 1) throw ConfigError("sweep needs at least one seed");
    std::vector<RunResult> results;
    results.reserve(seeds);
    for (std::uint64_t s = 0; s < seeds; ++s) {
        RunConfig c = config;
        c.seed = s;
        c.out_dir = out_dir.empty() ? "" : (fs::path(out_dir) / ("seed_" + std::to_string(s))).string();
        results.push_back(run_experiment(c));
    }
    return results;
}

std::vector<std::pair<std::string, json>> collect_summaries(const std::string& dir) {
    if (!fs::exists(dir)) throw IoError("no such directory '" + dir + "'");
    std::vector<std::string> paths;
    if (fs::is_regular_file(dir)) {
        paths.push_back(dir);
    } else {
        for (const auto& entry : fs::recursive_directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().filename() == "summary.json")
                paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<std::pair<std::string, json>> out;
    for (const auto& p : paths) {
        std::ifstream in(p);
        if (!in) throw IoError("cannot read '" + p + "'");
        json j;
        in >> j;
        out.emplace_back(p, std::move(j));
    }
    return out;
}

std::string report_csv(const std::vector<std::pair<std::string, json>>& summaries) {
    // Union of scalar metric columns across runs, in stable order.
    std::vector<std::string> columns;
    auto add_column = [&](const std::string& c) {
        if (std::find(columns.begin(), columns.end(), c) == columns.end()) columns.push_back(c);
    };
    for (const auto& [path, s] : summaries) {
        if (s.contains("first_control"))
            for (const auto& [k, v] : s["first_control"].items()) add_column("first_control." + k);
        if (s.contains("coverage"))
            for (const auto& [k, v] : s["coverage"].items()) add_column("coverage." + k);
        if (s.contains("best_reward")) add_column("best_reward");
    }

    std::ostringstream os;
    os << "path,env,explorer,seed,budget";
    for (const auto& c : columns) os << ',' << c;
    os << '\n';
    for (const auto& [path, s] : summaries) {
        os << path << ',' << s.value("env", "") << ',' << s.value("explorer", "") << ','
           << s.value("seed", 0ull) << ',' << s.value("budget", 0ull);
        for (const auto& c : columns) {
            os << ',';
            try {
                const auto v = summary_metric(s, c);
                if (v) os << *v;
            } catch (const AnalysisError&) {
                // column absent in this run
            }
        }
        os << '\n';
    }
    return os.str();
}

} // namespace curio::harness
