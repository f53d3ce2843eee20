#include "curio/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curio/errors.hpp"
#include "curio/rollout_store.hpp"
#include "curio/run.hpp"
#include "curio/stats.hpp"

namespace curio::harness {

namespace {

std::uint64_t cell_of(const std::vector<double>& p, const std::vector<double>& lo,
                      const std::vector<double>& hi, std::size_t grid) {
    std::uint64_t cell = 0;
    for (std::size_t d = 0; d < p.size(); ++d) {
        const double span = hi[d] - lo[d];
        auto idx = static_cast<std::int64_t>(std::floor((p[d] - lo[d]) / span * static_cast<double>(grid)));
        idx = std::clamp<std::int64_t>(idx, 0, static_cast<std::int64_t>(grid) - 1);
        cell = cell * grid + static_cast<std::uint64_t>(idx);
    }
    return cell;
}

} // namespace

std::size_t coverage(const std::vector<std::vector<double>>& points, const std::vector<double>& lo,
                     const std::vector<double>& hi, std::size_t grid) {
    if (grid < 1) throw DomainError("coverage grid must be >= 1");
    CoverageTracker tracker(lo, hi, grid);
    for (const auto& p : points) tracker.add(p);
    return tracker.count();
}

CoverageTracker::CoverageTracker(std::vector<double> lo, std::vector<double> hi, std::size_t grid)
    : lo_(std::move(lo)), hi_(std::move(hi)), grid_(grid) {
    if (grid_ < 1) throw DomainError("coverage grid must be >= 1");
    if (lo_.size() != hi_.size() || lo_.empty()) throw DomainError("coverage bounds mismatch");
}

void CoverageTracker::add(const std::vector<double>& point) {
    if (point.size() != lo_.size()) throw SchemaError("coverage point dimension mismatch");
    cells_.insert(cell_of(point, lo_, hi_, grid_));
}

std::optional<std::uint64_t> first_control_time(const std::vector<Rollout>& log,
                                                const EntityId& entity,
                                                const std::vector<double>& rest, double delta) {
    if (delta <= 0.0) throw DomainError("control delta must be positive");
    for (const auto& r : log) {
        const auto& v = r.outcome.at(entity); // throws SchemaError for unknown entities
        if (v.size() != rest.size()) throw SchemaError("rest value dimension mismatch");
        double d2 = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double diff = v[i] - rest[i];
            d2 += diff * diff;
        }
        if (std::sqrt(d2) > delta) return r.tick;
    }
    return std::nullopt;
}

nlohmann::json compare_groups(
    const std::vector<std::pair<std::string, std::vector<std::optional<double>>>>& groups,
    const std::string& metric) {
    if (groups.size() < 2) throw AnalysisError("compare needs at least 2 groups");
    for (const auto& [name, values] : groups)
        if (values.size() < 3)
            throw AnalysisError("group '" + name + "' has fewer than 3 seeds");

    const double inf = std::numeric_limits<double>::infinity();
    auto materialize = [&](const std::vector<std::optional<double>>& values) {
        std::vector<double> out;
        out.reserve(values.size());
        for (const auto& v : values) out.push_back(v ? *v : inf);
        return out;
    };
    auto finite_or_null = [](double v) {
        return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    };

    nlohmann::json result;
    result["metric"] = metric;
    result["groups"] = nlohmann::json::array();
    for (const auto& [name, values] : groups) {
        const auto vals = materialize(values);
        nlohmann::json g;
        g["name"] = name;
        g["n"] = vals.size();
        g["median"] = finite_or_null(median(vals));
        g["q1"] = finite_or_null(quantile(vals, 0.25));
        g["q3"] = finite_or_null(quantile(vals, 0.75));
        std::size_t missing = 0;
        for (const auto& v : values)
            if (!v) ++missing;
        g["missing"] = missing;
        result["groups"].push_back(std::move(g));
    }

    result["tests"] = nlohmann::json::array();
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            const auto res = mann_whitney_u(materialize(groups[i].second), materialize(groups[j].second));
            nlohmann::json t;
            t["a"] = groups[i].first;
            t["b"] = groups[j].first;
            t["u"] = res.u;
            t["p"] = res.p;
            t["exact"] = res.exact;
            result["tests"].push_back(std::move(t));
        }
    }
    return result;
}

std::optional<double> summary_metric(const nlohmann::json& summary, const std::string& metric) {
    const nlohmann::json* node = &summary;
    std::size_t start = 0;
    while (start <= metric.size()) {
        const auto dot = metric.find('.', start);
        const std::string key = metric.substr(start, dot == std::string::npos ? dot : dot - start);
        if (!node->is_object() || !node->contains(key))
            throw AnalysisError("metric '" + metric + "' not found in summary");
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (node->is_null()) return std::nullopt;
    if (!node->is_number()) throw AnalysisError("metric '" + metric + "' is not a scalar");
    return node->get<double>();
}

bool replay(const std::string& log_path, const nlohmann::json& run_config) {
    const RunConfig config = RunConfig::from_json(run_config);
    auto env = envs::make_environment(config.env_id, config.env_overrides);
    RngStream env_rng(config.seed, "env");

    const auto log = RolloutStore::load_log(log_path);
    std::uint64_t expected_tick = 0;
    for (const auto& r : log) {
        if (r.tick != expected_tick++) throw SchemaError("rollout log ticks are not sequential");
        if (r.action.dim() != env->spec().action_dim)
            throw SchemaError("logged action does not match environment schema");
        const Outcome reproduced = env->execute(r.action, env_rng);
        if (reproduced.entities != r.outcome.entities) return false;
    }
    return true;
}

} // namespace curio::harness
