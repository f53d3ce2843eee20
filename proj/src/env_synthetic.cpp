#include "curio/env_synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "curio/errors.hpp"

namespace curio::envs {

double ActivityCurve::value(std::uint64_t n) const {
    return base + amp * std::exp(-static_cast<double>(n) / tau);
}

void SyntheticConfig::validate() const {
    for (const auto& c : curves) {
        if (c.tau <= 0.0) throw ConfigError("activity curve tau must be positive");
        if (c.base < 0.0 || c.base + c.amp > 1.0)
            throw ConfigError("activity curves must stay within [0, 1]");
    }
    if (noise_std < 0.0) throw ConfigError("noise_std must be >= 0");
}

SyntheticEnv::SyntheticEnv(SyntheticConfig config) : config_(config) {
    config_.validate();
    EntitySpec err;
    err.id = "error";
    err.dim = 1;
    err.lo = {0.0};
    err.hi = {1.0};
    err.rest = {0.0};

    spec_.env_id = "synthetic";
    spec_.action_dim = 1;
    spec_.entities = {err};
    spec_.activity_count = 4;
    spec_.intrinsic_error_entity = "error";
    spec_.compute_diameter();
}

int SyntheticEnv::activity_of_action(double a) {
    const int bin = static_cast<int>(std::floor((a + 1.0) * 2.0)); // 4 bins over [-1, 1]
    return std::clamp(bin, 0, 3) + 1;
}

double SyntheticEnv::execute_activity(int activity, RngStream& rng) {
    if (activity < 1 || activity > 4) throw DomainError("activity id must be in 1..4");
    const std::size_t i = static_cast<std::size_t>(activity - 1);
    const double e = config_.curves[i].value(counts_[i]) + rng.normal(0.0, config_.noise_std);
    ++counts_[i];
    return std::clamp(e, 0.0, 1.0);
}

Outcome SyntheticEnv::execute(const ActionParams& action, RngStream& rng) {
    if (action.dim() != 1) throw SchemaError("synthetic action must have length 1");
    const double e = execute_activity(activity_of_action(action.values[0]), rng);
    Outcome o;
    o.entities["error"] = {e};
    return o;
}

std::uint64_t SyntheticEnv::practice_count(int activity) const {
    if (activity < 1 || activity > 4) throw DomainError("activity id must be in 1..4");
    return counts_[static_cast<std::size_t>(activity - 1)];
}

SyntheticConfig SyntheticEnv::config_from_json(const nlohmann::json& overrides) {
    SyntheticConfig c;
    for (const auto& [key, value] : overrides.items()) {
        if (key == "noise_std") {
            c.noise_std = value.get<double>();
        } else if (key == "curves") {
            const auto& arr = value;
            if (!arr.is_array() || arr.size() != 4)
                throw ConfigError("curves must be an array of 4 objects");
            for (std::size_t i = 0; i < 4; ++i) {
                ActivityCurve& curve = c.curves[i];
                for (const auto& [k2, v2] : arr[i].items()) {
                    if (k2 == "base") curve.base = v2.get<double>();
                    else if (k2 == "amp") curve.amp = v2.get<double>();
                    else if (k2 == "tau") curve.tau = v2.get<double>();
                    else throw ConfigError("unknown curve key '" + k2 + "'");
                }
            }
        } else {
            throw ConfigError("unknown synthetic config key '" + key + "'");
        }
    }
    return c;
}

} // namespace curio::envs
