#include "curio/env.hpp"

#include <cmath>

#include "curio/env_arm_tool_ball.hpp"
#include "curio/env_synthetic.hpp"
#include "curio/errors.hpp"

namespace curio::envs {

const EntitySpec& EnvSpec::entity(const EntityId& id) const {
    for (const auto& e : entities)
        if (e.id == id) return e;
    throw SchemaError("unknown entity '" + id + "' in env spec");
}

double EnvSpec::space_diameter(const EntityId& id) const {
    const EntitySpec& e = entity(id);
    double d2 = 0.0;
    for (std::size_t i = 0; i < e.dim; ++i) {
        const double ext = e.hi[i] - e.lo[i];
        d2 += ext * ext;
    }
    return std::sqrt(d2);
}

models::SchemaLayout EnvSpec::layout() const {
    models::SchemaLayout l;
    l.action_dim = action_dim;
    for (const auto& e : entities) l.entities.emplace_back(e.id, e.dim);
    l.outcome_diameter = outcome_diameter;
    return l;
}

void EnvSpec::compute_diameter() {
    double d2 = 0.0;
    for (const auto& e : entities) {
        for (std::size_t i = 0; i < e.dim; ++i) {
            if (!(e.lo[i] < e.hi[i])) throw ConfigError("entity bounds need lo < hi");
            const double ext = e.hi[i] - e.lo[i];
            d2 += ext * ext;
        }
    }
    outcome_diameter = std::sqrt(d2);
}

std::unique_ptr<Environment> make_environment(const std::string& env_id,
                                              const nlohmann::json& overrides) {
    const nlohmann::json o = overrides.is_null() ? nlohmann::json::object() : overrides;
    if (env_id == "atb")
        return std::make_unique<ArmToolBallEnv>(ArmToolBallEnv::config_from_json(o));
    if (env_id == "synthetic")
        return std::make_unique<SyntheticEnv>(SyntheticEnv::config_from_json(o));
    throw ConfigError("unknown environment '" + env_id + "'");
}

} // namespace curio::envs
