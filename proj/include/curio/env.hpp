#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "curio/experience_db.hpp"
#include "curio/rng.hpp"
#include "curio/types.hpp"

namespace curio::envs {

struct EntitySpec {
    EntityId id;
    std::size_t dim = 0;
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<double> rest; // value when the entity is never influenced
};

struct EnvSpec {
    std::string env_id;
    std::size_t action_dim = 0;
    std::vector<EntitySpec> entities; // declaration order is the canonical concat order
    double outcome_diameter = 0.0;

    // Fixed-activity environments expose discrete arms over a 1-D action.
    std::size_t activity_count = 0;
    EntityId intrinsic_error_entity;

    const EntitySpec& entity(const EntityId& id) const;
    double space_diameter(const EntityId& id) const;
    models::SchemaLayout layout() const;
    void compute_diameter();
};

class Environment {
public:
    virtual ~Environment() = default;
    virtual const EnvSpec& spec() const = 0;
    virtual Outcome execute(const ActionParams& action, RngStream& rng) = 0;
    virtual void reset() = 0;
};

// Environment factory by id ("atb" or "synthetic") with config overrides.
std::unique_ptr<Environment> make_environment(const std::string& env_id,
                                              const nlohmann::json& overrides);

} // namespace curio::envs
