#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curio/errors.hpp"

namespace curio {

using EntityId = std::string;
using GoalSpaceId = std::string;

// Motor parameter vector; every component lives in [-1, 1].
struct ActionParams {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
};

// One structured observation: per-entity sub-vectors in a deterministic
// (key-ordered) map so serialization and replay are byte-stable.
struct Outcome {
    std::map<EntityId, std::vector<double>> entities;

    bool has(const EntityId& id) const { return entities.count(id) != 0; }

    const std::vector<double>& at(const EntityId& id) const {
        auto it = entities.find(id);
        if (it == entities.end()) throw SchemaError("unknown entity '" + id + "' in outcome");
        return it->second;
    }

    std::size_t flat_dim() const {
        std::size_t n = 0;
        for (const auto& [id, v] : entities) n += v.size();
        return n;
    }

    // Entity sub-vectors concatenated in key order.
    std::vector<double> flatten() const {
        std::vector<double> flat;
        flat.reserve(flat_dim());
        for (const auto& [id, v] : entities) flat.insert(flat.end(), v.begin(), v.end());
        return flat;
    }
};

// Metadata attached to goal-directed rollouts only.
struct RolloutMeta {
    std::string explorer;
    GoalSpaceId goal_space;
    std::vector<double> goal;
};

// One executed experiment.
struct Rollout {
    std::uint64_t tick = 0;
    ActionParams action;
    Outcome outcome;
    std::optional<RolloutMeta> meta;
};

// Goal spaces are per-entity projections of the outcome.
inline const std::vector<double>& project_outcome(const Outcome& o, const GoalSpaceId& space) {
    auto it = o.entities.find(space);
    if (it == o.entities.end()) throw SchemaError("unknown goal space '" + space + "'");
    return it->second;
}

} // namespace curio
