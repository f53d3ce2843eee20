#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curio/types.hpp"

namespace curio {

nlohmann::json rollout_to_json(const Rollout& r);
Rollout rollout_from_json(const nlohmann::json& j);

// Append-only sequence of rollouts with an optional JSON-lines file sink.
// Ticks must arrive in order: rollout t is accepted only at index t.
class RolloutStore {
public:
    RolloutStore() = default;
    explicit RolloutStore(const std::string& sink_path);

    std::size_t record(const Rollout& r);

    std::size_t size() const { return rollouts_.size(); }
    bool empty() const { return rollouts_.empty(); }
    const Rollout& at(std::size_t i) const { return rollouts_.at(i); }
    const std::vector<Rollout>& rollouts() const { return rollouts_; }

    void flush();

    static std::vector<Rollout> load_log(const std::string& path);

private:
    std::vector<Rollout> rollouts_;
    std::ofstream sink_;
    bool has_sink_ = false;
};

} // namespace curio
