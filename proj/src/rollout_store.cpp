#include "curio/rollout_store.hpp"

#include "curio/errors.hpp"

namespace curio {

using nlohmann::json;

json rollout_to_json(const Rollout& r) {
    json j;
    j["tick"] = r.tick;
    j["action"] = r.action.values;
    json out = json::object();
    for (const auto& [id, v] : r.outcome.entities) out[id] = v;
    j["outcome"] = out;
    if (r.meta) {
        j["meta"] = {{"explorer", r.meta->explorer},
                     {"goal_space", r.meta->goal_space},
                     {"goal", r.meta->goal}};
    } else {
        j["meta"] = nullptr;
    }
    return j;
}

Rollout rollout_from_json(const json& j) {
    Rollout r;
    r.tick = j.at("tick").get<std::uint64_t>();
    r.action.values = j.at("action").get<std::vector<double>>();
    for (const auto& [key, value] : j.at("outcome").items())
        r.outcome.entities[key] = value.get<std::vector<double>>();
    if (j.contains("meta") && !j.at("meta").is_null()) {
        RolloutMeta m;
        m.explorer = j.at("meta").at("explorer").get<std::string>();
        m.goal_space = j.at("meta").at("goal_space").get<std::string>();
        m.goal = j.at("meta").at("goal").get<std::vector<double>>();
        r.meta = std::move(m);
    }
    return r;
}

RolloutStore::RolloutStore(const std::string& sink_path) {
    sink_.open(sink_path, std::ios::out | std::ios::trunc);
    if (!sink_) throw IoError("cannot open rollout log sink '" + sink_path + "'");
    has_sink_ = true;
}

std::size_t RolloutStore::record(const Rollout& r) {
    if (r.tick != rollouts_.size())
        throw OrderingError("rollout tick " + std::to_string(r.tick) +
                            " does not match store length " + std::to_string(rollouts_.size()));
    rollouts_.push_back(r);
    if (has_sink_) {
        sink_ << rollout_to_json(r).dump() << '\n';
        if (!sink_) throw IoError("rollout log sink write failed");
    }
    return rollouts_.size() - 1;
}

void RolloutStore::flush() {
    if (has_sink_) sink_.flush();
}

std::vector<Rollout> RolloutStore::load_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open rollout log '" + path + "'");
    std::vector<Rollout> rollouts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rollouts.push_back(rollout_from_json(json::parse(line)));
    }
    return rollouts;
}

} // namespace curio
