#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "curio/env.hpp"
#include "curio/types.hpp"

namespace curio::harness {

// Occupied-cell count of a g-per-dimension uniform grid over [lo, hi].
// Out-of-bounds points clamp to edge cells.
std::size_t coverage(const std::vector<std::vector<double>>& points, const std::vector<double>& lo,
                     const std::vector<double>& hi, std::size_t grid);

// Incremental version used by the run loop.
class CoverageTracker {
public:
    CoverageTracker(std::vector<double> lo, std::vector<double> hi, std::size_t grid);
    void add(const std::vector<double>& point);
    std::size_t count() const { return cells_.size(); }

private:
    std::vector<double> lo_, hi_;
    std::size_t grid_;
    std::unordered_set<std::uint64_t> cells_;
};

// First tick whose entity sub-vector differs from the rest value by more
// than delta (Euclidean); nullopt if that never happens.
std::optional<std::uint64_t> first_control_time(const std::vector<Rollout>& log,
                                                const EntityId& entity,
                                                const std::vector<double>& rest, double delta);

// Median / IQR per group plus pairwise two-sided Mann-Whitney tests.
// Values may be missing (nullopt), which ranks as +infinity ("never").
nlohmann::json compare_groups(
    const std::vector<std::pair<std::string, std::vector<std::optional<double>>>>& groups,
    const std::string& metric);

// Re-executes a rollout log against a fresh environment built from the run
// config; true iff every outcome matches bit-exact.
bool replay(const std::string& log_path, const nlohmann::json& run_config);

// Reads `metric` ("coverage.ball", "first_control.ball", ...) out of a run
// summary. Missing values (e.g. first_control null) become nullopt.
std::optional<double> summary_metric(const nlohmann::json& summary, const std::string& metric);

} // namespace curio::harness
