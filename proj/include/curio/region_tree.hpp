#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "curio/learning_progress.hpp"

namespace curio::regions {

// Axis-aligned hyper-rectangle, per-dimension [lo, hi] with lo < hi.
struct Bounds {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }
    bool contains(const std::vector<double>& p) const;
};

struct Exemplar {
    std::vector<double> point;
    double error = 0.0;
    std::int64_t tick = 0;
};

struct SplitDecision {
    std::size_t dim = 0;
    double value = 0.0;
};

struct RegionTreeConfig {
    std::size_t capacity = 40;        // exemplars per leaf before a split is attempted
    std::size_t candidates = 5;       // candidate cut values per dimension
    std::size_t theta = 25;           // lp window for leaf interest
    double bootstrap = 0.01;          // interest of under-sampled leaves
};

// Incremental partition of experience space. Leaves hold exemplar buffers
// and error histories; a full leaf splits at the cut that maximizes the
// difference in learning progress between its two sides, so regions align
// with differences in learnability rather than raw outcome variance.
class RegionTree {
public:
    RegionTree(Bounds root_bounds, RegionTreeConfig config = {});

    // Leaf id containing the point. Points on the boundary are treated as
    // clamped; points outside the root bounds are a domain error.
    int region_of(const std::vector<double>& point) const;

    // Appends the exemplar, pushes its error to the leaf history, and splits
    // the leaf when the buffer reaches capacity. Returns the id of the leaf
    // containing the point afterwards.
    int insert(const std::vector<double>& point, double error, std::int64_t tick);

    // Every leaf once, with its current interest.
    std::vector<std::pair<int, double>> leaves() const;

    std::size_t leaf_count() const;
    std::size_t total_exemplars() const;

    const Bounds& bounds_of(int id) const { return nodes_.at(id).bounds; }
    bool is_leaf(int id) const { return nodes_.at(id).leaf; }
    const std::vector<Exemplar>& exemplars_of(int id) const { return nodes_.at(id).exemplars; }
    const lp::ErrorHistory& history_of(int id) const { return nodes_.at(id).history; }
    double interest_of(int id) const;
    const RegionTreeConfig& config() const { return config_; }

    // Best cut for a buffer of exemplars, or nullopt when every candidate is
    // invalid (all points identical). Exposed for oracle tests.
    static std::optional<SplitDecision> choose_split(const std::vector<Exemplar>& exemplars,
                                                     std::size_t dims, std::size_t max_candidates);

    nlohmann::json to_json() const;

private:
    struct Node {
        Bounds bounds;
        bool leaf = true;
        std::size_t split_dim = 0;
        double split_value = 0.0;
        int left = -1;
        int right = -1;
        std::vector<Exemplar> exemplars;
        lp::ErrorHistory history;

        Node(Bounds b, std::size_t history_capacity) : bounds(std::move(b)), history(history_capacity) {}
    };

    int descend(const std::vector<double>& point) const;
    void try_split(int id);
    static double side_lp(const std::vector<Exemplar>& side);
    nlohmann::json node_to_json(int id) const;

    RegionTreeConfig config_;
    std::vector<Node> nodes_;
};

} // namespace curio::regions
