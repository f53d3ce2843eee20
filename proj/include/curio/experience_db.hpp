#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "curio/rng.hpp"
#include "curio/types.hpp"

namespace curio::models {

// Exact k-nearest-neighbour index with deterministic tie-breaking by
// insertion order. Small databases are scanned linearly; past the threshold
// queries go through a periodically rebuilt median-split kd-tree plus a
// linear tail of points added since the last rebuild, which keeps the tree
// balanced even under heavily duplicated or correlated inserts.
class KnnIndex {
public:
    explicit KnnIndex(std::size_t dim);

    void add(const std::vector<double>& point);
    std::size_t size() const { return count_; }
    std::size_t dim() const { return dim_; }

    // Indices of the k nearest points (Euclidean), nearest first; ties by
    // lower insertion index. k is truncated to size().
    std::vector<std::size_t> nearest(const std::vector<double>& query, std::size_t k) const;

    const double* point(std::size_t i) const { return &pts_[i * dim_]; }

private:
    struct Candidate {
        double d2;
        std::size_t idx;
        bool operator<(const Candidate& o) const {
            return d2 < o.d2 || (d2 == o.d2 && idx < o.idx);
        }
    };

    struct TreeNode {
        std::size_t point = 0;
        std::size_t split_dim = 0;
        int left = -1;
        int right = -1;
    };

    double dist2(const double* p, const std::vector<double>& q) const;
    void scan_range(std::size_t begin, std::size_t end, const std::vector<double>& q,
                    std::size_t k, std::vector<Candidate>& heap) const;
    void search_node(int node, const std::vector<double>& q, std::size_t k,
                     std::vector<Candidate>& heap) const;
    int build_subtree(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end,
                      std::size_t depth);
    void rebuild();

    static constexpr std::size_t kLinearThreshold = 1000;
    static constexpr std::size_t kMaxTail = 512;

    std::size_t dim_;
    std::size_t count_ = 0;
    std::vector<double> pts_; // flat, count_ x dim_
    std::vector<TreeNode> tree_;
    int root_ = -1;
    std::size_t built_ = 0; // points [0, built_) are in the tree
};

// Outcome layout shared by the database, the environments, and the metrics:
// entity sub-vectors concatenate in schema order.
struct SchemaLayout {
    std::size_t action_dim = 0;
    std::vector<std::pair<EntityId, std::size_t>> entities; // (id, sub-dimension)
    double outcome_diameter = 0.0;

    std::size_t outcome_dim() const;
    std::size_t offset_of(const EntityId& id) const;
    std::size_t dim_of(const EntityId& id) const;
    std::vector<double> flatten(const Outcome& o) const;
    Outcome unflatten(const std::vector<double>& flat) const;
    void check_action(const ActionParams& a) const;
    void check_outcome(const Outcome& o) const;
};

// Memory-based model over all executed (action, outcome) pairs: forward
// prediction by k-NN averaging in action space, inverse inference by
// nearest-neighbour retrieval in a goal space plus Gaussian perturbation.
class ExperienceDB {
public:
    explicit ExperienceDB(SchemaLayout layout);

    void add(const ActionParams& action, const Outcome& outcome);
    std::size_t size() const { return actions_.size(); }
    bool empty() const { return actions_.empty(); }

    Outcome predict(const ActionParams& action, std::size_t k) const;
    double prediction_error(const Outcome& predicted, const Outcome& observed) const;
    ActionParams infer_action(const std::vector<double>& goal, const GoalSpaceId& space,
                              double sigma, RngStream& rng) const;

    // Index of the stored point whose projection into `space` is nearest to
    // the goal (ties by insertion order).
    std::size_t nearest_in_space(const std::vector<double>& goal, const GoalSpaceId& space) const;

    std::size_t space_index_size(const GoalSpaceId& space) const;
    const ActionParams& action_at(std::size_t i) const { return actions_[i]; }
    const std::vector<double>& flat_outcome_at(std::size_t i) const { return outcomes_flat_[i]; }
    const SchemaLayout& layout() const { return layout_; }

private:
    SchemaLayout layout_;
    std::vector<ActionParams> actions_;
    std::vector<std::vector<double>> outcomes_flat_;
    KnnIndex action_index_;
    std::map<EntityId, KnnIndex> space_indexes_;
};

} // namespace curio::models
