#include "curio/region_tree.hpp"

#include <algorithm>
#include <cmath>

#include "curio/errors.hpp"

namespace curio::regions {

bool Bounds::contains(const std::vector<double>& p) const {
    if (p.size() != dim()) return false;
    for (std::size_t d = 0; d < dim(); ++d)
        if (p[d] < lo[d] || p[d] > hi[d]) return false;
    return true;
}

RegionTree::RegionTree(Bounds root_bounds, RegionTreeConfig config) : config_(config) {
    if (root_bounds.lo.size() != root_bounds.hi.size() || root_bounds.dim() == 0)
        throw DomainError("region bounds must be a nonempty hyper-rectangle");
    for (std::size_t d = 0; d < root_bounds.dim(); ++d)
        if (!(root_bounds.lo[d] < root_bounds.hi[d]))
            throw DomainError("region bounds need lo < hi in every dimension");
    if (config_.capacity < 2) throw DomainError("leaf capacity must be >= 2");
    nodes_.emplace_back(std::move(root_bounds), 2 * config_.theta);
}

int RegionTree::descend(const std::vector<double>& point) const {
    int id = 0;
    while (!nodes_[id].leaf) {
        const Node& n = nodes_[id];
        id = point[n.split_dim] < n.split_value ? n.left : n.right;
    }
    return id;
}

int RegionTree::region_of(const std::vector<double>& point) const {
    if (point.size() != nodes_[0].bounds.dim())
        throw DomainError("point dimension does not match region space");
    if (!nodes_[0].bounds.contains(point))
        throw DomainError("point outside root region bounds");
    return descend(point);
}

double RegionTree::side_lp(const std::vector<Exemplar>& side) {
    // Exemplars arrive in tick order, so the buffer is already sorted.
    const std::size_t m = side.size();
    if (m < 2) return 0.0;
    const std::size_t theta = m / 2;
    lp::ErrorHistory h(2 * theta);
    for (const auto& e : side) h.push(e.tick, e.error);
    return lp::learning_progress(h, theta).lp;
}

std::optional<SplitDecision> RegionTree::choose_split(const std::vector<Exemplar>& exemplars,
                                                      std::size_t dims, std::size_t max_candidates) {
    std::optional<SplitDecision> best;
    double best_score = -1.0;

    std::vector<double> coords(exemplars.size());
    std::vector<Exemplar> left_side, right_side;
    for (std::size_t d = 0; d < dims; ++d) {
        for (std::size_t i = 0; i < exemplars.size(); ++i) coords[i] = exemplars[i].point[d];
        std::sort(coords.begin(), coords.end());

        std::vector<double> candidates;
        for (std::size_t i = 0; i + 1 < coords.size(); ++i) {
            if (coords[i] == coords[i + 1]) continue; // midpoint would leave a side empty
            const double v = 0.5 * (coords[i] + coords[i + 1]);
            if (candidates.empty() || candidates.back() != v) candidates.push_back(v);
        }
        if (candidates.size() > max_candidates && max_candidates > 0) {
            // Evenly indexed subset, keeping the extremes.
            std::vector<double> picked;
            picked.reserve(max_candidates);
            for (std::size_t i = 0; i < max_candidates; ++i) {
                const std::size_t idx =
                    max_candidates == 1 ? candidates.size() / 2
                                        : i * (candidates.size() - 1) / (max_candidates - 1);
                if (picked.empty() || picked.back() != candidates[idx]) picked.push_back(candidates[idx]);
            }
            candidates = std::move(picked);
        }

        for (double v : candidates) {
            left_side.clear();
            right_side.clear();
            for (const auto& e : exemplars)
                (e.point[d] < v ? left_side : right_side).push_back(e);
            if (left_side.empty() || right_side.empty()) continue;
            const double score = std::fabs(side_lp(left_side) - side_lp(right_side));
            if (score > best_score) {
                best_score = score;
                best = SplitDecision{d, v};
            }
        }
    }
    return best;
}

void RegionTree::try_split(int id) {
    Node& n = nodes_[id];
    if (n.exemplars.size() < config_.capacity) return;
    const auto cut = choose_split(n.exemplars, n.bounds.dim(), config_.candidates);
    if (!cut) return; // all points identical; buffer may exceed capacity

    Bounds lb = n.bounds;
    Bounds rb = n.bounds;
    lb.hi[cut->dim] = cut->value;
    rb.lo[cut->dim] = cut->value;

    const int left_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back(std::move(lb), 2 * config_.theta);
    const int right_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back(std::move(rb), 2 * config_.theta);

    // nodes_ may have reallocated; re-take the reference.
    Node& parent = nodes_[id];
    for (const auto& e : parent.exemplars) {
        Node& child = e.point[cut->dim] < cut->value ? nodes_[left_id] : nodes_[right_id];
        child.exemplars.push_back(e);
        child.history.push(e.tick, e.error);
    }
    parent.leaf = false;
    parent.split_dim = cut->dim;
    parent.split_value = cut->value;
    parent.left = left_id;
    parent.right = right_id;
    parent.exemplars.clear();
    parent.exemplars.shrink_to_fit();

    try_split(left_id);
    try_split(right_id);
}

int RegionTree::insert(const std::vector<double>& point, double error, std::int64_t tick) {
    const int id = region_of(point);
    Node& n = nodes_[id];
    n.exemplars.push_back(Exemplar{point, error, tick});
    n.history.push(tick, error);
    try_split(id);
    return descend(point);
}

double RegionTree::interest_of(int id) const {
    const Node& n = nodes_.at(id);
    const auto est = lp::learning_progress(n.history, config_.theta, config_.bootstrap);
    return lp::interest_value(est.lp, config_.bootstrap, n.history.total_count(), config_.theta);
}

std::vector<std::pair<int, double>> RegionTree::leaves() const {
    std::vector<std::pair<int, double>> out;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        const Node& n = nodes_[id];
        if (n.leaf) {
            out.emplace_back(id, interest_of(id));
        } else {
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
    return out;
}

std::size_t RegionTree::leaf_count() const {
    std::size_t count = 0;
    for (const auto& n : nodes_)
        if (n.leaf) ++count;
    return count;
}

std::size_t RegionTree::total_exemplars() const {
    std::size_t count = 0;
    for (const auto& n : nodes_)
        if (n.leaf) count += n.exemplars.size();
    return count;
}

nlohmann::json RegionTree::node_to_json(int id) const {
    const Node& n = nodes_[id];
    nlohmann::json j;
    j["id"] = id;
    j["bounds"] = {{"lo", n.bounds.lo}, {"hi", n.bounds.hi}};
    if (n.leaf) {
        j["exemplars"] = n.exemplars.size();
        j["interest"] = interest_of(id);
    } else {
        j["split"] = {{"dim", n.split_dim}, {"value", n.split_value}};
        j["left"] = node_to_json(n.left);
        j["right"] = node_to_json(n.right);
    }
    return j;
}

nlohmann::json RegionTree::to_json() const { return node_to_json(0); }

} // namespace curio::regions
