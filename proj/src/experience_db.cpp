#include "curio/experience_db.hpp"

#include <algorithm>
#include <cmath>

#include "curio/errors.hpp"

namespace curio::models {

KnnIndex::KnnIndex(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw DomainError("knn index needs dimension >= 1");
}

void KnnIndex::add(const std::vector<double>& point) {
    if (point.size() != dim_) throw SchemaError("point dimension mismatch in knn index");
    pts_.insert(pts_.end(), point.begin(), point.end());
    ++count_;
    if (count_ >= kLinearThreshold && count_ - built_ > kMaxTail) rebuild();
}

double KnnIndex::dist2(const double* p, const std::vector<double>& q) const {
    double d2 = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
        const double diff = p[d] - q[d];
        d2 += diff * diff;
    }
    return d2;
}

void KnnIndex::scan_range(std::size_t begin, std::size_t end, const std::vector<double>& q,
                          std::size_t k, std::vector<Candidate>& heap) const {
    for (std::size_t i = begin; i < end; ++i) {
        const Candidate c{dist2(point(i), q), i};
        if (heap.size() < k) {
            heap.push_back(c);
            std::push_heap(heap.begin(), heap.end());
        } else if (c < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = c;
            std::push_heap(heap.begin(), heap.end());
        }
    }
}

void KnnIndex::search_node(int node, const std::vector<double>& q, std::size_t k,
                           std::vector<Candidate>& heap) const {
    if (node < 0) return;
    const TreeNode& n = tree_[node];
    const Candidate c{dist2(point(n.point), q), n.point};
    if (heap.size() < k) {
        heap.push_back(c);
        std::push_heap(heap.begin(), heap.end());
    } else if (c < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = c;
        std::push_heap(heap.begin(), heap.end());
    }

    const double plane = q[n.split_dim] - point(n.point)[n.split_dim];
    const int near = plane < 0.0 ? n.left : n.right;
    const int far = plane < 0.0 ? n.right : n.left;
    search_node(near, q, k, heap);
    // The far side may still hold an equal-distance point with a lower
    // insertion index, so it is pruned only on strictly larger distance.
    if (heap.size() < k || plane * plane <= heap.front().d2) search_node(far, q, k, heap);
}

int KnnIndex::build_subtree(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end,
                            std::size_t depth) {
    if (begin >= end) return -1;
    const std::size_t d = depth % dim_;
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(idx.begin() + begin, idx.begin() + mid, idx.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                         const double ca = point(a)[d];
                         const double cb = point(b)[d];
                         return ca < cb || (ca == cb && a < b);
                     });
    TreeNode node;
    node.point = idx[mid];
    node.split_dim = d;
    const int self = static_cast<int>(tree_.size());
    tree_.push_back(node);
    const int left = build_subtree(idx, begin, mid, depth + 1);
    const int right = build_subtree(idx, mid + 1, end, depth + 1);
    tree_[self].left = left;
    tree_[self].right = right;
    return self;
}

void KnnIndex::rebuild() {
    tree_.clear();
    tree_.reserve(count_);
    std::vector<std::size_t> idx(count_);
    for (std::size_t i = 0; i < count_; ++i) idx[i] = i;
    root_ = build_subtree(idx, 0, count_, 0);
    built_ = count_;
}

std::vector<std::size_t> KnnIndex::nearest(const std::vector<double>& query, std::size_t k) const {
    if (query.size() != dim_) throw SchemaError("query dimension mismatch in knn index");
    if (count_ == 0 || k == 0) return {};
    k = std::min(k, count_);

    std::vector<Candidate> heap;
    heap.reserve(k + 1);
    if (count_ < kLinearThreshold) {
        scan_range(0, count_, query, k, heap);
    } else {
        search_node(root_, query, k, heap);
        scan_range(built_, count_, query, k, heap);
    }
    std::sort(heap.begin(), heap.end());
    std::vector<std::size_t> out(heap.size());
    for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].idx;
    return out;
}

std::size_t SchemaLayout::outcome_dim() const {
    std::size_t n = 0;
    for (const auto& [id, d] : entities) n += d;
    return n;
}

std::size_t SchemaLayout::offset_of(const EntityId& id) const {
    std::size_t off = 0;
    for (const auto& [eid, d] : entities) {
        if (eid == id) return off;
        off += d;
    }
    throw SchemaError("unknown entity '" + id + "' in schema");
}

std::size_t SchemaLayout::dim_of(const EntityId& id) const {
    for (const auto& [eid, d] : entities)
        if (eid == id) return d;
    throw SchemaError("unknown entity '" + id + "' in schema");
}

std::vector<double> SchemaLayout::flatten(const Outcome& o) const {
    check_outcome(o);
    std::vector<double> flat;
    flat.reserve(outcome_dim());
    for (const auto& [id, d] : entities) {
        const auto& v = o.at(id);
        flat.insert(flat.end(), v.begin(), v.end());
    }
    return flat;
}

Outcome SchemaLayout::unflatten(const std::vector<double>& flat) const {
    if (flat.size() != outcome_dim()) throw SchemaError("flat outcome dimension mismatch");
    Outcome o;
    std::size_t off = 0;
    for (const auto& [id, d] : entities) {
        o.entities[id] = std::vector<double>(flat.begin() + off, flat.begin() + off + d);
        off += d;
    }
    return o;
}

void SchemaLayout::check_action(const ActionParams& a) const {
    if (a.dim() != action_dim)
        throw SchemaError("action dimension " + std::to_string(a.dim()) + " does not match schema " +
                          std::to_string(action_dim));
}

void SchemaLayout::check_outcome(const Outcome& o) const {
    if (o.entities.size() != entities.size()) throw SchemaError("outcome entity set does not match schema");
    for (const auto& [id, d] : entities) {
        auto it = o.entities.find(id);
        if (it == o.entities.end()) throw SchemaError("outcome missing entity '" + id + "'");
        if (it->second.size() != d) throw SchemaError("outcome entity '" + id + "' has wrong dimension");
    }
}

ExperienceDB::ExperienceDB(SchemaLayout layout)
    : layout_(std::move(layout)), action_index_(layout_.action_dim) {
    for (const auto& [id, d] : layout_.entities) space_indexes_.emplace(id, KnnIndex(d));
}

void ExperienceDB::add(const ActionParams& action, const Outcome& outcome) {
    layout_.check_action(action);
    auto flat = layout_.flatten(outcome); // schema-checked
    action_index_.add(action.values);
    for (auto& [id, index] : space_indexes_) {
        const std::size_t off = layout_.offset_of(id);
        index.add(std::vector<double>(flat.begin() + off, flat.begin() + off + index.dim()));
    }
    actions_.push_back(action);
    outcomes_flat_.push_back(std::move(flat));
}

Outcome ExperienceDB::predict(const ActionParams& action, std::size_t k) const {
    if (empty()) throw ModelUnavailableError("cannot predict from an empty experience database");
    if (k == 0) throw DomainError("prediction needs k >= 1");
    layout_.check_action(action);
    const auto ids = action_index_.nearest(action.values, k);
    std::vector<double> mean(layout_.outcome_dim(), 0.0);
    for (std::size_t idx : ids)
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += outcomes_flat_[idx][d];
    for (double& v : mean) v /= static_cast<double>(ids.size());
    return layout_.unflatten(mean);
}

double ExperienceDB::prediction_error(const Outcome& predicted, const Outcome& observed) const {
    const auto a = layout_.flatten(predicted);
    const auto b = layout_.flatten(observed);
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        d2 += diff * diff;
    }
    return std::sqrt(d2) / layout_.outcome_diameter;
}

std::size_t ExperienceDB::nearest_in_space(const std::vector<double>& goal,
                                           const GoalSpaceId& space) const {
    if (empty()) throw ModelUnavailableError("empty experience database");
    auto it = space_indexes_.find(space);
    if (it == space_indexes_.end()) throw SchemaError("unknown goal space '" + space + "'");
    return it->second.nearest(goal, 1).at(0);
}

ActionParams ExperienceDB::infer_action(const std::vector<double>& goal, const GoalSpaceId& space,
                                        double sigma, RngStream& rng) const {
    if (sigma < 0.0) throw DomainError("perturbation sigma must be >= 0");
    ActionParams a = actions_[nearest_in_space(goal, space)];
    for (double& v : a.values) {
        if (sigma > 0.0) v += rng.normal(0.0, sigma);
        v = std::clamp(v, -1.0, 1.0);
    }
    return a;
}

std::size_t ExperienceDB::space_index_size(const GoalSpaceId& space) const {
    auto it = space_indexes_.find(space);
    if (it == space_indexes_.end()) throw SchemaError("unknown goal space '" + space + "'");
    return it->second.size();
}

} // namespace curio::models
