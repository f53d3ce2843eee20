#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>

#include "curio/errors.hpp"

namespace curio::lp {

// Bounded ring of (tick, error) pairs. Ticks must strictly increase and
// errors are nonnegative; the oldest pair is evicted at capacity.
class ErrorHistory {
public:
    explicit ErrorHistory(std::size_t capacity) : capacity_(capacity) {}

    void push(std::int64_t tick, double error) {
        if (!(error >= 0.0)) throw DomainError("error must be nonnegative");
        if (!entries_.empty() && tick <= entries_.back().tick)
            throw OrderingError("non-increasing tick in error history");
        entries_.push_back({tick, error});
        if (entries_.size() > capacity_) entries_.pop_front();
        ++total_pushed_;
    }

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    // Lifetime push count; unlike size() this keeps growing past capacity.
    std::size_t total_count() const { return total_pushed_; }
    bool empty() const { return entries_.empty(); }

    double error_at(std::size_t i) const { return entries_[i].error; }
    std::int64_t tick_at(std::size_t i) const { return entries_[i].tick; }
    std::int64_t last_tick() const {
        return entries_.empty() ? std::numeric_limits<std::int64_t>::min() : entries_.back().tick;
    }

private:
    struct Entry {
        std::int64_t tick;
        double error;
    };
    std::size_t capacity_;
    std::deque<Entry> entries_;
    std::size_t total_pushed_ = 0;
};

struct LPEstimate {
    double lp = 0.0;       // signed progress, error units per window
    double interest = 0.0; // max(0, lp), or the bootstrap value when under-sampled
    std::size_t window = 0;
};

// Two-window estimator: mean error over the older theta samples of the last
// 2*theta minus the mean over the newer theta. Positive lp means errors fell.
// Histories holding fewer than 2*theta samples report lp = 0 with the
// bootstrap interest so unexplored arms stay selectable.
inline LPEstimate learning_progress(const ErrorHistory& h, std::size_t theta, double bootstrap = 0.0) {
    if (theta == 0) throw DomainError("lp window must be >= 1");
    LPEstimate est;
    est.window = theta;
    if (h.size() < 2 * theta) {
        est.lp = 0.0;
        est.interest = bootstrap;
        return est;
    }
    const std::size_t start = h.size() - 2 * theta;
    double older = 0.0;
    double newer = 0.0;
    for (std::size_t i = 0; i < theta; ++i) {
        older += h.error_at(start + i);
        newer += h.error_at(start + theta + i);
    }
    est.lp = (older - newer) / static_cast<double>(theta);
    est.interest = std::max(0.0, est.lp);
    return est;
}

inline double interest_value(double lp, double bootstrap, std::size_t sample_count, std::size_t theta) {
    if (sample_count < 2 * theta) return bootstrap;
    return std::max(0.0, lp);
}

} // namespace curio::lp
