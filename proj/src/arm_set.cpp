#include "curio/arm_set.hpp"

#include <unordered_map>
#include <unordered_set>

#include "curio/errors.hpp"

namespace curio::interest {

ArmSet::ArmSet(double epsilon) : epsilon_(epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) throw DomainError("epsilon must be in [0, 1]");
}

void ArmSet::sync(const std::vector<std::pair<ArmId, double>>& current) {
    std::unordered_set<std::string> seen;
    for (const auto& [id, interest] : current) {
        if (!seen.insert(id).second) throw SchemaError("duplicate arm id '" + id + "'");
        if (!(interest >= 0.0)) throw DomainError("arm interest must be nonnegative");
    }
    std::unordered_map<std::string, std::uint64_t> counts;
    counts.reserve(arms_.size());
    for (const auto& a : arms_) counts[a.id] = a.selections;

    std::vector<Arm> next;
    next.reserve(current.size());
    for (const auto& [id, interest] : current) {
        Arm a;
        a.id = id;
        a.interest = interest;
        auto it = counts.find(id);
        a.selections = it == counts.end() ? 0 : it->second;
        next.push_back(std::move(a));
    }
    arms_ = std::move(next);
}

std::vector<double> ArmSet::selection_distribution() const {
    if (arms_.empty()) throw DomainError("arm set is empty");
    const std::size_t k = arms_.size();
    double total = 0.0;
    for (const auto& a : arms_) total += a.interest;

    std::vector<double> probs(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double proportional = total > 0.0 ? arms_[i].interest / total : 1.0 / static_cast<double>(k);
        probs[i] = epsilon_ / static_cast<double>(k) + (1.0 - epsilon_) * proportional;
    }
    return probs;
}

const ArmId& ArmSet::select(RngStream& rng) {
    const auto probs = selection_distribution();
    const std::size_t i = rng.categorical(probs);
    ++arms_[i].selections;
    return arms_[i].id;
}

} // namespace curio::interest
