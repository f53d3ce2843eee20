#pragma once

#include <string>
#include <vector>

#include "curio/rng.hpp"

namespace curio::interest {

using ArmId = std::string;

struct Arm {
    ArmId id;
    double interest = 0.0;
    std::uint64_t selections = 0;
};

// Non-stationary bandit over a dynamic arm set. Interests are recomputed by
// the owner between selections; this class only turns them into choices.
class ArmSet {
public:
    explicit ArmSet(double epsilon = 0.1);

    // Replaces the arm set. Arms whose id survives keep their selection
    // count; new ids start at zero; dropped ids are forgotten.
    void sync(const std::vector<std::pair<ArmId, double>>& current);

    // epsilon-floor proportional rule: p_i = eps/K + (1-eps) * I_i / sum(I),
    // falling back to uniform for the proportional term when sum(I) == 0.
    std::vector<double> selection_distribution() const;

    const ArmId& select(RngStream& rng);

    std::size_t size() const { return arms_.size(); }
    const std::vector<Arm>& arms() const { return arms_; }
    double epsilon() const { return epsilon_; }

private:
    double epsilon_;
    std::vector<Arm> arms_;
};

} // namespace curio::interest
