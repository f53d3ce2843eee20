#pragma once

#include <array>

#include "curio/env.hpp"

namespace curio::envs {

// Per-activity learnability curve: error(n) = base + amp * exp(-n / tau)
// after n practice rounds (amp = 0 gives a flat curve).
struct ActivityCurve {
    double base = 0.0;
    double amp = 0.0;
    double tau = 1.0;

    double value(std::uint64_t n) const;
};

struct SyntheticConfig {
    // Defaults: 1 = unlearnable-hard, 2 = slow learner, 3 = fast learner,
    // 4 = trivial.
    std::array<ActivityCurve, 4> curves{
        ActivityCurve{0.9, 0.0, 1.0},
        ActivityCurve{0.1, 0.75, 400.0},
        ActivityCurve{0.1, 0.8, 60.0},
        ActivityCurve{0.05, 0.0, 1.0},
    };
    double noise_std = 0.01;

    void validate() const;
};

// Four abstract activities with fixed learnability profiles. The 1-D action
// in [-1, 1] selects an activity by equal-width bins; the outcome is the
// observed prediction error for one practice round of that activity, so the
// learning-progress machinery can be exercised without a world model.
class SyntheticEnv : public Environment {
public:
    explicit SyntheticEnv(SyntheticConfig config = {});

    const EnvSpec& spec() const override { return spec_; }
    Outcome execute(const ActionParams& action, RngStream& rng) override;
    void reset() override { counts_ = {0, 0, 0, 0}; }

    // Practice one activity directly (ids 1..4); returns the observed error.
    double execute_activity(int activity, RngStream& rng);

    static int activity_of_action(double a);
    std::uint64_t practice_count(int activity) const;
    const SyntheticConfig& config() const { return config_; }

    static SyntheticConfig config_from_json(const nlohmann::json& overrides);

private:
    SyntheticConfig config_;
    EnvSpec spec_;
    std::array<std::uint64_t, 4> counts_{0, 0, 0, 0};
};

} // namespace curio::envs
