#pragma once

#include <array>

#include "curio/env.hpp"

namespace curio::envs {

// Planar 3-link forward kinematics: joint angles in radians, cumulative.
std::array<double, 2> forward_kinematics(const std::array<double, 3>& angles,
                                         const std::array<double, 3>& links);

struct ArmToolBallConfig {
    std::array<double, 3> links{0.5, 0.3, 0.2};
    int waypoints = 3;            // T: joint-angle waypoints per rollout
    int substeps = 50;            // S: interpolation substeps per waypoint segment
    std::array<double, 2> joystick_pos{0.6, 0.6};
    double grip_radius = 0.1;
    double gain = 0.01;           // tool velocity per substep per unit tilt
    std::array<double, 2> tool_start{1.2, 1.2};
    std::array<double, 2> ball_start{1.5, 1.5};
    double magnet_radius = 0.15;
    double workspace = 2.0;       // positions clamped to [-workspace, workspace]^2
    double tilt_decay_rate = 0.9; // fraction of tilt lost per non-contact substep

    void validate() const;
};

// Per-rollout causal-chain instrumentation, used by property tests.
struct AtBTrace {
    int contact_substeps = 0;
    double max_tilt_norm = 0.0;
    bool tool_moved = false;
    bool ball_moved = false;
    bool tool_moved_without_tilt = false;     // tool changed while tilt was exactly zero
    bool tilt_set_without_contact = false;    // tilt grew without hand proximity
    bool ball_moved_without_tool_contact = false;
};

// Deterministic desk-scale reaching chain: the hand can tilt a joystick, the
// joystick drives a tool, the tool magnetically drags a ball that the hand
// cannot reach directly. A distractor entity teleports uniformly at random,
// independent of the action.
class ArmToolBallEnv : public Environment {
public:
    explicit ArmToolBallEnv(ArmToolBallConfig config = {});

    const EnvSpec& spec() const override { return spec_; }
    Outcome execute(const ActionParams& action, RngStream& rng) override;
    void reset() override {}

    Outcome execute_traced(const ActionParams& action, RngStream& rng, AtBTrace& trace);

    const ArmToolBallConfig& config() const { return config_; }

    static ArmToolBallConfig config_from_json(const nlohmann::json& overrides);

private:
    ArmToolBallConfig config_;
    EnvSpec spec_;
};

} // namespace curio::envs
