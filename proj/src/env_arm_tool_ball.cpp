#include "curio/env_arm_tool_ball.hpp"

#include <algorithm>
#include <cmath>

#include "curio/errors.hpp"

namespace curio::envs {

std::array<double, 2> forward_kinematics(const std::array<double, 3>& angles,
                                         const std::array<double, 3>& links) {
    double x = 0.0, y = 0.0, cum = 0.0;
    for (int i = 0; i < 3; ++i) {
        cum += angles[i];
        x += links[i] * std::cos(cum);
        y += links[i] * std::sin(cum);
    }
    return {x, y};
}

namespace {

double norm2d(double x, double y) { return std::sqrt(x * x + y * y); }

} // namespace

void ArmToolBallConfig::validate() const {
    for (double l : links)
        if (!(l > 0.0)) throw ConfigError("links must be positive");
    if (waypoints < 1) throw ConfigError("waypoints must be >= 1");
    if (substeps < 1) throw ConfigError("substeps must be >= 1");
    if (!(grip_radius > 0.0)) throw ConfigError("grip_radius must be positive");
    if (!(magnet_radius > 0.0)) throw ConfigError("magnet_radius must be positive");
    if (!(workspace > 0.0)) throw ConfigError("workspace must be positive");
    if (tilt_decay_rate < 0.0 || tilt_decay_rate > 1.0)
        throw ConfigError("tilt_decay_rate must be in [0, 1]");
    const double reach = links[0] + links[1] + links[2];
    if (norm2d(joystick_pos[0], joystick_pos[1]) + grip_radius > reach + 1e-12)
        throw ConfigError("joystick must be within hand reach");
    if (norm2d(ball_start[0], ball_start[1]) <= reach + magnet_radius)
        throw ConfigError("ball start must be outside direct hand reach");
}

ArmToolBallEnv::ArmToolBallEnv(ArmToolBallConfig config) : config_(config) {
    config_.validate();
    const double reach = config_.links[0] + config_.links[1] + config_.links[2];
    const double w = config_.workspace;
    const double tool_range = config_.gain * config_.waypoints * config_.substeps;

    auto box = [&](const std::array<double, 2>& center, double half) {
        EntitySpec e;
        e.dim = 2;
        for (int d = 0; d < 2; ++d) {
            e.lo.push_back(std::max(-w, center[d] - half));
            e.hi.push_back(std::min(w, center[d] + half));
        }
        return e;
    };

    EntitySpec hand;
    hand.id = "hand";
    hand.dim = 2;
    hand.lo = {-reach, -reach};
    hand.hi = {reach, reach};
    const auto rest_hand = forward_kinematics({0.0, 0.0, 0.0}, config_.links);
    hand.rest = {rest_hand[0], rest_hand[1]};

    EntitySpec joystick;
    joystick.id = "joystick";
    joystick.dim = 2;
    joystick.lo = {-1.0, -1.0};
    joystick.hi = {1.0, 1.0};
    joystick.rest = {0.0, 0.0};

    EntitySpec tool = box(config_.tool_start, tool_range);
    tool.id = "tool";
    tool.rest = {config_.tool_start[0], config_.tool_start[1]};

    // The ball only goes where the tool drags it.
    EntitySpec ball = box(config_.tool_start, tool_range);
    ball.id = "ball";
    for (int d = 0; d < 2; ++d) {
        ball.lo[d] = std::min(ball.lo[d], config_.ball_start[d]);
        ball.hi[d] = std::max(ball.hi[d], config_.ball_start[d]);
    }
    ball.rest = {config_.ball_start[0], config_.ball_start[1]};

    EntitySpec distractor;
    distractor.id = "distractor";
    distractor.dim = 2;
    distractor.lo = {-w, -w};
    distractor.hi = {w, w};
    distractor.rest = {0.0, 0.0};

    spec_.env_id = "atb";
    spec_.action_dim = static_cast<std::size_t>(3 * config_.waypoints);
    spec_.entities = {hand, joystick, tool, ball, distractor};
    spec_.compute_diameter();
}

Outcome ArmToolBallEnv::execute(const ActionParams& action, RngStream& rng) {
    AtBTrace trace;
    return execute_traced(action, rng, trace);
}

Outcome ArmToolBallEnv::execute_traced(const ActionParams& action, RngStream& rng, AtBTrace& trace) {
    if (action.dim() != spec_.action_dim)
        throw SchemaError("atb action must have length " + std::to_string(spec_.action_dim));

    std::array<double, 3> angles{0.0, 0.0, 0.0};
    auto hand = forward_kinematics(angles, config_.links);
    std::array<double, 2> tilt{0.0, 0.0};
    std::array<double, 2> tool = config_.tool_start;
    std::array<double, 2> ball = config_.ball_start;
    const double retain = 1.0 - config_.tilt_decay_rate;

    for (int w = 0; w < config_.waypoints; ++w) {
        const std::array<double, 3> from = angles;
        std::array<double, 3> target;
        for (int j = 0; j < 3; ++j) target[j] = action.values[3 * w + j] * M_PI;

        for (int s = 1; s <= config_.substeps; ++s) {
            const double t = static_cast<double>(s) / config_.substeps;
            for (int j = 0; j < 3; ++j) angles[j] = from[j] + t * (target[j] - from[j]);
            hand = forward_kinematics(angles, config_.links);

            const double ox = hand[0] - config_.joystick_pos[0];
            const double oy = hand[1] - config_.joystick_pos[1];
            const bool was_zero = tilt[0] == 0.0 && tilt[1] == 0.0;
            if (norm2d(ox, oy) < config_.grip_radius) {
                tilt[0] = std::clamp(ox / config_.grip_radius, -1.0, 1.0);
                tilt[1] = std::clamp(oy / config_.grip_radius, -1.0, 1.0);
                ++trace.contact_substeps;
            } else {
                tilt[0] *= retain;
                tilt[1] *= retain;
                if (was_zero && (tilt[0] != 0.0 || tilt[1] != 0.0)) trace.tilt_set_without_contact = true;
            }
            trace.max_tilt_norm = std::max(trace.max_tilt_norm, norm2d(tilt[0], tilt[1]));

            const std::array<double, 2> tool_before = tool;
            for (int d = 0; d < 2; ++d) {
                tool[d] += config_.gain * tilt[d];
                tool[d] = std::clamp(tool[d], -config_.workspace, config_.workspace);
            }
            if (tool != tool_before) {
                trace.tool_moved = true;
                if (tilt[0] == 0.0 && tilt[1] == 0.0) trace.tool_moved_without_tilt = true;
            }

            if (norm2d(tool[0] - ball[0], tool[1] - ball[1]) < config_.magnet_radius) {
                if (ball != tool) {
                    trace.ball_moved = true;
                    ball = tool;
                }
            }
        }
    }

    if (trace.ball_moved && trace.contact_substeps == 0) trace.ball_moved_without_tool_contact = true;

    const double dx = rng.uniform(-config_.workspace, config_.workspace);
    const double dy = rng.uniform(-config_.workspace, config_.workspace);

    Outcome o;
    o.entities["hand"] = {hand[0], hand[1]};
    o.entities["joystick"] = {tilt[0], tilt[1]};
    o.entities["tool"] = {tool[0], tool[1]};
    o.entities["ball"] = {ball[0], ball[1]};
    o.entities["distractor"] = {dx, dy};
    return o;
}

ArmToolBallConfig ArmToolBallEnv::config_from_json(const nlohmann::json& overrides) {
    ArmToolBallConfig c;
    for (const auto& [key, value] : overrides.items()) {
        if (key == "links") c.links = value.get<std::array<double, 3>>();
        else if (key == "waypoints") c.waypoints = value.get<int>();
        else if (key == "substeps") c.substeps = value.get<int>();
        else if (key == "joystick_pos") c.joystick_pos = value.get<std::array<double, 2>>();
        else if (key == "grip_radius") c.grip_radius = value.get<double>();
        else if (key == "gain") c.gain = value.get<double>();
        else if (key == "tool_start") c.tool_start = value.get<std::array<double, 2>>();
        else if (key == "ball_start") c.ball_start = value.get<std::array<double, 2>>();
        else if (key == "magnet_radius") c.magnet_radius = value.get<double>();
        else if (key == "workspace") c.workspace = value.get<double>();
        else if (key == "tilt_decay_rate") c.tilt_decay_rate = value.get<double>();
        else throw ConfigError("unknown atb config key '" + key + "'");
    }
    return c;
}

} // namespace curio::envs
