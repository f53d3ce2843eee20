#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "curio/arm_set.hpp"
#include "curio/env.hpp"
#include "curio/experience_db.hpp"
#include "curio/learning_progress.hpp"
#include "curio/region_tree.hpp"
#include "curio/rng.hpp"
#include "curio/types.hpp"

namespace curio::explorers {

struct ExplorerConfig {
    std::size_t theta = 25;          // lp window
    double epsilon = 0.1;            // bandit exploration floor
    double bootstrap = 0.01;         // interest of under-sampled arms
    std::size_t region_capacity = 40;
    std::size_t split_candidates = 5;
    std::size_t knn = 1;             // forward-prediction neighbours
    double sigma = 0.05;             // inverse-model perturbation std
    double rho = 0.2;                // random-action probability inside imgep
    double sigma_hill = 0.2;         // hill-climber perturbation std
    std::string reward;              // hill-climber reward id; default depends on env
};

// Per-step telemetry for the metrics stream.
struct StepInfo {
    std::string arm;                                        // selected arm, if any
    std::vector<std::pair<std::string, double>> interests;  // interests at selection time
    std::size_t arm_count = 0;
    double best_reward = std::numeric_limits<double>::quiet_NaN();
};

// One exploration strategy. Each step issues exactly one environment
// execution and appends exactly one entry to the experience database.
class Explorer {
public:
    explicit Explorer(RngStream rng) : rng_(std::move(rng)) {}
    virtual ~Explorer() = default;

    virtual std::string name() const = 0;
    virtual Rollout step(envs::Environment& env, std::uint64_t tick, RngStream& env_rng) = 0;

    const StepInfo& last_step() const { return info_; }
    const models::ExperienceDB& db() const { return *db_; }

protected:
    ActionParams random_action(std::size_t dim);

    RngStream rng_;
    std::unique_ptr<models::ExperienceDB> db_;
    StepInfo info_;
};

// Uniform random action babbling.
class RandomExplorer : public Explorer {
public:
    RandomExplorer(const envs::EnvSpec& spec, ExplorerConfig config, RngStream rng);
    std::string name() const override { return "random"; }
    Rollout step(envs::Environment& env, std::uint64_t tick, RngStream& env_rng) override;

private:
    std::size_t action_dim_;
};

// Region-based learning-progress exploration over sensorimotor space.
// A prediction model learns action -> outcome; regions of (action, outcome)
// space with the largest recent drop in prediction error are sampled most.
// On fixed-activity environments the regions are replaced by one fixed arm
// per activity and the observed error feeds the histories directly.
class IacExplorer : public Explorer {
public:
    IacExplorer(const envs::EnvSpec& spec, ExplorerConfig config, RngStream rng);
    std::string name() const override { return "iac"; }
    Rollout step(envs::Environment& env, std::uint64_t tick, RngStream& env_rng) override;

    const regions::RegionTree* region_tree() const { return tree_ ? tree_.get() : nullptr; }

private:
    Rollout step_regions(envs::Environment& env, std::uint64_t tick, RngStream& env_rng);
    Rollout step_activities(envs::Environment& env, std::uint64_t tick, RngStream& env_rng);
    std::vector<double> region_point(const ActionParams& a, const std::vector<double>& flat) const;

    envs::EnvSpec spec_;
    ExplorerConfig config_;
    interest::ArmSet arms_;
    std::unique_ptr<regions::RegionTree> tree_;           // continuous mode
    std::vector<lp::ErrorHistory> activity_history_;      // fixed-activity mode
};

// One goal space per outcome entity.
struct GoalSpace {
    GoalSpaceId id;
    std::vector<double> lo;
    std::vector<double> hi;
    double diameter = 0.0;
    lp::ErrorHistory competence;

    GoalSpace(GoalSpaceId gid, std::vector<double> l, std::vector<double> h, double diam,
              std::size_t history_capacity)
        : id(std::move(gid)), lo(std::move(l)), hi(std::move(h)), diameter(diam),
          competence(history_capacity) {}
};

// Intrinsically motivated goal exploration with hindsight: goal spaces are
// bandit arms valued by competence learning progress; every rollout is
// indexed in every goal space regardless of which goal was targeted.
class ImgepExplorer : public Explorer {
public:
    ImgepExplorer(const envs::EnvSpec& spec, ExplorerConfig config, RngStream rng);
    std::string name() const override { return "imgep"; }
    Rollout step(envs::Environment& env, std::uint64_t tick, RngStream& env_rng) override;

    const std::vector<GoalSpace>& goal_spaces() const { return spaces_; }

private:
    GoalSpace& space(const GoalSpaceId& id);

    envs::EnvSpec spec_;
    ExplorerConfig config_;
    interest::ArmSet arms_;
    std::vector<GoalSpace> spaces_;
};

// Extrinsic-reward baseline: Gaussian perturbation of the best action so
// far, accepted only on strict reward improvement.
class HillClimbExplorer : public Explorer {
public:
    using RewardFn = std::function<double(const ActionParams&, const Outcome&)>;

    HillClimbExplorer(const envs::EnvSpec& spec, ExplorerConfig config, RngStream rng);
    HillClimbExplorer(const envs::EnvSpec& spec, ExplorerConfig config, RngStream rng, RewardFn reward);

    std::string name() const override { return "hillclimb"; }
    Rollout step(envs::Environment& env, std::uint64_t tick, RngStream& env_rng) override;

    double best_reward() const { return best_reward_; }
    const std::optional<ActionParams>& best_action() const { return best_action_; }

private:
    envs::EnvSpec spec_;
    ExplorerConfig config_;
    RewardFn reward_;
    std::optional<ActionParams> best_action_;
    double best_reward_ = -std::numeric_limits<double>::infinity();
};

// Named extrinsic rewards: "ball_displacement" (atb) or "neg_error"
// (fixed-activity environments).
HillClimbExplorer::RewardFn make_reward(const std::string& id, const envs::EnvSpec& spec);

std::unique_ptr<Explorer> make_explorer(const std::string& name, const envs::EnvSpec& spec,
                                        const ExplorerConfig& config, RngStream rng);

} // namespace curio::explorers
