#include "curio/explorers.hpp"

#include <algorithm>
#include <cmath>

#include "curio/errors.hpp"

namespace curio::explorers {

ActionParams Explorer::random_action(std::size_t dim) {
    ActionParams a;
    a.values.resize(dim);
    for (double& v : a.values) v = rng_.uniform(-1.0, 1.0);
    return a;
}

RandomExplorer::RandomExplorer(const envs::EnvSpec& spec, ExplorerConfig, RngStream rng)
    : Explorer(std::move(rng)), action_dim_(spec.action_dim) {
    db_ = std::make_unique<models::ExperienceDB>(spec.layout());
}

Rollout RandomExplorer::step(envs::Environment& env, std::uint64_t tick, RngStream& env_rng) {
    info_ = StepInfo{};
    Rollout r;
    r.tick = tick;
    r.action = random_action(action_dim_);
    r.outcome = env.execute(r.action, env_rng);
    db_->add(r.action, r.outcome);
    return r;
}

IacExplorer::IacExplorer(const envs::EnvSpec& spec, ExplorerConfig config, RngStream rng)
    : Explorer(std::move(rng)), spec_(spec), config_(config), arms_(config.epsilon) {
    db_ = std::make_unique<models::ExperienceDB>(spec_.layout());
    if (spec_.activity_count > 0) {
        activity_history_.reserve(spec_.activity_count);
        for (std::size_t i = 0; i < spec_.activity_count; ++i)
            activity_history_.emplace_back(2 * config_.theta);
    } else {
        regions::Bounds root;
        const std::size_t dim = spec_.action_dim + spec_.layout().outcome_dim();
        root.lo.assign(dim, 0.0);
        root.hi.assign(dim, 1.0);
        regions::RegionTreeConfig tc;
        tc.capacity = config_.region_capacity;
        tc.candidates = config_.split_candidates;
        tc.theta = config_.theta;
        tc.bootstrap = config_.bootstrap;
        tree_ = std::make_unique<regions::RegionTree>(std::move(root), tc);
    }
}

std::vector<double> IacExplorer::region_point(const ActionParams& a,
                                              const std::vector<double>& flat) const {
    // Sensorimotor coordinates: action then outcome, normalized to [0, 1].
    std::vector<double> p;
    p.reserve(a.dim() + flat.size());
    for (double v : a.values) p.push_back(std::clamp((v + 1.0) / 2.0, 0.0, 1.0));
    std::size_t off = 0;
    for (const auto& e : spec_.entities) {
        for (std::size_t d = 0; d < e.dim; ++d, ++off) {
            const double span = e.hi[d] - e.lo[d];
            p.push_back(std::clamp((flat[off] - e.lo[d]) / span, 0.0, 1.0));
        }
    }
    return p;
}

Rollout IacExplorer::step(envs::Environment& env, std::uint64_t tick, RngStream& env_rng) {
    return spec_.activity_count > 0 ? step_activities(env, tick, env_rng)
                                    : step_regions(env, tick, env_rng);
}

Rollout IacExplorer::step_regions(envs::Environment& env, std::uint64_t tick, RngStream& env_rng) {
    info_ = StepInfo{};
    std::vector<std::pair<std::string, double>> current;
    for (const auto& [id, interest] : tree_->leaves())
        current.emplace_back(std::to_string(id), interest);
    arms_.sync(current);
    info_.interests = current;
    info_.arm_count = current.size();

    const std::string arm = arms_.select(rng_);
    info_.arm = arm;
    const regions::Bounds& b = tree_->bounds_of(std::stoi(arm));

    // Sample within the action coordinates of the selected region.
    Rollout r;
    r.tick = tick;
    r.action.values.resize(spec_.action_dim);
    for (std::size_t d = 0; d < spec_.action_dim; ++d) {
        const double u = rng_.uniform(b.lo[d], b.hi[d]);
        r.action.values[d] = -1.0 + 2.0 * u;
    }
    r.outcome = env.execute(r.action, env_rng);

    // Maximal error on the first step, before any model exists.
    double err = 1.0;
    if (!db_->empty()) err = db_->prediction_error(db_->predict(r.action, config_.knn), r.outcome);

    tree_->insert(region_point(r.action, spec_.layout().flatten(r.outcome)), err,
                  static_cast<std::int64_t>(tick));
    db_->add(r.action, r.outcome);
    return r;
}

Rollout IacExplorer::step_activities(envs::Environment& env, std::uint64_t tick, RngStream& env_rng) {
    info_ = StepInfo{};
    std::vector<std::pair<std::string, double>> current;
    for (std::size_t i = 0; i < activity_history_.size(); ++i) {
        const auto est = lp::learning_progress(activity_history_[i], config_.theta, config_.bootstrap);
        current.emplace_back("activity_" + std::to_string(i + 1), est.interest);
    }
    arms_.sync(current);
    info_.interests = current;
    info_.arm_count = current.size();

    const std::string arm = arms_.select(rng_);
    info_.arm = arm;
    const std::size_t activity = static_cast<std::size_t>(std::stoi(arm.substr(arm.rfind('_') + 1)));

    // Uniform action within the activity's bin of [-1, 1].
    const double width = 2.0 / static_cast<double>(activity_history_.size());
    Rollout r;
    r.tick = tick;
    r.action.values = {rng_.uniform(-1.0 + (activity - 1) * width, -1.0 + activity * width)};
    r.outcome = env.execute(r.action, env_rng);

    const double err = r.outcome.at(spec_.intrinsic_error_entity).at(0);
    activity_history_[activity - 1].push(static_cast<std::int64_t>(tick), err);
    db_->add(r.action, r.outcome);
    return r;
}

ImgepExplorer::ImgepExplorer(const envs::EnvSpec& spec, ExplorerConfig config, RngStream rng)
    : Explorer(std::move(rng)), spec_(spec), config_(config), arms_(config.epsilon) {
    db_ = std::make_unique<models::ExperienceDB>(spec_.layout());
    for (const auto& e : spec_.entities)
        spaces_.emplace_back(e.id, e.lo, e.hi, spec_.space_diameter(e.id), 2 * config_.theta);
}

GoalSpace& ImgepExplorer::space(const GoalSpaceId& id) {
    for (auto& s : spaces_)
        if (s.id == id) return s;
    throw SchemaError("unknown goal space '" + id + "'");
}

Rollout ImgepExplorer::step(envs::Environment& env, std::uint64_t tick, RngStream& env_rng) {
    info_ = StepInfo{};
    std::vector<std::pair<std::string, double>> current;
    for (const auto& s : spaces_) {
        const auto est = lp::learning_progress(s.competence, config_.theta, 0.0);
        current.emplace_back(
            s.id, lp::interest_value(est.lp, config_.bootstrap, s.competence.total_count(), config_.theta));
    }
    arms_.sync(current);
    info_.interests = current;
    info_.arm_count = current.size();

    GoalSpace& target = space(arms_.select(rng_));
    info_.arm = target.id;

    std::vector<double> goal(target.lo.size());
    for (std::size_t d = 0; d < goal.size(); ++d) goal[d] = rng_.uniform(target.lo[d], target.hi[d]);

    Rollout r;
    r.tick = tick;
    if (db_->empty() || rng_.uniform() < config_.rho)
        r.action = random_action(spec_.action_dim);
    else
        r.action = db_->infer_action(goal, target.id, config_.sigma, rng_);
    r.outcome = env.execute(r.action, env_rng);
    r.meta = RolloutMeta{name(), target.id, goal};

    // Hindsight: the rollout is indexed in every goal space.
    db_->add(r.action, r.outcome);

    const auto& achieved = project_outcome(r.outcome, target.id);
    double d2 = 0.0;
    for (std::size_t d = 0; d < goal.size(); ++d) {
        const double diff = goal[d] - achieved[d];
        d2 += diff * diff;
    }
    const double err = std::clamp(std::sqrt(d2) / target.diameter, 0.0, 1.0);
    target.competence.push(static_cast<std::int64_t>(tick), err);
    return r;
}

HillClimbExplorer::HillClimbExplorer(const envs::EnvSpec& spec, ExplorerConfig config, RngStream rng)
    : HillClimbExplorer(spec, config, std::move(rng),
                        make_reward(config.reward.empty()
                                        ? (spec.activity_count > 0 ? "neg_error" : "ball_displacement")
                                        : config.reward,
                                    spec)) {}

HillClimbExplorer::HillClimbExplorer(const envs::EnvSpec& spec, ExplorerConfig config, RngStream rng,
                                     RewardFn reward)
    : Explorer(std::move(rng)), spec_(spec), config_(config), reward_(std::move(reward)) {
    db_ = std::make_unique<models::ExperienceDB>(spec_.layout());
}

Rollout HillClimbExplorer::step(envs::Environment& env, std::uint64_t tick, RngStream& env_rng) {
    info_ = StepInfo{};
    Rollout r;
    r.tick = tick;
    if (best_action_) {
        r.action = *best_action_;
        for (double& v : r.action.values)
            v = std::clamp(v + rng_.normal(0.0, config_.sigma_hill), -1.0, 1.0);
    } else {
        r.action = random_action(spec_.action_dim);
    }
    r.outcome = env.execute(r.action, env_rng);
    db_->add(r.action, r.outcome);

    const double reward = reward_(r.action, r.outcome);
    if (reward > best_reward_) {
        best_reward_ = reward;
        best_action_ = r.action;
    }
    info_.best_reward = best_reward_;
    return r;
}

HillClimbExplorer::RewardFn make_reward(const std::string& id, const envs::EnvSpec& spec) {
    if (id == "ball_displacement") {
        const auto rest = spec.entity("ball").rest;
        return [rest](const ActionParams&, const Outcome& o) {
            const auto& ball = o.at("ball");
            double d2 = 0.0;
            for (std::size_t i = 0; i < rest.size(); ++i) {
                const double diff = ball[i] - rest[i];
                d2 += diff * diff;
            }
            return std::sqrt(d2);
        };
    }
    if (id == "neg_error") {
        const EntityId entity = spec.intrinsic_error_entity.empty() ? "error" : spec.intrinsic_error_entity;
        return [entity](const ActionParams&, const Outcome& o) { return -o.at(entity).at(0); };
    }
    throw ConfigError("unknown reward '" + id + "'");
}

std::unique_ptr<Explorer> make_explorer(const std::string& name, const envs::EnvSpec& spec,
                                        const ExplorerConfig& config, RngStream rng) {
    if (name == "random") return std::make_unique<RandomExplorer>(spec, config, std::move(rng));
    if (name == "iac") return std::make_unique<IacExplorer>(spec, config, std::move(rng));
    if (name == "imgep") return std::make_unique<ImgepExplorer>(spec, config, std::move(rng));
    if (name == "hillclimb") return std::make_unique<HillClimbExplorer>(spec, config, std::move(rng));
    throw ConfigError("unknown explorer '" + name + "'");
}

} // namespace curio::explorers
