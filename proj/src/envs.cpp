#include "nevo/envs.hpp"

#include <cmath>
#include <functional>

#include "nevo/errors.hpp"

namespace nevo {

TaskId task_from_name(const std::string& name) {
    if (name == "cartpole") return TaskId::cartpole;
    if (name == "dotchase") return TaskId::dotchase;
    throw ConfigError("unknown task '" + name + "'");
}

const char* task_name(TaskId t) {
    return t == TaskId::cartpole ? "cartpole" : "dotchase";
}

TaskInfo task_info(TaskId t) {
    if (t == TaskId::cartpole) return {CartPole::kObsDim, "4", CartPole::kActions, CartPole::kMaxSteps};
    return {int(DotChase::kObsShape.volume()), "1x8x8", DotChase::kActions, DotChase::kEpisodeLen};
}

// --------------------------------------------------------------------------- cart-pole

namespace {
constexpr double kGravity = 9.8;
constexpr double kCartMass = 1.0;
constexpr double kPoleMass = 0.1;
constexpr double kTotalMass = kCartMass + kPoleMass;
constexpr double kHalfLength = 0.5;
constexpr double kPoleMassLength = kPoleMass * kHalfLength;
constexpr double kForce = 10.0;
constexpr double kTau = 0.02;
constexpr double kXLimit = 2.4;
constexpr double kThetaLimit = 12.0 * 3.14159265358979323846 / 180.0;
} // namespace

std::vector<double> CartPole::reset(RngStream& rng) {
    x_ = rng.uniform_range(-0.05, 0.05);
    x_dot_ = rng.uniform_range(-0.05, 0.05);
    theta_ = rng.uniform_range(-0.05, 0.05);
    theta_dot_ = rng.uniform_range(-0.05, 0.05);
    steps_ = 0;
    done_ = false;
    return observation();
}

void CartPole::set_state(double x, double x_dot, double theta, double theta_dot) {
    x_ = x;
    x_dot_ = x_dot;
    theta_ = theta;
    theta_dot_ = theta_dot;
    steps_ = 0;
    done_ = false;
}

StepResult CartPole::step(int action) {
    if (action != 0 && action != 1) throw ContractError("cartpole: action must be 0 or 1");
    return step_with_force(action == 1 ? kForce : -kForce);
}

StepResult CartPole::step_with_force(double force) {
    if (done_) throw ContractError("cartpole: step on terminal state");

    const double cos_t = std::cos(theta_);
    const double sin_t = std::sin(theta_);
    const double temp = (force + kPoleMassLength * theta_dot_ * theta_dot_ * sin_t) / kTotalMass;
    const double theta_acc =
        (kGravity * sin_t - cos_t * temp) /
        (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / kTotalMass));
    const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;

    // explicit Euler: positions advance on the old velocities
    x_ += kTau * x_dot_;
    x_dot_ += kTau * x_acc;
    theta_ += kTau * theta_dot_;
    theta_dot_ += kTau * theta_acc;
    ++steps_;

    done_ = std::abs(x_) > kXLimit || std::abs(theta_) > kThetaLimit || steps_ >= kMaxSteps;
    return {observation(), 1.0, done_};
}

// --------------------------------------------------------------------------- dot-chase

std::vector<double> DotChase::observation() const {
    std::vector<double> img(std::size_t(kSize) * kSize, 0.0);
    img[std::size_t(agent_row_) * kSize + agent_col_] = 0.5;
    img[std::size_t(target_row_) * kSize + target_col_] = 1.0;
    return img;
}

void DotChase::respawn_target() {
    // uniform over the 63 cells that are not the agent's
    const int cells = kSize * kSize;
    int pick = int(rng_.uniform_int(std::uint64_t(cells - 1)));
    const int agent_cell = agent_row_ * kSize + agent_col_;
    if (pick >= agent_cell) ++pick;
    target_row_ = pick / kSize;
    target_col_ = pick % kSize;
}

std::vector<double> DotChase::reset(RngStream& rng) {
    rng_ = rng; // keep a copy: respawns draw from the episode stream
    const int agent_cell = int(rng_.uniform_int(kSize * kSize));
    agent_row_ = agent_cell / kSize;
    agent_col_ = agent_cell % kSize;
    respawn_target();
    steps_ = 0;
    done_ = false;
    return observation();
}

StepResult DotChase::step(int action) {
    if (done_) throw ContractError("dotchase: step on terminal state");
    if (action < 0 || action >= kActions) throw ContractError("dotchase: bad action");

    switch (action) {
        case 0: agent_row_ = std::max(0, agent_row_ - 1); break;
        case 1: agent_row_ = std::min(kSize - 1, agent_row_ + 1); break;
        case 2: agent_col_ = std::max(0, agent_col_ - 1); break;
        case 3: agent_col_ = std::min(kSize - 1, agent_col_ + 1); break;
        default: break; // stay
    }
    double reward = 0.0;
    if (agent_row_ == target_row_ && agent_col_ == target_col_) {
        reward = 1.0;
        respawn_target();
    }
    ++steps_;
    done_ = steps_ >= kEpisodeLen;
    return {observation(), reward, done_};
}

// --------------------------------------------------------------------------- experts

namespace {

int cartpole_expert(const std::vector<double>& obs) {
    const double score = 0.5 * obs[2] + 1.0 * obs[3] + 0.05 * obs[0] + 0.1 * obs[1];
    return score > 0.0 ? 1 : 0;
}

int dotchase_expert(const std::vector<double>& obs) {
    int ar = -1, ac = -1, tr = -1, tc = -1;
    for (int r = 0; r < DotChase::kSize; ++r)
        for (int c = 0; c < DotChase::kSize; ++c) {
            const double v = obs[std::size_t(r) * DotChase::kSize + c];
            if (v == 0.5) { ar = r; ac = c; }
            else if (v == 1.0) { tr = r; tc = c; }
        }
    if (ar < 0 || tr < 0) throw ContractError("dotchase expert: malformed observation");
    if (tr < ar) return 0;
    if (tr > ar) return 1;
    if (tc < ac) return 2;
    if (tc > ac) return 3;
    return 4;
}

} // namespace

int expert_policy(TaskId task, const std::vector<double>& observation) {
    return task == TaskId::cartpole ? cartpole_expert(observation) : dotchase_expert(observation);
}

double rollout_score(TaskId task, Seed episode_seed,
                     const std::function<int(const std::vector<double>&)>& policy) {
    RngStream rng = derive_stream(episode_seed, kLabelEpisode);
    double total = 0.0;
    if (task == TaskId::cartpole) {
        CartPole env;
        auto obs = env.reset(rng);
        while (!env.done()) {
            auto r = env.step(policy(obs));
            total += r.reward;
            obs = std::move(r.observation);
        }
    } else {
        DotChase env;
        auto obs = env.reset(rng);
        while (!env.done()) {
            auto r = env.step(policy(obs));
            total += r.reward;
            obs = std::move(r.observation);
        }
    }
    return total;
}

TrajectoryDataset record_expert(TaskId task, int n, int T, Seed seed) {
    if (n < 1 || T < 1) throw ConfigError("record_expert: need n >= 1 and T >= 1");
    const TaskInfo info = task_info(task);
    TrajectoryDataset ds;
    ds.obs_shape = info.obs_shape;
    ds.n_actions = info.n_actions;
    ds.length = T;

    RngStream episode_seeds = derive_stream(seed, kLabelRecord);
    for (int i = 0; i < n; ++i) {
        bool recorded = false;
        for (int attempt = 0; attempt < 100 && !recorded; ++attempt) {
            RngStream rng = derive_stream(episode_seeds.next_u64(), kLabelEpisode);
            Trajectory traj;
            auto run = [&](auto env) {
                auto obs = env.reset(rng);
                for (int t = 0; t < T; ++t) {
                    const int action = expert_policy(task, obs);
                    traj.steps.push_back({obs, action});
                    auto r = env.step(action);
                    obs = std::move(r.observation);
                    if (r.done && t + 1 < T) return false; // too short, resample
                }
                return true;
            };
            recorded = task == TaskId::cartpole ? run(CartPole{}) : run(DotChase{});
            if (recorded) ds.trajectories.push_back(std::move(traj));
        }
        if (!recorded)
            throw RunError("record_expert: expert could not reach " + std::to_string(T) +
                           " steps in 100 attempts");
    }
    return ds;
}

} // namespace nevo
