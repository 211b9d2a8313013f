#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nevo/rng.hpp"
#include "nevo/tensor.hpp"
#include "nevo/trajectory.hpp"

namespace nevo {

enum class TaskId : std::uint8_t { cartpole, dotchase };

TaskId task_from_name(const std::string& name);
const char* task_name(TaskId t);

struct StepResult {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
};

/// Classic cart-pole balancing with the standard constants: gravity 9.8,
/// cart mass 1.0, pole mass 0.1, pole half-length 0.5, force 10.0, explicit
/// Euler at 0.02 s. Reward is +1 per step; an episode ends when |x| > 2.4,
/// |theta| > 12 degrees or 500 steps have elapsed.
/// Actions: 0 = push left, 1 = push right.
class CartPole {
public:
    static constexpr int kActions = 2;
    static constexpr int kObsDim = 4;
    static constexpr int kMaxSteps = 500;

    /// Draws x, x_dot, theta, theta_dot uniformly from [-0.05, 0.05].
    std::vector<double> reset(RngStream& rng);
    StepResult step(int action);
    /// One physics update under an arbitrary force (step() pushes with +-10).
    StepResult step_with_force(double force);
    void set_state(double x, double x_dot, double theta, double theta_dot);

    double x() const { return x_; }
    double x_dot() const { return x_dot_; }
    double theta() const { return theta_; }
    double theta_dot() const { return theta_dot_; }
    int steps_elapsed() const { return steps_; }
    bool done() const { return done_; }

private:
    std::vector<double> observation() const { return {x_, x_dot_, theta_, theta_dot_}; }

    double x_ = 0, x_dot_ = 0, theta_ = 0, theta_dot_ = 0;
    int steps_ = 0;
    bool done_ = true;
};

/// 8x8 single-channel grid world: the agent pixel (0.5) chases the target
/// pixel (1.0). Reaching the target scores +1 and respawns it on another
/// cell. Episodes last exactly 100 steps.
/// Actions: 0 = up, 1 = down, 2 = left, 3 = right, 4 = stay.
class DotChase {
public:
    static constexpr int kActions = 5;
    static constexpr int kSize = 8;
    static constexpr int kEpisodeLen = 100;
    static constexpr Shape kObsShape{1, kSize, kSize};

    std::vector<double> reset(RngStream& rng);
    StepResult step(int action);

    int agent_row() const { return agent_row_; }
    int agent_col() const { return agent_col_; }
    int target_row() const { return target_row_; }
    int target_col() const { return target_col_; }
    int steps_elapsed() const { return steps_; }
    bool done() const { return done_; }

private:
    std::vector<double> observation() const;
    void respawn_target();

    RngStream rng_; // target respawns consume episode randomness
    int agent_row_ = 0, agent_col_ = 0;
    int target_row_ = 0, target_col_ = 0;
    int steps_ = 0;
    bool done_ = true;
};

struct TaskInfo {
    int obs_dim;      // flattened
    std::string obs_shape; // "4" or "1x8x8"
    int n_actions;
    int episode_cap;  // longest possible episode
};
TaskInfo task_info(TaskId t);

/// Hand-tuned stabilizing policy for cart-pole (right iff
/// 0.5*theta + 1.0*theta_dot + 0.05*x + 0.1*x_dot > 0) and the greedy
/// Manhattan chaser for dot-chase (row moves first). Observations are the
/// raw task observations.
int expert_policy(TaskId task, const std::vector<double>& observation);

/// Rollout of `policy` on a fresh task environment seeded by episode_seed.
/// Returns the episode's total reward.
double rollout_score(TaskId task, Seed episode_seed,
                     const std::function<int(const std::vector<double>&)>& policy);

/// Records n expert trajectories of exactly T steps each. Episodes that end
/// before T steps are thrown away and resampled; after 100 failed attempts
/// for one trajectory the recording aborts.
TrajectoryDataset record_expert(TaskId task, int n, int T, Seed seed);

} // namespace nevo
