#pragma once

#include <string>
#include <vector>

#include "nevo/evolution.hpp"
#include "nevo/trajectory.hpp"

namespace nevo {

/// Per-generation pairing: each discriminator gets one distinct generator
/// (a uniform random permutation) and one real data point drawn uniformly
/// with replacement.
struct MatchAssignment {
    struct Pair {
        int generator = 0;
        int discriminator = 0;
        std::size_t real_index = 0;
    };
    std::vector<Pair> pairs; // indexed by discriminator
};

MatchAssignment assign_matches(int n, std::size_t dataset_size, RngStream& rng);

/// Discriminator confidence: the network consumes one (observation, one-hot
/// action) step per pass; the confidence is the logistic of its final-step
/// output, with the recurrent state reset before (and after) the trajectory.
double discriminator_confidence(Network& disc, const Trajectory& traj, int n_actions);

/// Generator plays one T-step episode. Episodes that terminate early are
/// padded by repeating their final (observation, action) step, so every
/// trajectory has exactly T steps.
Trajectory generate_trajectory(Network& gen, TaskId task, Seed episode_seed, int T);

struct MatchResult {
    double gen_fitness = 0.0;  // == c_fake
    double disc_fitness = 0.0; // == c_real - c_fake
    double c_real = 0.0;
    double c_fake = 0.0;
};

MatchResult evaluate_match(Network& generator, Network& discriminator, const Trajectory& real,
                           TaskId task, Seed episode_seed, int T, int n_actions);

/// Fraction of the probe states on which the network picks the recorded
/// expert action, teacher-forced along each probe trajectory (recurrent
/// state reset per trajectory). At most `cap` states are scored.
double action_agreement(Network& net, const std::vector<Trajectory>& probe, std::size_t cap);

struct AdversarialConfig {
    TaskId task = TaskId::cartpole;
    NetKind net = NetKind::dynamic;
    int pop = 100; // per population
    int generations = 500;
    Seed master_seed = 1;
    int trajectory_length = 100;
    int static_hidden = 32;
    int probe_states = 1000;

    void validate() const;
};

struct AdvRow {
    int generation = 0;
    double gen_mean = 0, gen_max = 0;
    double disc_mean = 0, disc_max = 0;
    double agreement_top_gen = 0;
};

struct AdvRunLog {
    std::vector<AdvRow> rows;
    std::vector<Agent> final_generators;
    std::vector<Agent> final_discriminators;
    int best_generator = 0;
    Seed last_episode_seed = 0;
    std::string csv() const;
};

/// Two-population co-evolution against the recorded dataset: variation on
/// both populations, random matching, Fig.-12 fitness, independent 50%
/// truncation per population.
AdvRunLog evolve_adversarial(const AdversarialConfig& config, const TrajectoryDataset& dataset);

} // namespace nevo
