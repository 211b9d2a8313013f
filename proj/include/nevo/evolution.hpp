#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nevo/envs.hpp"
#include "nevo/network.hpp"

namespace nevo {

enum class NetKind : std::uint8_t { static_net, dynamic };
enum class CommMode : std::uint8_t { local, rebuild, p2p };

NetKind net_kind_from_name(const std::string& s);
CommMode comm_from_name(const std::string& s);

struct Agent {
    Genome genome;
    Network network;
    double fitness = 0.0;
};

struct EvolutionConfig {
    TaskId task = TaskId::cartpole;
    NetKind net = NetKind::dynamic;
    int pop = 50;          // even, >= 2 (50% truncation)
    int generations = 100;
    Seed master_seed = 1;
    int workers = 1;       // local: evaluation threads; rebuild/p2p: one agent per worker
    CommMode comm = CommMode::local;
    int static_hidden = 32;

    // stop as soon as a generation's mean fitness reaches this bar
    std::optional<double> stop_at_mean;

    void validate() const;
};

/// Ranking and selected->unselected pairing of 50% truncation selection.
/// Ties rank the lower agent index first.
struct Selection {
    std::vector<int> ranked;               // indices, best first
    std::vector<bool> selected;            // per index
    std::vector<std::pair<int, int>> pairs; // (selected, overwritten)
};
Selection truncation_select(const std::vector<double>& fitnesses);

/// Argmax with ties broken toward the lowest index.
int action_select(const std::vector<double>& outputs);

struct ScoreRow {
    int generation = 0;
    double mean_fitness = 0;
    double max_fitness = 0;
    double mean_genome_len = 0;
    double mean_nodes = 0;
    double mean_connections = 0;
};

struct ScoreRunLog {
    std::vector<ScoreRow> rows;
    std::vector<Agent> final_population;
    int best_index = 0;      // in the final population, by last-generation fitness
    Seed last_episode_seed = 0;
    std::string csv() const;
};

/// Per-generation seed draws, in the order every comm mode uses them: one
/// seed per agent (index order), then the shared episode seed.
struct GenerationSeeds {
    std::vector<Seed> agent_seeds;
    Seed episode_seed = 0;
};
GenerationSeeds draw_generation_seeds(RngStream& master, std::size_t pop);

/// The descriptor an agent starts from for a task/net-kind pair.
InitDescriptor agent_descriptor(TaskId task, NetKind kind, int static_hidden);
/// Discriminator descriptor: consumes one (observation, one-hot action) step
/// per pass and emits a single value.
InitDescriptor discriminator_descriptor(TaskId task, NetKind kind, int static_hidden);

/// One full episode of the agent's network on the task. Resets the recurrent
/// state before and after, so the live network stays bit-identical to its
/// genome replay between generations.
double evaluate_agent(Agent& agent, TaskId task, Seed episode_seed);

/// variation -> evaluation -> selection for `generations` cycles, fitness =
/// single-episode score with a per-generation episode seed shared by all
/// agents. Runs the comm mode chosen in the config.
ScoreRunLog evolve_score(const EvolutionConfig& config);

} // namespace nevo
