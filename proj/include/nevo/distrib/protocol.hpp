#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nevo/distrib/transport.hpp"
#include "nevo/evolution.hpp"

namespace nevo::distrib {

/// What a worker does with its agent each generation.
enum class EvalKind : std::uint8_t {
    task_episode, // one episode on the configured task, fitness = score
    fixed_zero,   // null task used by the comm benchmark
};

struct WorkerSetup {
    InitDescriptor descriptor;
    CommMode mode = CommMode::rebuild;
    EvalKind eval = EvalKind::task_episode;
    TaskId task = TaskId::cartpole;
};

/// One agent per worker. Runs until a shutdown message arrives. In rebuild
/// mode the worker replays its whole seed chain from scratch every
/// generation; in p2p mode it applies a single variation step in place and
/// ships its agent to the partner named by the selection verdict.
class Worker {
public:
    Worker(int id, Endpoint& endpoint, WorkerSetup setup);
    void run();

private:
    void handle_seed_scatter(const WireMessage& m);
    void handle_verdict(const WireMessage& m);

    int id_;
    Endpoint& ep_;
    WorkerSetup setup_;
    Genome genome_;
    Network network_;
    std::uint64_t last_generation_ = 0;
    std::uint64_t ops_last_ = 0;
    double variation_ms_last_ = 0.0;
    double comm_ms_pending_ = 0.0; // transfer time, reported with the next fitness
};

struct GenerationReport {
    std::uint64_t generation = 0;
    std::vector<double> fitness;     // by worker id
    std::vector<std::uint64_t> variation_ops;
    double variation_ms_mean = 0.0;
    double comm_ms_mean = 0.0;
    double nodes_mean = 0.0;
    double connections_mean = 0.0;
    double genome_len_mean = 0.0;
};

/// Sequencing authority: scatters seeds, gathers fitness, runs truncation
/// selection and drives the post-selection agent movement of the chosen
/// mode. Also bookkeeps every worker's seed chain, which is what rebuild
/// mode scatters to overwritten workers.
class Coordinator {
public:
    Coordinator(Endpoint& endpoint, int n_workers, CommMode mode, const InitDescriptor& desc,
                Seed master_seed, Millis timeout = kDefaultTimeout);

    GenerationReport run_generation();
    void shutdown();

    const std::vector<Genome>& genomes() const { return genomes_; }
    const Selection& last_selection() const { return last_selection_; }
    Seed last_episode_seed() const { return last_episode_seed_; }

private:
    Endpoint& ep_;
    int n_;
    CommMode mode_;
    RngStream master_;
    std::vector<Genome> genomes_;
    Selection last_selection_;
    std::uint64_t generation_ = 0;
    Seed last_episode_seed_ = 0;
    Millis timeout_;
};

/// Identical pairing rule as truncation_select, expressed as worker pairs
/// (sender, receiver).
std::vector<std::pair<int, int>> pair_selected_to_unselected(
    const std::vector<double>& fitnesses);

/// evolve_score over the simulated transport with worker threads; log format
/// and seed consumption match the local engine exactly.
ScoreRunLog evolve_score_distributed(const EvolutionConfig& config);

/// Coordinator half of a distributed score run over an already-connected
/// endpoint (workers must be up); used by both the simulated and the socket
/// transports.
ScoreRunLog run_score_coordinator(Endpoint& endpoint, const EvolutionConfig& config,
                                  const InitDescriptor& desc);

struct BenchRow {
    int generation = 0;
    std::string mode;
    double variation_ops = 0; // per-worker (all workers perform the same count)
    double variation_ms = 0;
    double comm_ms = 0;
};

struct BenchTable {
    std::vector<BenchRow> rows;
    double rebuild_total_ms = 0;
    double p2p_total_ms = 0;
    std::string csv() const;
};

/// Both modes on the null task with composite networks, one row per
/// generation per mode.
BenchTable bench_comm(int n_workers, int generations, Seed master_seed);

} // namespace nevo::distrib
