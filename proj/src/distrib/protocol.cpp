#include "nevo/distrib/protocol.hpp"

#include <chrono>
#include <sstream>
#include <thread>

#include "nevo/errors.hpp"
#include "nevo/serialize.hpp"

namespace nevo::distrib {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace

// --------------------------------------------------------------------------- worker

Worker::Worker(int id, Endpoint& endpoint, WorkerSetup setup)
    : id_(id), ep_(endpoint), setup_(std::move(setup)) {
    genome_.init = setup_.descriptor;
    network_ = initial_network(setup_.descriptor);
}

void Worker::run() {
    for (;;) {
        const WireMessage m = ep_.recv(kCoordinator);
        switch (m.tag) {
            case MsgTag::shutdown:
                return;
            case MsgTag::seed_scatter:
                if (m.generation <= last_generation_) break; // stale, drop
                handle_seed_scatter(m);
                break;
            case MsgTag::selection_verdict:
                if (m.generation != last_generation_) break; // stale, drop
                handle_verdict(m);
                break;
            case MsgTag::agent_transfer: {
                // rebuild mode: coordinator re-scatters a surviving seed chain
                if (m.generation != last_generation_) break;
                const auto decoded = decode_agent(m.payload);
                genome_ = decoded.genome;
                break;
            }
            default:
                throw RunError("worker: unexpected message " + std::string(tag_name(m.tag)));
        }
    }
}

void Worker::handle_seed_scatter(const WireMessage& m) {
    last_generation_ = m.generation;

    const auto t0 = std::chrono::steady_clock::now();
    if (setup_.mode == CommMode::rebuild) {
        genome_.seeds.push_back(m.seed);
        network_ = replay(genome_);
        ops_last_ = genome_.seeds.size();
    } else {
        variation_step(genome_, network_, m.seed);
        ops_last_ = 1;
    }
    variation_ms_last_ = ms_since(t0);

    double fitness = 0.0;
    if (setup_.eval == EvalKind::task_episode) {
        Agent tmp{genome_, std::move(network_), 0.0};
        fitness = evaluate_agent(tmp, setup_.task, m.episode_seed);
        network_ = std::move(tmp.network);
    }

    WireMessage report;
    report.tag = MsgTag::fitness_report;
    report.generation = m.generation;
    report.worker = id_;
    report.fitness = fitness;
    report.variation_ops = ops_last_;
    report.variation_ms = variation_ms_last_;
    report.comm_ms = comm_ms_pending_; // previous generation's transfer cost
    report.nodes = double(network_node_count(network_));
    report.connections = double(network_connection_count(network_));
    report.genome_len = double(genome_.seeds.size());
    comm_ms_pending_ = 0.0;
    ep_.send(kCoordinator, report);
}

void Worker::handle_verdict(const WireMessage& m) {
    const auto t0 = std::chrono::steady_clock::now();
    if (m.selected) {
        if (!m.partner_endpoint.empty()) ep_.register_peer(m.partner, m.partner_endpoint);
        WireMessage transfer;
        transfer.tag = MsgTag::agent_transfer;
        transfer.generation = m.generation;
        transfer.worker = id_;
        transfer.payload = encode_agent(genome_, &network_);
        ep_.send(m.partner, transfer);
    } else {
        const WireMessage transfer = ep_.recv_peer();
        if (transfer.tag != MsgTag::agent_transfer)
            throw RunError("worker: expected agent transfer, got " +
                           std::string(tag_name(transfer.tag)));
        if (transfer.generation != m.generation)
            throw RunError("worker: agent transfer from generation " +
                           std::to_string(transfer.generation) + " during " +
                           std::to_string(m.generation));
        auto decoded = decode_agent(transfer.payload);
        if (!decoded.has_network) throw RunError("worker: transfer without network");
        genome_ = std::move(decoded.genome);
        network_ = std::move(decoded.network);
    }
    comm_ms_pending_ = ms_since(t0);
}

// --------------------------------------------------------------------------- coordinator

Coordinator::Coordinator(Endpoint& endpoint, int n_workers, CommMode mode,
                         const InitDescriptor& desc, Seed master_seed, Millis timeout)
    : ep_(endpoint), n_(n_workers), mode_(mode),
      master_(derive_stream(master_seed, kLabelMaster)), timeout_(timeout) {
    if (mode == CommMode::local) throw ConfigError("coordinator: comm mode must be rebuild or p2p");
    if (n_workers < 2 || n_workers % 2 != 0)
        throw ConfigError("coordinator: worker count must be even and at least 2");
    genomes_.resize(n_workers);
    for (auto& g : genomes_) g.init = desc;
}

GenerationReport Coordinator::run_generation() {
    ++generation_;
    const auto seeds = draw_generation_seeds(master_, std::size_t(n_));
    last_episode_seed_ = seeds.episode_seed;
    for (int w = 0; w < n_; ++w) {
        WireMessage m;
        m.tag = MsgTag::seed_scatter;
        m.generation = generation_;
        m.seed = seeds.agent_seeds[std::size_t(w)];
        m.episode_seed = seeds.episode_seed;
        ep_.send(w, m);
        genomes_[std::size_t(w)].seeds.push_back(m.seed);
    }

    GenerationReport report;
    report.generation = generation_;
    report.fitness.resize(n_);
    report.variation_ops.resize(n_);
    std::vector<bool> seen(std::size_t(n_), false);
    for (int k = 0; k < n_; ++k) {
        const WireMessage m = ep_.recv_any(timeout_);
        if (m.tag != MsgTag::fitness_report || m.generation != generation_)
            throw RunError("coordinator: expected generation " + std::to_string(generation_) +
                           " fitness report, got " + tag_name(m.tag));
        if (m.worker < 0 || m.worker >= n_ || seen[std::size_t(m.worker)])
            throw RunError("coordinator: bad or duplicate fitness report");
        seen[std::size_t(m.worker)] = true;
        report.fitness[std::size_t(m.worker)] = m.fitness;
        report.variation_ops[std::size_t(m.worker)] = m.variation_ops;
        report.variation_ms_mean += m.variation_ms / double(n_);
        report.comm_ms_mean += m.comm_ms / double(n_);
        report.nodes_mean += m.nodes / double(n_);
        report.connections_mean += m.connections / double(n_);
        report.genome_len_mean += m.genome_len / double(n_);
    }

    last_selection_ = truncation_select(report.fitness);
    if (mode_ == CommMode::p2p) {
        for (const auto& [winner, loser] : last_selection_.pairs) {
            WireMessage to_winner;
            to_winner.tag = MsgTag::selection_verdict;
            to_winner.generation = generation_;
            to_winner.selected = true;
            to_winner.partner = loser;
            to_winner.partner_endpoint = ep_.worker_endpoint(loser);
            ep_.send(winner, to_winner);

            WireMessage to_loser;
            to_loser.tag = MsgTag::selection_verdict;
            to_loser.generation = generation_;
            to_loser.selected = false;
            to_loser.partner = winner;
            ep_.send(loser, to_loser);
        }
    } else {
        // rebuild: the coordinator owns every chain, so survivors never move;
        // overwritten workers just get the surviving chain re-scattered.
        for (const auto& [winner, loser] : last_selection_.pairs) {
            WireMessage m;
            m.tag = MsgTag::agent_transfer;
            m.generation = generation_;
            m.payload = encode_agent(genomes_[std::size_t(winner)], nullptr);
            ep_.send(loser, m);
        }
    }
    for (const auto& [winner, loser] : last_selection_.pairs)
        genomes_[std::size_t(loser)] = genomes_[std::size_t(winner)];
    return report;
}

void Coordinator::shutdown() {
    for (int w = 0; w < n_; ++w) {
        WireMessage m;
        m.tag = MsgTag::shutdown;
        m.generation = generation_ + 1;
        ep_.send(w, m);
    }
}

std::vector<std::pair<int, int>> pair_selected_to_unselected(
    const std::vector<double>& fitnesses) {
    return truncation_select(fitnesses).pairs;
}

// --------------------------------------------------------------------------- engines

ScoreRunLog run_score_coordinator(Endpoint& endpoint, const EvolutionConfig& config,
                                  const InitDescriptor& desc) {
    ScoreRunLog log;
    Coordinator coord(endpoint, config.pop, config.comm, desc, config.master_seed);
    std::vector<double> final_fitness(std::size_t(config.pop), 0.0);
    for (int g = 1; g <= config.generations; ++g) {
        const auto report = coord.run_generation();
        ScoreRow row;
        row.generation = g;
        double best = report.fitness.empty() ? 0.0 : report.fitness[0];
        double sum = 0.0;
        for (double f : report.fitness) {
            sum += f;
            best = std::max(best, f);
        }
        row.mean_fitness = sum / double(config.pop);
        row.max_fitness = best;
        row.mean_genome_len = report.genome_len_mean;
        row.mean_nodes = report.nodes_mean;
        row.mean_connections = report.connections_mean;
        log.rows.push_back(row);
        log.last_episode_seed = coord.last_episode_seed();
        log.best_index = coord.last_selection().ranked[0];
        final_fitness = report.fitness;
        for (const auto& [winner, loser] : coord.last_selection().pairs)
            final_fitness[std::size_t(loser)] = final_fitness[std::size_t(winner)];
        if (config.stop_at_mean && row.mean_fitness >= *config.stop_at_mean) break;
    }
    coord.shutdown();

    // final population reconstructed from the coordinator's chains
    for (std::size_t i = 0; i < coord.genomes().size(); ++i) {
        Agent a;
        a.genome = coord.genomes()[i];
        a.network = replay(a.genome);
        a.fitness = final_fitness[i];
        log.final_population.push_back(std::move(a));
    }
    return log;
}

ScoreRunLog evolve_score_distributed(const EvolutionConfig& config) {
    const InitDescriptor desc = agent_descriptor(config.task, config.net, config.static_hidden);

    SimTransport transport(config.pop);
    WorkerSetup setup;
    setup.descriptor = desc;
    setup.mode = config.comm;
    setup.eval = EvalKind::task_episode;
    setup.task = config.task;

    std::vector<std::thread> threads;
    threads.reserve(std::size_t(config.pop));
    for (int w = 0; w < config.pop; ++w)
        threads.emplace_back([&transport, w, setup]() {
            Worker worker(w, transport.worker(w), setup);
            worker.run();
        });

    ScoreRunLog log = run_score_coordinator(transport.coordinator(), config, desc);
    for (auto& t : threads) t.join();
    return log;
}

BenchTable bench_comm(int n_workers, int generations, Seed master_seed) {
    BenchTable table;
    InitDescriptor desc;
    desc.kind = GenomeKind::composite;
    desc.image = {1, 8, 8};
    desc.n_out = 2;

    for (const CommMode mode : {CommMode::rebuild, CommMode::p2p}) {
        SimTransport transport(n_workers);
        WorkerSetup setup;
        setup.descriptor = desc;
        setup.mode = mode;
        setup.eval = EvalKind::fixed_zero;

        std::vector<std::thread> threads;
        for (int w = 0; w < n_workers; ++w)
            threads.emplace_back([&transport, w, setup]() {
                Worker worker(w, transport.worker(w), setup);
                worker.run();
            });

        double total = 0.0;
        {
            Coordinator coord(transport.coordinator(), n_workers, mode, desc, master_seed);
            for (int g = 1; g <= generations; ++g) {
                const auto report = coord.run_generation();
                BenchRow row;
                row.generation = g;
                row.mode = mode == CommMode::rebuild ? "rebuild" : "p2p";
                double ops = 0.0;
                for (auto v : report.variation_ops) ops += double(v);
                row.variation_ops = ops / double(n_workers);
                row.variation_ms = report.variation_ms_mean;
                row.comm_ms = report.comm_ms_mean;
                total += report.variation_ms_mean;
                table.rows.push_back(std::move(row));
            }
            coord.shutdown();
        }
        for (auto& t : threads) t.join();
        (mode == CommMode::rebuild ? table.rebuild_total_ms : table.p2p_total_ms) = total;
    }
    return table;
}

std::string BenchTable::csv() const {
    std::ostringstream os;
    os << "generation,mode,variation_ops,variation_ms,comm_ms\n";
    os.precision(17);
    for (const auto& r : rows)
        os << r.generation << ',' << r.mode << ',' << r.variation_ops << ',' << r.variation_ms
           << ',' << r.comm_ms << "\n";
    return os.str();
}

} // namespace nevo::distrib
