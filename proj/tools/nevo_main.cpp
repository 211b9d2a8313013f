#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nevo/adversarial.hpp"
#include "nevo/distrib/protocol.hpp"
#include "nevo/distrib/socket_transport.hpp"
#include "nevo/errors.hpp"
#include "nevo/evolution.hpp"
#include "nevo/io_util.hpp"

namespace {

using namespace nevo;

struct CliOptions {
    std::string task = "cartpole";
    std::string mode = "score";
    std::string net = "dynamic";
    int pop = 50;
    int gens = 100;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string comm = "local";
    std::string transport = "sim";
    int T = 100;
    int static_hidden = 32;
    std::string out = "runs/out";
    std::string dataset;
};

void add_run_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--task", o.task, "task: cartpole or dotchase");
    cmd->add_option("--mode", o.mode, "mode: score or imitate");
    cmd->add_option("--net", o.net, "network: static or dynamic");
    cmd->add_option("--pop", o.pop, "population size (even)");
    cmd->add_option("--gens", o.gens, "number of generations");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--workers", o.workers, "worker count");
    cmd->add_option("--comm", o.comm, "comm mode: local, rebuild or p2p");
    cmd->add_option("--transport", o.transport, "rebuild/p2p transport: sim or socket");
    cmd->add_option("--T", o.T, "trajectory length (imitate mode)");
    cmd->add_option("--static-hidden", o.static_hidden, "hidden width of the static baseline");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--dataset", o.dataset, "trajectory dataset (imitate mode)");
}

std::string exe_path() {
    return std::filesystem::read_symlink("/proc/self/exe").string();
}

// evolve over TCP: the coordinator spawns one worker subprocess per agent
ScoreRunLog evolve_score_socket(const EvolutionConfig& config, const CliOptions& o) {
    const InitDescriptor desc = agent_descriptor(config.task, config.net, config.static_hidden);
    distrib::SocketCoordinator coordinator(config.pop);
    const std::string exe = exe_path();
    const std::string connect = "127.0.0.1:" + std::to_string(coordinator.port());

    std::vector<pid_t> children;
    for (int w = 0; w < config.pop; ++w) {
        const pid_t pid = ::fork();
        if (pid < 0) throw RunError("fork failed");
        if (pid == 0) {
            ::execl(exe.c_str(), exe.c_str(), "worker", "--connect", connect.c_str(), "--task",
                    o.task.c_str(), "--net", o.net.c_str(), "--comm", o.comm.c_str(),
                    "--static-hidden", std::to_string(o.static_hidden).c_str(), nullptr);
            std::perror("execl");
            std::_Exit(127);
        }
        children.push_back(pid);
    }
    coordinator.accept_workers();
    ScoreRunLog log = run_score_coordinator(coordinator, config, desc);
    for (pid_t pid : children) {
        int status = 0;
        ::waitpid(pid, &status, 0);
    }
    return log;
}

void write_run_outputs(const std::string& out_dir, const std::string& log_csv,
                       const std::string& plot_csv, const Genome& best,
                       const std::string& summary) {
    std::filesystem::create_directories(out_dir);
    write_file_atomic(out_dir + "/log.csv", log_csv);
    write_file_atomic(out_dir + "/plot.csv", plot_csv);
    write_genome_file(out_dir + "/best.genome", best);
    write_file_atomic(out_dir + "/summary.txt", summary);
}

int cmd_evolve(const CliOptions& o) {
    if (o.mode == "score") {
        EvolutionConfig config;
        config.task = task_from_name(o.task);
        config.net = net_kind_from_name(o.net);
        config.pop = o.pop;
        config.generations = o.gens;
        config.master_seed = o.seed;
        config.comm = comm_from_name(o.comm);
        config.workers = config.comm == CommMode::local ? o.workers : o.pop;
        config.static_hidden = o.static_hidden;
        config.validate();

        ScoreRunLog log;
        if (config.comm != CommMode::local && o.transport == "socket") {
            log = evolve_score_socket(config, o);
        } else if (o.transport != "sim" && o.transport != "socket") {
            throw ConfigError("transport must be sim or socket");
        } else {
            log = evolve_score(config);
        }

        std::ostringstream plot;
        plot << "generation,mean_fitness,max_fitness\n";
        plot.precision(17);
        for (const auto& r : log.rows)
            plot << r.generation << ',' << r.mean_fitness << ',' << r.max_fitness << "\n";

        std::ostringstream summary;
        summary.precision(17);
        summary << "mode=score\n"
                << "generations_run=" << log.rows.size() << "\n"
                << "final_episode_seed=" << log.last_episode_seed << "\n";
        if (!log.rows.empty()) {
            summary << "final_mean_fitness=" << log.rows.back().mean_fitness << "\n"
                    << "final_max_fitness=" << log.rows.back().max_fitness << "\n";
        }
        const Genome best = log.final_population.at(std::size_t(log.best_index)).genome;
        summary << "best_genome_len=" << best.seeds.size() << "\n";
        write_run_outputs(o.out, log.csv(), plot.str(), best, summary.str());
        std::cout << "run complete; outputs in " << o.out << "\n";
        return 0;
    }
    if (o.mode != "imitate") throw ConfigError("mode must be score or imitate");
    if (o.dataset.empty()) throw ConfigError("imitate mode requires --dataset");
    if (o.comm != "local")
        throw ConfigError("imitate mode runs with --comm local (score mode supports rebuild/p2p)");

    AdversarialConfig config;
    config.task = task_from_name(o.task);
    config.net = net_kind_from_name(o.net);
    config.pop = o.pop;
    config.generations = o.gens;
    config.master_seed = o.seed;
    config.trajectory_length = o.T;
    config.static_hidden = o.static_hidden;
    config.validate();

    const TrajectoryDataset dataset = read_trajectories_file(o.dataset);
    const AdvRunLog log = evolve_adversarial(config, dataset);

    std::ostringstream plot;
    plot << "generation,gen_mean,gen_max\n";
    plot.precision(17);
    for (const auto& r : log.rows)
        plot << r.generation << ',' << r.gen_mean << ',' << r.gen_max << "\n";

    std::ostringstream summary;
    summary.precision(17);
    summary << "mode=imitate\n"
            << "generations_run=" << log.rows.size() << "\n"
            << "final_episode_seed=" << log.last_episode_seed << "\n";
    if (!log.rows.empty())
        summary << "final_agreement_top_gen=" << log.rows.back().agreement_top_gen << "\n";
    const Genome best = log.final_generators.at(std::size_t(log.best_generator)).genome;
    summary << "best_genome_len=" << best.seeds.size() << "\n";
    write_run_outputs(o.out, log.csv(), plot.str(), best, summary.str());
    std::cout << "run complete; outputs in " << o.out << "\n";
    return 0;
}

int cmd_record_expert(const std::string& task, int n, int T, std::uint64_t seed,
                      const std::string& out) {
    const TrajectoryDataset ds = record_expert(task_from_name(task), n, T, seed);
    if (const auto dir = std::filesystem::path(out).parent_path(); !dir.empty())
        std::filesystem::create_directories(dir);
    write_trajectories_file(out, ds);
    std::cout << "recorded " << ds.trajectories.size() << " trajectories of length " << ds.length
              << " to " << out << "\n";
    return 0;
}

int cmd_replay(const std::string& genome_path, const std::string& task_name_, int max_steps,
               std::uint64_t episode_seed) {
    const Genome genome = read_genome_file(genome_path);
    const TaskId task = task_from_name(task_name_);
    Network net = replay(genome);

    std::cout << "genome: kind=" << (genome.init.kind == GenomeKind::drn_only ? "drn"
                                     : genome.init.kind == GenomeKind::composite ? "composite"
                                                                                 : "static")
              << " init=" << genome.init.to_string() << " seeds=" << genome.seeds.size() << "\n";
    std::cout << "network: nodes=" << network_node_count(net)
              << " connections=" << network_connection_count(net) << "\n";

    network_reset_state(net);
    RngStream env_rng = derive_stream(episode_seed, kLabelEpisode);
    double total = 0.0;
    int steps = 0;
    auto play = [&](auto env) {
        auto obs = env.reset(env_rng);
        while (!env.done() && steps < max_steps) {
            const int action = action_select(network_forward(net, obs));
            auto r = env.step(action);
            total += r.reward;
            ++steps;
            std::cout << "step " << steps << ": action=" << action << " reward=" << r.reward
                      << " total=" << total << "\n";
            obs = std::move(r.observation);
        }
    };
    if (task == TaskId::cartpole) play(CartPole{});
    else play(DotChase{});
    std::cout << "episode done: steps=" << steps << " score=" << total << "\n";
    return 0;
}

int cmd_bench_comm(int gens, int workers, std::uint64_t seed, const std::string& out) {
    const auto table = distrib::bench_comm(workers, gens, seed);
    if (const auto dir = std::filesystem::path(out).parent_path(); !dir.empty())
        std::filesystem::create_directories(dir);
    write_file_atomic(out, table.csv());
    std::cout << "rebuild total variation ms: " << table.rebuild_total_ms << "\n"
              << "p2p total variation ms: " << table.p2p_total_ms << "\n"
              << "table written to " << out << "\n";
    return 0;
}

int cmd_worker(const std::string& connect, const std::string& task, const std::string& net,
               const std::string& comm, int static_hidden) {
    const auto colon = connect.rfind(':');
    if (colon == std::string::npos) throw ConfigError("worker: --connect wants host:port");
    const std::string host = connect.substr(0, colon);
    const auto port = std::uint16_t(std::stoi(connect.substr(colon + 1)));

    distrib::SocketWorker endpoint(host, port);
    distrib::WorkerSetup setup;
    setup.task = task_from_name(task);
    setup.descriptor =
        agent_descriptor(setup.task, net_kind_from_name(net), static_hidden);
    setup.mode = comm_from_name(comm);
    setup.eval = distrib::EvalKind::task_episode;
    distrib::Worker worker(endpoint.assigned_id(), endpoint, setup);
    worker.run();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nevo: neuroevolution of dynamically-complexifying networks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file; flags override");

    CliOptions o;
    auto* evolve = app.add_subcommand("evolve", "run an evolution experiment");
    add_run_flags(evolve, o);

    std::string re_task = "cartpole", re_out = "expert.traj";
    int re_n = 100, re_T = 100;
    std::uint64_t re_seed = 1;
    auto* record = app.add_subcommand("record-expert", "record scripted-expert trajectories");
    record->add_option("--task", re_task, "task");
    record->add_option("--n", re_n, "number of trajectories");
    record->add_option("--T", re_T, "steps per trajectory");
    record->add_option("--seed", re_seed, "seed");
    record->add_option("--out", re_out, "output file");

    std::string rp_genome, rp_task = "cartpole";
    int rp_T = 500;
    std::uint64_t rp_seed = 0;
    auto* rp = app.add_subcommand("replay", "rebuild a genome and run one episode");
    rp->add_option("--genome", rp_genome, "genome file")->required();
    rp->add_option("--task", rp_task, "task");
    rp->add_option("--T", rp_T, "step cap for the episode");
    rp->add_option("--episode-seed", rp_seed, "episode seed");

    int bc_gens = 100, bc_workers = 4;
    std::uint64_t bc_seed = 1;
    std::string bc_out = "bench.csv";
    auto* bench = app.add_subcommand("bench-comm", "time rebuild vs p2p on a null task");
    bench->add_option("--gens", bc_gens, "generations");
    bench->add_option("--workers", bc_workers, "worker count (even)");
    bench->add_option("--seed", bc_seed, "seed");
    bench->add_option("--out", bc_out, "output CSV");

    std::string wk_connect, wk_task = "cartpole", wk_net = "dynamic", wk_comm = "p2p";
    int wk_hidden = 32;
    auto* worker = app.add_subcommand("worker", "socket-transport worker process");
    worker->add_option("--connect", wk_connect, "coordinator host:port")->required();
    worker->add_option("--task", wk_task, "task");
    worker->add_option("--net", wk_net, "network kind");
    worker->add_option("--comm", wk_comm, "comm mode");
    worker->add_option("--static-hidden", wk_hidden, "static hidden width");

    try {
        app.parse(argc, argv);
        if (evolve->parsed()) return cmd_evolve(o);
        if (record->parsed()) return cmd_record_expert(re_task, re_n, re_T, re_seed, re_out);
        if (rp->parsed()) return cmd_replay(rp_genome, rp_task, rp_T, rp_seed);
        if (bench->parsed()) return cmd_bench_comm(bc_gens, bc_workers, bc_seed, bc_out);
        if (worker->parsed()) return cmd_worker(wk_connect, wk_task, wk_net, wk_comm, wk_hidden);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const nevo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
