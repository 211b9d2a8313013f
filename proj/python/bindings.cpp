#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nevo/adversarial.hpp"
#include "nevo/distrib/protocol.hpp"
#include "nevo/errors.hpp"
#include "nevo/evolution.hpp"
#include "nevo/io_util.hpp"
#include "nevo/serialize.hpp"

namespace py = pybind11;
using namespace nevo;

namespace {

const char* kind_name(GenomeKind k) {
    switch (k) {
        case GenomeKind::drn_only: return "drn";
        case GenomeKind::composite: return "composite";
        case GenomeKind::static_mlp: return "static";
    }
    return "?";
}

GenomeKind kind_from(const std::string& s) {
    if (s == "drn") return GenomeKind::drn_only;
    if (s == "composite") return GenomeKind::composite;
    if (s == "static") return GenomeKind::static_mlp;
    throw ConfigError("unknown genome kind '" + s + "'");
}

Genome make_genome(const std::string& kind, const std::string& init,
                   const std::vector<Seed>& seeds) {
    Genome g;
    g.init = InitDescriptor::from_string(kind_from(kind), init);
    g.seeds = seeds;
    return g;
}

} // namespace

PYBIND11_MODULE(_nevo, m) {
    m.doc() = "Neuroevolution of dynamically-complexifying recurrent and convolutional "
              "networks: seed-chain genomes, adversarial imitation and the "
              "rebuild/peer-to-peer worker protocol.";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<ContractError>(m, "ContractError");
    py::register_exception<RunError>(m, "RunError");

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<Seed, std::uint32_t>(), py::arg("seed"), py::arg("label") = 0)
        .def("next_u64", &RngStream::next_u64)
        .def("uniform_int", &RngStream::uniform_int, py::arg("n"))
        .def("uniform_double", &RngStream::uniform_double)
        .def("normal", py::overload_cast<>(&RngStream::normal))
        .def("permutation", &RngStream::permutation, py::arg("n"));
    m.def("derive_stream", &derive_stream, py::arg("seed"), py::arg("label"));

    py::class_<Genome>(m, "Genome")
        .def(py::init(&make_genome), py::arg("kind"), py::arg("init"),
             py::arg("seeds") = std::vector<Seed>{})
        .def_property_readonly("kind", [](const Genome& g) { return kind_name(g.init.kind); })
        .def_property_readonly("init", [](const Genome& g) { return g.init.to_string(); })
        .def_property(
            "seeds", [](const Genome& g) { return g.seeds; },
            [](Genome& g, std::vector<Seed> s) { g.seeds = std::move(s); })
        .def("__len__", [](const Genome& g) { return g.seeds.size(); })
        .def("__eq__", [](const Genome& a, const Genome& b) { return a == b; })
        .def("__repr__", [](const Genome& g) {
            return "Genome(kind=" + std::string(kind_name(g.init.kind)) + ", init=" +
                   g.init.to_string() + ", seeds=" + std::to_string(g.seeds.size()) + ")";
        });
    m.def("write_genome_file", &write_genome_file, py::arg("path"), py::arg("genome"));
    m.def("read_genome_file", &read_genome_file, py::arg("path"));

    py::class_<Network>(m, "Network")
        .def("forward",
             [](Network& n, const std::vector<double>& x) { return network_forward(n, x); },
             py::arg("inputs"))
        .def("reset_state", [](Network& n) { network_reset_state(n); })
        .def_property_readonly("node_count",
                               [](const Network& n) { return network_node_count(n); })
        .def_property_readonly("connection_count",
                               [](const Network& n) { return network_connection_count(n); })
        .def("__eq__", [](const Network& a, const Network& b) { return network_equal(a, b); })
        .def("encode", [](const Network& n) { return py::bytes(
                 std::string(reinterpret_cast<const char*>(encode_network(n).data()),
                             encode_network(n).size())); });
    m.def("replay", &replay, py::arg("genome"),
          "Rebuild the agent's network by replaying its seed chain.");
    m.def("initial_network",
          [](const std::string& kind, const std::string& init) {
              return initial_network(InitDescriptor::from_string(kind_from(kind), init));
          },
          py::arg("kind"), py::arg("init"));
    m.def("variation_step",
          [](Genome& g, Network& n, Seed seed) {
              const auto rec = variation_step(g, n, seed);
              return rec ? std::string(mutation_name(rec->applied)) : std::string("perturb_only");
          },
          py::arg("genome"), py::arg("network"), py::arg("seed"),
          "Append one seed and apply its variation stage; returns the mutation name.");

    m.def("action_select", &action_select, py::arg("outputs"));

    // environments
    py::class_<StepResult>(m, "StepResult")
        .def_readonly("observation", &StepResult::observation)
        .def_readonly("reward", &StepResult::reward)
        .def_readonly("done", &StepResult::done);
    py::class_<CartPole>(m, "CartPole")
        .def(py::init<>())
        .def("reset", &CartPole::reset, py::arg("rng"))
        .def("step", &CartPole::step, py::arg("action"))
        .def_property_readonly("done", &CartPole::done);
    py::class_<DotChase>(m, "DotChase")
        .def(py::init<>())
        .def("reset", &DotChase::reset, py::arg("rng"))
        .def("step", &DotChase::step, py::arg("action"))
        .def_property_readonly("done", &DotChase::done);
    m.def("expert_policy",
          [](const std::string& task, const std::vector<double>& obs) {
              return expert_policy(task_from_name(task), obs);
          },
          py::arg("task"), py::arg("observation"));
    m.def("record_expert",
          [](const std::string& task, int n, int T, Seed seed) {
              return record_expert(task_from_name(task), n, T, seed);
          },
          py::arg("task"), py::arg("n"), py::arg("T"), py::arg("seed"));

    py::class_<TrajectoryStep>(m, "TrajectoryStep")
        .def_readonly("observation", &TrajectoryStep::observation)
        .def_readonly("action", &TrajectoryStep::action);
    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("steps", &Trajectory::steps)
        .def("__len__", [](const Trajectory& t) { return t.steps.size(); });
    py::class_<TrajectoryDataset>(m, "TrajectoryDataset")
        .def_readonly("obs_shape", &TrajectoryDataset::obs_shape)
        .def_readonly("n_actions", &TrajectoryDataset::n_actions)
        .def_readonly("length", &TrajectoryDataset::length)
        .def_readonly("trajectories", &TrajectoryDataset::trajectories)
        .def("__eq__",
             [](const TrajectoryDataset& a, const TrajectoryDataset& b) { return a == b; });
    m.def("write_trajectories_file", &write_trajectories_file, py::arg("path"), py::arg("dataset"));
    m.def("read_trajectories_file", &read_trajectories_file, py::arg("path"));

    // selection
    py::class_<Selection>(m, "Selection")
        .def_readonly("ranked", &Selection::ranked)
        .def_readonly("selected", &Selection::selected)
        .def_readonly("pairs", &Selection::pairs);
    m.def("truncation_select", &truncation_select, py::arg("fitnesses"));

    // score evolution
    py::class_<ScoreRow>(m, "ScoreRow")
        .def_readonly("generation", &ScoreRow::generation)
        .def_readonly("mean_fitness", &ScoreRow::mean_fitness)
        .def_readonly("max_fitness", &ScoreRow::max_fitness)
        .def_readonly("mean_genome_len", &ScoreRow::mean_genome_len)
        .def_readonly("mean_nodes", &ScoreRow::mean_nodes)
        .def_readonly("mean_connections", &ScoreRow::mean_connections);
    py::class_<ScoreRunLog>(m, "ScoreRunLog")
        .def_readonly("rows", &ScoreRunLog::rows)
        .def_readonly("best_index", &ScoreRunLog::best_index)
        .def_readonly("last_episode_seed", &ScoreRunLog::last_episode_seed)
        .def_property_readonly("best_genome",
                               [](const ScoreRunLog& log) {
                                   return log.final_population.at(std::size_t(log.best_index))
                                       .genome;
                               })
        .def("csv", &ScoreRunLog::csv);
    m.def("evolve_score",
          [](const std::string& task, const std::string& net, int pop, int generations,
             Seed seed, const std::string& comm, int workers, int static_hidden) {
              EvolutionConfig config;
              config.task = task_from_name(task);
              config.net = net_kind_from_name(net);
              config.pop = pop;
              config.generations = generations;
              config.master_seed = seed;
              config.comm = comm_from_name(comm);
              config.workers = config.comm == CommMode::local ? workers : pop;
              config.static_hidden = static_hidden;
              return evolve_score(config);
          },
          py::arg("task") = "cartpole", py::arg("net") = "dynamic", py::arg("pop") = 50,
          py::arg("generations") = 100, py::arg("seed") = 1, py::arg("comm") = "local",
          py::arg("workers") = 1, py::arg("static_hidden") = 32);

    // adversarial imitation
    py::class_<AdvRow>(m, "AdvRow")
        .def_readonly("generation", &AdvRow::generation)
        .def_readonly("gen_mean", &AdvRow::gen_mean)
        .def_readonly("gen_max", &AdvRow::gen_max)
        .def_readonly("disc_mean", &AdvRow::disc_mean)
        .def_readonly("disc_max", &AdvRow::disc_max)
        .def_readonly("agreement_top_gen", &AdvRow::agreement_top_gen);
    py::class_<AdvRunLog>(m, "AdvRunLog")
        .def_readonly("rows", &AdvRunLog::rows)
        .def_readonly("best_generator", &AdvRunLog::best_generator)
        .def_property_readonly("best_genome",
                               [](const AdvRunLog& log) {
                                   return log.final_generators
                                       .at(std::size_t(log.best_generator))
                                       .genome;
                               })
        .def("csv", &AdvRunLog::csv);
    m.def("evolve_adversarial",
          [](const TrajectoryDataset& dataset, const std::string& task, const std::string& net,
             int pop, int generations, Seed seed, int T, int static_hidden, int probe_states) {
              AdversarialConfig config;
              config.task = task_from_name(task);
              config.net = net_kind_from_name(net);
              config.pop = pop;
              config.generations = generations;
              config.master_seed = seed;
              config.trajectory_length = T;
              config.static_hidden = static_hidden;
              config.probe_states = probe_states;
              return evolve_adversarial(config, dataset);
          },
          py::arg("dataset"), py::arg("task") = "cartpole", py::arg("net") = "dynamic",
          py::arg("pop") = 100, py::arg("generations") = 500, py::arg("seed") = 1,
          py::arg("T") = 100, py::arg("static_hidden") = 32, py::arg("probe_states") = 1000);

    // comm benchmark
    py::class_<distrib::BenchRow>(m, "BenchRow")
        .def_readonly("generation", &distrib::BenchRow::generation)
        .def_readonly("mode", &distrib::BenchRow::mode)
        .def_readonly("variation_ops", &distrib::BenchRow::variation_ops)
        .def_readonly("variation_ms", &distrib::BenchRow::variation_ms)
        .def_readonly("comm_ms", &distrib::BenchRow::comm_ms);
    py::class_<distrib::BenchTable>(m, "BenchTable")
        .def_readonly("rows", &distrib::BenchTable::rows)
        .def_readonly("rebuild_total_ms", &distrib::BenchTable::rebuild_total_ms)
        .def_readonly("p2p_total_ms", &distrib::BenchTable::p2p_total_ms)
        .def("csv", &distrib::BenchTable::csv);
    m.def("bench_comm", &distrib::bench_comm, py::arg("workers"), py::arg("generations"),
          py::arg("seed"));
}
