#include "nevo/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <sstream>
#include <thread>

#include "nevo/distrib/protocol.hpp"
#include "nevo/errors.hpp"

namespace nevo {

NetKind net_kind_from_name(const std::string& s) {
    if (s == "static") return NetKind::static_net;
    if (s == "dynamic") return NetKind::dynamic;
    throw ConfigError("unknown net kind '" + s + "'");
}

CommMode comm_from_name(const std::string& s) {
    if (s == "local") return CommMode::local;
    if (s == "rebuild") return CommMode::rebuild;
    if (s == "p2p") return CommMode::p2p;
    throw ConfigError("unknown comm mode '" + s + "'");
}

void EvolutionConfig::validate() const {
    if (pop < 2 || pop % 2 != 0)
        throw ConfigError("population size must be even and at least 2");
    if (generations < 0) throw ConfigError("generations must be non-negative");
    if (workers < 1) throw ConfigError("worker count must be positive");
    if (comm != CommMode::local && workers != pop)
        throw ConfigError("rebuild/p2p modes run one agent per worker; set workers == pop");
    if (static_hidden < 1) throw ConfigError("static hidden width must be positive");
}

Selection truncation_select(const std::vector<double>& fitnesses) {
    const std::size_t n = fitnesses.size();
    if (n == 0 || n % 2 != 0) throw ConfigError("truncation selection needs an even agent count");
    Selection sel;
    sel.ranked.resize(n);
    std::iota(sel.ranked.begin(), sel.ranked.end(), 0);
    std::stable_sort(sel.ranked.begin(), sel.ranked.end(), [&](int a, int b) {
        return fitnesses[a] > fitnesses[b]; // stable: ties stay in index order
    });
    sel.selected.assign(n, false);
    for (std::size_t i = 0; i < n / 2; ++i) sel.selected[sel.ranked[i]] = true;
    for (std::size_t i = 0; i < n / 2; ++i)
        sel.pairs.push_back({sel.ranked[i], sel.ranked[n / 2 + i]});
    return sel;
}

int action_select(const std::vector<double>& outputs) {
    if (outputs.empty()) throw ContractError("action_select: no outputs");
    std::size_t best = 0;
    for (std::size_t i = 1; i < outputs.size(); ++i)
        if (outputs[i] > outputs[best]) best = i;
    return int(best);
}

GenerationSeeds draw_generation_seeds(RngStream& master, std::size_t pop) {
    GenerationSeeds out;
    out.agent_seeds.resize(pop);
    for (auto& s : out.agent_seeds) s = master.next_u64();
    out.episode_seed = master.next_u64();
    return out;
}

InitDescriptor agent_descriptor(TaskId task, NetKind kind, int static_hidden) {
    InitDescriptor d;
    const TaskInfo info = task_info(task);
    if (task == TaskId::cartpole) {
        if (kind == NetKind::dynamic) {
            d.kind = GenomeKind::drn_only;
            d.n_in = info.obs_dim;
            d.n_out = info.n_actions;
        } else {
            d.kind = GenomeKind::static_mlp;
            d.widths = {info.obs_dim, static_hidden, info.n_actions};
            d.n_out = info.n_actions;
        }
    } else {
        if (kind == NetKind::dynamic) {
            d.kind = GenomeKind::composite;
            d.image = DotChase::kObsShape;
            d.n_out = info.n_actions;
        } else {
            d.kind = GenomeKind::static_mlp;
            d.pixel = true;
            d.image = DotChase::kObsShape;
            d.widths = {0, static_hidden, info.n_actions};
            d.n_out = info.n_actions;
        }
    }
    return d;
}

InitDescriptor discriminator_descriptor(TaskId task, NetKind kind, int static_hidden) {
    InitDescriptor d;
    const TaskInfo info = task_info(task);
    if (task == TaskId::cartpole) {
        if (kind == NetKind::dynamic) {
            d.kind = GenomeKind::drn_only;
            d.n_in = info.obs_dim + info.n_actions;
            d.n_out = 1;
        } else {
            d.kind = GenomeKind::static_mlp;
            d.widths = {info.obs_dim + info.n_actions, static_hidden, 1};
            d.n_out = 1;
            d.recurrent = true; // last hidden layer turns recurrent
        }
    } else {
        if (kind == NetKind::dynamic) {
            d.kind = GenomeKind::composite;
            d.image = DotChase::kObsShape;
            d.n_out = 1;
            d.fixed_inputs = info.n_actions; // action one-hot beside the DCN leaves
        } else {
            d.kind = GenomeKind::static_mlp;
            d.pixel = true;
            d.image = DotChase::kObsShape;
            d.widths = {0, static_hidden, 1};
            d.n_out = 1;
            d.fixed_inputs = info.n_actions;
            d.recurrent = true;
        }
    }
    return d;
}

double evaluate_agent(Agent& agent, TaskId task, Seed episode_seed) {
    network_reset_state(agent.network);
    const double score = rollout_score(task, episode_seed, [&](const std::vector<double>& obs) {
        return action_select(network_forward(agent.network, obs));
    });
    network_reset_state(agent.network);
    agent.fitness = score;
    return score;
}

namespace {

void evaluate_population(std::vector<Agent>& agents, TaskId task, Seed episode_seed,
                         int threads) {
    if (threads <= 1) {
        for (auto& a : agents) evaluate_agent(a, task, episode_seed);
        return;
    }
    // deterministic: each agent owns its slot, the partition is index-based
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= agents.size()) return;
                evaluate_agent(agents[i], task, episode_seed);
            }
        });
    }
    for (auto& th : pool) th.join();
}

ScoreRow make_row(int generation, const std::vector<Agent>& agents) {
    ScoreRow row;
    row.generation = generation;
    double sum = 0, len = 0, nodes = 0, conns = 0, best = agents[0].fitness;
    for (const auto& a : agents) {
        sum += a.fitness;
        best = std::max(best, a.fitness);
        len += double(a.genome.seeds.size());
        nodes += double(network_node_count(a.network));
        conns += double(network_connection_count(a.network));
    }
    const double n = double(agents.size());
    row.mean_fitness = sum / n;
    row.max_fitness = best;
    row.mean_genome_len = len / n;
    row.mean_nodes = nodes / n;
    row.mean_connections = conns / n;
    return row;
}

ScoreRunLog evolve_score_local(const EvolutionConfig& config) {
    const InitDescriptor desc = agent_descriptor(config.task, config.net, config.static_hidden);
    std::vector<Agent> agents(config.pop);
    for (auto& a : agents) {
        a.genome.init = desc;
        a.network = initial_network(desc);
    }

    RngStream master = derive_stream(config.master_seed, kLabelMaster);
    ScoreRunLog log;
    for (int g = 1; g <= config.generations; ++g) {
        const auto seeds = draw_generation_seeds(master, agents.size());
        for (std::size_t i = 0; i < agents.size(); ++i)
            variation_step(agents[i].genome, agents[i].network, seeds.agent_seeds[i]);
        evaluate_population(agents, config.task, seeds.episode_seed, config.workers);
        log.rows.push_back(make_row(g, agents));
        log.last_episode_seed = seeds.episode_seed;

        const auto sel = truncation_select([&] {
            std::vector<double> f(agents.size());
            for (std::size_t i = 0; i < agents.size(); ++i) f[i] = agents[i].fitness;
            return f;
        }());
        for (const auto& [winner, loser] : sel.pairs) agents[loser] = agents[winner];
        log.best_index = sel.ranked[0];
        if (config.stop_at_mean && log.rows.back().mean_fitness >= *config.stop_at_mean) break;
    }
    log.final_population = agents;
    return log;
}

} // namespace

ScoreRunLog evolve_score(const EvolutionConfig& config) {
    config.validate();
    if (config.comm == CommMode::local) return evolve_score_local(config);
    return distrib::evolve_score_distributed(config);
}

std::string ScoreRunLog::csv() const {
    std::ostringstream os;
    os << "generation,mean_fitness,max_fitness,mean_genome_len,mean_nodes,mean_connections\n";
    os.precision(17);
    for (const auto& r : rows)
        os << r.generation << ',' << r.mean_fitness << ',' << r.max_fitness << ','
           << r.mean_genome_len << ',' << r.mean_nodes << ',' << r.mean_connections << "\n";
    return os.str();
}

} // namespace nevo
