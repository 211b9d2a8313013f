#include "nevo/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nevo/errors.hpp"

namespace nevo {

MatchAssignment assign_matches(int n, std::size_t dataset_size, RngStream& rng) {
    if (n < 1) throw ConfigError("assign_matches: need at least one pair");
    if (dataset_size == 0) throw ConfigError("assign_matches: empty dataset");
    MatchAssignment out;
    const auto perm = rng.permutation(std::size_t(n));
    out.pairs.resize(std::size_t(n));
    for (int d = 0; d < n; ++d) {
        out.pairs[std::size_t(d)].generator = int(perm[std::size_t(d)]);
        out.pairs[std::size_t(d)].discriminator = d;
        out.pairs[std::size_t(d)].real_index = std::size_t(rng.uniform_int(dataset_size));
    }
    return out;
}

namespace {

double logistic(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

std::vector<double> step_input(const TrajectoryStep& step, int n_actions) {
    std::vector<double> in = step.observation;
    in.resize(step.observation.size() + std::size_t(n_actions), 0.0);
    in[step.observation.size() + std::size_t(step.action)] = 1.0;
    return in;
}

} // namespace

double discriminator_confidence(Network& disc, const Trajectory& traj, int n_actions) {
    if (traj.steps.empty()) throw ContractError("discriminator: empty trajectory");
    network_reset_state(disc);
    double last = 0.0;
    for (const auto& step : traj.steps)
        last = network_forward(disc, step_input(step, n_actions))[0];
    network_reset_state(disc);
    return logistic(last);
}

Trajectory generate_trajectory(Network& gen, TaskId task, Seed episode_seed, int T) {
    if (T < 1) throw ConfigError("generate_trajectory: T must be positive");
    network_reset_state(gen);
    RngStream env_rng = derive_stream(episode_seed, kLabelEpisode);
    Trajectory traj;

    auto play = [&](auto env) {
        auto obs = env.reset(env_rng);
        for (int t = 0; t < T; ++t) {
            const int action = action_select(network_forward(gen, obs));
            traj.steps.push_back({obs, action});
            auto r = env.step(action);
            obs = std::move(r.observation);
            if (r.done) break;
        }
    };
    if (task == TaskId::cartpole) play(CartPole{});
    else play(DotChase{});

    while (int(traj.steps.size()) < T) traj.steps.push_back(traj.steps.back());
    network_reset_state(gen);
    return traj;
}

MatchResult evaluate_match(Network& generator, Network& discriminator, const Trajectory& real,
                           TaskId task, Seed episode_seed, int T, int n_actions) {
    MatchResult r;
    const Trajectory fake = generate_trajectory(generator, task, episode_seed, T);
    r.c_fake = discriminator_confidence(discriminator, fake, n_actions);
    r.c_real = discriminator_confidence(discriminator, real, n_actions);
    r.gen_fitness = r.c_fake;
    r.disc_fitness = r.c_real - r.c_fake;
    return r;
}

double action_agreement(Network& net, const std::vector<Trajectory>& probe, std::size_t cap) {
    std::size_t total = 0, agree = 0;
    for (const auto& traj : probe) {
        network_reset_state(net);
        for (const auto& step : traj.steps) {
            if (total >= cap) break;
            const int a = action_select(network_forward(net, step.observation));
            agree += (a == step.action) ? 1 : 0;
            ++total;
        }
        network_reset_state(net);
        if (total >= cap) break;
    }
    if (total == 0) throw ContractError("action_agreement: empty probe set");
    return double(agree) / double(total);
}

void AdversarialConfig::validate() const {
    if (pop < 2 || pop % 2 != 0)
        throw ConfigError("population size must be even and at least 2");
    if (generations < 0) throw ConfigError("generations must be non-negative");
    if (trajectory_length < 1) throw ConfigError("trajectory length must be positive");
    if (probe_states < 1) throw ConfigError("probe set must be non-empty");
}

AdvRunLog evolve_adversarial(const AdversarialConfig& config, const TrajectoryDataset& dataset) {
    config.validate();
    if (dataset.trajectories.empty()) throw ConfigError("evolve_adversarial: empty dataset");
    if (dataset.length != config.trajectory_length)
        throw ConfigError("evolve_adversarial: dataset T does not match the configured T");

    const TaskInfo info = task_info(config.task);
    const InitDescriptor gen_desc =
        agent_descriptor(config.task, config.net, config.static_hidden);
    const InitDescriptor disc_desc =
        discriminator_descriptor(config.task, config.net, config.static_hidden);

    std::vector<Agent> generators(std::size_t(config.pop));
    std::vector<Agent> discriminators(std::size_t(config.pop));
    for (auto& a : generators) {
        a.genome.init = gen_desc;
        a.network = initial_network(gen_desc);
    }
    for (auto& a : discriminators) {
        a.genome.init = disc_desc;
        a.network = initial_network(disc_desc);
    }

    // held-out expert trajectories for the behavioural probe
    const int probe_trajs =
        (config.probe_states + config.trajectory_length - 1) / config.trajectory_length;
    const Seed probe_seed = derive_stream(config.master_seed, kLabelProbe).next_u64();
    const TrajectoryDataset probe =
        record_expert(config.task, probe_trajs, config.trajectory_length, probe_seed);

    RngStream master = derive_stream(config.master_seed, kLabelMaster);
    AdvRunLog log;
    auto fitnesses = [](const std::vector<Agent>& agents) {
        std::vector<double> f(agents.size());
        for (std::size_t i = 0; i < agents.size(); ++i) f[i] = agents[i].fitness;
        return f;
    };

    for (int g = 1; g <= config.generations; ++g) {
        // draw order: generator seeds, discriminator seeds, episode seed,
        // then the match assignment
        std::vector<Seed> gen_seeds(generators.size()), disc_seeds(discriminators.size());
        for (auto& s : gen_seeds) s = master.next_u64();
        for (auto& s : disc_seeds) s = master.next_u64();
        const Seed episode_seed = master.next_u64();
        const auto matches = assign_matches(config.pop, dataset.trajectories.size(), master);

        for (std::size_t i = 0; i < generators.size(); ++i)
            variation_step(generators[i].genome, generators[i].network, gen_seeds[i]);
        for (std::size_t i = 0; i < discriminators.size(); ++i)
            variation_step(discriminators[i].genome, discriminators[i].network, disc_seeds[i]);

        for (const auto& match : matches.pairs) {
            auto& gen = generators[std::size_t(match.generator)];
            auto& disc = discriminators[std::size_t(match.discriminator)];
            const auto r = evaluate_match(gen.network, disc.network,
                                          dataset.trajectories[match.real_index], config.task,
                                          episode_seed, config.trajectory_length,
                                          info.n_actions);
            gen.fitness = r.gen_fitness;
            disc.fitness = r.disc_fitness;
        }

        AdvRow row;
        row.generation = g;
        const auto gf = fitnesses(generators);
        const auto df = fitnesses(discriminators);
        row.gen_mean = std::accumulate(gf.begin(), gf.end(), 0.0) / double(gf.size());
        row.gen_max = *std::max_element(gf.begin(), gf.end());
        row.disc_mean = std::accumulate(df.begin(), df.end(), 0.0) / double(df.size());
        row.disc_max = *std::max_element(df.begin(), df.end());

        const auto gen_sel = truncation_select(gf);
        const auto disc_sel = truncation_select(df);
        log.best_generator = gen_sel.ranked[0];
        row.agreement_top_gen =
            action_agreement(generators[std::size_t(gen_sel.ranked[0])].network,
                             probe.trajectories, std::size_t(config.probe_states));
        log.rows.push_back(row);
        log.last_episode_seed = episode_seed;

        for (const auto& [winner, loser] : gen_sel.pairs)
            generators[std::size_t(loser)] = generators[std::size_t(winner)];
        for (const auto& [winner, loser] : disc_sel.pairs)
            discriminators[std::size_t(loser)] = discriminators[std::size_t(winner)];
    }

    log.final_generators = std::move(generators);
    log.final_discriminators = std::move(discriminators);
    return log;
}

std::string AdvRunLog::csv() const {
    std::ostringstream os;
    os << "generation,gen_mean,gen_max,disc_mean,disc_max,agreement_top_gen\n";
    os.precision(17);
    for (const auto& r : rows)
        os << r.generation << ',' << r.gen_mean << ',' << r.gen_max << ',' << r.disc_mean << ','
           << r.disc_max << ',' << r.agreement_top_gen << "\n";
    return os.str();
}

} // namespace nevo
