#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <sstream>

#include "nevo/errors.hpp"
#include "nevo/evolution.hpp"

using namespace nevo;

TEST_CASE("truncation ranks by fitness and pairs rank-to-rank") {
    const auto sel = truncation_select({3, 1, 2, 0});
    CHECK(sel.ranked == std::vector<int>{0, 2, 1, 3});
    CHECK(sel.selected == std::vector<bool>{true, false, true, false});
    CHECK(sel.pairs == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
}

TEST_CASE("all-equal fitnesses select the lower indices") {
    const auto sel = truncation_select({5, 5, 5, 5, 5, 5});
    CHECK(sel.selected == std::vector<bool>{true, true, true, false, false, false});
    CHECK(sel.pairs == std::vector<std::pair<int, int>>{{0, 3}, {1, 4}, {2, 5}});
}

TEST_CASE("odd population sizes are configuration errors") {
    CHECK_THROWS_AS(truncation_select({1, 2, 3}), ConfigError);
    EvolutionConfig bad;
    bad.pop = 5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("action selection is argmax with lowest-index ties") {
    CHECK(action_select({0.1, 0.9}) == 1);
    CHECK(action_select({0.5, 0.5}) == 0);
    CHECK(action_select({0.7}) == 0);
    CHECK_THROWS_AS(action_select({}), ContractError);
}

TEST_CASE("static agents change only their weights under variation") {
    const InitDescriptor desc = agent_descriptor(TaskId::cartpole, NetKind::static_net, 16);
    Genome g;
    g.init = desc;
    Network net = initial_network(desc);
    const auto params_before = std::get<StaticNet>(net).parameters();
    const auto rec = variation_step(g, net, 99);
    CHECK_FALSE(rec.has_value()); // no structural mutation on static nets
    CHECK(g.seeds.size() == 1);
    const auto& s = std::get<StaticNet>(net);
    CHECK(s.parameters().size() == params_before.size());
    bool changed = false;
    for (std::size_t i = 0; i < params_before.size(); ++i)
        changed = changed || params_before[i] != s.parameters()[i];
    CHECK(changed);
}

TEST_CASE("dynamic agents apply exactly one structural mutation per step") {
    const InitDescriptor desc = agent_descriptor(TaskId::cartpole, NetKind::dynamic, 16);
    Genome g;
    g.init = desc;
    Network net = initial_network(desc);
    for (Seed s = 1; s <= 10; ++s) {
        const auto rec = variation_step(g, net, s);
        REQUIRE(rec.has_value());
    }
    CHECK(g.seeds.size() == 10);
}

TEST_CASE("a zero-generation run logs nothing but still returns the population") {
    EvolutionConfig config;
    config.task = TaskId::cartpole;
    config.net = NetKind::dynamic;
    config.pop = 2;
    config.generations = 0;
    const auto log = evolve_score(config);
    CHECK(log.rows.empty());
    CHECK(log.csv() ==
          "generation,mean_fitness,max_fitness,mean_genome_len,mean_nodes,mean_connections\n");
    CHECK(log.final_population.size() == 2);
    CHECK(network_equal(log.final_population[0].network, log.final_population[1].network));
}

TEST_CASE("score runs are deterministic and track genome length per generation") {
    EvolutionConfig config;
    config.task = TaskId::cartpole;
    config.net = NetKind::dynamic;
    config.pop = 4;
    config.generations = 3;
    config.master_seed = 11;
    const auto a = evolve_score(config);
    const auto b = evolve_score(config);
    CHECK(a.csv() == b.csv());
    REQUIRE(a.rows.size() == 3);
    for (int g = 1; g <= 3; ++g) {
        CHECK(a.rows[std::size_t(g - 1)].generation == g);
        CHECK(a.rows[std::size_t(g - 1)].mean_genome_len == double(g));
    }
}

TEST_CASE("after selection the population holds pop/2 genomes twice each") {
    EvolutionConfig config;
    config.task = TaskId::cartpole;
    config.net = NetKind::dynamic;
    config.pop = 6;
    config.generations = 1;
    const auto log = evolve_score(config);
    std::map<std::vector<Seed>, int> counts;
    for (const auto& agent : log.final_population) ++counts[agent.genome.seeds];
    CHECK(counts.size() == 3);
    for (const auto& [seeds, n] : counts) CHECK(n == 2);
}

TEST_CASE("parallel evaluation reproduces the single-threaded log") {
    EvolutionConfig config;
    config.task = TaskId::cartpole;
    config.net = NetKind::static_net;
    config.pop = 4;
    config.generations = 2;
    config.master_seed = 7;
    config.workers = 1;
    const auto serial = evolve_score(config);
    config.workers = 4;
    const auto parallel = evolve_score(config);
    CHECK(serial.csv() == parallel.csv());
}

TEST_CASE("evolution on the pixel task drives composite networks") {
    EvolutionConfig config;
    config.task = TaskId::dotchase;
    config.net = NetKind::dynamic;
    config.pop = 2;
    config.generations = 2;
    const auto log = evolve_score(config);
    CHECK(log.rows.size() == 2);
    CHECK(std::holds_alternative<CompositeNet>(log.final_population[0].network));
}

TEST_CASE("the static pixel baseline also runs end to end") {
    EvolutionConfig config;
    config.task = TaskId::dotchase;
    config.net = NetKind::static_net;
    config.pop = 2;
    config.generations = 1;
    config.static_hidden = 8;
    const auto log = evolve_score(config);
    CHECK(log.rows.size() == 1);
    CHECK(std::holds_alternative<StaticNet>(log.final_population[0].network));
}

TEST_CASE("evaluation leaves the live network equal to its genome replay") {
    EvolutionConfig config;
    config.task = TaskId::cartpole;
    config.net = NetKind::dynamic;
    config.pop = 4;
    config.generations = 2;
    const auto log = evolve_score(config);
    for (const auto& agent : log.final_population)
        CHECK(network_equal(agent.network, replay(agent.genome)));
}
