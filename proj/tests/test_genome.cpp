#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "nevo/errors.hpp"
#include "nevo/genome.hpp"
#include "nevo/network.hpp"

using namespace nevo;

namespace {

Genome make_genome(GenomeKind kind, int n_seeds, Seed base = 100) {
    Genome g;
    g.init.kind = kind;
    switch (kind) {
        case GenomeKind::drn_only:
            g.init.n_in = 4;
            g.init.n_out = 2;
            break;
        case GenomeKind::composite:
            g.init.image = {1, 4, 6};
            g.init.n_out = 2;
            break;
        case GenomeKind::static_mlp:
            g.init.widths = {4, 8, 2};
            g.init.n_out = 2;
            break;
    }
    RngStream seeds = derive_stream(base, 40);
    for (int i = 0; i < n_seeds; ++i) g.seeds.push_back(seeds.next_u64());
    return g;
}

} // namespace

TEST_CASE("descriptor text round-trips for every kind") {
    for (const auto& [kind, text] : {
             std::pair{GenomeKind::drn_only, std::string("4,2")},
             std::pair{GenomeKind::composite, std::string("1,8,8,5")},
             std::pair{GenomeKind::composite, std::string("1,8,8,1,f5")},
             std::pair{GenomeKind::static_mlp, std::string("4,32,2")},
             std::pair{GenomeKind::static_mlp, std::string("6,32,1,r")},
             std::pair{GenomeKind::static_mlp, std::string("conv,1,8,8,64,5")},
             std::pair{GenomeKind::static_mlp, std::string("conv,1,8,8,64,1,f5,r")},
         }) {
        const auto d = InitDescriptor::from_string(kind, text);
        CHECK(d.to_string() == text);
    }
}

TEST_CASE("malformed descriptors are configuration errors") {
    CHECK_THROWS_AS(InitDescriptor::from_string(GenomeKind::drn_only, "4"), ConfigError);
    CHECK_THROWS_AS(InitDescriptor::from_string(GenomeKind::drn_only, "4,0"), ConfigError);
    CHECK_THROWS_AS(InitDescriptor::from_string(GenomeKind::drn_only, "4,2,9"), ConfigError);
    CHECK_THROWS_AS(InitDescriptor::from_string(GenomeKind::composite, "0,8,8,5"), ConfigError);
    CHECK_THROWS_AS(InitDescriptor::from_string(GenomeKind::static_mlp, "4,32"), ConfigError);
    CHECK_THROWS_AS(InitDescriptor::from_string(GenomeKind::static_mlp, "4,x,2"), ConfigError);
}

TEST_CASE("genome files survive a write/read round trip byte for byte") {
    for (const auto kind :
         {GenomeKind::drn_only, GenomeKind::composite, GenomeKind::static_mlp}) {
        const Genome g = make_genome(kind, 17);
        std::ostringstream first;
        write_genome(first, g);
        std::istringstream in(first.str());
        const Genome back = read_genome(in);
        CHECK(back == g);
        std::ostringstream second;
        write_genome(second, back);
        CHECK(second.str() == first.str());
    }
}

TEST_CASE("genome file I/O works through the filesystem") {
    const auto path = std::filesystem::temp_directory_path() / "nevo_test_genome.txt";
    const Genome g = make_genome(GenomeKind::drn_only, 5);
    write_genome_file(path.string(), g);
    CHECK(read_genome_file(path.string()) == g);
    std::filesystem::remove(path);
}

TEST_CASE("corrupt genome files are rejected") {
    auto read_text = [](const std::string& text) {
        std::istringstream in(text);
        return read_genome(in);
    };
    CHECK_THROWS_AS(read_text("garbage\n"), ConfigError);
    CHECK_THROWS_AS(read_text("NEVO-GENOME v1\nkind=alien\ninit=4,2\n"), ConfigError);
    CHECK_THROWS_AS(read_text("NEVO-GENOME v1\nkind=drn\n"), ConfigError);
    CHECK_THROWS_AS(read_text("NEVO-GENOME v1\nkind=drn\ninit=4,2\n123x\n"), ConfigError);
}

TEST_CASE("an empty drn genome replays to the bare initial network") {
    Genome g;
    g.init.kind = GenomeKind::drn_only;
    g.init.n_in = 3;
    g.init.n_out = 2;
    Network net = replay(g);
    const auto& drn = std::get<DrnGraph>(net);
    CHECK(drn.node_count() == 5);
    CHECK(drn.connection_count() == 0);
}

TEST_CASE("replay is deterministic for every network kind") {
    for (const auto kind :
         {GenomeKind::drn_only, GenomeKind::composite, GenomeKind::static_mlp}) {
        const Genome g = make_genome(kind, 30);
        const Network a = replay(g);
        const Network b = replay(g);
        CHECK(network_equal(a, b));
    }
}

TEST_CASE("replay equals applying the variation steps one by one") {
    const Genome g = make_genome(GenomeKind::composite, 25);
    const Network whole = replay(g);

    Network stepwise = initial_network(g.init);
    Genome grown;
    grown.init = g.init;
    for (Seed s : g.seeds) variation_step(grown, stepwise, s);
    CHECK(network_equal(whole, stepwise));
    CHECK(grown == g);
}

TEST_CASE("prefix replays capture the intermediate states of a full replay") {
    const Genome g = make_genome(GenomeKind::drn_only, 40);
    Network rolling = initial_network(g.init);
    Genome rolling_genome;
    rolling_genome.init = g.init;
    for (std::size_t k = 0; k < g.seeds.size(); ++k) {
        variation_step(rolling_genome, rolling, g.seeds[k]);
        if (k % 7 == 0 || k + 1 == g.seeds.size()) {
            Genome prefix;
            prefix.init = g.init;
            prefix.seeds.assign(g.seeds.begin(), g.seeds.begin() + long(k) + 1);
            CHECK(network_equal(replay(prefix), rolling));
        }
    }
}

TEST_CASE("replay idempotence holds for a length-1000 genome") {
    const Genome g = make_genome(GenomeKind::drn_only, 1000);
    CHECK(network_equal(replay(g), replay(g)));
}

TEST_CASE("malformed descriptors fail replay with a configuration error") {
    Genome g;
    g.init.kind = GenomeKind::drn_only;
    g.init.n_in = 2;
    g.init.n_out = 0;
    CHECK_THROWS_AS(replay(g), ConfigError);
}

TEST_CASE("genome length grows by exactly one per variation step") {
    Genome g = make_genome(GenomeKind::static_mlp, 0);
    Network net = initial_network(g.init);
    for (int i = 0; i < 5; ++i) {
        variation_step(g, net, Seed(i));
        CHECK(g.seeds.size() == std::size_t(i) + 1);
    }
}
