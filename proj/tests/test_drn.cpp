#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nevo/drn.hpp"
#include "nevo/errors.hpp"
#include "support/invariants.hpp"
#include "support/reference_nets.hpp"

using namespace nevo;

namespace {
DrnGraph fresh(int n_in, int n_out, Seed seed = 1) {
    RngStream rng = derive_stream(seed, kLabelInit);
    return DrnGraph(n_in, n_out, rng);
}
} // namespace

TEST_CASE("a fresh graph has only input and output nodes, no connections") {
    auto g = fresh(3, 2);
    CHECK(g.node_count() == 5);
    CHECK(g.connection_count() == 0);
    CHECK(g.inputs().size() == 3);
    CHECK(g.outputs().size() == 2);
    CHECK(g.hidden().empty());
}

TEST_CASE("zero outputs are rejected, zero inputs are fine") {
    RngStream rng = derive_stream(1, 0);
    CHECK_THROWS_AS(DrnGraph(3, 0, rng), ConfigError);
    auto g = fresh(0, 2);
    CHECK(g.receiving_nodes().empty());
}

TEST_CASE("single neuron passes tanh(bias) at zero input") {
    auto g = fresh(1, 1);
    const double bias = g.outputs()[0].bias;
    const double in[] = {0.0};
    const auto out = g.forward(in);
    CHECK(out[0] == doctest::Approx(std::tanh(bias)).epsilon(1e-12));
}

TEST_CASE("grow_connection wires the sampled pair and keeps the phase rule") {
    auto g = fresh(3, 2);
    // forced scenario: third input feeding the second output
    const int src = g.inputs()[2].id;
    const int dst = g.outputs()[1].id;
    g.add_connection(src, dst, 0.25);
    REQUIRE(g.connection_count() == 1);
    CHECK(g.connections()[0].src == src);
    CHECK(g.connections()[0].dst == dst);
    CHECK(g.connections()[0].phase == Phase::same_pass);
}

TEST_CASE("parallel duplicate connections are allowed and both counted") {
    auto g = fresh(1, 1);
    const int i = g.inputs()[0].id;
    const int o = g.outputs()[0].id;
    g.add_connection(i, o, 0.5);
    g.add_connection(i, o, -0.5); // same endpoints, second parallel edge
    CHECK(g.connection_count() == 2);
    CHECK(g.connections()[0].src == g.connections()[1].src);
    CHECK(g.connections()[0].dst == g.connections()[1].dst);
    // the forward pass sums both: tanh(0.5 x - 0.5 x + bias) = tanh(bias)
    g.set_bias(o, 0.25);
    const double in[] = {0.8};
    CHECK(g.forward(in)[0] == doctest::Approx(std::tanh(0.25)).epsilon(1e-12));
}

TEST_CASE("grow_connection is inapplicable without receiving nodes") {
    auto g = fresh(0, 2);
    RngStream rng = derive_stream(3, 1);
    CHECK_FALSE(g.grow_connection(rng).applied);
    CHECK_FALSE(g.can_grow_connection());
}

TEST_CASE("pruning the only in-connection of a chain cascades the chain away") {
    auto g = fresh(1, 1);
    const int i = g.inputs()[0].id;
    const int o = g.outputs()[0].id;
    const int h = g.insert_hidden_node(i, i, o, 0.1, 0.2, 0.3, 0.4);
    REQUIRE(g.hidden().size() == 1);
    REQUIRE(g.connection_count() == 3);
    g.delete_connection_between(i, h); // one of the two parallel feeds survives
    CHECK(g.hidden().size() == 1);
    g.delete_connection_between(i, h); // now the node stops receiving
    CHECK(g.hidden().empty());
    CHECK(g.connection_count() == 0);
    CHECK(g.inputs().size() == 1);
    CHECK(g.outputs().size() == 1);
}

TEST_CASE("prune_connection removes a single sampled connection") {
    auto g = fresh(1, 1);
    RngStream rng = derive_stream(4, 1);
    g.add_connection(g.inputs()[0].id, g.outputs()[0].id, 1.0);
    CHECK(g.prune_connection(rng).applied);
    CHECK(g.connection_count() == 0);
    CHECK_FALSE(g.prune_connection(rng).applied);
}

TEST_CASE("grow_node phases follow evaluation order at creation") {
    // Fig.-16 style: sources are an input and an output, target an output
    auto g = fresh(2, 2);
    const int i2 = g.inputs()[1].id;
    const int o2 = g.outputs()[1].id;
    const int o1 = g.outputs()[0].id;
    // o2 must be receiving before it can act as a source
    g.add_connection(g.inputs()[0].id, o2, 0.5);
    const int h = g.insert_hidden_node(i2, o2, o1, 0.0, 1.0, 1.0, 1.0);

    for (const auto& c : g.connections()) {
        if (c.src == i2 && c.dst == h) CHECK(c.phase == Phase::same_pass);
        if (c.src == o2 && c.dst == h) CHECK(c.phase == Phase::next_pass);
        if (c.src == h && c.dst == o1) CHECK(c.phase == Phase::same_pass);
    }
    // the new node now receives and emits
    const auto receiving = g.receiving_nodes();
    CHECK(std::find(receiving.begin(), receiving.end(), h) != receiving.end());
}

TEST_CASE("grow_node with exactly two receiving nodes forces distinct sources") {
    auto g = fresh(2, 1);
    RngStream rng = derive_stream(5, 1);
    REQUIRE(g.receiving_nodes().size() == 2);
    CHECK(g.grow_node(rng).applied);
    REQUIRE(g.hidden().size() == 1);
    const int h = g.hidden()[0].id;
    int src_a = -1, src_b = -1;
    for (const auto& c : g.connections())
        if (c.dst == h) (src_a < 0 ? src_a : src_b) = c.src;
    CHECK(src_a != src_b);
}

TEST_CASE("prune_node cascades nodes left without input information") {
    // Fig.-17 style: deleting the downstream feeder starves the other hidden
    auto g = fresh(2, 1);
    const int i1 = g.inputs()[0].id;
    const int i2 = g.inputs()[1].id;
    const int o = g.outputs()[0].id;
    const int h2 = g.insert_hidden_node(i1, i2, o, 0.0, 1.0, 1.0, 1.0);
    const int h1 = g.insert_hidden_node(h2, h2, o, 0.0, 1.0, 1.0, 1.0);
    REQUIRE(g.hidden().size() == 2);
    g.delete_hidden_node(h2);
    CHECK(g.hidden().empty()); // h1 lost all input information
    CHECK(g.find_node(h1) == nullptr);
    CHECK(g.inputs().size() == 2);
    CHECK(g.outputs().size() == 1);
}

TEST_CASE("a self-looping hidden node disappears with everything it touches") {
    auto g = fresh(1, 1);
    RngStream rng = derive_stream(6, 1);
    const int i = g.inputs()[0].id;
    const int o = g.outputs()[0].id;
    const int h = g.insert_hidden_node(i, i, o, 0.0, 1.0, 1.0, 1.0);
    g.add_connection(h, h, 0.5);
    CHECK(g.prune_node(rng).applied); // only one hidden node to sample
    CHECK(g.hidden().empty());
    CHECK(g.connection_count() == 0);
    CHECK(g.inputs().size() == 1);
    CHECK(g.outputs().size() == 1);
}

TEST_CASE("recurrent forward pass matches the hand-evaluated example") {
    auto g = fresh(1, 1);
    const int i = g.inputs()[0].id;
    const int o = g.outputs()[0].id;
    const int h = g.insert_hidden_node(i, i, o, 0.0, 0.0, 0.5, 2.0);
    g.add_connection(h, h, 1.0); // next-pass self-loop
    g.set_bias(o, 0.0);
    g.delete_connection_between(i, h); // drops the older, zero-weight feed

    const double in1[] = {1.0};
    const auto out1 = g.forward(in1);
    const double h1 = std::tanh(0.5 * 1.0);
    CHECK(out1[0] == doctest::Approx(std::tanh(2.0 * h1)).epsilon(1e-12));
    CHECK(out1[0] == doctest::Approx(0.7278944).epsilon(1e-6));

    const double in2[] = {0.0};
    const auto out2 = g.forward(in2);
    const double h2 = std::tanh(0.5 * 0.0 + 1.0 * h1);
    CHECK(out2[0] == doctest::Approx(std::tanh(2.0 * h2)).epsilon(1e-12));
    CHECK(out2[0] == doctest::Approx(0.6981162).epsilon(1e-6));
}

TEST_CASE("deleting one of two parallel connections removes the older one") {
    auto g = fresh(1, 1);
    const int i = g.inputs()[0].id;
    const int o = g.outputs()[0].id;
    g.add_connection(i, o, 1.0);
    g.add_connection(i, o, 2.0);
    g.delete_connection_between(i, o);
    REQUIRE(g.connection_count() == 1);
    CHECK(g.connections()[0].weight == 2.0);
}

TEST_CASE("forward without in-connections yields tanh(bias) and zero for inputs") {
    auto g = fresh(2, 2);
    g.set_bias(g.outputs()[0].id, 0.0);
    g.set_bias(g.outputs()[1].id, 0.0);
    const double in[] = {0.3, -0.7};
    const auto out = g.forward(in);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
}

TEST_CASE("forward of a same-pass-only graph ignores the state buffer") {
    auto g = fresh(2, 1);
    g.add_connection(g.inputs()[0].id, g.outputs()[0].id, 0.8);
    g.add_connection(g.inputs()[1].id, g.outputs()[0].id, -0.4);
    const double in[] = {0.5, 0.25};
    const auto first = g.forward(in);
    // the pass above left arbitrary values in the state buffer
    const auto second = g.forward(in);
    CHECK(first[0] == second[0]);
    g.reset_state();
    const auto third = g.forward(in);
    CHECK(first[0] == third[0]);
}

TEST_CASE("forward checks input arity") {
    auto g = fresh(2, 1);
    const double in[] = {1.0};
    CHECK_THROWS_AS(g.forward(in), ContractError);
}

TEST_CASE("forward agrees with the brute-force reference on random graphs") {
    for (Seed seed = 0; seed < 30; ++seed) {
        RngStream rng = derive_stream(seed, 17);
        auto g = fresh(2, 2, seed);
        for (int step = 0; step < 25; ++step) {
            switch (rng.uniform_int(4)) {
                case 0: g.grow_connection(rng); break;
                case 1: g.prune_connection(rng); break;
                case 2: g.grow_node(rng); break;
                default: g.prune_node(rng); break;
            }
        }
        std::map<int, double> state; // zeros
        std::vector<double> inputs = {rng.normal(), rng.normal()};
        for (int pass = 0; pass < 3; ++pass) {
            std::map<int, double> state_after;
            const auto want = testref::drn_reference_pass(g, inputs, state, &state_after);
            const auto got = g.forward(inputs);
            REQUIRE(got.size() == want.size());
            for (std::size_t k = 0; k < got.size(); ++k)
                CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
            state = state_after;
        }
    }
}

TEST_CASE("perturbation touches every weight and bias exactly once") {
    auto g = fresh(1, 1);
    g.add_connection(g.inputs()[0].id, g.outputs()[0].id, 1.0);
    const double w0 = g.connections()[0].weight;
    const double b0 = g.outputs()[0].bias;
    RngStream rng = derive_stream(8, 2);
    g.perturb_weights(rng);
    CHECK(g.connections()[0].weight != w0);
    CHECK(g.outputs()[0].bias != b0);

    auto empty = fresh(0, 1);
    const double be = empty.outputs()[0].bias;
    empty.perturb_weights(rng);
    CHECK(empty.outputs()[0].bias != be); // output biases always perturb
}

TEST_CASE("added inputs arrive connected, removals cascade whole chains") {
    auto g = fresh(0, 2);
    RngStream rng = derive_stream(9, 1);
    const int id = g.add_input_node(rng);
    CHECK(g.inputs().size() == 1);
    CHECK(g.connection_count() == 1);
    CHECK(g.connections()[0].src == id);
    CHECK(g.connections()[0].phase == Phase::same_pass);

    g.remove_input_node(id);
    CHECK(g.inputs().empty());
    CHECK(g.connection_count() == 0);

    // input feeding a hidden chain: removing it deletes the chain
    auto g2 = fresh(1, 1);
    const int i = g2.inputs()[0].id;
    const int o = g2.outputs()[0].id;
    g2.insert_hidden_node(i, i, o, 0.0, 1.0, 1.0, 1.0);
    g2.remove_input_node(i);
    CHECK(g2.hidden().empty());
    CHECK(g2.connection_count() == 0);

    CHECK_THROWS_AS(g2.remove_input_node(o), ContractError);
}

TEST_CASE("random mutation storms keep every structural invariant") {
    for (Seed seed = 0; seed < 40; ++seed) {
        RngStream rng = derive_stream(seed, 21);
        auto g = fresh(int(seed % 4), 1 + int(seed % 3), seed);
        for (int step = 0; step < 60; ++step) {
            switch (rng.uniform_int(4)) {
                case 0: g.grow_connection(rng); break;
                case 1: g.prune_connection(rng); break;
                case 2: g.grow_node(rng); break;
                default: g.prune_node(rng); break;
            }
            const auto err = testinv::check_drn(g);
            CHECK_MESSAGE(err.empty(), err);
        }
    }
}
