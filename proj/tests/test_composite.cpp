#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "nevo/composite.hpp"
#include "nevo/errors.hpp"
#include "support/invariants.hpp"

using namespace nevo;

namespace {
CompositeNet fresh(int c = 1, int h = 4, int w = 6, int n_out = 2, int fixed = 0) {
    RngStream rng = derive_stream(77, kLabelInit);
    return CompositeNet(c, h, w, n_out, rng, fixed);
}
} // namespace

TEST_CASE("a fresh composite net is a bare input node and an input-less drn") {
    auto net = fresh();
    CHECK(net.dcn().node_count() == 1);
    CHECK(net.drn().inputs().empty());
    CHECK(net.drn().outputs().size() == 2);
    CHECK(net.drn().connection_count() == 0);
    CHECK(net.leaf_map().empty());
}

TEST_CASE("forward on the fresh net emits tanh(bias) per output") {
    auto net = fresh();
    std::vector<double> image(24, 0.5);
    const auto out = net.forward(image);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == doctest::Approx(std::tanh(net.drn().outputs()[0].bias)).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(std::tanh(net.drn().outputs()[1].bias)).epsilon(1e-12));
}

TEST_CASE("grow_branch pairs the new leaf with a new connected drn input") {
    auto net = fresh();
    RngStream rng = derive_stream(1, 1);
    REQUIRE(net.apply_mutation(MutationKind::dcn_grow_branch, rng));
    CHECK(net.leaf_map().size() == 1);
    CHECK(net.drn().inputs().size() == 1);
    CHECK(net.dcn().leaves().size() == 1);
    CHECK(net.leaf_map()[0].first == net.dcn().leaves()[0]);
    CHECK(net.leaf_map()[0].second == net.drn().inputs()[0].id);
    // the new input connects to a hidden or output node
    REQUIRE(net.drn().connection_count() == 1);
    CHECK(net.drn().connections()[0].src == net.drn().inputs()[0].id);
}

TEST_CASE("prune_branch removes the paired inputs with their connections") {
    auto net = fresh();
    RngStream rng = derive_stream(2, 1);
    REQUIRE(net.apply_mutation(MutationKind::dcn_grow_branch, rng));
    REQUIRE(net.apply_mutation(MutationKind::dcn_prune_branch, rng));
    CHECK(net.leaf_map().empty());
    CHECK(net.drn().inputs().empty());
    CHECK(net.drn().connection_count() == 0);
    CHECK(net.dcn().node_count() == 1);
}

TEST_CASE("inapplicable draws resample among the applicable mutations") {
    auto net = fresh();
    // fresh net: no hidden nodes, no connections, no branches, nothing
    // expanded; only the grow mutations can fire
    CHECK_FALSE(net.mutation_applicable(MutationKind::drn_prune_node));
    CHECK_FALSE(net.mutation_applicable(MutationKind::drn_prune_connection));
    CHECK_FALSE(net.mutation_applicable(MutationKind::drn_grow_connection)); // nothing receives
    CHECK_FALSE(net.mutation_applicable(MutationKind::dcn_prune_branch));
    CHECK_FALSE(net.mutation_applicable(MutationKind::dcn_expand_node));
    CHECK_FALSE(net.mutation_applicable(MutationKind::dcn_contract_node));
    CHECK(net.mutation_applicable(MutationKind::dcn_grow_branch));

    const auto pool = net.applicable_mutations();
    CHECK(pool == std::vector<MutationKind>{MutationKind::dcn_grow_branch});

    RngStream choice = derive_stream(3, 0);
    RngStream structural = derive_stream(3, 1);
    const auto rec = net.mutate(choice, structural);
    CHECK(rec.applied == MutationKind::dcn_grow_branch);
}

TEST_CASE("the leaf-input bijection survives random mutation storms") {
    for (Seed seed = 0; seed < 25; ++seed) {
        auto net = fresh(1 + int(seed % 2), 4 + int(seed % 4), 4, 2);
        RngStream choice = derive_stream(seed, kLabelMutationChoice);
        RngStream structural = derive_stream(seed, kLabelStructural);
        for (int step = 0; step < 50; ++step) {
            net.mutate(choice, structural);
            const auto err = testinv::check_composite(net);
            REQUIRE_MESSAGE(err.empty(), err);
        }
    }
}

TEST_CASE("composite forward equals manual dcn evaluation plus drn injection") {
    auto net = fresh();
    RngStream choice = derive_stream(5, kLabelMutationChoice);
    RngStream structural = derive_stream(5, kLabelStructural);
    for (int step = 0; step < 30; ++step) net.mutate(choice, structural);

    std::vector<double> image(24);
    RngStream vals = derive_stream(6, 2);
    for (auto& v : image) v = vals.normal();

    auto manual = net; // independent copy for the two-stage path
    Tensor img({1, 4, 6});
    img.data = image;
    const auto leaf_values = manual.dcn().forward(img);
    std::vector<double> drn_in;
    for (const auto& [leaf, input] : manual.leaf_map()) {
        const auto it = std::find_if(leaf_values.begin(), leaf_values.end(),
                                     [&](const auto& p) { return p.first == leaf; });
        REQUIRE(it != leaf_values.end());
        drn_in.push_back(it->second);
    }
    const auto want = manual.drn().forward(drn_in);
    const auto got = net.forward(image);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == want[i]);
}

TEST_CASE("fixed inputs sit in front of the leaf-paired inputs") {
    auto net = fresh(1, 4, 6, 1, 3);
    CHECK(net.drn().inputs().size() == 3);
    RngStream rng = derive_stream(7, 1);
    REQUIRE(net.apply_mutation(MutationKind::dcn_grow_branch, rng));
    CHECK(net.drn().inputs().size() == 4);
    CHECK(net.leaf_map().size() == 1);
    CHECK(net.leaf_map()[0].second == net.drn().inputs()[3].id);

    std::vector<double> x(24 + 3, 0.0);
    x[24] = 1.0; // one-hot in the fixed block
    CHECK_NOTHROW(net.forward(x));
    const auto err = testinv::check_composite(net);
    CHECK_MESSAGE(err.empty(), err);
}

TEST_CASE("forward rejects arity mismatches") {
    auto net = fresh();
    std::vector<double> too_short(23, 0.0);
    CHECK_THROWS_AS(net.forward(too_short), ContractError);
}

TEST_CASE("perturbation touches dcn kernels and drn weights") {
    auto net = fresh();
    RngStream rng = derive_stream(8, 1);
    REQUIRE(net.apply_mutation(MutationKind::dcn_grow_branch, rng));
    // find a conv node to watch, if the branch created one
    const double bias_before = net.drn().outputs()[0].bias;
    const double w_before = net.drn().connections()[0].weight;
    RngStream p = derive_stream(9, kLabelPerturbation);
    net.perturb_weights(p);
    CHECK(net.drn().outputs()[0].bias != bias_before);
    CHECK(net.drn().connections()[0].weight != w_before);
}
