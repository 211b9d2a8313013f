#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nevo/dcn.hpp"
#include "nevo/errors.hpp"
#include "support/invariants.hpp"
#include "support/reference_nets.hpp"

using namespace nevo;

namespace {
const DcnNode& by_id(const DcnTree& t, int id) {
    return t.node(id);
}
} // namespace

TEST_CASE("pool factors hand out the largest unused divisor first") {
    DcnTree t(1, 4, 4);
    RngStream rng = derive_stream(1, 1);
    CHECK(t.next_pool_factor(t.root_id()) == 4);
    const int a = t.grow_node(t.root_id(), rng); // pool 4 -> 1x1x1 output
    CHECK(by_id(t, a).kind == DcnKind::pool);
    CHECK(by_id(t, a).pool_factor == 4);
    CHECK(DcnTree::is_output(by_id(t, a)));

    CHECK(t.next_pool_factor(t.root_id()) == 2);
    const int b = t.grow_node(t.root_id(), rng); // pool 2 -> 1x2x2 hidden
    CHECK(by_id(t, b).pool_factor == 2);
    CHECK(by_id(t, b).out_shape == Shape{1, 2, 2});
    CHECK_FALSE(DcnTree::is_output(by_id(t, b)));

    CHECK(t.next_pool_factor(t.root_id()) == 0);
    const int c = t.grow_node(t.root_id(), rng); // factors exhausted -> conv
    CHECK(by_id(t, c).kind == DcnKind::conv);
    CHECK(by_id(t, c).out_shape == Shape{1, 2, 2});
}

TEST_CASE("non-square shapes only admit factors dividing both dimensions") {
    DcnTree t(1, 4, 6);
    CHECK(t.next_pool_factor(t.root_id()) == 2);
    DcnTree unit(1, 1, 1);
    CHECK(unit.next_pool_factor(unit.root_id()) == 0);
}

TEST_CASE("pool parents always grow conv children") {
    DcnTree t(1, 4, 4);
    RngStream rng = derive_stream(2, 1);
    t.grow_node(t.root_id(), rng);            // pool 4, output
    const int p = t.grow_node(t.root_id(), rng); // pool 2, hidden
    const int child = t.grow_node(p, rng);
    CHECK(by_id(t, child).kind == DcnKind::conv);
    CHECK_THROWS_AS(t.grow_node(t.leaves()[0], rng), ContractError);
}

TEST_CASE("conv on a sub-kernel shape pads up to 3 and emits a single value") {
    DcnTree t(1, 2, 3);
    RngStream rng = derive_stream(3, 1);
    CHECK(t.next_pool_factor(t.root_id()) == 0); // no factor divides both 2 and 3
    const int c = t.grow_node(t.root_id(), rng);
    CHECK(by_id(t, c).kind == DcnKind::conv);
    CHECK(by_id(t, c).out_shape == Shape{1, 1, 1});
    CHECK(DcnTree::is_output(by_id(t, c)));
}

TEST_CASE("grow_branch on a fresh 1x4x6 tree yields pool-2 then a conv output") {
    DcnTree t(1, 4, 6);
    RngStream rng = derive_stream(4, 1);
    const auto created = t.grow_branch(rng);
    REQUIRE(created.size() == 2);
    CHECK(by_id(t, created[0]).kind == DcnKind::pool);
    CHECK(by_id(t, created[0]).pool_factor == 2);
    CHECK(by_id(t, created[0]).out_shape == Shape{1, 2, 3});
    CHECK(by_id(t, created[1]).kind == DcnKind::conv);
    CHECK(by_id(t, created[1]).out_shape == Shape{1, 1, 1});
    CHECK(t.leaves() == std::vector<int>{created[1]});
}

TEST_CASE("grow_branch on a fresh 1x4x4 tree terminates immediately") {
    DcnTree t(1, 4, 4);
    RngStream rng = derive_stream(5, 1);
    const auto created = t.grow_branch(rng);
    REQUIRE(created.size() == 1);
    CHECK(by_id(t, created[0]).pool_factor == 4);
}

TEST_CASE("branch growth is bounded by the spatial dimensions") {
    for (Seed seed = 0; seed < 20; ++seed) {
        const int h = 1 + int(seed % 9);
        const int w = 1 + int((seed * 7) % 11);
        DcnTree t(1, h, w);
        RngStream rng = derive_stream(seed, 31);
        const std::size_t bound = std::size_t((h + 1) / 2 + (w + 1) / 2 + 2);
        for (int i = 0; i < 8; ++i) {
            const auto created = t.grow_branch(rng);
            CHECK(created.size() <= bound);
        }
    }
}

TEST_CASE("branching multiset counts extra children only") {
    // Fig.-21 shape: three branches, two from the root, one from the hidden conv
    DcnTree t(1, 4, 6);
    RngStream rng = derive_stream(6, 1);
    // branch 1 from the root: pool2 -> conv output
    const int pool_hidden = t.grow_node(t.root_id(), rng);
    t.grow_node(pool_hidden, rng);
    // branch 2 from the root: conv -> pool2 -> conv output
    const int conv_hidden = t.grow_node(t.root_id(), rng);
    const int mid = t.grow_node(conv_hidden, rng);
    CHECK(by_id(t, mid).kind == DcnKind::pool);
    t.grow_node(mid, rng);
    // branch 3 from the hidden conv: conv -> conv output
    const int b3 = t.grow_node(conv_hidden, rng);
    CHECK_FALSE(DcnTree::is_output(by_id(t, b3)));
    t.grow_node(b3, rng);

    const auto multiset = t.branching_multiset();
    CHECK(multiset == std::vector<int>{t.root_id(), t.root_id(), conv_hidden});
}

TEST_CASE("pruning the only branch leaves the bare input node") {
    DcnTree t(1, 4, 6);
    RngStream rng = derive_stream(7, 1);
    t.grow_branch(rng);
    bool applied = false;
    const auto removed = t.prune_branch(rng, &applied);
    CHECK(applied);
    CHECK(removed.size() == 1);
    CHECK(t.node_count() == 1);
    CHECK(t.leaves().empty());
    CHECK_FALSE(t.can_prune_branch());
    const auto none = t.prune_branch(rng, &applied);
    CHECK_FALSE(applied);
    CHECK(none.empty());
}

TEST_CASE("pruned subtrees report exactly their output nodes") {
    for (Seed seed = 0; seed < 25; ++seed) {
        DcnTree t(1, 8, 8);
        RngStream rng = derive_stream(seed, 33);
        for (int i = 0; i < 6; ++i) t.grow_branch(rng);
        const auto leaves_before = t.leaves();
        bool applied = false;
        const auto removed = t.prune_branch(rng, &applied);
        REQUIRE(applied);
        const auto leaves_after = t.leaves();
        CHECK(leaves_before.size() == leaves_after.size() + removed.size());
        for (int id : removed) {
            CHECK(std::find(leaves_before.begin(), leaves_before.end(), id) !=
                  leaves_before.end());
            CHECK(std::find(leaves_after.begin(), leaves_after.end(), id) == leaves_after.end());
        }
    }
}

TEST_CASE("expansion is blocked by an output pooling child") {
    DcnTree t(1, 4, 4);
    RngStream rng = derive_stream(8, 1);
    t.grow_node(t.root_id(), rng); // pool4 output
    t.grow_node(t.root_id(), rng); // pool2 hidden
    const int conv = t.grow_node(t.root_id(), rng); // conv hidden (1,2,2)
    const int pool_out = t.grow_node(conv, rng);    // pool2 -> (1,1,1) output pool
    REQUIRE(by_id(t, pool_out).kind == DcnKind::pool);
    REQUIRE(DcnTree::is_output(by_id(t, pool_out)));
    CHECK(t.expand_candidates().empty());
    CHECK_FALSE(t.expand_node(rng).applied);
}

TEST_CASE("expansion propagates through pool children to their conv consumers") {
    DcnTree t(1, 4, 6);
    RngStream rng = derive_stream(9, 1);
    // branch 1: pool2 (1,2,3) -> conv output, uses up the only pool factor
    const int p0 = t.grow_node(t.root_id(), rng);
    REQUIRE(by_id(t, p0).kind == DcnKind::pool);
    t.grow_node(p0, rng);
    // branch 2: conv A (1,2,4) -> pool2 (1,1,2) -> conv B output
    const int conv = t.grow_node(t.root_id(), rng);
    REQUIRE(by_id(t, conv).kind == DcnKind::conv);
    REQUIRE(by_id(t, conv).out_shape == Shape{1, 2, 4});
    const int pool = t.grow_node(conv, rng);
    REQUIRE(by_id(t, pool).kind == DcnKind::pool);
    REQUIRE_FALSE(DcnTree::is_output(by_id(t, pool)));
    const int leafc = t.grow_node(pool, rng);
    REQUIRE(DcnTree::is_output(by_id(t, leafc)));

    const auto candidates = t.expand_candidates();
    REQUIRE(candidates == std::vector<int>{conv});
    CHECK(t.expand_node(rng).applied);

    CHECK(by_id(t, conv).out_channels == 2);
    CHECK(by_id(t, conv).out_shape == Shape{2, 2, 4});
    CHECK(by_id(t, pool).out_shape == Shape{2, 1, 2});
    CHECK(by_id(t, pool).in_channels == 2);
    CHECK(by_id(t, leafc).in_channels == 2);
    CHECK(by_id(t, leafc).kernel.size() == 2 * 9);
    CHECK(by_id(t, leafc).out_shape == Shape{1, 1, 1}); // still an output node

    // expanded multiset lists the node once per extra map
    CHECK(t.expanded_multiset() == std::vector<int>{conv});
    const auto err = testinv::check_dcn(t);
    CHECK_MESSAGE(err.empty(), err);
}

TEST_CASE("contraction undoes expansion shape-wise") {
    DcnTree t(1, 6, 8);
    RngStream rng = derive_stream(10, 1);
    t.grow_node(t.root_id(), rng);                  // pool2
    const int conv = t.grow_node(t.root_id(), rng); // conv hidden
    const int leafc = t.grow_node(t.grow_node(conv, rng), rng);
    REQUIRE(DcnTree::is_output(by_id(t, leafc)));

    std::vector<std::pair<int, Shape>> shapes_before;
    std::vector<std::pair<int, std::size_t>> kernels_before;
    for (const auto& n : t.nodes()) {
        shapes_before.push_back({n.id, n.out_shape});
        kernels_before.push_back({n.id, n.kernel.size()});
    }
    REQUIRE(t.expand_node(rng).applied);
    REQUIRE(t.contract_node(rng).applied); // only one expanded node to pick
    for (const auto& n : t.nodes()) {
        CHECK(std::find(shapes_before.begin(), shapes_before.end(),
                        std::make_pair(n.id, n.out_shape)) != shapes_before.end());
        CHECK(std::find(kernels_before.begin(), kernels_before.end(),
                        std::make_pair(n.id, n.kernel.size())) != kernels_before.end());
    }
    CHECK(t.expanded_multiset().empty());
    CHECK_FALSE(t.contract_node(rng).applied);
}

TEST_CASE("forward: zeroed weights give tanh(0) = 0 at every leaf") {
    DcnTree t(1, 4, 6);
    RngStream rng = derive_stream(11, 1);
    for (int i = 0; i < 3; ++i) t.grow_branch(rng);
    for (const auto& n : t.nodes())
        if (n.kind == DcnKind::conv)
            t.set_node_weights(n.id, std::vector<double>(n.kernel.size(), 0.0),
                               std::vector<double>(n.bias.size(), 0.0));
    Tensor img({1, 4, 6});
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = double(i) * 0.1;
    for (const auto& [leaf, value] : t.forward(img)) CHECK(value == 0.0);
}

TEST_CASE("average pooling of [[1,2],[3,4]] is 2.5 with no activation") {
    Tensor img({1, 2, 2}, {1, 2, 3, 4});
    const Tensor out = avg_pool(img, 2);
    CHECK(out.shape == Shape{1, 1, 1});
    CHECK(out.data[0] == 2.5);

    DcnTree t(1, 2, 2);
    RngStream rng = derive_stream(12, 1);
    const int pool = t.grow_node(t.root_id(), rng);
    REQUIRE(by_id(t, pool).kind == DcnKind::pool);
    const auto leaves = t.forward(img);
    REQUIRE(leaves.size() == 1);
    CHECK(leaves[0].second == 2.5);
}

TEST_CASE("forward agrees with the brute-force reference on random trees") {
    for (Seed seed = 0; seed < 20; ++seed) {
        DcnTree t(seed % 2 == 0 ? 1 : 3, 8, 8);
        RngStream rng = derive_stream(seed, 35);
        for (int i = 0; i < 10; ++i) {
            switch (rng.uniform_int(4)) {
                case 0: t.grow_branch(rng); break;
                case 1: t.prune_branch(rng); break;
                case 2: t.expand_node(rng); break;
                default: t.contract_node(rng); break;
            }
        }
        const auto& root = t.node(t.root_id());
        Tensor img(root.out_shape);
        for (auto& v : img.data) v = rng.normal();

        const auto got = t.forward(img);
        const auto want = testref::dcn_reference_forward(t, img.data);
        REQUIRE(got.size() == want.size());
        for (const auto& [leaf, value] : got) {
            REQUIRE(want.count(leaf) == 1);
            CHECK(value == doctest::Approx(want.at(leaf)).epsilon(1e-9));
        }
    }
}

TEST_CASE("forward rejects mismatched image shapes") {
    DcnTree t(1, 4, 4);
    Tensor img({1, 4, 6});
    CHECK_THROWS_AS(t.forward(img), ContractError);
}

TEST_CASE("random mutation storms keep shapes, factors and leaves coherent") {
    for (Seed seed = 0; seed < 30; ++seed) {
        DcnTree t(1 + int(seed % 3), 4 + int(seed % 5), 4 + int((seed * 3) % 5));
        RngStream rng = derive_stream(seed, 37);
        for (int step = 0; step < 40; ++step) {
            switch (rng.uniform_int(4)) {
                case 0: t.grow_branch(rng); break;
                case 1: t.prune_branch(rng); break;
                case 2: t.expand_node(rng); break;
                default: t.contract_node(rng); break;
            }
            const auto err = testinv::check_dcn(t);
            CHECK_MESSAGE(err.empty(), err);
        }
    }
}
