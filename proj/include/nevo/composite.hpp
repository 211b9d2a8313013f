#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nevo/dcn.hpp"
#include "nevo/drn.hpp"

namespace nevo {

/// The eight structural mutations of a composite network. The first four act
/// on the DRN, the last four on the DCN.
enum class MutationKind : std::uint8_t {
    drn_grow_connection = 0,
    drn_prune_connection = 1,
    drn_grow_node = 2,
    drn_prune_node = 3,
    dcn_grow_branch = 4,
    dcn_prune_branch = 5,
    dcn_expand_node = 6,
    dcn_contract_node = 7,
};

const char* mutation_name(MutationKind k);

struct MutationRecord {
    MutationKind applied{};
    bool resampled = false; // first draw was inapplicable
};

/// DCN front-end feeding a DRN back-end. Every DCN output node (leaf) is
/// paired with one DRN input node; the pairing is created by grow-branch and
/// dissolved by prune-branch, so the map stays a bijection. `fixed_inputs`
/// DRN inputs created at construction sit before all leaf-paired inputs and
/// are never touched by mutations.
class CompositeNet {
public:
    CompositeNet() = default;
    CompositeNet(int c, int h, int w, int n_out, RngStream& rng, int fixed_inputs = 0);

    const DcnTree& dcn() const { return dcn_; }
    const DrnGraph& drn() const { return drn_; }
    DcnTree& dcn() { return dcn_; }
    DrnGraph& drn() { return drn_; }
    const std::vector<std::pair<int, int>>& leaf_map() const { return leaf_map_; }
    int fixed_inputs() const { return fixed_inputs_; }

    bool mutation_applicable(MutationKind k) const;
    std::vector<MutationKind> applicable_mutations() const;

    /// Samples one of the eight mutations uniformly; when the draw is
    /// inapplicable in the current structure, resamples uniformly among the
    /// applicable ones (grow mutations keep that set nonempty). Keeps the
    /// leaf map in sync with branch growth and pruning.
    MutationRecord mutate(RngStream& choice, RngStream& structural);

    /// Applies one specific mutation; the composite bookkeeping is the same
    /// as in mutate(). Returns false when inapplicable.
    bool apply_mutation(MutationKind k, RngStream& structural);

    /// image (c*h*w values) followed by fixed_inputs scalars.
    std::vector<double> forward(std::span<const double> x);
    void reset_state();
    void perturb_weights(RngStream& rng);

    std::size_t node_count() const { return dcn_.node_count() + drn_.node_count(); }
    std::size_t connection_count() const { return dcn_.edge_count() + drn_.connection_count(); }

    bool operator==(const CompositeNet& other) const;

private:
    friend struct CompositeAccess;

    DcnTree dcn_;
    DrnGraph drn_;
    std::vector<std::pair<int, int>> leaf_map_; // (dcn leaf, drn input), leaf creation order
    int fixed_inputs_ = 0;
};

} // namespace nevo
