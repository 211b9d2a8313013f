#include "nevo/composite.hpp"

#include <algorithm>

#include "nevo/errors.hpp"

namespace nevo {

const char* mutation_name(MutationKind k) {
    switch (k) {
        case MutationKind::drn_grow_connection: return "drn_grow_connection";
        case MutationKind::drn_prune_connection: return "drn_prune_connection";
        case MutationKind::drn_grow_node: return "drn_grow_node";
        case MutationKind::drn_prune_node: return "drn_prune_node";
        case MutationKind::dcn_grow_branch: return "dcn_grow_branch";
        case MutationKind::dcn_prune_branch: return "dcn_prune_branch";
        case MutationKind::dcn_expand_node: return "dcn_expand_node";
        case MutationKind::dcn_contract_node: return "dcn_contract_node";
    }
    return "?";
}

CompositeNet::CompositeNet(int c, int h, int w, int n_out, RngStream& rng, int fixed_inputs)
    : dcn_(c, h, w), drn_(fixed_inputs, n_out, rng), fixed_inputs_(fixed_inputs) {
    if (n_out < 1) throw ConfigError("CompositeNet: need at least one output");
}

bool CompositeNet::mutation_applicable(MutationKind k) const {
    switch (k) {
        case MutationKind::drn_grow_connection: return drn_.can_grow_connection();
        case MutationKind::drn_prune_connection: return drn_.can_prune_connection();
        case MutationKind::drn_grow_node: return drn_.can_grow_node();
        case MutationKind::drn_prune_node: return drn_.can_prune_node();
        case MutationKind::dcn_grow_branch: return true;
        case MutationKind::dcn_prune_branch: return dcn_.can_prune_branch();
        case MutationKind::dcn_expand_node: return dcn_.can_expand_node();
        case MutationKind::dcn_contract_node: return dcn_.can_contract_node();
    }
    return false;
}

std::vector<MutationKind> CompositeNet::applicable_mutations() const {
    std::vector<MutationKind> out;
    for (int i = 0; i < 8; ++i) {
        const auto k = MutationKind(i);
        if (mutation_applicable(k)) out.push_back(k);
    }
    return out;
}

bool CompositeNet::apply_mutation(MutationKind k, RngStream& structural) {
    switch (k) {
        case MutationKind::drn_grow_connection:
            return drn_.grow_connection(structural).applied;
        case MutationKind::drn_prune_connection:
            return drn_.prune_connection(structural).applied;
        case MutationKind::drn_grow_node:
            return drn_.grow_node(structural).applied;
        case MutationKind::drn_prune_node:
            return drn_.prune_node(structural).applied;
        case MutationKind::dcn_grow_branch: {
            const auto created = dcn_.grow_branch(structural);
            const int leaf = created.back();
            const int input = drn_.add_input_node(structural);
            leaf_map_.push_back({leaf, input});
            return true;
        }
        case MutationKind::dcn_prune_branch: {
            bool applied = false;
            const auto removed = dcn_.prune_branch(structural, &applied);
            for (int leaf : removed) {
                auto it = std::find_if(leaf_map_.begin(), leaf_map_.end(),
                                       [&](const auto& p) { return p.first == leaf; });
                if (it == leaf_map_.end())
                    throw ContractError("composite: pruned leaf missing from map");
                drn_.remove_input_node(it->second);
                leaf_map_.erase(it);
            }
            return applied;
        }
        case MutationKind::dcn_expand_node:
            return dcn_.expand_node(structural).applied;
        case MutationKind::dcn_contract_node:
            return dcn_.contract_node(structural).applied;
    }
    return false;
}

MutationRecord CompositeNet::mutate(RngStream& choice, RngStream& structural) {
    MutationRecord rec;
    auto k = MutationKind(choice.uniform_int(8));
    if (!mutation_applicable(k)) {
        rec.resampled = true;
        const auto pool = applicable_mutations();
        k = pool[choice.uniform_int(pool.size())];
    }
    rec.applied = k;
    if (!apply_mutation(k, structural))
        throw ContractError("composite: applicable mutation failed to apply");
    return rec;
}

std::vector<double> CompositeNet::forward(std::span<const double> x) {
    const auto& root = dcn_.node(dcn_.root_id());
    const std::size_t image_len = root.out_shape.volume();
    if (x.size() != image_len + std::size_t(fixed_inputs_))
        throw ContractError("composite forward: input arity mismatch");

    Tensor image(root.out_shape);
    image.data.assign(x.begin(), x.begin() + image_len);
    const auto leaf_values = dcn_.forward(image);

    // leaf_map_ and the DRN's dynamic inputs share creation order; fixed
    // inputs sit in front.
    std::vector<double> drn_in(std::size_t(fixed_inputs_) + leaf_map_.size());
    for (int i = 0; i < fixed_inputs_; ++i) drn_in[i] = x[image_len + i];
    for (std::size_t m = 0; m < leaf_map_.size(); ++m) {
        const int leaf = leaf_map_[m].first;
        auto it = std::find_if(leaf_values.begin(), leaf_values.end(),
                               [&](const auto& p) { return p.first == leaf; });
        if (it == leaf_values.end()) throw ContractError("composite forward: leaf value missing");
        drn_in[std::size_t(fixed_inputs_) + m] = it->second;
    }
    return drn_.forward(drn_in);
}

void CompositeNet::reset_state() {
    drn_.reset_state();
}

void CompositeNet::perturb_weights(RngStream& rng) {
    // convolution kernels first, then the recurrent graph
    dcn_.perturb_weights(rng);
    drn_.perturb_weights(rng);
}

bool CompositeNet::operator==(const CompositeNet& other) const {
    return fixed_inputs_ == other.fixed_inputs_ && leaf_map_ == other.leaf_map_ &&
           dcn_ == other.dcn_ && drn_ == other.drn_;
}

} // namespace nevo
