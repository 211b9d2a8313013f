#pragma once

#include <cstdint>
#include <vector>

#include "nevo/mutation.hpp"
#include "nevo/rng.hpp"
#include "nevo/tensor.hpp"

namespace nevo {

enum class DcnKind : std::uint8_t { input, conv, pool };

struct DcnNode {
    int id = 0;
    DcnKind kind = DcnKind::input;
    int parent = -1;           // -1 for the root
    std::vector<int> children; // creation order
    int in_channels = 0;
    int out_channels = 0;
    int pool_factor = 0;        // pool nodes only
    Shape out_shape;
    std::vector<double> kernel; // conv: [out][in][ky][kx], 3x3
    std::vector<double> bias;   // conv: one per output channel
};

/// Rooted tree of convolution / average-pooling nodes.
///
/// The root is the input node; a node is an output node when its out_shape is
/// exactly 1x1x1. Branches grown from a base chain downwards until they reach
/// an output node, so every non-root leaf is an output node.
class DcnTree {
public:
    DcnTree() = default;
    /// Bare input node for (c, h, w) images.
    DcnTree(int c, int h, int w);

    const std::vector<DcnNode>& nodes() const { return nodes_; }
    int root_id() const { return root_id_; }
    const DcnNode& node(int id) const;
    std::size_t node_count() const { return nodes_.size(); }
    /// Parent-child links.
    std::size_t edge_count() const { return nodes_.empty() ? 0 : nodes_.size() - 1; }

    static bool is_output(const DcnNode& n) {
        return n.kind != DcnKind::input && n.out_shape == Shape{1, 1, 1};
    }
    /// Output node ids in creation order.
    std::vector<int> leaves() const;

    /// Largest factor >= 2 dividing both spatial dims of the parent's output
    /// and not already used by one of its pool children; 0 when none is left.
    int next_pool_factor(int parent_id) const;

    /// Appends one child to parent: pool parents always get a conv child;
    /// input/conv parents get a pool child with the next available factor, or
    /// a conv child once all factors are used. Conv children start with one
    /// output channel and standard-normal weights.
    int grow_node(int parent_id, RngStream& rng);

    bool can_prune_branch() const;
    bool can_expand_node() const { return !expand_candidates().empty(); }
    bool can_contract_node() const;

    /// Samples a base among {input node} + hidden nodes, then grows nodes
    /// until an output node appears. Returns the created ids, leaf last.
    std::vector<int> grow_branch(RngStream& rng);

    /// Samples from the branching multiset, then one of the node's children;
    /// deletes that child's whole subtree. Returns the removed output-node
    /// ids in creation order, or an empty vector when inapplicable.
    std::vector<int> prune_branch(RngStream& rng, bool* applied = nullptr);

    /// Adds one output feature map to a sampled conv node and grows matching
    /// input weights in its conv consumers (looking through pool chains).
    MutationOutcome expand_node(RngStream& rng);

    /// Removes one output feature map from a node sampled proportionally to
    /// its extra maps, dropping the matching input weights in consumers.
    MutationOutcome contract_node(RngStream& rng);

    /// Depth-first evaluation: conv = cross-correlation + bias + tanh,
    /// pool = average. Returns (leaf id, scalar) pairs in creation order.
    std::vector<std::pair<int, double>> forward(const Tensor& image) const;

    void perturb_weights(RngStream& rng);

    /// Replaces a conv node's kernel and bias; sizes must match its shape.
    void set_node_weights(int id, std::vector<double> kernel, std::vector<double> bias);

    bool operator==(const DcnTree& other) const;

    /// Multiset of nodes from which branches were grown: child count for the
    /// root, child count minus one for hidden nodes (their first child arrived
    /// with the chain that created them), nothing for output nodes.
    std::vector<int> branching_multiset() const;
    /// Conv nodes listed once per output feature map beyond the first.
    std::vector<int> expanded_multiset() const;
    /// The expanded multiset minus nodes whose contraction would turn a pool
    /// descendant at unit spatial dims into a single-value output node
    /// mid-tree; contract_node samples from this.
    std::vector<int> contract_multiset() const;
    /// Conv nodes eligible for expansion: not output nodes, no output pooling
    /// child (expanding one would widen that child's single-value output).
    std::vector<int> expand_candidates() const;

private:
    friend struct DcnAccess;

    DcnNode& node_mut(int id);
    void collect_subtree(int id, std::vector<int>& out) const;
    int branch_multiplicity(const DcnNode& n) const;
    bool contract_would_orphan_output(const DcnNode& n) const;
    bool has_unit_spatial_pool(const DcnNode& n) const;
    void add_input_slice_below(int node_id, int in_pos, RngStream& rng);
    void remove_input_slice_below(int node_id, int in_pos);
    Tensor eval_node(const DcnNode& n, const Tensor& parent_value) const;
    void forward_rec(const DcnNode& n, const Tensor& value,
                     std::vector<std::pair<int, double>>& out) const;

    std::vector<DcnNode> nodes_; // creation order; ids increase monotonically
    int root_id_ = 0;
    int next_id_ = 0;
};

} // namespace nevo
