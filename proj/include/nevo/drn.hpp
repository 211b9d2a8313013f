#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nevo/mutation.hpp"
#include "nevo/rng.hpp"

namespace nevo {

enum class NodeRole : std::uint8_t { input, hidden, output };

/// Delivery phase of a connection, fixed at creation time: same_pass when the
/// source evaluates strictly earlier than the destination, next_pass otherwise
/// (the destination then reads the source's value buffered from the previous
/// pass). Later node insertions never reclassify an existing connection.
enum class Phase : std::uint8_t { same_pass, next_pass };

struct DrnNode {
    int id = 0;
    NodeRole role = NodeRole::hidden;
    double bias = 0.0;  // always 0 for input nodes
    double state = 0.0; // last emitted value
};

struct DrnConnection {
    int id = 0; // creation counter; parallel duplicates are told apart by it
    int src = 0;
    int dst = 0;
    double weight = 0.0;
    Phase phase = Phase::same_pass;
};

/// Directed layered graph of scalar nodes with a recurrent state buffer.
///
/// Evaluation order is: input nodes in creation order, then hidden nodes in
/// creation order, then output nodes in creation order. Hidden nodes are kept
/// alive only while they both receive and emit information; cascade deletion
/// enforces this after every pruning operation.
class DrnGraph {
public:
    DrnGraph() = default;

    /// n_in input and n_out output nodes, no hidden nodes, no connections.
    /// Output biases are drawn from the standard normal.
    DrnGraph(int n_in, int n_out, RngStream& rng);

    const std::vector<DrnNode>& inputs() const { return inputs_; }
    const std::vector<DrnNode>& hidden() const { return hidden_; }
    const std::vector<DrnNode>& outputs() const { return outputs_; }
    const std::vector<DrnConnection>& connections() const { return connections_; }

    std::size_t node_count() const { return inputs_.size() + hidden_.size() + outputs_.size(); }
    std::size_t connection_count() const { return connections_.size(); }

    /// 0-based position of a node in the evaluation order.
    int eval_position(int node_id) const;
    const DrnNode* find_node(int node_id) const;

    /// All input nodes plus every node with at least one in-connection.
    std::vector<int> receiving_nodes() const;
    /// Hidden and output node ids, in evaluation order.
    std::vector<int> hidden_and_output_nodes() const;

    bool can_grow_connection() const;
    bool can_prune_connection() const { return !connections_.empty(); }
    bool can_grow_node() const;
    bool can_prune_node() const { return !hidden_.empty(); }

    // Structural mutations. Each returns applied=false when its own
    // precondition does not hold so the caller can resample.
    MutationOutcome grow_connection(RngStream& rng);
    MutationOutcome prune_connection(RngStream& rng);
    MutationOutcome grow_node(RngStream& rng);
    MutationOutcome prune_node(RngStream& rng);

    /// New input node wired to a uniformly sampled hidden or output node.
    /// Requires at least one hidden or output node.
    int add_input_node(RngStream& rng);
    /// Removes an input node and its connections, then cascade-deletes
    /// orphaned hidden nodes.
    void remove_input_node(int node_id);

    // Deterministic cores used by the sampling mutations above; exposed so
    // exact scenarios can be built without steering the RNG.
    int add_connection(int src, int dst, double weight);
    void delete_connection_between(int src, int dst);
    int insert_hidden_node(int a, int b, int c, double bias,
                           double w_a, double w_b, double w_c);
    void delete_hidden_node(int node_id);
    void set_bias(int node_id, double bias);
    /// index into connections() storage order
    void set_connection_weight(std::size_t index, double weight);

    /// Adds N(0, 0.01) to every weight and every bias: connection weights in
    /// creation order first, then hidden and output biases in evaluation order.
    void perturb_weights(RngStream& rng);

    /// One network pass. inputs.size() must equal the input node count.
    /// Returns output node values in creation order.
    std::vector<double> forward(std::span<const double> input_values);

    /// Zeroes the recurrent state buffer (episode boundary).
    void reset_state();

    bool operator==(const DrnGraph& other) const;

private:
    friend struct DrnAccess;

    DrnNode* find_node_mut(int node_id);
    void cascade_prune();
    void erase_node(int node_id);
    void erase_connections_touching(int node_id);
    int in_degree(int node_id) const;
    int out_degree(int node_id) const;
    Phase phase_for(int src, int dst) const;

    std::vector<DrnNode> inputs_;
    std::vector<DrnNode> hidden_;
    std::vector<DrnNode> outputs_;
    std::vector<DrnConnection> connections_;
    int next_node_id_ = 0;
    int next_conn_id_ = 0;

    // Flat evaluation plan, rebuilt lazily after structural changes.
    struct PlanEdge {
        int src_slot;
        double weight;
        bool next_pass;
    };
    struct PlanNode {
        int seg; // 0 inputs, 1 hidden, 2 outputs
        int idx;
        NodeRole role;
        double bias;
        int edges_begin;
        int edges_end;
    };
    bool plan_dirty_ = true;
    std::vector<PlanNode> plan_nodes_;
    std::vector<PlanEdge> plan_edges_;
    std::vector<double> cur_values_;
    std::vector<double> prev_values_;
    void rebuild_plan();
    void mark_dirty() { plan_dirty_ = true; }
};

} // namespace nevo
