#include "nevo/drn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "nevo/errors.hpp"

namespace nevo {

DrnGraph::DrnGraph(int n_in, int n_out, RngStream& rng) {
    if (n_out < 1) throw ConfigError("DrnGraph: need at least one output node");
    if (n_in < 0) throw ConfigError("DrnGraph: negative input count");
    for (int i = 0; i < n_in; ++i)
        inputs_.push_back({next_node_id_++, NodeRole::input, 0.0, 0.0});
    for (int i = 0; i < n_out; ++i)
        outputs_.push_back({next_node_id_++, NodeRole::output, rng.normal(), 0.0});
}

int DrnGraph::eval_position(int node_id) const {
    int pos = 0;
    for (const auto& n : inputs_) {
        if (n.id == node_id) return pos;
        ++pos;
    }
    for (const auto& n : hidden_) {
        if (n.id == node_id) return pos;
        ++pos;
    }
    for (const auto& n : outputs_) {
        if (n.id == node_id) return pos;
        ++pos;
    }
    throw ContractError("eval_position: unknown node id");
}

const DrnNode* DrnGraph::find_node(int node_id) const {
    for (const auto& n : inputs_)
        if (n.id == node_id) return &n;
    for (const auto& n : hidden_)
        if (n.id == node_id) return &n;
    for (const auto& n : outputs_)
        if (n.id == node_id) return &n;
    return nullptr;
}

DrnNode* DrnGraph::find_node_mut(int node_id) {
    return const_cast<DrnNode*>(find_node(node_id));
}

int DrnGraph::in_degree(int node_id) const {
    int d = 0;
    for (const auto& c : connections_)
        if (c.dst == node_id) ++d;
    return d;
}

int DrnGraph::out_degree(int node_id) const {
    int d = 0;
    for (const auto& c : connections_)
        if (c.src == node_id) ++d;
    return d;
}

std::vector<int> DrnGraph::receiving_nodes() const {
    std::vector<int> out;
    std::unordered_set<int> with_in;
    for (const auto& c : connections_) with_in.insert(c.dst);
    for (const auto& n : inputs_) out.push_back(n.id);
    for (const auto& n : hidden_)
        if (with_in.count(n.id)) out.push_back(n.id);
    for (const auto& n : outputs_)
        if (with_in.count(n.id)) out.push_back(n.id);
    return out;
}

std::vector<int> DrnGraph::hidden_and_output_nodes() const {
    std::vector<int> out;
    for (const auto& n : hidden_) out.push_back(n.id);
    for (const auto& n : outputs_) out.push_back(n.id);
    return out;
}

bool DrnGraph::can_grow_connection() const {
    if (hidden_.empty() && outputs_.empty()) return false;
    if (!inputs_.empty()) return true;
    return !connections_.empty();
}

bool DrnGraph::can_grow_node() const {
    if (hidden_.empty() && outputs_.empty()) return false;
    return receiving_nodes().size() >= 2;
}

Phase DrnGraph::phase_for(int src, int dst) const {
    return eval_position(src) < eval_position(dst) ? Phase::same_pass : Phase::next_pass;
}

int DrnGraph::add_connection(int src, int dst, double weight) {
    const DrnNode* s = find_node(src);
    const DrnNode* d = find_node(dst);
    if (!s || !d) throw ContractError("add_connection: unknown endpoint");
    if (d->role == NodeRole::input) throw ContractError("add_connection: input node as destination");
    connections_.push_back({next_conn_id_++, src, dst, weight, phase_for(src, dst)});
    mark_dirty();
    return connections_.back().id;
}

void DrnGraph::delete_connection_between(int src, int dst) {
    // Parallel duplicates: the earliest-created one goes.
    auto it = std::find_if(connections_.begin(), connections_.end(),
                           [&](const DrnConnection& c) { return c.src == src && c.dst == dst; });
    if (it == connections_.end()) throw ContractError("delete_connection_between: no such connection");
    connections_.erase(it);
    cascade_prune();
    mark_dirty();
}

MutationOutcome DrnGraph::grow_connection(RngStream& rng) {
    const auto receiving = receiving_nodes();
    if (receiving.empty()) return {};
    const auto targets = hidden_and_output_nodes();
    if (targets.empty()) return {};
    const int src = receiving[rng.uniform_int(receiving.size())];
    const int dst = targets[rng.uniform_int(targets.size())];
    add_connection(src, dst, rng.normal());
    return {true, dst};
}

MutationOutcome DrnGraph::prune_connection(RngStream& rng) {
    if (connections_.empty()) return {};
    // Emitting multiset: one entry per out-connection, so one uniform draw
    // over connections picks the source with probability proportional to its
    // out-degree.
    const int src = connections_[rng.uniform_int(connections_.size())].src;
    std::vector<int> out_nodes; // distinct, ordered by first occurrence
    for (const auto& c : connections_) {
        if (c.src != src) continue;
        if (std::find(out_nodes.begin(), out_nodes.end(), c.dst) == out_nodes.end())
            out_nodes.push_back(c.dst);
    }
    const int dst = out_nodes[rng.uniform_int(out_nodes.size())];
    delete_connection_between(src, dst);
    return {true, -1};
}

int DrnGraph::insert_hidden_node(int a, int b, int c, double bias,
                                 double w_a, double w_b, double w_c) {
    if (!find_node(a) || !find_node(b) || !find_node(c))
        throw ContractError("insert_hidden_node: unknown endpoint");
    const int h = next_node_id_++;
    hidden_.push_back({h, NodeRole::hidden, bias, 0.0});
    add_connection(a, h, w_a);
    add_connection(b, h, w_b);
    add_connection(h, c, w_c);
    return h;
}

MutationOutcome DrnGraph::grow_node(RngStream& rng) {
    const auto receiving = receiving_nodes();
    if (receiving.size() < 2) return {};
    const auto targets = hidden_and_output_nodes();
    if (targets.empty()) return {};
    const std::size_t ia = rng.uniform_int(receiving.size());
    // second draw is over the receiving set minus the first pick
    std::size_t ib = rng.uniform_int(receiving.size() - 1);
    if (ib >= ia) ++ib;
    const int c = targets[rng.uniform_int(targets.size())];
    const double bias = rng.normal();
    const double w_a = rng.normal();
    const double w_b = rng.normal();
    const double w_c = rng.normal();
    const int h = insert_hidden_node(receiving[ia], receiving[ib], c, bias, w_a, w_b, w_c);
    return {true, h};
}

void DrnGraph::delete_hidden_node(int node_id) {
    auto it = std::find_if(hidden_.begin(), hidden_.end(),
                           [&](const DrnNode& n) { return n.id == node_id; });
    if (it == hidden_.end()) throw ContractError("delete_hidden_node: not a hidden node");
    hidden_.erase(it);
    erase_connections_touching(node_id);
    cascade_prune();
    mark_dirty();
}

MutationOutcome DrnGraph::prune_node(RngStream& rng) {
    if (hidden_.empty()) return {};
    const int victim = hidden_[rng.uniform_int(hidden_.size())].id;
    delete_hidden_node(victim);
    return {true, victim};
}

int DrnGraph::add_input_node(RngStream& rng) {
    const auto targets = hidden_and_output_nodes();
    if (targets.empty()) throw ContractError("add_input_node: no hidden or output node to connect to");
    const int id = next_node_id_++;
    inputs_.push_back({id, NodeRole::input, 0.0, 0.0});
    const int dst = targets[rng.uniform_int(targets.size())];
    add_connection(id, dst, rng.normal());
    return id;
}

void DrnGraph::remove_input_node(int node_id) {
    auto it = std::find_if(inputs_.begin(), inputs_.end(),
                           [&](const DrnNode& n) { return n.id == node_id; });
    if (it == inputs_.end()) throw ContractError("remove_input_node: not an input node");
    inputs_.erase(it);
    erase_connections_touching(node_id);
    cascade_prune();
    mark_dirty();
}

void DrnGraph::erase_connections_touching(int node_id) {
    std::erase_if(connections_, [&](const DrnConnection& c) {
        return c.src == node_id || c.dst == node_id;
    });
}

void DrnGraph::cascade_prune() {
    // A hidden node must both receive and emit; self-loops count for both.
    // Each round removes at least one node, so this terminates.
    for (;;) {
        int victim = -1;
        for (const auto& n : hidden_) {
            if (in_degree(n.id) == 0 || out_degree(n.id) == 0) {
                victim = n.id;
                break;
            }
        }
        if (victim < 0) break;
        hidden_.erase(std::find_if(hidden_.begin(), hidden_.end(),
                                   [&](const DrnNode& n) { return n.id == victim; }));
        erase_connections_touching(victim);
    }
    mark_dirty();
}

void DrnGraph::set_bias(int node_id, double bias) {
    DrnNode* n = find_node_mut(node_id);
    if (!n) throw ContractError("set_bias: unknown node");
    if (n->role == NodeRole::input) throw ContractError("set_bias: input nodes carry no bias");
    n->bias = bias;
    mark_dirty();
}

void DrnGraph::set_connection_weight(std::size_t index, double weight) {
    if (index >= connections_.size()) throw ContractError("set_connection_weight: bad index");
    connections_[index].weight = weight;
    mark_dirty();
}

void DrnGraph::perturb_weights(RngStream& rng) {
    for (auto& c : connections_) c.weight += rng.normal(0.1);
    for (auto& n : hidden_) n.bias += rng.normal(0.1);
    for (auto& n : outputs_) n.bias += rng.normal(0.1);
    mark_dirty();
}

void DrnGraph::rebuild_plan() {
    plan_nodes_.clear();
    plan_edges_.clear();
    std::unordered_map<int, int> slot_of;
    auto add_segment = [&](const std::vector<DrnNode>& seg, int seg_no) {
        for (std::size_t i = 0; i < seg.size(); ++i) {
            slot_of[seg[i].id] = int(plan_nodes_.size());
            plan_nodes_.push_back({seg_no, int(i), seg[i].role, seg[i].bias, 0, 0});
        }
    };
    add_segment(inputs_, 0);
    add_segment(hidden_, 1);
    add_segment(outputs_, 2);

    // Bucket in-edges per destination, preserving connection creation order.
    std::vector<std::vector<PlanEdge>> incoming(plan_nodes_.size());
    for (const auto& c : connections_)
        incoming[slot_of.at(c.dst)].push_back(
            {slot_of.at(c.src), c.weight, c.phase == Phase::next_pass});
    for (std::size_t i = 0; i < plan_nodes_.size(); ++i) {
        plan_nodes_[i].edges_begin = int(plan_edges_.size());
        plan_edges_.insert(plan_edges_.end(), incoming[i].begin(), incoming[i].end());
        plan_nodes_[i].edges_end = int(plan_edges_.size());
    }
    cur_values_.assign(plan_nodes_.size(), 0.0);
    prev_values_.assign(plan_nodes_.size(), 0.0);
    plan_dirty_ = false;
}

std::vector<double> DrnGraph::forward(std::span<const double> input_values) {
    if (input_values.size() != inputs_.size())
        throw ContractError("drn forward: input arity mismatch");
    if (plan_dirty_) rebuild_plan();

    auto node_at = [&](const PlanNode& pn) -> DrnNode& {
        switch (pn.seg) {
            case 0: return inputs_[pn.idx];
            case 1: return hidden_[pn.idx];
            default: return outputs_[pn.idx];
        }
    };
    for (std::size_t i = 0; i < plan_nodes_.size(); ++i)
        prev_values_[i] = node_at(plan_nodes_[i]).state;
    for (std::size_t i = 0; i < plan_nodes_.size(); ++i) {
        const PlanNode& pn = plan_nodes_[i];
        if (pn.role == NodeRole::input) {
            cur_values_[i] = input_values[i]; // inputs propagate untransformed
            continue;
        }
        double acc = pn.bias;
        for (int e = pn.edges_begin; e < pn.edges_end; ++e) {
            const PlanEdge& edge = plan_edges_[e];
            acc += edge.weight * (edge.next_pass ? prev_values_[edge.src_slot]
                                                 : cur_values_[edge.src_slot]);
        }
        cur_values_[i] = std::tanh(acc);
    }
    for (std::size_t i = 0; i < plan_nodes_.size(); ++i)
        node_at(plan_nodes_[i]).state = cur_values_[i];

    std::vector<double> out(outputs_.size());
    const std::size_t base = inputs_.size() + hidden_.size();
    for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = cur_values_[base + i];
    return out;
}

void DrnGraph::reset_state() {
    for (auto& n : inputs_) n.state = 0.0;
    for (auto& n : hidden_) n.state = 0.0;
    for (auto& n : outputs_) n.state = 0.0;
}

namespace {

bool bits_equal(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool nodes_equal(const std::vector<DrnNode>& a, const std::vector<DrnNode>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].id != b[i].id || a[i].role != b[i].role) return false;
        if (!bits_equal(a[i].bias, b[i].bias) || !bits_equal(a[i].state, b[i].state))
            return false;
    }
    return true;
}

} // namespace

bool DrnGraph::operator==(const DrnGraph& other) const {
    if (!nodes_equal(inputs_, other.inputs_) || !nodes_equal(hidden_, other.hidden_) ||
        !nodes_equal(outputs_, other.outputs_))
        return false;
    if (connections_.size() != other.connections_.size()) return false;
    for (std::size_t i = 0; i < connections_.size(); ++i) {
        const auto& a = connections_[i];
        const auto& b = other.connections_[i];
        if (a.id != b.id || a.src != b.src || a.dst != b.dst || a.phase != b.phase)
            return false;
        if (!bits_equal(a.weight, b.weight)) return false;
    }
    return next_node_id_ == other.next_node_id_ && next_conn_id_ == other.next_conn_id_;
}

} // namespace nevo
