#include "nevo/dcn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "nevo/errors.hpp"

namespace nevo {

DcnTree::DcnTree(int c, int h, int w) {
    if (c < 1 || h < 1 || w < 1) throw ConfigError("DcnTree: bad input shape");
    DcnNode root;
    root.id = next_id_++;
    root.kind = DcnKind::input;
    root.parent = -1;
    root.in_channels = c;
    root.out_channels = c;
    root.out_shape = {c, h, w};
    root_id_ = root.id;
    nodes_.push_back(std::move(root));
}

const DcnNode& DcnTree::node(int id) const {
    for (const auto& n : nodes_)
        if (n.id == id) return n;
    throw ContractError("DcnTree: unknown node id");
}

DcnNode& DcnTree::node_mut(int id) {
    return const_cast<DcnNode&>(node(id));
}

std::vector<int> DcnTree::leaves() const {
    std::vector<int> out;
    for (const auto& n : nodes_)
        if (is_output(n)) out.push_back(n.id);
    return out;
}

int DcnTree::next_pool_factor(int parent_id) const {
    const DcnNode& p = node(parent_id);
    if (p.kind == DcnKind::pool) throw ContractError("next_pool_factor: pool parent");
    std::vector<int> used;
    for (int c : p.children) {
        const DcnNode& child = node(c);
        if (child.kind == DcnKind::pool) used.push_back(child.pool_factor);
    }
    const int h = p.out_shape.h;
    const int w = p.out_shape.w;
    for (int f = std::min(h, w); f >= 2; --f) {
        if (h % f != 0 || w % f != 0) continue;
        if (std::find(used.begin(), used.end(), f) == used.end()) return f;
    }
    return 0;
}

int DcnTree::grow_node(int parent_id, RngStream& rng) {
    DcnNode& p = node_mut(parent_id);
    if (is_output(p)) throw ContractError("grow_node: output node cannot grow children");

    DcnNode child;
    child.id = next_id_;
    child.parent = parent_id;
    child.in_channels = p.out_channels;

    const int factor = p.kind == DcnKind::pool ? 0 : next_pool_factor(parent_id);
    if (factor >= 2) {
        child.kind = DcnKind::pool;
        child.pool_factor = factor;
        child.out_channels = child.in_channels;
        child.out_shape = {p.out_shape.c, p.out_shape.h / factor, p.out_shape.w / factor};
    } else {
        child.kind = DcnKind::conv;
        child.out_channels = 1;
        child.out_shape = {1, conv_out_dim(p.out_shape.h), conv_out_dim(p.out_shape.w)};
        child.kernel.resize(std::size_t(child.in_channels) * 9);
        for (auto& v : child.kernel) v = rng.normal();
        child.bias.push_back(rng.normal());
    }
    ++next_id_;
    p.children.push_back(child.id);
    const int id = child.id;
    nodes_.push_back(std::move(child));
    return id;
}

std::vector<int> DcnTree::grow_branch(RngStream& rng) {
    // Base set: input node plus hidden (non-output, non-root) nodes.
    std::vector<int> bases;
    for (const auto& n : nodes_)
        if (!is_output(n)) bases.push_back(n.id);
    int at = bases[rng.uniform_int(bases.size())];

    std::vector<int> created;
    for (;;) {
        at = grow_node(at, rng);
        created.push_back(at);
        if (is_output(node(at))) break;
    }
    return created;
}

int DcnTree::branch_multiplicity(const DcnNode& n) const {
    if (is_output(n)) return 0;
    if (n.id == root_id_) return int(n.children.size());
    return int(n.children.size()) - 1;
}

std::vector<int> DcnTree::branching_multiset() const {
    std::vector<int> out;
    for (const auto& n : nodes_)
        for (int i = 0; i < branch_multiplicity(n); ++i) out.push_back(n.id);
    return out;
}

bool DcnTree::can_prune_branch() const {
    for (const auto& n : nodes_)
        if (branch_multiplicity(n) > 0) return true;
    return false;
}

void DcnTree::collect_subtree(int id, std::vector<int>& out) const {
    out.push_back(id);
    for (int c : node(id).children) collect_subtree(c, out);
}

std::vector<int> DcnTree::prune_branch(RngStream& rng, bool* applied) {
    const auto multiset = branching_multiset();
    if (applied) *applied = !multiset.empty();
    if (multiset.empty()) return {};

    const int base = multiset[rng.uniform_int(multiset.size())];
    DcnNode& p = node_mut(base);
    const std::size_t child_pick = rng.uniform_int(p.children.size());
    const int child = p.children[child_pick];

    std::vector<int> doomed;
    collect_subtree(child, doomed);
    std::vector<int> removed_leaves;
    for (int id : doomed)
        if (is_output(node(id))) removed_leaves.push_back(id);
    std::sort(removed_leaves.begin(), removed_leaves.end());

    p.children.erase(p.children.begin() + child_pick);
    std::erase_if(nodes_, [&](const DcnNode& n) {
        return std::find(doomed.begin(), doomed.end(), n.id) != doomed.end();
    });
    return removed_leaves;
}

std::vector<int> DcnTree::expand_candidates() const {
    std::vector<int> out;
    for (const auto& n : nodes_) {
        if (n.kind != DcnKind::conv || is_output(n)) continue;
        bool blocked = false;
        for (int c : n.children) {
            const DcnNode& child = node(c);
            if (child.kind == DcnKind::pool && is_output(child)) {
                blocked = true;
                break;
            }
        }
        if (!blocked) out.push_back(n.id);
    }
    return out;
}

// Grows one 3x3 input slice (per output channel) in every conv consumer of
// node_id's output. Pool nodes are channel-transparent: they pass the new map
// through and the adjustment continues with their children.
void DcnTree::add_input_slice_below(int node_id, int in_pos, RngStream& rng) {
    DcnNode& n = node_mut(node_id);
    if (n.kind == DcnKind::conv) {
        std::vector<double> kernel;
        kernel.reserve(std::size_t(n.out_channels) * (n.in_channels + 1) * 9);
        for (int o = 0; o < n.out_channels; ++o) {
            const double* old_block = n.kernel.data() + std::size_t(o) * n.in_channels * 9;
            for (int i = 0; i < n.in_channels + 1; ++i) {
                if (i == in_pos) {
                    for (int k = 0; k < 9; ++k) kernel.push_back(rng.normal());
                } else {
                    const int src = i < in_pos ? i : i - 1;
                    for (int k = 0; k < 9; ++k) kernel.push_back(old_block[src * 9 + k]);
                }
            }
        }
        n.kernel = std::move(kernel);
        n.in_channels += 1;
        return;
    }
    // pool: channel count rides along, spatial dims untouched
    n.in_channels += 1;
    n.out_channels += 1;
    n.out_shape.c += 1;
    for (int c : n.children) add_input_slice_below(c, in_pos, rng);
}

void DcnTree::remove_input_slice_below(int node_id, int in_pos) {
    DcnNode& n = node_mut(node_id);
    if (n.kind == DcnKind::conv) {
        std::vector<double> kernel;
        kernel.reserve(std::size_t(n.out_channels) * (n.in_channels - 1) * 9);
        for (int o = 0; o < n.out_channels; ++o) {
            const double* old_block = n.kernel.data() + std::size_t(o) * n.in_channels * 9;
            for (int i = 0; i < n.in_channels; ++i) {
                if (i == in_pos) continue;
                for (int k = 0; k < 9; ++k) kernel.push_back(old_block[i * 9 + k]);
            }
        }
        n.kernel = std::move(kernel);
        n.in_channels -= 1;
        return;
    }
    n.in_channels -= 1;
    n.out_channels -= 1;
    n.out_shape.c -= 1;
    for (int c : n.children) remove_input_slice_below(c, in_pos);
}

MutationOutcome DcnTree::expand_node(RngStream& rng) {
    const auto candidates = expand_candidates();
    if (candidates.empty()) return {};
    const int id = candidates[rng.uniform_int(candidates.size())];
    DcnNode& n = node_mut(id);

    const int new_pos = n.out_channels; // appended as the last output map
    for (int i = 0; i < n.in_channels * 9; ++i) n.kernel.push_back(rng.normal());
    n.bias.push_back(rng.normal());
    n.out_channels += 1;
    n.out_shape.c += 1;
    for (int c : n.children) add_input_slice_below(c, new_pos, rng);
    return {true, id};
}

bool DcnTree::has_unit_spatial_pool(const DcnNode& n) const {
    for (int c : n.children) {
        const DcnNode& child = node(c);
        if (child.kind != DcnKind::pool) continue;
        if (child.out_shape.h == 1 && child.out_shape.w == 1) return true;
        if (has_unit_spatial_pool(child)) return true;
    }
    return false;
}

// Contracting a two-map node whose pool chain bottoms out at 1x1 would leave
// that pool emitting a single value while still feeding children, i.e. an
// output node that is not a leaf.
bool DcnTree::contract_would_orphan_output(const DcnNode& n) const {
    return n.out_channels == 2 && has_unit_spatial_pool(n);
}

std::vector<int> DcnTree::expanded_multiset() const {
    std::vector<int> out;
    for (const auto& n : nodes_)
        if (n.kind == DcnKind::conv)
            for (int i = 1; i < n.out_channels; ++i) out.push_back(n.id);
    return out;
}

std::vector<int> DcnTree::contract_multiset() const {
    std::vector<int> out;
    for (const auto& n : nodes_) {
        if (n.kind != DcnKind::conv || contract_would_orphan_output(n)) continue;
        for (int i = 1; i < n.out_channels; ++i) out.push_back(n.id);
    }
    return out;
}

bool DcnTree::can_contract_node() const {
    return !contract_multiset().empty();
}

MutationOutcome DcnTree::contract_node(RngStream& rng) {
    const auto multiset = contract_multiset();
    if (multiset.empty()) return {};
    const int id = multiset[rng.uniform_int(multiset.size())];
    DcnNode& n = node_mut(id);

    const int pos = int(rng.uniform_int(std::uint64_t(n.out_channels)));
    n.kernel.erase(n.kernel.begin() + std::size_t(pos) * n.in_channels * 9,
                   n.kernel.begin() + std::size_t(pos + 1) * n.in_channels * 9);
    n.bias.erase(n.bias.begin() + pos);
    n.out_channels -= 1;
    n.out_shape.c -= 1;
    for (int c : n.children) remove_input_slice_below(c, pos);
    return {true, id};
}

Tensor DcnTree::eval_node(const DcnNode& n, const Tensor& parent_value) const {
    if (n.kind == DcnKind::conv) {
        Tensor out = conv2d(parent_value, n.kernel, n.bias, n.out_channels);
        tanh_inplace(out);
        return out;
    }
    return avg_pool(parent_value, n.pool_factor);
}

void DcnTree::forward_rec(const DcnNode& n, const Tensor& value,
                          std::vector<std::pair<int, double>>& out) const {
    if (is_output(n)) {
        out.push_back({n.id, value.data[0]});
        return;
    }
    for (int c : n.children) {
        const DcnNode& child = node(c);
        forward_rec(child, eval_node(child, value), out);
    }
}

std::vector<std::pair<int, double>> DcnTree::forward(const Tensor& image) const {
    const DcnNode& root = node(root_id_);
    if (!(image.shape == root.out_shape))
        throw ContractError("dcn forward: image shape mismatch");
    std::vector<std::pair<int, double>> out;
    forward_rec(root, image, out);
    // depth-first emission visits children in creation order, but a leaf on an
    // older branch can be younger than one on a newer branch
    std::sort(out.begin(), out.end());
    return out;
}

void DcnTree::set_node_weights(int id, std::vector<double> kernel, std::vector<double> bias) {
    DcnNode& n = node_mut(id);
    if (n.kind != DcnKind::conv) throw ContractError("set_node_weights: not a conv node");
    if (kernel.size() != std::size_t(n.out_channels) * n.in_channels * 9 ||
        bias.size() != std::size_t(n.out_channels))
        throw ContractError("set_node_weights: size mismatch");
    n.kernel = std::move(kernel);
    n.bias = std::move(bias);
}

void DcnTree::perturb_weights(RngStream& rng) {
    for (auto& n : nodes_) {
        for (auto& v : n.kernel) v += rng.normal(0.1);
        for (auto& v : n.bias) v += rng.normal(0.1);
    }
}

bool DcnTree::operator==(const DcnTree& other) const {
    if (nodes_.size() != other.nodes_.size() || root_id_ != other.root_id_ ||
        next_id_ != other.next_id_)
        return false;
    auto bits = [](double a, double b) {
        return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
    };
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& a = nodes_[i];
        const auto& b = other.nodes_[i];
        if (a.id != b.id || a.kind != b.kind || a.parent != b.parent ||
            a.children != b.children || a.in_channels != b.in_channels ||
            a.out_channels != b.out_channels || a.pool_factor != b.pool_factor ||
            !(a.out_shape == b.out_shape) || a.kernel.size() != b.kernel.size() ||
            a.bias.size() != b.bias.size())
            return false;
        for (std::size_t k = 0; k < a.kernel.size(); ++k)
            if (!bits(a.kernel[k], b.kernel[k])) return false;
        for (std::size_t k = 0; k < a.bias.size(); ++k)
            if (!bits(a.bias[k], b.bias[k])) return false;
    }
    return true;
}

} // namespace nevo
