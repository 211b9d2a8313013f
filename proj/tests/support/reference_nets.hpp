#pragma once

// Brute-force reference evaluators, independent of the library's cached /
// planned forward paths. They recompute everything from the public structure
// on every call.

#include <cmath>
#include <map>
#include <vector>

#include "nevo/dcn.hpp"
#include "nevo/drn.hpp"

namespace testref {

/// Direct evaluation of one DRN pass from an explicit state map. Returns the
/// output values and fills `state_after` with every node's emitted value.
inline std::vector<double> drn_reference_pass(const nevo::DrnGraph& g,
                                              const std::vector<double>& inputs,
                                              const std::map<int, double>& state_before,
                                              std::map<int, double>* state_after) {
    std::vector<const nevo::DrnNode*> order;
    for (const auto& n : g.inputs()) order.push_back(&n);
    for (const auto& n : g.hidden()) order.push_back(&n);
    for (const auto& n : g.outputs()) order.push_back(&n);

    std::map<int, double> value;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto* node = order[i];
        if (node->role == nevo::NodeRole::input) {
            value[node->id] = inputs.at(i);
            continue;
        }
        double acc = node->bias;
        for (const auto& c : g.connections()) {
            if (c.dst != node->id) continue;
            if (c.phase == nevo::Phase::same_pass) {
                acc += c.weight * value.at(c.src);
            } else {
                const auto it = state_before.find(c.src);
                acc += c.weight * (it == state_before.end() ? 0.0 : it->second);
            }
        }
        value[node->id] = std::tanh(acc);
    }
    if (state_after) *state_after = value;
    std::vector<double> out;
    for (const auto& n : g.outputs()) out.push_back(value.at(n.id));
    return out;
}

/// Naive tensor evaluation of a whole DCN by recursion, with its own padding,
/// convolution and pooling loops.
struct RefTensor {
    int c = 0, h = 0, w = 0;
    std::vector<double> v;
    double at(int ci, int y, int x) const { return v[(std::size_t(ci) * h + y) * w + x]; }
    double& at(int ci, int y, int x) { return v[(std::size_t(ci) * h + y) * w + x]; }
};

inline RefTensor ref_pad3(const RefTensor& in) {
    const int ph = in.h < 3 ? 3 : in.h;
    const int pw = in.w < 3 ? 3 : in.w;
    if (ph == in.h && pw == in.w) return in;
    RefTensor out{in.c, ph, pw, std::vector<double>(std::size_t(in.c) * ph * pw, 0.0)};
    const int top = (ph - in.h) / 2;
    const int left = (pw - in.w) / 2;
    for (int c = 0; c < in.c; ++c)
        for (int y = 0; y < in.h; ++y)
            for (int x = 0; x < in.w; ++x) out.at(c, y + top, x + left) = in.at(c, y, x);
    return out;
}

inline RefTensor ref_eval_node(const nevo::DcnNode& n, const RefTensor& parent) {
    if (n.kind == nevo::DcnKind::pool) {
        const int f = n.pool_factor;
        RefTensor out{parent.c, parent.h / f, parent.w / f,
                      std::vector<double>(std::size_t(parent.c) * (parent.h / f) * (parent.w / f),
                                          0.0)};
        for (int c = 0; c < out.c; ++c)
            for (int y = 0; y < out.h; ++y)
                for (int x = 0; x < out.w; ++x) {
                    double acc = 0;
                    for (int dy = 0; dy < f; ++dy)
                        for (int dx = 0; dx < f; ++dx)
                            acc += parent.at(c, y * f + dy, x * f + dx);
                    out.at(c, y, x) = acc / (double(f) * f);
                }
        return out;
    }
    const RefTensor padded = ref_pad3(parent);
    const int oh = padded.h - 2, ow = padded.w - 2;
    RefTensor out{n.out_channels, oh, ow,
                  std::vector<double>(std::size_t(n.out_channels) * oh * ow, 0.0)};
    for (int o = 0; o < n.out_channels; ++o)
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x) {
                double acc = n.bias[std::size_t(o)];
                for (int i = 0; i < n.in_channels; ++i)
                    for (int ky = 0; ky < 3; ++ky)
                        for (int kx = 0; kx < 3; ++kx)
                            acc += n.kernel[((std::size_t(o) * n.in_channels + i) * 3 + ky) * 3 +
                                            kx] *
                                   padded.at(i, y + ky, x + kx);
                out.at(o, y, x) = std::tanh(acc);
            }
    return out;
}

inline void ref_dcn_rec(const nevo::DcnTree& t, const nevo::DcnNode& n, const RefTensor& value,
                        std::map<int, double>& leaves) {
    if (nevo::DcnTree::is_output(n)) {
        leaves[n.id] = value.v[0];
        return;
    }
    for (int child : n.children) {
        const auto& c = t.node(child);
        ref_dcn_rec(t, c, ref_eval_node(c, value), leaves);
    }
}

inline std::map<int, double> dcn_reference_forward(const nevo::DcnTree& t,
                                                   const std::vector<double>& image) {
    const auto& root = t.node(t.root_id());
    RefTensor in{root.out_shape.c, root.out_shape.h, root.out_shape.w, image};
    std::map<int, double> leaves;
    ref_dcn_rec(t, root, in, leaves);
    return leaves;
}

} // namespace testref
