#pragma once

#include <span>
#include <vector>

#include "nevo/rng.hpp"
#include "nevo/tensor.hpp"

namespace nevo {

/// Fixed-topology baseline. Two variants:
///  - scalar: three-layer feedforward net (in, hidden, out), tanh throughout;
///  - pixel: conv 3x3 (c -> 8) + tanh, 2x2 average pool when both spatial dims
///    are even, conv 3x3 (8 -> 16) + tanh, global average per channel, then
///    the same hidden/output layers as the scalar variant.
/// With `recurrent` set, the hidden layer feeds back onto itself (used by
/// discriminators). `fixed_inputs` extra scalars (e.g. a one-hot action) are
/// concatenated to the hidden layer's input in the pixel variant.
/// Only the weights ever change; the topology is immutable.
class StaticNet {
public:
    StaticNet() = default;
    /// Scalar variant. widths = {in, hidden, out}.
    StaticNet(const std::vector<int>& widths, bool recurrent, RngStream& rng);
    /// Pixel variant.
    StaticNet(Shape in_shape, int fixed_inputs, int hidden, int n_out, bool recurrent,
              RngStream& rng);

    bool pixel() const { return pixel_; }
    bool recurrent() const { return recurrent_; }
    Shape input_shape() const { return in_shape_; }
    int fixed_inputs() const { return fixed_inputs_; }
    int input_width() const { return in_width_; }
    int hidden_width() const { return hidden_; }
    int output_width() const { return n_out_; }

    /// Scalar: x must have in widths[0] values. Pixel: the flattened image
    /// followed by `fixed_inputs` scalars.
    std::vector<double> forward(std::span<const double> x);
    void reset_state();

    void perturb_weights(RngStream& rng);

    std::size_t parameter_count() const;
    bool operator==(const StaticNet& other) const;

    // flat parameter blocks, exposed for serialization
    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }
    const std::vector<double>& hidden_state() const { return state_; }
    void set_hidden_state(std::vector<double> s) { state_ = std::move(s); }

private:
    void init_params(RngStream& rng);
    std::vector<double> trunk_features(std::span<const double> x) const;

    bool pixel_ = false;
    bool recurrent_ = false;
    Shape in_shape_;       // pixel only
    int fixed_inputs_ = 0; // pixel only
    int in_width_ = 0;     // scalar: widths[0]; pixel: trunk features + fixed
    int hidden_ = 0;
    int n_out_ = 0;

    // parameter layout, in order:
    //   pixel trunk: conv1 (8*c*9), b1 (8), conv2 (16*8*9), b2 (16)
    //   W_h (hidden x in_width), b_h (hidden)
    //   W_r (hidden x hidden)            when recurrent
    //   W_o (n_out x hidden), b_o (n_out)
    std::vector<double> params_;
    std::vector<double> state_; // last hidden activation
    std::size_t off_wh_ = 0, off_bh_ = 0, off_wr_ = 0, off_wo_ = 0, off_bo_ = 0;
    bool pool_after_conv1_ = false;
};

} // namespace nevo
