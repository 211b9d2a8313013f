#include "nevo/static_net.hpp"

#include <bit>
#include <cmath>

#include "nevo/errors.hpp"

namespace nevo {

StaticNet::StaticNet(const std::vector<int>& widths, bool recurrent, RngStream& rng)
    : recurrent_(recurrent) {
    if (widths.size() != 3) throw ConfigError("StaticNet: scalar variant needs {in, hidden, out}");
    for (int w : widths)
        if (w < 1) throw ConfigError("StaticNet: widths must be positive");
    in_width_ = widths[0];
    hidden_ = widths[1];
    n_out_ = widths[2];
    init_params(rng);
}

StaticNet::StaticNet(Shape in_shape, int fixed_inputs, int hidden, int n_out, bool recurrent,
                     RngStream& rng)
    : pixel_(true), recurrent_(recurrent), in_shape_(in_shape), fixed_inputs_(fixed_inputs),
      hidden_(hidden), n_out_(n_out) {
    if (in_shape.c < 1 || in_shape.h < 1 || in_shape.w < 1 || hidden < 1 || n_out < 1 ||
        fixed_inputs < 0)
        throw ConfigError("StaticNet: bad pixel configuration");
    pool_after_conv1_ = conv_out_dim(in_shape.h) % 2 == 0 && conv_out_dim(in_shape.w) % 2 == 0;
    in_width_ = 16 + fixed_inputs_;
    init_params(rng);
}

void StaticNet::init_params(RngStream& rng) {
    std::size_t n = 0;
    if (pixel_) n += std::size_t(8) * in_shape_.c * 9 + 8 + std::size_t(16) * 8 * 9 + 16;
    off_wh_ = n;
    n += std::size_t(hidden_) * in_width_;
    off_bh_ = n;
    n += hidden_;
    off_wr_ = n;
    if (recurrent_) n += std::size_t(hidden_) * hidden_;
    off_wo_ = n;
    n += std::size_t(n_out_) * hidden_;
    off_bo_ = n;
    n += n_out_;
    params_.resize(n);
    for (auto& v : params_) v = rng.normal();
    state_.assign(hidden_, 0.0);
}

std::vector<double> StaticNet::trunk_features(std::span<const double> x) const {
    Tensor img(in_shape_);
    img.data.assign(x.begin(), x.begin() + in_shape_.volume());
    const double* p = params_.data();
    Tensor t = conv2d(img, {p, std::size_t(8) * in_shape_.c * 9}, {p + 8 * in_shape_.c * 9, 8}, 8);
    tanh_inplace(t);
    p += std::size_t(8) * in_shape_.c * 9 + 8;
    if (pool_after_conv1_) t = avg_pool(t, 2);
    Tensor t2 = conv2d(t, {p, std::size_t(16) * 8 * 9}, {p + std::size_t(16) * 8 * 9, 16}, 16);
    tanh_inplace(t2);

    std::vector<double> feat(16, 0.0);
    const std::size_t spatial = std::size_t(t2.shape.h) * t2.shape.w;
    for (int c = 0; c < 16; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < spatial; ++i) acc += t2.data[c * spatial + i];
        feat[c] = acc / double(spatial);
    }
    for (int i = 0; i < fixed_inputs_; ++i) feat.push_back(x[in_shape_.volume() + i]);
    return feat;
}

std::vector<double> StaticNet::forward(std::span<const double> x) {
    const std::size_t want = pixel_ ? in_shape_.volume() + fixed_inputs_ : std::size_t(in_width_);
    if (x.size() != want) throw ContractError("static forward: input arity mismatch");

    std::vector<double> in;
    if (pixel_) {
        in = trunk_features(x);
    } else {
        in.assign(x.begin(), x.end());
    }

    std::vector<double> h(hidden_);
    for (int j = 0; j < hidden_; ++j) {
        double acc = params_[off_bh_ + j];
        const double* row = params_.data() + off_wh_ + std::size_t(j) * in_width_;
        for (int i = 0; i < in_width_; ++i) acc += row[i] * in[i];
        if (recurrent_) {
            const double* rrow = params_.data() + off_wr_ + std::size_t(j) * hidden_;
            for (int i = 0; i < hidden_; ++i) acc += rrow[i] * state_[i];
        }
        h[j] = std::tanh(acc);
    }
    state_ = h;

    std::vector<double> out(n_out_);
    for (int j = 0; j < n_out_; ++j) {
        double acc = params_[off_bo_ + j];
        const double* row = params_.data() + off_wo_ + std::size_t(j) * hidden_;
        for (int i = 0; i < hidden_; ++i) acc += row[i] * h[i];
        out[j] = std::tanh(acc);
    }
    return out;
}

void StaticNet::reset_state() {
    state_.assign(hidden_, 0.0);
}

void StaticNet::perturb_weights(RngStream& rng) {
    for (auto& v : params_) v += rng.normal(0.1);
}

std::size_t StaticNet::parameter_count() const {
    return params_.size();
}

bool StaticNet::operator==(const StaticNet& other) const {
    if (pixel_ != other.pixel_ || recurrent_ != other.recurrent_ ||
        !(in_shape_ == other.in_shape_) || fixed_inputs_ != other.fixed_inputs_ ||
        in_width_ != other.in_width_ || hidden_ != other.hidden_ || n_out_ != other.n_out_ ||
        params_.size() != other.params_.size() || state_.size() != other.state_.size())
        return false;
    auto bits = [](double a, double b) {
        return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
    };
    for (std::size_t i = 0; i < params_.size(); ++i)
        if (!bits(params_[i], other.params_[i])) return false;
    for (std::size_t i = 0; i < state_.size(); ++i)
        if (!bits(state_[i], other.state_[i])) return false;
    return true;
}

} // namespace nevo
