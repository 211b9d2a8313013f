#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nevo {

struct Shape {
    int c = 0;
    int h = 0;
    int w = 0;
    bool operator==(const Shape&) const = default;
    std::size_t volume() const { return std::size_t(c) * h * w; }
};

/// Dense (C,H,W) tensor, row-major within each channel.
struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(s), data(s.volume(), 0.0) {}
    Tensor(Shape s, std::vector<double> d) : shape(s), data(std::move(d)) {}

    double& at(int c, int y, int x) { return data[(std::size_t(c) * shape.h + y) * shape.w + x]; }
    double at(int c, int y, int x) const { return data[(std::size_t(c) * shape.h + y) * shape.w + x]; }
};

/// Spatial size after the pad-to-3 rule: a dimension below the kernel size is
/// zero-padded up to 3 (extra row/column on the bottom/right first, then
/// top/left), larger dimensions are left alone.
inline int padded_dim(int d) { return d < 3 ? 3 : d; }
inline int conv_out_dim(int d) { return padded_dim(d) - 2; }

/// Zero-pads each spatial dimension below 3 up to 3.
Tensor pad_to_kernel(const Tensor& in);

/// Valid cross-correlation with unit stride and 3x3 kernels, applied after
/// pad_to_kernel. kernel layout: [out_ch][in_ch][ky][kx]; one bias per output
/// channel. No activation.
Tensor conv2d(const Tensor& in, std::span<const double> kernel,
              std::span<const double> bias, int out_ch);

/// Average pooling with kernel = stride = factor; factor must divide both
/// spatial dimensions.
Tensor avg_pool(const Tensor& in, int factor);

void tanh_inplace(Tensor& t);

} // namespace nevo
