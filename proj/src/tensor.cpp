#include "nevo/tensor.hpp"

#include <cmath>

#include "nevo/errors.hpp"

namespace nevo {

Tensor pad_to_kernel(const Tensor& in) {
    const int ph = padded_dim(in.shape.h);
    const int pw = padded_dim(in.shape.w);
    if (ph == in.shape.h && pw == in.shape.w) return in;
    const int top = (ph - in.shape.h) / 2;
    const int left = (pw - in.shape.w) / 2;
    Tensor out({in.shape.c, ph, pw});
    for (int c = 0; c < in.shape.c; ++c)
        for (int y = 0; y < in.shape.h; ++y)
            for (int x = 0; x < in.shape.w; ++x)
                out.at(c, y + top, x + left) = in.at(c, y, x);
    return out;
}

Tensor conv2d(const Tensor& in, std::span<const double> kernel,
              std::span<const double> bias, int out_ch) {
    const Tensor padded = pad_to_kernel(in);
    const int in_ch = padded.shape.c;
    if (kernel.size() != std::size_t(out_ch) * in_ch * 9 || bias.size() != std::size_t(out_ch))
        throw ContractError("conv2d: kernel/bias size mismatch");
    const int oh = padded.shape.h - 2;
    const int ow = padded.shape.w - 2;
    Tensor out({out_ch, oh, ow});
    for (int o = 0; o < out_ch; ++o) {
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                double acc = bias[o];
                for (int i = 0; i < in_ch; ++i) {
                    const double* k = kernel.data() + (std::size_t(o) * in_ch + i) * 9;
                    for (int ky = 0; ky < 3; ++ky)
                        for (int kx = 0; kx < 3; ++kx)
                            acc += k[ky * 3 + kx] * padded.at(i, y + ky, x + kx);
                }
                out.at(o, y, x) = acc;
            }
        }
    }
    return out;
}

Tensor avg_pool(const Tensor& in, int factor) {
    if (factor < 2 || in.shape.h % factor != 0 || in.shape.w % factor != 0)
        throw ContractError("avg_pool: factor must divide both spatial dims");
    const int oh = in.shape.h / factor;
    const int ow = in.shape.w / factor;
    const double inv = 1.0 / (double(factor) * factor);
    Tensor out({in.shape.c, oh, ow});
    for (int c = 0; c < in.shape.c; ++c)
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x) {
                double acc = 0.0;
                for (int dy = 0; dy < factor; ++dy)
                    for (int dx = 0; dx < factor; ++dx)
                        acc += in.at(c, y * factor + dy, x * factor + dx);
                out.at(c, y, x) = acc * inv;
            }
    return out;
}

void tanh_inplace(Tensor& t) {
    for (auto& v : t.data) v = std::tanh(v);
}

} // namespace nevo
