// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Forward and backward kernels for the tensor primitives. These are plain
// functions over Tensors; tape.hpp layers recording and autodiff on top.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <utility>

#include "gagl/tensor.hpp"

namespace gagl {

enum class Act : std::uint8_t { Relu, Sigmoid, Tanh };

namespace ops {

inline float dot(const float* a, const float* b, std::int64_t n) {
    float acc = 0.f;
    for (std::int64_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

inline void axpy(float alpha, const float* x, float* y, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// ---------------------------------------------------------------------------
// conv2d: valid (no padding) cross-correlation with stride.
// input [Cin,H,W], kernels [Cout,Cin,k,k], bias [Cout] -> [Cout,H',W']
// ---------------------------------------------------------------------------

inline std::pair<std::int64_t, std::int64_t> conv2d_out_hw(std::int64_t h, std::int64_t w, std::int64_t k,
                                                           std::int64_t stride) {
    if (h < k || w < k) throw DimensionError("conv2d: input smaller than kernel");
    if (stride < 1) throw DimensionError("conv2d: stride must be positive");
    return {(h - k) / stride + 1, (w - k) / stride + 1};
}

namespace detail {

// Patch matrix, one row per output position: colT[n][ci*k*k + kh*k + kw].
inline std::vector<float> im2col(const Tensor& in, std::int64_t k, std::int64_t stride, std::int64_t ho,
                                 std::int64_t wo) {
    const std::int64_t cin = in.shape[0], w = in.shape[2];
    std::vector<float> colT(static_cast<std::size_t>(ho * wo * cin * k * k));
    const std::int64_t patch = cin * k * k;
    for (std::int64_t oh = 0; oh < ho; ++oh) {
        for (std::int64_t ow = 0; ow < wo; ++ow) {
            float* row = colT.data() + (oh * wo + ow) * patch;
            for (std::int64_t ci = 0; ci < cin; ++ci) {
                const float* src = in.data.data() + (ci * in.shape[1] + oh * stride) * w + ow * stride;
                for (std::int64_t kh = 0; kh < k; ++kh) {
                    std::memcpy(row + (ci * k + kh) * k, src + kh * w, static_cast<std::size_t>(k) * sizeof(float));
                }
            }
        }
    }
    return colT;
}

}  // namespace detail

inline void conv2d_check(const Tensor& in, const Tensor& kern, const Tensor& bias) {
    if (in.rank() != 3) throw DimensionError("conv2d: input must be rank 3, got " + shape_str(in.shape));
    if (kern.rank() != 4) throw DimensionError("conv2d: kernels must be rank 4, got " + shape_str(kern.shape));
    if (kern.shape[2] != kern.shape[3]) throw DimensionError("conv2d: kernels must be square");
    if (in.shape[0] != kern.shape[1])
        throw DimensionError("conv2d: input channels " + std::to_string(in.shape[0]) + " != kernel channels " +
                             std::to_string(kern.shape[1]));
    if (bias.rank() != 1 || bias.shape[0] != kern.shape[0])
        throw DimensionError("conv2d: bias must have one entry per output channel");
}

inline Tensor conv2d(const Tensor& in, const Tensor& kern, const Tensor& bias, int stride) {
    conv2d_check(in, kern, bias);
    const std::int64_t cout = kern.shape[0], k = kern.shape[2];
    auto [ho, wo] = conv2d_out_hw(in.shape[1], in.shape[2], k, stride);
    const std::int64_t n = ho * wo, patch = in.shape[0] * k * k;
    auto colT = detail::im2col(in, k, stride, ho, wo);

    Tensor out({cout, ho, wo});
    for (std::int64_t co = 0; co < cout; ++co) {
        const float* krow = kern.data.data() + co * patch;
        float* orow = out.data.data() + co * n;
        const float b = bias.data[static_cast<std::size_t>(co)];
        for (std::int64_t i = 0; i < n; ++i) orow[i] = b + dot(krow, colT.data() + i * patch, patch);
    }
    return out;
}

inline void conv2d_backward(const Tensor& in, const Tensor& kern, int stride, const Tensor& gout, Tensor* gin,
                            Tensor* gkern, Tensor* gbias) {
    const std::int64_t cout = kern.shape[0], k = kern.shape[2];
    const std::int64_t ho = gout.shape[1], wo = gout.shape[2];
    const std::int64_t n = ho * wo, patch = in.shape[0] * k * k;
    auto colT = detail::im2col(in, k, stride, ho, wo);

    if (gbias) {
        for (std::int64_t co = 0; co < cout; ++co) {
            const float* grow = gout.data.data() + co * n;
            float acc = 0.f;
            for (std::int64_t i = 0; i < n; ++i) acc += grow[i];
            gbias->data[static_cast<std::size_t>(co)] += acc;
        }
    }
    if (gkern) {
        for (std::int64_t co = 0; co < cout; ++co) {
            const float* grow = gout.data.data() + co * n;
            float* krow = gkern->data.data() + co * patch;
            for (std::int64_t i = 0; i < n; ++i) axpy(grow[i], colT.data() + i * patch, krow, patch);
        }
    }
    if (gin) {
        std::vector<float> gcolT(static_cast<std::size_t>(n * patch), 0.f);
        for (std::int64_t co = 0; co < cout; ++co) {
            const float* grow = gout.data.data() + co * n;
            const float* krow = kern.data.data() + co * patch;
            for (std::int64_t i = 0; i < n; ++i) axpy(grow[i], krow, gcolT.data() + i * patch, patch);
        }
        // col2im scatter-add
        const std::int64_t cin = in.shape[0], w = in.shape[2];
        for (std::int64_t oh = 0; oh < ho; ++oh) {
            for (std::int64_t ow = 0; ow < wo; ++ow) {
                const float* row = gcolT.data() + (oh * wo + ow) * patch;
                for (std::int64_t ci = 0; ci < cin; ++ci) {
                    float* dst = gin->data.data() + (ci * in.shape[1] + oh * stride) * w + ow * stride;
                    for (std::int64_t kh = 0; kh < k; ++kh)
                        axpy(1.f, row + (ci * k + kh) * k, dst + kh * w, k);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// matvec: y = W.x + b, W [m,n], x any shape with n elements, b [m] (optional)
// ---------------------------------------------------------------------------

inline void matvec_check(const Tensor& w, const Tensor& x, const Tensor* b) {
    if (w.rank() != 2) throw DimensionError("matvec: weights must be rank 2");
    if (x.size() != w.shape[1])
        throw DimensionError("matvec: input size " + std::to_string(x.size()) + " != weight columns " +
                             std::to_string(w.shape[1]));
    if (b && (b->rank() != 1 || b->shape[0] != w.shape[0]))
        throw DimensionError("matvec: bias size does not match weight rows");
}

inline Tensor matvec(const Tensor& w, const Tensor& x, const Tensor* b) {
    matvec_check(w, x, b);
    const std::int64_t m = w.shape[0], n = w.shape[1];
    Tensor y({m});
    for (std::int64_t i = 0; i < m; ++i)
        y.data[static_cast<std::size_t>(i)] = (b ? b->data[static_cast<std::size_t>(i)] : 0.f) +
                                              dot(w.data.data() + i * n, x.data.data(), n);
    return y;
}

inline void matvec_backward(const Tensor& w, const Tensor& x, const Tensor& gout, Tensor* gw, Tensor* gx,
                            Tensor* gb) {
    const std::int64_t m = w.shape[0], n = w.shape[1];
    for (std::int64_t i = 0; i < m; ++i) {
        const float g = gout.data[static_cast<std::size_t>(i)];
        if (gw) axpy(g, x.data.data(), gw->data.data() + i * n, n);
        if (gx) axpy(g, w.data.data() + i * n, gx->data.data(), n);
        if (gb) gb->data[static_cast<std::size_t>(i)] += g;
    }
}

// ---------------------------------------------------------------------------
// elementwise activations
// ---------------------------------------------------------------------------

inline Tensor activation(Act kind, const Tensor& x) {
    Tensor y(x.shape);
    switch (kind) {
        case Act::Relu:
            for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] > 0.f ? x.data[i] : 0.f;
            break;
        case Act::Sigmoid:
            for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] = 1.f / (1.f + std::exp(-x.data[i]));
            break;
        case Act::Tanh:
            for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] = std::tanh(x.data[i]);
            break;
    }
    return y;
}

inline void activation_backward(Act kind, const Tensor& x, const Tensor& y, const Tensor& gout, Tensor* gin) {
    if (!gin) return;
    switch (kind) {
        case Act::Relu:
            for (std::size_t i = 0; i < x.data.size(); ++i)
                if (x.data[i] > 0.f) gin->data[i] += gout.data[i];
            break;
        case Act::Sigmoid:
            for (std::size_t i = 0; i < x.data.size(); ++i)
                gin->data[i] += gout.data[i] * y.data[i] * (1.f - y.data[i]);
            break;
        case Act::Tanh:
            for (std::size_t i = 0; i < x.data.size(); ++i)
                gin->data[i] += gout.data[i] * (1.f - y.data[i] * y.data[i]);
            break;
    }
}

// ---------------------------------------------------------------------------
// softmax / log-softmax over a vector, max-subtracted for overflow safety
// ---------------------------------------------------------------------------

inline Tensor softmax(const Tensor& x) {
    Tensor y(x.shape);
    const float mx = *std::max_element(x.data.begin(), x.data.end());
    float sum = 0.f;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        y.data[i] = std::exp(x.data[i] - mx);
        sum += y.data[i];
    }
    for (float& v : y.data) v /= sum;
    return y;
}

inline void softmax_backward(const Tensor& y, const Tensor& gout, Tensor* gin) {
    if (!gin) return;
    float gdoty = 0.f;
    for (std::size_t i = 0; i < y.data.size(); ++i) gdoty += gout.data[i] * y.data[i];
    for (std::size_t i = 0; i < y.data.size(); ++i) gin->data[i] += y.data[i] * (gout.data[i] - gdoty);
}

inline Tensor log_softmax(const Tensor& x) {
    Tensor y(x.shape);
    const float mx = *std::max_element(x.data.begin(), x.data.end());
    float sum = 0.f;
    for (std::size_t i = 0; i < x.data.size(); ++i) sum += std::exp(x.data[i] - mx);
    const float lse = mx + std::log(sum);
    for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] - lse;
    return y;
}

inline void log_softmax_backward(const Tensor& y, const Tensor& gout, Tensor* gin) {
    if (!gin) return;
    float gsum = 0.f;
    for (float g : gout.data) gsum += g;
    for (std::size_t i = 0; i < y.data.size(); ++i) gin->data[i] += gout.data[i] - std::exp(y.data[i]) * gsum;
}

// ---------------------------------------------------------------------------
// simple elementwise / structural ops
// ---------------------------------------------------------------------------

inline Tensor hadamard(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        throw DimensionError("hadamard: shape mismatch " + shape_str(a.shape) + " vs " + shape_str(b.shape));
    Tensor y(a.shape);
    for (std::size_t i = 0; i < a.data.size(); ++i) y.data[i] = a.data[i] * b.data[i];
    return y;
}

inline Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        throw DimensionError("add: shape mismatch " + shape_str(a.shape) + " vs " + shape_str(b.shape));
    Tensor y(a.shape);
    for (std::size_t i = 0; i < a.data.size(); ++i) y.data[i] = a.data[i] + b.data[i];
    return y;
}

inline Tensor affine(const Tensor& a, float alpha, float beta) {
    Tensor y(a.shape);
    for (std::size_t i = 0; i < a.data.size(); ++i) y.data[i] = alpha * a.data[i] + beta;
    return y;
}

/// Flattens both inputs (row-major) and concatenates, first argument first.
inline Tensor concat(const Tensor& a, const Tensor& b) {
    Tensor y({a.size() + b.size()});
    std::copy(a.data.begin(), a.data.end(), y.data.begin());
    std::copy(b.data.begin(), b.data.end(), y.data.begin() + a.size());
    return y;
}

/// Expands a channel vector a[d] to [d,h,w] with every spatial cell of
/// channel i equal to a[i].
inline Tensor expand_spatial(const Tensor& a, std::int64_t h, std::int64_t w) {
    if (a.rank() != 1) throw DimensionError("expand_spatial: input must be rank 1");
    if (h < 1 || w < 1) throw DimensionError("expand_spatial: spatial dims must be >= 1");
    Tensor y({a.shape[0], h, w});
    for (std::int64_t c = 0; c < a.shape[0]; ++c)
        std::fill(y.data.begin() + c * h * w, y.data.begin() + (c + 1) * h * w, a.data[static_cast<std::size_t>(c)]);
    return y;
}

inline float huber_scalar(float err, float delta) {
    const float ae = std::fabs(err);
    return ae <= delta ? 0.5f * err * err : delta * (ae - 0.5f * delta);
}

/// Sum of elementwise Huber losses between a vector and a one-hot target.
inline float huber_onehot(const Tensor& v, std::int64_t hot, float delta) {
    float acc = 0.f;
    for (std::int64_t i = 0; i < v.size(); ++i)
        acc += huber_scalar(v.data[static_cast<std::size_t>(i)] - (i == hot ? 1.f : 0.f), delta);
    return acc;
}

inline void huber_onehot_backward(const Tensor& v, std::int64_t hot, float delta, float gout, Tensor* gin) {
    if (!gin) return;
    for (std::int64_t i = 0; i < v.size(); ++i) {
        const float e = v.data[static_cast<std::size_t>(i)] - (i == hot ? 1.f : 0.f);
        gin->data[static_cast<std::size_t>(i)] += gout * std::clamp(e, -delta, delta);
    }
}

}  // namespace ops
}  // namespace gagl
