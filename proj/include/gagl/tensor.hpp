// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "gagl/common.hpp"

namespace gagl {

using Shape = std::vector<std::int64_t>;

inline std::int64_t shape_size(const Shape& s) {
    if (s.empty()) throw DimensionError("tensor rank must be >= 1");
    std::int64_t n = 1;
    for (std::int64_t d : s) {
        if (d <= 0) throw DimensionError("tensor dimensions must be positive");
        n *= d;
    }
    return n;
}

/// Dense row-major tensor of 32-bit reals. `node` is an optional tape handle
/// (-1 when the tensor is not tracked); see tape.hpp.
struct Tensor {
    Shape shape;
    std::vector<float> data;
    std::int32_t node = -1;

    Tensor() = default;

    explicit Tensor(Shape s) : shape(std::move(s)), data(static_cast<std::size_t>(shape_size(shape)), 0.f) {}

    Tensor(Shape s, std::vector<float> d) : shape(std::move(s)), data(std::move(d)) {
        if (shape_size(shape) != static_cast<std::int64_t>(data.size()))
            throw DimensionError("tensor data length does not match shape");
    }

    static Tensor scalar(float v) { return Tensor({1}, {v}); }

    static Tensor vec(std::vector<float> v) {
        auto n = static_cast<std::int64_t>(v.size());
        return Tensor({n}, std::move(v));
    }

    static Tensor full(Shape s, float v) {
        Tensor t(std::move(s));
        std::fill(t.data.begin(), t.data.end(), v);
        return t;
    }

    std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
    int rank() const { return static_cast<int>(shape.size()); }

    /// Element access for rank-3 tensors laid out [c][h][w].
    float& at3(std::int64_t c, std::int64_t h, std::int64_t w) {
        return data[static_cast<std::size_t>((c * shape[1] + h) * shape[2] + w)];
    }
    float at3(std::int64_t c, std::int64_t h, std::int64_t w) const {
        return data[static_cast<std::size_t>((c * shape[1] + h) * shape[2] + w)];
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

/// Fills a tensor with uniform values in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
inline void init_uniform(Tensor& t, std::int64_t fan_in, Rng& rng) {
    const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in > 0 ? fan_in : 1));
    for (float& v : t.data) v = rng.range(-bound, bound);
}

}  // namespace gagl
