// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Multimodal fusion units: the Gated-Attention unit (sigmoid gate over
// convolutional feature-map channels, applied by Hadamard product) and the
// flatten-and-concatenate baseline.

#pragma once

#include "gagl/tape.hpp"

namespace gagl {

/// a_L = sigmoid(W.x_L + b). Every element lies in (0,1); the dimension
/// equals the convolutional output channel count.
inline Tensor attention_vector(const Tensor& w, const Tensor& b, const Tensor& x_l, Tape* tape) {
    if (tape) return tape->activation(Act::Sigmoid, tape->matvec(w, x_l, &b));
    return ops::activation(Act::Sigmoid, ops::matvec(w, x_l, &b));
}

/// Expands a_L[d] to [d,H,W]: element (i,j,k) of the result equals a_L[i].
inline Tensor expand_attention(const Tensor& a_l, std::int64_t h, std::int64_t w, Tape* tape) {
    if (tape) return tape->expand_spatial(a_l, h, w);
    return ops::expand_spatial(a_l, h, w);
}

/// M_GA = expand(a_L) ⊙ x_I. Differentiable with respect to both inputs.
inline Tensor gated_attention(const Tensor& x_i, const Tensor& a_l, Tape* tape) {
    if (x_i.rank() != 3) throw DimensionError("gated_attention: image features must be rank 3");
    if (a_l.rank() != 1 || a_l.shape[0] != x_i.shape[0])
        throw DimensionError("gated_attention: gate dimension " + shape_str(a_l.shape) +
                             " does not match feature channels " + shape_str(x_i.shape));
    Tensor expanded = expand_attention(a_l, x_i.shape[1], x_i.shape[2], tape);
    if (tape) return tape->hadamard(expanded, x_i);
    return ops::hadamard(expanded, x_i);
}

/// M_concat = [vec(x_I); vec(x_L)], image part first, row-major flattening.
inline Tensor concat_fusion(const Tensor& x_i, const Tensor& x_l, Tape* tape) {
    if (tape) return tape->concat(x_i, x_l);
    return ops::concat(x_i, x_l);
}

}  // namespace gagl
