// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared test helpers: random tensors and a central-finite-difference
// gradient checker. The finite-difference oracle is independent of the
// tape's backward pass: it only re-runs forward evaluations.

#pragma once

#include <functional>

#include "gagl/nn.hpp"

namespace gagl::test {

inline Tensor random_tensor(Shape shape, Rng& rng, float lo = -1.f, float hi = 1.f) {
    Tensor t(std::move(shape));
    for (float& v : t.data) v = rng.range(lo, hi);
    return t;
}

/// Random values kept away from zero (for kinked activations).
inline Tensor random_tensor_away_from(Shape shape, Rng& rng, float margin) {
    Tensor t(std::move(shape));
    for (float& v : t.data) {
        do {
            v = rng.range(-1.f, 1.f);
        } while (std::fabs(v) < margin);
    }
    return t;
}

/// Builds a scalar loss from parameter tensors. The builder must register
/// each parameter on the tape (in order) and return the loss.
using LossBuilder = std::function<Tensor(Tape&, std::vector<Tensor>&)>;

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::string worst;
};

/// Compares tape gradients against central finite differences (h = 1e-3)
/// elementwise with relative tolerance 1e-3 and absolute floor 1e-6.
inline GradCheckResult check_gradients(std::vector<Tensor> params, const LossBuilder& build,
                                       double rel_tol = 1e-3, double abs_floor = 1e-6, float h = 1e-3f) {
    Tape tape;
    std::vector<Tensor> bound = params;
    Tensor loss = build(tape, bound);
    GradMap grads = tape.backward(loss);

    auto eval = [&](const std::vector<Tensor>& p) {
        Tape t;
        std::vector<Tensor> b = p;
        return static_cast<double>(build(t, b).data[0]);
    };

    GradCheckResult res;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        const Tensor& analytic = grads.at(bound[pi].node);
        for (std::size_t i = 0; i < params[pi].data.size(); ++i) {
            std::vector<Tensor> plus = params, minus = params;
            plus[pi].data[i] += h;
            minus[pi].data[i] -= h;
            const double fd = (eval(plus) - eval(minus)) / (2.0 * static_cast<double>(h));
            const double an = static_cast<double>(analytic.data[i]);
            const double err = std::fabs(an - fd);
            const double denom = std::max({std::fabs(an), std::fabs(fd), abs_floor / rel_tol});
            const double rel = err / denom;
            if (rel > res.max_rel_err && err > abs_floor) {
                res.max_rel_err = rel;
                res.worst = "param " + std::to_string(pi) + " elem " + std::to_string(i) + ": analytic " +
                            std::to_string(an) + " vs fd " + std::to_string(fd);
            }
        }
    }
    return res;
}

}  // namespace gagl::test
