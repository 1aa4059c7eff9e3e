// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode automatic differentiation over the kernels in ops.hpp.
//
// A Tape records primitive applications in topological order; each node owns
// the value it produced. Tensors carry an optional node handle, so the same
// functions serve tracked and untracked execution: pass a Tape* to record,
// nullptr to just compute. Tapes are single-owner and not shared between
// threads; independent tapes may run concurrently.

#pragma once

#include <array>
#include <unordered_map>

#include "gagl/ops.hpp"

namespace gagl {

using GradMap = std::unordered_map<int, Tensor>;

class Tape {
public:
    enum class Op : std::uint8_t {
        Leaf,
        Conv2d,
        MatVec,
        Activation,
        Softmax,
        LogSoftmax,
        Hadamard,
        Add,
        Affine,
        Concat,
        Sum,
        Pick,
        EmbedRow,
        ExpandSpatial,
        HuberOneHot,
    };

    /// Registers a trainable leaf. Gradients are reported for these nodes.
    Tensor param(Tensor t) { return push(Op::Leaf, std::move(t), {-1, -1, -1}, /*is_param=*/true); }

    /// Registers a constant leaf (inputs, targets); no gradient is reported.
    Tensor constant(Tensor t) { return push(Op::Leaf, std::move(t), {-1, -1, -1}, /*is_param=*/false); }

    Tensor conv2d(const Tensor& in, const Tensor& kern, const Tensor& bias, int stride) {
        Tensor out = ops::conv2d(in, kern, bias, stride);
        Node& n = record(Op::Conv2d, std::move(out), {bind(in), bind(kern), bind(bias)});
        n.aux0 = stride;
        return n.value;
    }

    Tensor matvec(const Tensor& w, const Tensor& x, const Tensor* b) {
        Tensor out = ops::matvec(w, x, b);
        return record(Op::MatVec, std::move(out), {bind(w), bind(x), b ? bind(*b) : -1}).value;
    }

    Tensor activation(Act kind, const Tensor& x) {
        Tensor out = ops::activation(kind, x);
        Node& n = record(Op::Activation, std::move(out), {bind(x), -1, -1});
        n.aux0 = static_cast<std::int64_t>(kind);
        return n.value;
    }

    Tensor softmax(const Tensor& x) { return record(Op::Softmax, ops::softmax(x), {bind(x), -1, -1}).value; }

    Tensor log_softmax(const Tensor& x) {
        return record(Op::LogSoftmax, ops::log_softmax(x), {bind(x), -1, -1}).value;
    }

    Tensor hadamard(const Tensor& a, const Tensor& b) {
        return record(Op::Hadamard, ops::hadamard(a, b), {bind(a), bind(b), -1}).value;
    }

    Tensor add(const Tensor& a, const Tensor& b) {
        return record(Op::Add, ops::add(a, b), {bind(a), bind(b), -1}).value;
    }

    Tensor affine(const Tensor& a, float alpha, float beta) {
        Node& n = record(Op::Affine, ops::affine(a, alpha, beta), {bind(a), -1, -1});
        n.alpha = alpha;
        n.beta = beta;
        return n.value;
    }

    Tensor concat(const Tensor& a, const Tensor& b) {
        return record(Op::Concat, ops::concat(a, b), {bind(a), bind(b), -1}).value;
    }

    Tensor sum(const Tensor& a) {
        float acc = 0.f;
        for (float v : a.data) acc += v;
        return record(Op::Sum, Tensor::scalar(acc), {bind(a), -1, -1}).value;
    }

    Tensor pick(const Tensor& a, std::int64_t index) {
        if (index < 0 || index >= a.size()) throw DimensionError("pick: index out of range");
        Node& n = record(Op::Pick, Tensor::scalar(a.data[static_cast<std::size_t>(index)]), {bind(a), -1, -1});
        n.aux0 = index;
        return n.value;
    }

    /// Row lookup into an embedding table [rows, dim].
    Tensor embed_row(const Tensor& table, std::int64_t row) {
        if (table.rank() != 2) throw DimensionError("embed_row: table must be rank 2");
        if (row < 0 || row >= table.shape[0]) throw VocabularyError("embed_row: row out of range");
        const std::int64_t dim = table.shape[1];
        Tensor out({dim});
        std::copy(table.data.begin() + row * dim, table.data.begin() + (row + 1) * dim, out.data.begin());
        Node& n = record(Op::EmbedRow, std::move(out), {bind(table), -1, -1});
        n.aux0 = row;
        return n.value;
    }

    Tensor expand_spatial(const Tensor& a, std::int64_t h, std::int64_t w) {
        Node& n = record(Op::ExpandSpatial, ops::expand_spatial(a, h, w), {bind(a), -1, -1});
        n.aux0 = h;
        n.aux1 = w;
        return n.value;
    }

    Tensor huber_onehot(const Tensor& v, std::int64_t hot, float delta) {
        Node& n = record(Op::HuberOneHot, Tensor::scalar(ops::huber_onehot(v, hot, delta)), {bind(v), -1, -1});
        n.aux0 = hot;
        n.alpha = delta;
        return n.value;
    }

    const Tensor& value(int node) const { return nodes_[static_cast<std::size_t>(node)].value; }
    std::size_t size() const { return nodes_.size(); }
    void reset() { nodes_.clear(); }

    /// Reverse pass from a scalar loss. Returns one gradient tensor per
    /// registered parameter node; parameters the loss does not touch get
    /// zero gradients. Backward over an empty tape (or a loss with no
    /// parameters) simply yields those zeros.
    GradMap backward(const Tensor& loss) const {
        if (loss.node < 0 || static_cast<std::size_t>(loss.node) >= nodes_.size())
            throw ContractError("backward: loss is not recorded on this tape");
        if (nodes_[static_cast<std::size_t>(loss.node)].value.size() != 1)
            throw ContractError("backward: loss node must be scalar");

        std::vector<std::vector<float>> grad(nodes_.size());
        auto g = [&](int id) -> std::vector<float>& {
            auto& buf = grad[static_cast<std::size_t>(id)];
            if (buf.empty()) buf.assign(nodes_[static_cast<std::size_t>(id)].value.data.size(), 0.f);
            return buf;
        };
        g(loss.node)[0] = 1.f;

        for (int id = loss.node; id >= 0; --id) {
            const Node& n = nodes_[static_cast<std::size_t>(id)];
            if (grad[static_cast<std::size_t>(id)].empty()) continue;
            Tensor gout(n.value.shape, std::move(grad[static_cast<std::size_t>(id)]));
            dispatch_backward(n, gout, g);
            grad[static_cast<std::size_t>(id)] = std::move(gout.data);
        }

        GradMap out;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!nodes_[i].is_param) continue;
            const Node& n = nodes_[i];
            Tensor gt(n.value.shape);
            if (!grad[i].empty()) gt.data = std::move(grad[i]);
            out.emplace(static_cast<int>(i), std::move(gt));
        }
        return out;
    }

private:
    struct Node {
        Op op;
        bool is_param = false;
        std::array<int, 3> in{-1, -1, -1};
        Tensor value;
        float alpha = 0.f, beta = 0.f;
        std::int64_t aux0 = 0, aux1 = 0;
    };

    std::vector<Node> nodes_;

    Tensor push(Op op, Tensor value, std::array<int, 3> in, bool is_param) {
        Node n;
        n.op = op;
        n.is_param = is_param;
        n.in = in;
        n.value = std::move(value);
        n.value.node = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(std::move(n));
        return nodes_.back().value;
    }

    Node& record(Op op, Tensor value, std::array<int, 3> in) {
        push(op, std::move(value), in, false);
        return nodes_.back();
    }

    /// Returns the node id for an input, registering untracked tensors as
    /// constant leaves on first use.
    int bind(const Tensor& t) {
        if (t.node >= 0) {
            if (static_cast<std::size_t>(t.node) >= nodes_.size())
                throw ContractError("tape: input tensor belongs to a different tape");
            return t.node;
        }
        return constant(t).node;
    }

    template <typename GradAt>
    void dispatch_backward(const Node& n, const Tensor& gout, GradAt&& g) const {
        auto in_val = [&](int slot) -> const Tensor& { return nodes_[static_cast<std::size_t>(n.in[slot])].value; };
        auto gin = [&](int slot) -> Tensor {
            return Tensor(in_val(slot).shape, std::move(g(n.in[slot])));
        };
        // Two slots of one node may reference the same input (e.g. squaring
        // via hadamard(x, x)); later puts must accumulate, not overwrite.
        std::array<int, 3> done{-1, -1, -1};
        int done_count = 0;
        auto put = [&](int slot, Tensor t) {
            const int id = n.in[slot];
            for (int k = 0; k < done_count; ++k) {
                if (done[static_cast<std::size_t>(k)] == id) {
                    ops::axpy(1.f, t.data.data(), g(id).data(), t.size());
                    return;
                }
            }
            done[static_cast<std::size_t>(done_count++)] = id;
            g(id) = std::move(t.data);
        };

        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::Conv2d: {
                Tensor gi = gin(0), gk = gin(1), gb = gin(2);
                ops::conv2d_backward(in_val(0), in_val(1), static_cast<int>(n.aux0), gout, &gi, &gk, &gb);
                put(0, std::move(gi));
                put(1, std::move(gk));
                put(2, std::move(gb));
                break;
            }
            case Op::MatVec: {
                Tensor gw = gin(0), gx = gin(1);
                if (n.in[2] >= 0) {
                    Tensor gb = gin(2);
                    ops::matvec_backward(in_val(0), in_val(1), gout, &gw, &gx, &gb);
                    put(2, std::move(gb));
                } else {
                    ops::matvec_backward(in_val(0), in_val(1), gout, &gw, &gx, nullptr);
                }
                put(0, std::move(gw));
                put(1, std::move(gx));
                break;
            }
            case Op::Activation: {
                Tensor gi = gin(0);
                ops::activation_backward(static_cast<Act>(n.aux0), in_val(0), n.value, gout, &gi);
                put(0, std::move(gi));
                break;
            }
            case Op::Softmax: {
                Tensor gi = gin(0);
                ops::softmax_backward(n.value, gout, &gi);
                put(0, std::move(gi));
                break;
            }
            case Op::LogSoftmax: {
                Tensor gi = gin(0);
                ops::log_softmax_backward(n.value, gout, &gi);
                put(0, std::move(gi));
                break;
            }
            case Op::Hadamard: {
                Tensor ga = gin(0), gb = gin(1);
                for (std::size_t i = 0; i < gout.data.size(); ++i) {
                    ga.data[i] += gout.data[i] * in_val(1).data[i];
                    gb.data[i] += gout.data[i] * in_val(0).data[i];
                }
                put(0, std::move(ga));
                put(1, std::move(gb));
                break;
            }
            case Op::Add: {
                Tensor ga = gin(0), gb = gin(1);
                for (std::size_t i = 0; i < gout.data.size(); ++i) {
                    ga.data[i] += gout.data[i];
                    gb.data[i] += gout.data[i];
                }
                put(0, std::move(ga));
                put(1, std::move(gb));
                break;
            }
            case Op::Affine: {
                Tensor ga = gin(0);
                for (std::size_t i = 0; i < gout.data.size(); ++i) ga.data[i] += n.alpha * gout.data[i];
                put(0, std::move(ga));
                break;
            }
            case Op::Concat: {
                Tensor ga = gin(0), gb = gin(1);
                const std::int64_t na = in_val(0).size();
                for (std::int64_t i = 0; i < na; ++i) ga.data[static_cast<std::size_t>(i)] += gout.data[static_cast<std::size_t>(i)];
                for (std::int64_t i = 0; i < in_val(1).size(); ++i)
                    gb.data[static_cast<std::size_t>(i)] += gout.data[static_cast<std::size_t>(na + i)];
                put(0, std::move(ga));
                put(1, std::move(gb));
                break;
            }
            case Op::Sum: {
                Tensor ga = gin(0);
                for (float& v : ga.data) v += gout.data[0];
                put(0, std::move(ga));
                break;
            }
            case Op::Pick: {
                Tensor ga = gin(0);
                ga.data[static_cast<std::size_t>(n.aux0)] += gout.data[0];
                put(0, std::move(ga));
                break;
            }
            case Op::EmbedRow: {
                Tensor gt = gin(0);
                const std::int64_t dim = in_val(0).shape[1];
                ops::axpy(1.f, gout.data.data(), gt.data.data() + n.aux0 * dim, dim);
                put(0, std::move(gt));
                break;
            }
            case Op::ExpandSpatial: {
                Tensor ga = gin(0);
                const std::int64_t hw = n.aux0 * n.aux1;
                for (std::int64_t c = 0; c < ga.size(); ++c) {
                    float acc = 0.f;
                    for (std::int64_t i = 0; i < hw; ++i) acc += gout.data[static_cast<std::size_t>(c * hw + i)];
                    ga.data[static_cast<std::size_t>(c)] += acc;
                }
                put(0, std::move(ga));
                break;
            }
            case Op::HuberOneHot: {
                Tensor gv = gin(0);
                ops::huber_onehot_backward(in_val(0), n.aux0, n.alpha, gout.data[0], &gv);
                put(0, std::move(gv));
                break;
            }
        }
    }
};

}  // namespace gagl
