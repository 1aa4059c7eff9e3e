// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Network layers and model assembly for the four variants
// (BC/DAgger and A3C, each with Concat or Gated-Attention fusion),
// plus exact parameter accounting.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "gagl/fusion.hpp"

namespace gagl {

enum class FusionKind : std::uint8_t { Concat = 0, GatedAttention = 1 };
enum class LearnerKind : std::uint8_t { BC = 0, DAgger = 1, A3C = 2 };

struct ConvLayerSpec {
    int filters;
    int kernel;
    int stride;
};

struct ModelConfig {
    int image_width = 300;
    int image_height = 168;
    std::vector<ConvLayerSpec> conv{{128, 8, 4}, {64, 4, 2}, {64, 4, 2}};
    int embed_dim = 256;
    int gru_dim = 256;
    int lstm_dim = 256;   // A3C only
    int il_hidden = 512;  // imitation-learning trunk
    int a3c_hidden = 256; // A3C trunk
    int action_count = 3;
    int vocab_size = 17;
    FusionKind fusion = FusionKind::GatedAttention;
    LearnerKind learner = LearnerKind::A3C;

    bool is_rl() const { return learner == LearnerKind::A3C; }

    /// Channel count / attention dimension d = final conv filter count.
    int feature_channels() const { return conv.back().filters; }

    /// Output shape {C,H',W'} after the full conv stack.
    Shape conv_out_shape() const {
        std::int64_t h = image_height, w = image_width;
        for (const auto& l : conv) {
            auto [ho, wo] = ops::conv2d_out_hw(h, w, l.kernel, l.stride);
            h = ho;
            w = wo;
        }
        return {feature_channels(), h, w};
    }

    std::int64_t flatten_size() const {
        auto s = conv_out_shape();
        return s[0] * s[1] * s[2];
    }

    std::int64_t fused_size() const {
        return fusion == FusionKind::GatedAttention ? flatten_size() : flatten_size() + gru_dim;
    }

    int trunk_hidden() const { return is_rl() ? a3c_hidden : il_hidden; }
};

struct ParamSpec {
    std::string name;
    Shape shape;
    std::int64_t fan_in;
};

/// The complete, ordered parameter layout for one model variant. This is the
/// single source of truth for which tensors exist and their shapes.
inline std::vector<ParamSpec> param_layout(const ModelConfig& c) {
    std::vector<ParamSpec> out;
    std::int64_t in_ch = 3;
    for (std::size_t i = 0; i < c.conv.size(); ++i) {
        const auto& l = c.conv[i];
        const std::int64_t fan = in_ch * l.kernel * l.kernel;
        out.push_back({"conv." + std::to_string(i) + ".kernels", {l.filters, in_ch, l.kernel, l.kernel}, fan});
        out.push_back({"conv." + std::to_string(i) + ".bias", {l.filters}, fan});
        in_ch = l.filters;
    }
    out.push_back({"embed.table", {c.vocab_size, c.embed_dim}, c.embed_dim});
    for (const char* gate : {"z", "r", "n"}) {
        const std::string g(gate);
        out.push_back({"gru.w_" + g, {c.gru_dim, c.embed_dim}, c.embed_dim});
        out.push_back({"gru.u_" + g, {c.gru_dim, c.gru_dim}, c.gru_dim});
        out.push_back({"gru.b_" + g, {c.gru_dim}, c.embed_dim});
    }
    if (c.fusion == FusionKind::GatedAttention) {
        out.push_back({"fusion.attn.w", {c.feature_channels(), c.gru_dim}, c.gru_dim});
        out.push_back({"fusion.attn.b", {c.feature_channels()}, c.gru_dim});
    }
    const std::int64_t fused = c.fused_size();
    out.push_back({"trunk.w", {c.trunk_hidden(), fused}, fused});
    out.push_back({"trunk.b", {c.trunk_hidden()}, fused});
    if (c.is_rl()) {
        const std::int64_t cat = c.a3c_hidden + c.lstm_dim;
        for (const char* gate : {"i", "f", "o", "g"}) {
            const std::string g(gate);
            out.push_back({"lstm.w_" + g, {c.lstm_dim, cat}, cat});
            out.push_back({"lstm.b_" + g, {c.lstm_dim}, cat});
        }
        out.push_back({"policy.w", {c.action_count, c.lstm_dim}, c.lstm_dim});
        out.push_back({"policy.b", {c.action_count}, c.lstm_dim});
        out.push_back({"value.w", {1, c.lstm_dim}, c.lstm_dim});
        out.push_back({"value.b", {1}, c.lstm_dim});
    } else {
        out.push_back({"policy.w", {c.action_count, c.il_hidden}, c.il_hidden});
        out.push_back({"policy.b", {c.action_count}, c.il_hidden});
    }
    return out;
}

/// Named parameter tensors for one model variant.
struct ModelParams {
    std::map<std::string, Tensor> tensors;

    static ModelParams init(const ModelConfig& c, std::uint64_t seed) {
        ModelParams p;
        for (const auto& spec : param_layout(c)) {
            Tensor t(spec.shape);
            std::uint64_t h = 1469598103934665603ULL;
            for (char ch : spec.name) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ULL;
            Rng rng(derive_seed(seed, h));
            init_uniform(t, spec.fan_in, rng);
            p.tensors.emplace(spec.name, std::move(t));
        }
        return p;
    }

    static ModelParams zeros(const ModelConfig& c) {
        ModelParams p;
        for (const auto& spec : param_layout(c)) p.tensors.emplace(spec.name, Tensor(spec.shape));
        return p;
    }

    const Tensor& at(const std::string& name) const {
        auto it = tensors.find(name);
        if (it == tensors.end()) throw ContractError("missing parameter tensor: " + name);
        return it->second;
    }

    std::int64_t total_elements() const {
        std::int64_t n = 0;
        for (const auto& [k, t] : tensors) n += t.size();
        return n;
    }
};

/// Registers every parameter tensor on a tape. The returned copy carries
/// node handles, so forwards built from it are differentiable.
inline ModelParams bind_params(Tape& tape, const ModelParams& p) {
    ModelParams bound;
    for (const auto& [name, t] : p.tensors) bound.tensors.emplace(name, tape.param(t));
    return bound;
}

using NamedGrads = std::map<std::string, Tensor>;

/// Maps tape gradients back to parameter names after backward().
inline NamedGrads collect_grads(const ModelParams& bound, const GradMap& grads) {
    NamedGrads out;
    for (const auto& [name, t] : bound.tensors) {
        auto it = grads.find(t.node);
        if (it == grads.end()) throw ContractError("no gradient recorded for parameter: " + name);
        out.emplace(name, it->second);
    }
    return out;
}

// ---------------------------------------------------------------------------
// layers
// ---------------------------------------------------------------------------

/// Three valid convolutions with ReLu activations; output channels = d.
inline Tensor conv_stack_forward(const ModelParams& p, const ModelConfig& c, const Tensor& image, Tape* tape) {
    if (image.rank() != 3 || image.shape[0] != 3 || image.shape[1] != c.image_height ||
        image.shape[2] != c.image_width)
        throw DimensionError("conv_stack_forward: expected image [3x" + std::to_string(c.image_height) + "x" +
                             std::to_string(c.image_width) + "], got " + shape_str(image.shape));
    Tensor x = image;
    for (std::size_t i = 0; i < c.conv.size(); ++i) {
        const auto& k = p.at("conv." + std::to_string(i) + ".kernels");
        const auto& b = p.at("conv." + std::to_string(i) + ".bias");
        x = tape ? tape->conv2d(x, k, b, c.conv[i].stride) : ops::conv2d(x, k, b, c.conv[i].stride);
        x = tape ? tape->activation(Act::Relu, x) : ops::activation(Act::Relu, x);
    }
    return x;
}

/// Embeds each token and runs a standard GRU (update gate z, reset gate r,
/// candidate state; one bias vector per gate). Returns the final hidden
/// state x_L.
inline Tensor gru_encode(const ModelParams& p, const ModelConfig& c, std::span<const int> tokens, Tape* tape) {
    if (tokens.empty()) throw ContractError("gru_encode: empty instruction");
    const auto& table = p.at("embed.table");
    for (int id : tokens)
        if (id < 0 || id >= table.shape[0])
            throw VocabularyError("gru_encode: token id " + std::to_string(id) + " outside vocabulary");

    auto mv = [&](const Tensor& w, const Tensor& x, const Tensor* b) {
        return tape ? tape->matvec(w, x, b) : ops::matvec(w, x, b);
    };
    auto act = [&](Act k, const Tensor& x) { return tape ? tape->activation(k, x) : ops::activation(k, x); };
    auto had = [&](const Tensor& a, const Tensor& b) { return tape ? tape->hadamard(a, b) : ops::hadamard(a, b); };
    auto add2 = [&](const Tensor& a, const Tensor& b) { return tape ? tape->add(a, b) : ops::add(a, b); };
    auto aff = [&](const Tensor& a, float al, float be) {
        return tape ? tape->affine(a, al, be) : ops::affine(a, al, be);
    };

    Tensor h = Tensor({c.gru_dim});
    for (int id : tokens) {
        Tensor x = tape ? tape->embed_row(table, id) : [&] {
            Tensor row({c.embed_dim});
            std::copy(table.data.begin() + static_cast<std::int64_t>(id) * c.embed_dim,
                      table.data.begin() + static_cast<std::int64_t>(id + 1) * c.embed_dim, row.data.begin());
            return row;
        }();
        Tensor z = act(Act::Sigmoid, add2(mv(p.at("gru.w_z"), x, &p.at("gru.b_z")), mv(p.at("gru.u_z"), h, nullptr)));
        Tensor r = act(Act::Sigmoid, add2(mv(p.at("gru.w_r"), x, &p.at("gru.b_r")), mv(p.at("gru.u_r"), h, nullptr)));
        Tensor n = act(Act::Tanh,
                       add2(mv(p.at("gru.w_n"), x, &p.at("gru.b_n")), mv(p.at("gru.u_n"), had(r, h), nullptr)));
        h = add2(had(aff(z, -1.f, 1.f), n), had(z, h));
    }
    return h;
}

struct LstmState {
    Tensor hidden;
    Tensor cell;
};

inline LstmState lstm_zero_state(const ModelConfig& c) {
    return {Tensor({c.lstm_dim}), Tensor({c.lstm_dim})};
}

/// Standard LSTM step over [input; hidden] with one bias per gate.
inline LstmState lstm_step(const ModelParams& p, const LstmState& state, const Tensor& input, Tape* tape) {
    const auto& wi = p.at("lstm.w_i");
    if (state.hidden.size() + input.size() != wi.shape[1])
        throw DimensionError("lstm_step: state/input dimensions do not match gate weights");
    auto mv = [&](const Tensor& w, const Tensor& x, const Tensor* b) {
        return tape ? tape->matvec(w, x, b) : ops::matvec(w, x, b);
    };
    auto act = [&](Act k, const Tensor& x) { return tape ? tape->activation(k, x) : ops::activation(k, x); };
    auto had = [&](const Tensor& a, const Tensor& b) { return tape ? tape->hadamard(a, b) : ops::hadamard(a, b); };
    auto add2 = [&](const Tensor& a, const Tensor& b) { return tape ? tape->add(a, b) : ops::add(a, b); };

    Tensor cat = tape ? tape->concat(input, state.hidden) : ops::concat(input, state.hidden);
    Tensor i = act(Act::Sigmoid, mv(wi, cat, &p.at("lstm.b_i")));
    Tensor f = act(Act::Sigmoid, mv(p.at("lstm.w_f"), cat, &p.at("lstm.b_f")));
    Tensor o = act(Act::Sigmoid, mv(p.at("lstm.w_o"), cat, &p.at("lstm.b_o")));
    Tensor g = act(Act::Tanh, mv(p.at("lstm.w_g"), cat, &p.at("lstm.b_g")));
    Tensor cell = add2(had(f, state.cell), had(i, g));
    Tensor hidden = had(o, act(Act::Tanh, cell));
    return {hidden, cell};
}

// ---------------------------------------------------------------------------
// full policy forward
// ---------------------------------------------------------------------------

struct PolicyOutput {
    Tensor logits;
    std::optional<Tensor> value;        // [1], A3C only
    std::optional<LstmState> state;     // A3C only
    std::optional<Tensor> attention;    // [d], Gated-Attention only
    Tensor fused;                       // joint representation fed to the trunk
};

/// Forward from a precomputed instruction representation x_L.
inline PolicyOutput policy_forward_encoded(const ModelParams& p, const ModelConfig& c, const Tensor& observation,
                                           const Tensor& x_l, const LstmState* state, Tape* tape) {
    if (!c.is_rl() && state) throw ContractError("policy_forward: recurrent state supplied for IL variant");

    PolicyOutput out;
    Tensor x_i = conv_stack_forward(p, c, observation, tape);

    Tensor fused;
    if (c.fusion == FusionKind::GatedAttention) {
        Tensor a_l = attention_vector(p.at("fusion.attn.w"), p.at("fusion.attn.b"), x_l, tape);
        out.attention = a_l;
        fused = gated_attention(x_i, a_l, tape);
    } else {
        fused = concat_fusion(x_i, x_l, tape);
    }
    out.fused = fused;

    auto mv = [&](const Tensor& w, const Tensor& x, const Tensor* b) {
        return tape ? tape->matvec(w, x, b) : ops::matvec(w, x, b);
    };
    Tensor h = tape ? tape->activation(Act::Relu, mv(p.at("trunk.w"), fused, &p.at("trunk.b")))
                    : ops::activation(Act::Relu, mv(p.at("trunk.w"), fused, &p.at("trunk.b")));

    if (c.is_rl()) {
        LstmState zero = lstm_zero_state(c);
        LstmState next = lstm_step(p, state ? *state : zero, h, tape);
        out.logits = mv(p.at("policy.w"), next.hidden, &p.at("policy.b"));
        out.value = mv(p.at("value.w"), next.hidden, &p.at("value.b"));
        out.state = std::move(next);
    } else {
        out.logits = mv(p.at("policy.w"), h, &p.at("policy.b"));
    }
    return out;
}

inline PolicyOutput policy_forward(const ModelParams& p, const ModelConfig& c, const Tensor& observation,
                                   std::span<const int> tokens, const LstmState* state, Tape* tape) {
    return policy_forward_encoded(p, c, observation, gru_encode(p, c, tokens, tape), state, tape);
}

// ---------------------------------------------------------------------------
// parameter accounting
// ---------------------------------------------------------------------------

/// Exact per-component parameter counts, derived arithmetically (kept
/// independent of param_layout so the two can cross-check each other).
inline std::vector<std::pair<std::string, std::int64_t>> count_params_breakdown(const ModelConfig& c) {
    std::vector<std::pair<std::string, std::int64_t>> out;
    std::int64_t conv = 0, in_ch = 3;
    for (const auto& l : c.conv) {
        conv += in_ch * l.kernel * l.kernel * l.filters + l.filters;
        in_ch = l.filters;
    }
    out.emplace_back("conv", conv);
    out.emplace_back("embedding", static_cast<std::int64_t>(c.vocab_size) * c.embed_dim);
    out.emplace_back("gru", 3LL * (static_cast<std::int64_t>(c.gru_dim) * c.embed_dim +
                                   static_cast<std::int64_t>(c.gru_dim) * c.gru_dim + c.gru_dim));
    if (c.fusion == FusionKind::GatedAttention)
        out.emplace_back("attention", static_cast<std::int64_t>(c.feature_channels()) * c.gru_dim +
                                          c.feature_channels());
    const std::int64_t fused = c.fused_size();
    out.emplace_back("trunk", fused * c.trunk_hidden() + c.trunk_hidden());
    if (c.is_rl()) {
        out.emplace_back("lstm", 4LL * (static_cast<std::int64_t>(c.lstm_dim) * (c.a3c_hidden + c.lstm_dim) +
                                        c.lstm_dim));
        out.emplace_back("policy_head", static_cast<std::int64_t>(c.lstm_dim) * c.action_count + c.action_count);
        out.emplace_back("value_head", static_cast<std::int64_t>(c.lstm_dim) + 1);
    } else {
        out.emplace_back("policy_head", static_cast<std::int64_t>(c.il_hidden) * c.action_count + c.action_count);
    }
    return out;
}

inline std::int64_t count_params(const ModelConfig& c) {
    std::int64_t n = 0;
    for (const auto& [name, v] : count_params_breakdown(c)) n += v;
    return n;
}

}  // namespace gagl
