// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Fixed-layout binary checkpoints: magic "GAGL0001", serialized model
// configuration, then each named tensor (u32 name length + bytes, u32 rank,
// i64 little-endian dims, f32 little-endian data). Save -> load -> save is
// byte-identical.

#pragma once

#include <bit>
#include <cstring>
#include <fstream>

#include "gagl/nn.hpp"

namespace gagl {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

namespace detail {

inline constexpr char kCheckpointMagic[8] = {'G', 'A', 'G', 'L', '0', '0', '0', '1'};

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("checkpoint truncated");
    return v;
}

inline void write_model_config(std::ostream& out, const ModelConfig& c) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(c.image_width));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(c.image_height));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(c.conv.size()));
    for (const auto& l : c.conv) {
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(l.filters));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(l.kernel));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(l.stride));
    }
    for (int v : {c.embed_dim, c.gru_dim, c.lstm_dim, c.il_hidden, c.a3c_hidden, c.action_count, c.vocab_size})
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(v));
    write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(c.fusion));
    write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(c.learner));
}

inline ModelConfig read_model_config(std::istream& in) {
    ModelConfig c;
    c.image_width = static_cast<int>(read_pod<std::uint32_t>(in));
    c.image_height = static_cast<int>(read_pod<std::uint32_t>(in));
    const auto n = read_pod<std::uint32_t>(in);
    if (n == 0 || n > 16) throw IoError("checkpoint: implausible conv layer count");
    c.conv.clear();
    for (std::uint32_t i = 0; i < n; ++i) {
        ConvLayerSpec l{};
        l.filters = static_cast<int>(read_pod<std::uint32_t>(in));
        l.kernel = static_cast<int>(read_pod<std::uint32_t>(in));
        l.stride = static_cast<int>(read_pod<std::uint32_t>(in));
        c.conv.push_back(l);
    }
    c.embed_dim = static_cast<int>(read_pod<std::uint32_t>(in));
    c.gru_dim = static_cast<int>(read_pod<std::uint32_t>(in));
    c.lstm_dim = static_cast<int>(read_pod<std::uint32_t>(in));
    c.il_hidden = static_cast<int>(read_pod<std::uint32_t>(in));
    c.a3c_hidden = static_cast<int>(read_pod<std::uint32_t>(in));
    c.action_count = static_cast<int>(read_pod<std::uint32_t>(in));
    c.vocab_size = static_cast<int>(read_pod<std::uint32_t>(in));
    c.fusion = static_cast<FusionKind>(read_pod<std::uint8_t>(in));
    c.learner = static_cast<LearnerKind>(read_pod<std::uint8_t>(in));
    return c;
}

}  // namespace detail

struct Checkpoint {
    ModelConfig config;
    ModelParams params;
};

inline void save_checkpoint(const std::string& path, const ModelConfig& config, const ModelParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    out.write(detail::kCheckpointMagic, sizeof(detail::kCheckpointMagic));
    detail::write_model_config(out, config);
    detail::write_pod<std::uint64_t>(out, params.tensors.size());
    for (const auto& [name, t] : params.tensors) {
        detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
        for (std::int64_t d : t.shape) detail::write_pod<std::int64_t>(out, d);
        out.write(reinterpret_cast<const char*>(t.data.data()),
                  static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    }
    if (!out) throw IoError("checkpoint write failed: " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, detail::kCheckpointMagic, sizeof(magic)) != 0)
        throw IoError("bad checkpoint magic in " + path);

    Checkpoint ck;
    ck.config = detail::read_model_config(in);
    const auto count = detail::read_pod<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto name_len = detail::read_pod<std::uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const auto rank = detail::read_pod<std::uint32_t>(in);
        if (rank == 0 || rank > 8) throw IoError("checkpoint: implausible tensor rank");
        Shape shape(rank);
        for (auto& d : shape) d = detail::read_pod<std::int64_t>(in);
        Tensor t{shape};
        in.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(float)));
        if (!in) throw IoError("checkpoint truncated: " + path);
        ck.params.tensors.emplace(std::move(name), std::move(t));
    }

    // config compatibility: the stored layout must match the stored config
    for (const auto& spec : param_layout(ck.config)) {
        auto it = ck.params.tensors.find(spec.name);
        if (it == ck.params.tensors.end() || it->second.shape != spec.shape)
            throw IoError("checkpoint does not match its own model configuration: " + spec.name);
    }
    return ck;
}

}  // namespace gagl
