// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// First-person software renderer: a column raycast of the room walls plus
// depth-sorted billboard sprites for the objects, 90 degree horizontal field
// of view. Palette and sprite geometry are fixed and versioned so learned
// policies stay comparable across builds.

#pragma once

#include <fstream>

#include "gagl/tensor.hpp"
#include "gagl/world.hpp"

namespace gagl {

inline constexpr const char* kRenderDataVersion = "gagl-render-v1";

struct Rgb {
    std::uint8_t r, g, b;
};

namespace palette {
inline constexpr Rgb kWall{140, 140, 150};
inline constexpr Rgb kFloor{90, 80, 70};
inline constexpr Rgb kCeiling{58, 58, 64};
inline constexpr Rgb kFlame{255, 214, 90};

inline constexpr Rgb body_color(Color c) {
    switch (c) {
        case Color::Red: return {209, 34, 34};
        case Color::Green: return {32, 182, 47};
        case Color::Blue: return {40, 64, 217};
        case Color::Yellow: return {229, 217, 26};
        default: return {128, 128, 128};
    }
}
}  // namespace palette

/// 8-bit RGB frame, rows top to bottom.
struct Frame {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;  // height*width*3

    Rgb get(int x, int y) const {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                                   static_cast<std::size_t>(x));
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                                   static_cast<std::size_t>(x));
        rgb[i] = c.r;
        rgb[i + 1] = c.g;
        rgb[i + 2] = c.b;
    }
};

namespace detail {

inline constexpr float kPi = 3.14159265358979323846f;
inline constexpr float kEyeHeight = 0.8f;
inline constexpr float kWallHeight = 2.0f;

struct SpriteShape {
    float aspect;  // world width = aspect * height
};

inline SpriteShape sprite_shape(ObjectClass cls) {
    switch (cls) {
        case ObjectClass::Pillar: return {0.55f};
        case ObjectClass::Torch: return {0.50f};
        case ObjectClass::Armor: return {0.75f};
        case ObjectClass::Keycard: return {0.90f};
        default: return {0.90f};  // skullkey
    }
}

/// Silhouette test in sprite-local coordinates: u in [-1,1] across the
/// width, v in [0,1] from ground to the object's height. Returns false for
/// transparent texels; otherwise sets the texel color.
inline bool sprite_texel(const ObjectInstance& o, float u, float v, Rgb* out) {
    const Rgb body = palette::body_color(o.color);
    switch (o.cls) {
        case ObjectClass::Pillar:
            if (std::fabs(u) > 0.85f) return false;
            *out = body;
            return true;
        case ObjectClass::Torch:
            if (v > 0.78f) {
                if (std::fabs(u) > 0.55f) return false;
                *out = palette::kFlame;
                return true;
            }
            if (std::fabs(u) > 0.30f) return false;
            *out = body;
            return true;
        case ObjectClass::Armor:
            if (std::fabs(u) > 0.25f + 0.70f * v) return false;
            *out = body;
            return true;
        case ObjectClass::Keycard:
            if (v < 0.45f || v > 0.95f || std::fabs(u) > 0.60f) return false;
            *out = body;
            return true;
        default:  // skullkey: floating diamond
            if (std::fabs(u) / 0.62f + std::fabs(v - 0.70f) / 0.28f > 1.0f) return false;
            *out = body;
            return true;
    }
}

}  // namespace detail

/// Renders the first-person view of a world state.
inline Frame render_frame(const WorldState& st, int width, int height, const WorldConfig& cfg = {}) {
    if (width < 2 || height < 2) throw DimensionError("render_frame: resolution too small");
    Frame fr;
    fr.width = width;
    fr.height = height;
    fr.rgb.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3, 0);

    const float rad = st.heading * detail::kPi / 180.f;
    const float dirx = std::cos(rad), diry = std::sin(rad);
    const float planex = -std::sin(rad), planey = std::cos(rad);  // |plane| = tan(fov/2) = 1
    const float focal = static_cast<float>(width) / 2.0f;
    const float cy = static_cast<float>(height) / 2.0f;

    // walls, floor, ceiling
    for (int c = 0; c < width; ++c) {
        const float camx = 2.0f * (static_cast<float>(c) + 0.5f) / static_cast<float>(width) - 1.0f;
        const float rx = dirx + planex * camx, ry = diry + planey * camx;
        float t = std::numeric_limits<float>::max();
        if (rx > 1e-6f) t = std::min(t, (cfg.room - st.agent_x) / rx);
        if (rx < -1e-6f) t = std::min(t, (0.f - st.agent_x) / rx);
        if (ry > 1e-6f) t = std::min(t, (cfg.room - st.agent_y) / ry);
        if (ry < -1e-6f) t = std::min(t, (0.f - st.agent_y) / ry);
        // t is the perpendicular distance (ray has unit component along dir)
        const int top = std::clamp(static_cast<int>(cy - focal * (detail::kWallHeight - detail::kEyeHeight) / t),
                                   0, height);
        const int bot = std::clamp(static_cast<int>(cy + focal * detail::kEyeHeight / t), 0, height);
        for (int y = 0; y < top; ++y) fr.set(c, y, palette::kCeiling);
        for (int y = top; y < bot; ++y) fr.set(c, y, palette::kWall);
        for (int y = bot; y < height; ++y) fr.set(c, y, palette::kFloor);
    }

    // billboard sprites, painter's order (far to near)
    std::vector<int> order(st.objects.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::vector<float> depth(st.objects.size());
    for (std::size_t i = 0; i < st.objects.size(); ++i)
        depth[i] = (st.objects[i].x - st.agent_x) * dirx + (st.objects[i].y - st.agent_y) * diry;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return depth[static_cast<std::size_t>(a)] > depth[static_cast<std::size_t>(b)];
    });

    const float rightx = diry, righty = -dirx;  // screen-x axis
    for (int idx : order) {
        const ObjectInstance& o = st.objects[static_cast<std::size_t>(idx)];
        const float d = depth[static_cast<std::size_t>(idx)];
        if (d < 0.12f) continue;
        const float lat = (o.x - st.agent_x) * rightx + (o.y - st.agent_y) * righty;
        const float center = static_cast<float>(width) / 2.0f + focal * lat / d;
        const float half_w = focal * (detail::sprite_shape(o.cls).aspect * o.height * 0.5f) / d;
        const float bot_f = cy + focal * detail::kEyeHeight / d;
        const float top_f = cy - focal * (o.height - detail::kEyeHeight) / d;
        if (bot_f <= top_f) continue;

        const int c0 = std::max(0, static_cast<int>(std::floor(center - half_w)));
        const int c1 = std::min(width - 1, static_cast<int>(std::ceil(center + half_w)));
        const int r0 = std::max(0, static_cast<int>(std::floor(top_f)));
        const int r1 = std::min(height - 1, static_cast<int>(std::ceil(bot_f)));
        for (int c = c0; c <= c1; ++c) {
            const float u = (static_cast<float>(c) + 0.5f - center) / half_w;
            if (u < -1.f || u > 1.f) continue;
            for (int r = r0; r <= r1; ++r) {
                const float v = (bot_f - (static_cast<float>(r) + 0.5f)) / (bot_f - top_f);
                if (v < 0.f || v > 1.f) continue;
                Rgb texel;
                if (detail::sprite_texel(o, u, v, &texel)) fr.set(c, r, texel);
            }
        }
    }
    return fr;
}

/// Frame as a 3xHxW tensor of reals in [0,1].
inline Tensor to_tensor(const Frame& fr) {
    Tensor t({3, fr.height, fr.width});
    const std::size_t plane = static_cast<std::size_t>(fr.height) * static_cast<std::size_t>(fr.width);
    for (std::size_t i = 0; i < plane; ++i) {
        t.data[i] = static_cast<float>(fr.rgb[3 * i]) / 255.f;
        t.data[plane + i] = static_cast<float>(fr.rgb[3 * i + 1]) / 255.f;
        t.data[2 * plane + i] = static_cast<float>(fr.rgb[3 * i + 2]) / 255.f;
    }
    return t;
}

/// Observation tensor for a state at the given resolution.
inline Tensor render(const WorldState& st, int width, int height, const WorldConfig& cfg = {}) {
    return to_tensor(render_frame(st, width, height, cfg));
}

inline void write_ppm(const Frame& fr, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "P6\n" << fr.width << " " << fr.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(fr.rgb.data()), static_cast<std::streamsize>(fr.rgb.size()));
    if (!out) throw IoError("write failed: " + path);
}

/// Top-down map of an episode: room border, objects as discs (target
/// ringed), and the agent's path.
inline Frame render_map(const WorldState& st, const std::vector<std::pair<float, float>>& path,
                        const WorldConfig& cfg = {}, int size = 256) {
    Frame fr;
    fr.width = size;
    fr.height = size;
    fr.rgb.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size) * 3, 235);

    const float scale = static_cast<float>(size) / cfg.room;
    auto px = [&](float wx) { return std::clamp(static_cast<int>(wx * scale), 0, size - 1); };
    auto py = [&](float wy) { return std::clamp(size - 1 - static_cast<int>(wy * scale), 0, size - 1); };

    for (int i = 0; i < size; ++i) {
        fr.set(i, 0, {40, 40, 40});
        fr.set(i, size - 1, {40, 40, 40});
        fr.set(0, i, {40, 40, 40});
        fr.set(size - 1, i, {40, 40, 40});
    }
    for (std::size_t i = 0; i < st.objects.size(); ++i) {
        const ObjectInstance& o = st.objects[i];
        const bool target = static_cast<int>(i) == st.target_index;
        const int r = static_cast<int>(cfg.contact_radius * scale);
        const int cx = px(o.x), cyp = py(o.y);
        for (int dy = -r - 2; dy <= r + 2; ++dy) {
            for (int dx = -r - 2; dx <= r + 2; ++dx) {
                const int x = cx + dx, y = cyp + dy;
                if (x < 0 || y < 0 || x >= size || y >= size) continue;
                const float dd = std::sqrt(static_cast<float>(dx * dx + dy * dy));
                if (dd <= static_cast<float>(r)) fr.set(x, y, palette::body_color(o.color));
                else if (target && dd <= static_cast<float>(r + 2)) fr.set(x, y, {0, 0, 0});
            }
        }
    }
    for (std::size_t i = 1; i < path.size(); ++i) {
        int x0 = px(path[i - 1].first), y0 = py(path[i - 1].second);
        int x1 = px(path[i].first), y1 = py(path[i].second);
        const int steps = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
        for (int s = 0; s <= steps; ++s) {
            const float t = steps ? static_cast<float>(s) / static_cast<float>(steps) : 0.f;
            fr.set(static_cast<int>(std::round(x0 + t * (x1 - x0))),
                   static_cast<int>(std::round(y0 + t * (y1 - y0))), {30, 30, 200});
        }
    }
    if (!path.empty()) {
        fr.set(px(path.front().first), py(path.front().second), {200, 30, 30});
    }
    return fr;
}

}  // namespace gagl
