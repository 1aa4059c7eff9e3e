// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Native environment: an 8x8 open room with five colored/sized objects, one
// of which satisfies the episode instruction. Three spawn modes (easy /
// medium / hard), turn/move stepping with contact rewards, and a hard
// 30-step episode limit.

#pragma once

#include <cmath>

#include "gagl/instructions.hpp"

namespace gagl {

enum class SpawnMode : std::uint8_t { Easy = 0, Medium = 1, Hard = 2 };
enum class Action : std::uint8_t { TurnLeft = 0, TurnRight = 1, MoveForward = 2 };

inline const char* action_name(Action a) {
    switch (a) {
        case Action::TurnLeft: return "turn_left";
        case Action::TurnRight: return "turn_right";
        default: return "move_forward";
    }
}

struct ObjectInstance {
    ObjectClass cls;
    Color color;
    SizeAttr size;  // None for single-size classes
    float height;   // world units
    float x, y;
};

struct WorldConfig {
    float room = 8.0f;           // square side, world units
    float wall_margin = 0.3f;    // agent center is clamped to this distance from walls
    float contact_radius = 0.5f;
    float move_step = 0.5f;
    float turn_deg = 30.0f;
    int max_steps = 30;
    float reward_target = 1.0f;
    float reward_wrong = -0.2f;

    // spawn geometry
    float agent_x = 4.0f, agent_y = 1.0f, agent_heading = 90.0f;  // fixed pose, facing north (+y)
    float easy_line_y = 4.5f;          // easy-mode object line
    float object_margin = 0.8f;        // object distance from walls
    float min_object_gap = 1.0f;       // pairwise center separation (2x contact radius)
    float min_agent_gap = 2.0f;        // object distance from agent spawn
    float min_target_gap = 2.0f;       // hard mode: incorrect-object distance from the target
    float fov_deg = 90.0f;
    float medium_min_radius = 2.8f;    // medium mode radial band
    float medium_max_radius = 6.5f;
    float medium_angle_gap = 16.0f;    // pairwise angular separation seen from the agent
    float medium_edge_margin = 4.0f;   // keep-off from the frustum edges
    int rejection_budget = 1000;
};

struct WorldState {
    float agent_x = 0, agent_y = 0, heading = 0;  // degrees in [0,360)
    std::vector<ObjectInstance> objects;
    int target_index = -1;
    int timestep = 0;
    bool done = false;
    Instruction instruction;
    SpawnMode mode = SpawnMode::Easy;
    std::uint64_t rng_seed = 0;
};

// ---------------------------------------------------------------------------
// object/attribute availability
// ---------------------------------------------------------------------------

struct ObjectCombo {
    ObjectClass cls;
    Color color;
    SizeAttr size;
};

inline bool class_is_sized(ObjectClass c) { return c == ObjectClass::Pillar || c == ObjectClass::Torch; }

/// Class default heights; tall is exactly twice short for the sized classes.
inline float base_height(ObjectClass cls, SizeAttr size) {
    switch (cls) {
        case ObjectClass::Pillar: return size == SizeAttr::Tall ? 1.4f : 0.7f;
        case ObjectClass::Torch: return size == SizeAttr::Tall ? 1.2f : 0.6f;
        case ObjectClass::Armor: return 0.9f;
        default: return 0.5f;  // keycard, skullkey
    }
}

/// All 20 spawnable (class, color, size) combinations: pillars and torches
/// in {red,green,blue} x {tall,short}, armor in {red,green}, keycards and
/// skullkeys in {red,blue,yellow} at a single size.
inline const std::vector<ObjectCombo>& object_combos() {
    static const std::vector<ObjectCombo> combos = [] {
        std::vector<ObjectCombo> out;
        for (ObjectClass cls : {ObjectClass::Pillar, ObjectClass::Torch}) {
            for (Color c : {Color::Red, Color::Green, Color::Blue}) {
                out.push_back({cls, c, SizeAttr::Tall});
                out.push_back({cls, c, SizeAttr::Short});
            }
        }
        for (Color c : {Color::Red, Color::Green}) out.push_back({ObjectClass::Armor, c, SizeAttr::None});
        for (ObjectClass cls : {ObjectClass::Keycard, ObjectClass::Skullkey}) {
            for (Color c : {Color::Red, Color::Blue, Color::Yellow}) out.push_back({cls, c, SizeAttr::None});
        }
        return out;
    }();
    return combos;
}

/// Attribute-only filter (ignores superlatives): does the combo match the
/// instruction's color/size/class constraints?
inline bool combo_matches_filters(const Instruction& in, ObjectClass cls, Color color, SizeAttr size) {
    if (in.color != Color::None && color != in.color) return false;
    if (in.size != SizeAttr::None && size != in.size) return false;  // single-size classes never match
    if (in.object_class != ObjectClass::Any && cls != in.object_class) return false;
    return true;
}

/// Full satisfaction test. For superlative instructions the object must be
/// the strict height extremum among the objects passing the color filter.
inline bool satisfies(const Instruction& in, int index, const std::vector<ObjectInstance>& objects) {
    const ObjectInstance& o = objects[static_cast<std::size_t>(index)];
    if (in.superlative == Superlative::None) return combo_matches_filters(in, o.cls, o.color, o.size);

    if (in.color != Color::None && o.color != in.color) return false;
    for (std::size_t j = 0; j < objects.size(); ++j) {
        if (static_cast<int>(j) == index) continue;
        const ObjectInstance& other = objects[j];
        if (in.color != Color::None && other.color != in.color) continue;
        if (in.superlative == Superlative::Largest && other.height >= o.height) return false;
        if (in.superlative == Superlative::Smallest && other.height <= o.height) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// episode generation
// ---------------------------------------------------------------------------

namespace detail {

inline float wrap_deg(float a) {
    a = std::fmod(a, 360.0f);
    return a < 0 ? a + 360.0f : a;
}

inline float dist2(float ax, float ay, float bx, float by) {
    const float dx = ax - bx, dy = ay - by;
    return dx * dx + dy * dy;
}

inline ObjectCombo sample_target_combo(const Instruction& in, Rng& rng) {
    std::vector<ObjectCombo> candidates;
    for (const auto& c : object_combos()) {
        if (in.superlative != Superlative::None) {
            if (in.color == Color::None || c.color == in.color) candidates.push_back(c);
        } else if (combo_matches_filters(in, c.cls, c.color, c.size)) {
            candidates.push_back(c);
        }
    }
    if (candidates.empty()) throw GenerationError("instruction is unsatisfiable: " + in.text);
    return candidates[static_cast<std::size_t>(rng.below(static_cast<int>(candidates.size())))];
}

/// Incorrect objects must not pass the plain attribute filters. Superlative
/// instructions filter by color only at this stage; uniqueness is enforced
/// later by the height ordering.
inline ObjectCombo sample_incorrect_combo(const Instruction& in, Rng& rng, int budget) {
    const auto& combos = object_combos();
    for (int attempt = 0; attempt < budget; ++attempt) {
        const ObjectCombo& c = combos[static_cast<std::size_t>(rng.below(static_cast<int>(combos.size())))];
        if (in.superlative != Superlative::None) return c;  // any combo is admissible
        if (!combo_matches_filters(in, c.cls, c.color, c.size)) return c;
    }
    throw GenerationError("rejection budget exhausted sampling incorrect objects for: " + in.text);
}

/// Heights for a superlative episode: distinct ladder values over the
/// color-filtered set, extremum assigned to the target.
inline void assign_superlative_heights(const Instruction& in, std::vector<ObjectInstance>& objs, int target,
                                       Rng& rng) {
    static const std::vector<float> ladder = {0.6f, 0.8f, 1.0f, 1.2f, 1.4f};
    std::vector<int> filter_set;
    for (std::size_t j = 0; j < objs.size(); ++j)
        if (in.color == Color::None || objs[j].color == in.color) filter_set.push_back(static_cast<int>(j));

    std::vector<float> values = ladder;
    rng.shuffle(values);
    values.resize(filter_set.size());
    std::sort(values.begin(), values.end());
    const float extreme = in.superlative == Superlative::Largest ? values.back() : values.front();
    if (in.superlative == Superlative::Largest) values.pop_back();
    else values.erase(values.begin());
    rng.shuffle(values);

    std::size_t vi = 0;
    for (int j : filter_set) {
        objs[static_cast<std::size_t>(j)].height = (j == target) ? extreme : values[vi++];
    }
}

struct Placement {
    float agent_x, agent_y, heading;
    std::vector<std::pair<float, float>> spots;  // index 0 = target
};

inline Placement place_easy(const WorldConfig& cfg, Rng& rng) {
    Placement p{cfg.agent_x, cfg.agent_y, cfg.agent_heading, {}};
    std::vector<int> slots = {0, 1, 2, 3, 4};
    rng.shuffle(slots);
    for (int s : slots) {
        const float x = cfg.room * static_cast<float>(s + 1) / 6.0f;
        p.spots.emplace_back(x, cfg.easy_line_y);
    }
    return p;
}

inline float ray_to_bounds(float px, float py, float ang_deg, float lo, float hi) {
    const float c = std::cos(ang_deg * 3.14159265358979323846f / 180.f);
    const float s = std::sin(ang_deg * 3.14159265358979323846f / 180.f);
    float t = std::numeric_limits<float>::max();
    if (c > 1e-6f) t = std::min(t, (hi - px) / c);
    if (c < -1e-6f) t = std::min(t, (lo - px) / c);
    if (s > 1e-6f) t = std::min(t, (hi - py) / s);
    if (s < -1e-6f) t = std::min(t, (lo - py) / s);
    return t;
}

/// Medium mode: five angularly separated spots inside the initial frustum.
/// Angles are drawn by stick breaking (sorted uniforms plus fixed gaps), so
/// the minimum pairwise separation holds by construction; radii are
/// rejection-sampled until the Euclidean separation also holds.
inline Placement place_medium(const WorldConfig& cfg, Rng& rng) {
    Placement p{cfg.agent_x, cfg.agent_y, cfg.agent_heading, {}};
    const int n = 5;
    const float span = cfg.fov_deg - 2.0f * cfg.medium_edge_margin;
    const float slack = span - static_cast<float>(n - 1) * cfg.medium_angle_gap;
    if (slack < 0) throw GenerationError("medium spawn: field of view too narrow for angular gaps");

    for (int attempt = 0; attempt < cfg.rejection_budget; ++attempt) {
        std::vector<float> u(n);
        for (float& v : u) v = rng.range(0.f, slack);
        std::sort(u.begin(), u.end());
        std::vector<std::pair<float, float>> spots;
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            const float rel = -cfg.fov_deg / 2 + cfg.medium_edge_margin + u[static_cast<std::size_t>(i)] +
                              static_cast<float>(i) * cfg.medium_angle_gap;
            const float ang = p.heading + rel;
            const float rmax = std::min(cfg.medium_max_radius,
                                        ray_to_bounds(p.agent_x, p.agent_y, ang, cfg.object_margin,
                                                      cfg.room - cfg.object_margin));
            if (rmax <= cfg.medium_min_radius) {
                ok = false;
                break;
            }
            const float r = rng.range(cfg.medium_min_radius, rmax);
            spots.emplace_back(p.agent_x + r * std::cos(ang * 3.14159265358979323846f / 180.f),
                               p.agent_y + r * std::sin(ang * 3.14159265358979323846f / 180.f));
        }
        if (!ok) continue;
        for (std::size_t i = 0; ok && i < spots.size(); ++i)
            for (std::size_t j = i + 1; j < spots.size(); ++j)
                if (dist2(spots[i].first, spots[i].second, spots[j].first, spots[j].second) <
                    cfg.min_object_gap * cfg.min_object_gap) {
                    ok = false;
                    break;
                }
        if (!ok) continue;
        // random assignment of target/incorrect to the angular order
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        rng.shuffle(order);
        p.spots.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) p.spots[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = spots[static_cast<std::size_t>(i)];
        return p;
    }
    throw GenerationError("rejection budget exhausted placing medium-mode objects");
}

inline Placement place_hard(const WorldConfig& cfg, Rng& rng) {
    Placement p{};
    const float lo = cfg.object_margin, hi = cfg.room - cfg.object_margin;
    p.agent_x = rng.range(lo, hi);
    p.agent_y = rng.range(lo, hi);
    p.heading = rng.range(0.f, 360.f);

    auto far_enough = [&](float x, float y, float ox, float oy, float gap) {
        return dist2(x, y, ox, oy) >= gap * gap;
    };

    // target first, then incorrect objects kept away from both endpoints of
    // the agent-to-target path so the oracle's straight approach stays clear
    for (int attempt = 0;; ++attempt) {
        if (attempt >= cfg.rejection_budget) throw GenerationError("rejection budget exhausted placing target");
        const float x = rng.range(lo, hi), y = rng.range(lo, hi);
        if (far_enough(x, y, p.agent_x, p.agent_y, cfg.min_agent_gap)) {
            p.spots.emplace_back(x, y);
            break;
        }
    }
    while (p.spots.size() < 5) {
        bool placed = false;
        for (int attempt = 0; attempt < cfg.rejection_budget; ++attempt) {
            const float x = rng.range(lo, hi), y = rng.range(lo, hi);
            if (!far_enough(x, y, p.agent_x, p.agent_y, cfg.min_agent_gap)) continue;
            if (!far_enough(x, y, p.spots[0].first, p.spots[0].second, cfg.min_target_gap)) continue;
            bool clear = true;
            for (const auto& s : p.spots)
                if (!far_enough(x, y, s.first, s.second, cfg.min_object_gap)) {
                    clear = false;
                    break;
                }
            if (!clear) continue;
            p.spots.emplace_back(x, y);
            placed = true;
            break;
        }
        if (!placed) throw GenerationError("rejection budget exhausted placing incorrect objects");
    }
    return p;
}

}  // namespace detail

/// Builds a deterministic episode: exactly one object satisfies the
/// instruction, positions follow the mode's spawn rules, and the same
/// (mode, instruction, seed) triple always yields a bit-identical state.
inline WorldState spawn_episode(SpawnMode mode, const Instruction& instr, std::uint64_t seed,
                                const WorldConfig& cfg = {}) {
    Rng rng(derive_seed(seed, 0xEC0DE));

    WorldState st;
    st.instruction = instr;
    st.mode = mode;
    st.rng_seed = seed;

    const ObjectCombo target = detail::sample_target_combo(instr, rng);
    std::vector<ObjectCombo> combos{target};
    for (int i = 0; i < 4; ++i) combos.push_back(detail::sample_incorrect_combo(instr, rng, cfg.rejection_budget));

    detail::Placement placement;
    switch (mode) {
        case SpawnMode::Easy: placement = detail::place_easy(cfg, rng); break;
        case SpawnMode::Medium: placement = detail::place_medium(cfg, rng); break;
        case SpawnMode::Hard: placement = detail::place_hard(cfg, rng); break;
    }
    st.agent_x = placement.agent_x;
    st.agent_y = placement.agent_y;
    st.heading = detail::wrap_deg(placement.heading);

    for (std::size_t i = 0; i < combos.size(); ++i) {
        ObjectInstance o;
        o.cls = combos[i].cls;
        o.color = combos[i].color;
        o.size = combos[i].size;
        o.height = base_height(o.cls, o.size);
        o.x = placement.spots[i].first;
        o.y = placement.spots[i].second;
        st.objects.push_back(o);
    }
    st.target_index = 0;
    if (instr.superlative != Superlative::None)
        detail::assign_superlative_heights(instr, st.objects, st.target_index, rng);

    // shuffle object order so target_index is not positional
    std::vector<int> order = {0, 1, 2, 3, 4};
    rng.shuffle(order);
    std::vector<ObjectInstance> shuffled(st.objects.size());
    for (std::size_t i = 0; i < order.size(); ++i) shuffled[static_cast<std::size_t>(order[i])] = st.objects[i];
    st.target_index = order[static_cast<std::size_t>(st.target_index)];
    st.objects = std::move(shuffled);

    int satisfied = 0;
    for (std::size_t i = 0; i < st.objects.size(); ++i)
        if (satisfies(instr, static_cast<int>(i), st.objects)) ++satisfied;
    if (satisfied != 1 || !satisfies(instr, st.target_index, st.objects))
        throw GenerationError("episode generation produced " + std::to_string(satisfied) +
                              " satisfying objects for: " + instr.text);
    return st;
}

struct StepResult {
    float reward = 0.f;
    bool done = false;
};

/// Applies one action. Turns rotate by the configured angle; move_forward
/// advances one step clamped at the walls. Contact with the target ends the
/// episode with the positive reward, contact with any other object with the
/// negative reward, and hitting the step limit ends it with zero.
inline StepResult step(WorldState& st, Action action, const WorldConfig& cfg = {}) {
    if (st.done) throw ContractError("step: episode already finished");

    switch (action) {
        case Action::TurnLeft: st.heading = detail::wrap_deg(st.heading + cfg.turn_deg); break;
        case Action::TurnRight: st.heading = detail::wrap_deg(st.heading - cfg.turn_deg); break;
        case Action::MoveForward: {
            const float rad = st.heading * 3.14159265358979323846f / 180.f;
            st.agent_x = std::clamp(st.agent_x + cfg.move_step * std::cos(rad), cfg.wall_margin,
                                    cfg.room - cfg.wall_margin);
            st.agent_y = std::clamp(st.agent_y + cfg.move_step * std::sin(rad), cfg.wall_margin,
                                    cfg.room - cfg.wall_margin);
            break;
        }
    }
    st.timestep += 1;

    StepResult res;
    int hit = -1;
    float best = cfg.contact_radius * cfg.contact_radius;
    for (std::size_t i = 0; i < st.objects.size(); ++i) {
        const float d2 = detail::dist2(st.agent_x, st.agent_y, st.objects[i].x, st.objects[i].y);
        if (d2 <= best) {
            best = d2;
            hit = static_cast<int>(i);
        }
    }
    if (hit >= 0) {
        res.done = true;
        res.reward = hit == st.target_index ? cfg.reward_target : cfg.reward_wrong;
    } else if (st.timestep >= cfg.max_steps) {
        res.done = true;
        res.reward = 0.f;
    }
    st.done = res.done;
    return res;
}

}  // namespace gagl
