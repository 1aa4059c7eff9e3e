// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Privileged optimal-action policy used as the imitation-learning
// supervisor. Reads ground-truth geometry: reorient toward the target while
// the heading deviation exceeds the dead zone, otherwise advance.

#pragma once

#include "gagl/world.hpp"

namespace gagl {

/// Minimal signed rotation carrying `from_deg` onto `to_deg`, in
/// (-180, 180]. Positive means counter-clockwise (turn_left).
inline float shortest_signed_angle(float from_deg, float to_deg) {
    float d = std::fmod(to_deg - from_deg, 360.0f);
    if (d > 180.0f) d -= 360.0f;
    if (d <= -180.0f) d += 360.0f;
    return d;
}

/// Optimal action for the current state. The dead zone is half the
/// per-action turn angle.
inline Action oracle_action(const WorldState& st, const WorldConfig& cfg = {}) {
    if (st.done) throw ContractError("oracle_action: episode already finished");
    const ObjectInstance& target = st.objects[static_cast<std::size_t>(st.target_index)];
    const float bearing =
        std::atan2(target.y - st.agent_y, target.x - st.agent_x) * 180.0f / 3.14159265358979323846f;
    const float dev = shortest_signed_angle(st.heading, bearing);
    const float dead_zone = cfg.turn_deg / 2.0f;
    if (std::fabs(dev) > dead_zone) return dev > 0 ? Action::TurnLeft : Action::TurnRight;
    return Action::MoveForward;
}

}  // namespace gagl
