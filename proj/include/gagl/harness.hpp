// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Evaluation and analysis: multitask / zero-shot accuracy over fresh
// episodes, attention-vector exports, and per-episode trace bundles
// (first-person frames, top-down map, step log).

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gagl/learners.hpp"

namespace gagl {

enum class Scenario : std::uint8_t { MT = 0, ZSL = 1 };

inline const char* scenario_name(Scenario s) { return s == Scenario::MT ? "MT" : "ZSL"; }
inline const char* mode_name(SpawnMode m) {
    switch (m) {
        case SpawnMode::Easy: return "easy";
        case SpawnMode::Medium: return "medium";
        default: return "hard";
    }
}

struct InstructionResult {
    std::string text;
    int episodes = 0;
    int successes = 0;
};

struct EvalReport {
    Scenario scenario = Scenario::MT;
    SpawnMode mode = SpawnMode::Easy;
    int episodes = 0;
    int successes = 0;
    double accuracy = 0.0;
    std::vector<InstructionResult> per_instruction;
    std::vector<std::pair<std::string, std::string>> config_echo;
};

/// A policy under evaluation: full world state (for the oracle), the
/// rendered observation, instruction tokens, and a recurrent state carried
/// across the episode.
using PolicyFn = std::function<Action(const WorldState&, const Tensor& obs, const std::vector<int>& tokens,
                                      LstmState& lstm)>;

/// Greedy action from model parameters; ties break toward the lowest index.
inline PolicyFn greedy_policy(const ModelParams& params, const ModelConfig& mc) {
    return [&params, mc](const WorldState&, const Tensor& obs, const std::vector<int>& tokens,
                         LstmState& lstm) -> Action {
        PolicyOutput out = policy_forward(params, mc, obs, tokens, mc.is_rl() ? &lstm : nullptr, nullptr);
        if (out.state) lstm = *out.state;
        int best = 0;
        for (std::int64_t i = 1; i < out.logits.size(); ++i)
            if (out.logits.data[static_cast<std::size_t>(i)] > out.logits.data[static_cast<std::size_t>(best)])
                best = static_cast<int>(i);
        return static_cast<Action>(best);
    };
}

inline PolicyFn oracle_policy(const WorldConfig& wc = {}) {
    return [wc](const WorldState& st, const Tensor&, const std::vector<int>&, LstmState&) {
        return oracle_action(st, wc);
    };
}

struct EvalOptions {
    int episodes = 100;
    std::uint64_t seed = 0;
    std::vector<std::string> instructions;  // empty = canonical split for the scenario
    WorldConfig world{};
    int image_width = 0, image_height = 0;  // 0 = no rendering needed (oracle policies)
};

/// Runs fresh seeded episodes with the policy and reports the success rate.
/// MT draws instructions from the train split, ZSL from the held-out test
/// split; an explicit instruction list must be consistent with the scenario.
inline EvalReport evaluate_policy(const PolicyFn& policy, Scenario scenario, SpawnMode mode,
                                  const EvalOptions& opts) {
    const CorpusSplit& split = train_test_split();
    std::vector<std::string> list = opts.instructions;
    if (list.empty()) {
        list = scenario == Scenario::MT ? split.train : split.test;
    } else {
        const auto& banned = scenario == Scenario::MT ? split.test : split.train;
        for (const auto& t : list)
            if (std::find(banned.begin(), banned.end(), t) != banned.end())
                throw ContractError(std::string("evaluate: instruction belongs to the other split: ") + t);
    }

    EvalReport rep;
    rep.scenario = scenario;
    rep.mode = mode;
    std::map<std::string, InstructionResult> per;

    Rng pick_rng(derive_seed(opts.seed, 0xE7A1));
    for (int ep = 0; ep < opts.episodes; ++ep) {
        const std::string& text = list[static_cast<std::size_t>(pick_rng.below(static_cast<int>(list.size())))];
        const Instruction instr = parse_instruction(text);
        const std::vector<int> tokens = tokenize(text);
        WorldState st = spawn_episode(mode, instr, derive_seed(opts.seed, 0xB0B + static_cast<std::uint64_t>(ep)),
                                      opts.world);
        LstmState lstm;  // sized lazily by the policy itself
        bool success = false;
        while (!st.done) {
            Tensor obs = opts.image_width > 0 ? render(st, opts.image_width, opts.image_height, opts.world)
                                              : Tensor({1});
            const Action a = policy(st, obs, tokens, lstm);
            const StepResult sr = step(st, a, opts.world);
            if (sr.done) success = sr.reward > 0.f;
        }
        rep.episodes += 1;
        rep.successes += success ? 1 : 0;
        auto& slot = per[text];
        slot.text = text;
        slot.episodes += 1;
        slot.successes += success ? 1 : 0;
    }
    rep.accuracy = rep.episodes ? static_cast<double>(rep.successes) / rep.episodes : 0.0;
    for (auto& [k, v] : per) rep.per_instruction.push_back(v);
    return rep;
}

inline EvalReport evaluate(const ModelParams& params, const ModelConfig& mc, Scenario scenario, SpawnMode mode,
                           EvalOptions opts) {
    LstmState init = lstm_zero_state(mc);
    opts.image_width = mc.image_width;
    opts.image_height = mc.image_height;
    PolicyFn greedy = greedy_policy(params, mc);
    PolicyFn seeded = [&](const WorldState& st, const Tensor& obs, const std::vector<int>& tokens,
                          LstmState& lstm) {
        if (st.timestep == 0) lstm = init;  // fresh recurrent state per episode
        return greedy(st, obs, tokens, lstm);
    };
    return evaluate_policy(seeded, scenario, mode, opts);
}

inline void write_report(std::ostream& out, const EvalReport& rep) {
    for (const auto& [k, v] : rep.config_echo) out << "config." << k << "=" << v << "\n";
    out << "scenario=" << scenario_name(rep.scenario) << " mode=" << mode_name(rep.mode)
        << " episodes=" << rep.episodes << " successes=" << rep.successes << " accuracy=" << rep.accuracy
        << "\n";
    for (const auto& r : rep.per_instruction)
        out << "instruction=\"" << r.text << "\" episodes=" << r.episodes << " successes=" << r.successes
            << "\n";
}

// ---------------------------------------------------------------------------
// attention export
// ---------------------------------------------------------------------------

struct AttentionRow {
    std::string text;
    bool is_test = false;
    Tensor values;  // [d]
};

/// One attention vector per instruction, rows grouped by object class then
/// color, with train/test markers. Requires a Gated-Attention model.
inline std::vector<AttentionRow> dump_attention(const ModelParams& params, const ModelConfig& mc,
                                                const std::vector<std::string>& instructions) {
    if (mc.fusion != FusionKind::GatedAttention)
        throw ContractError("dump_attention: model has no attention vector (concat fusion)");

    const auto& test = train_test_split().test;
    std::vector<std::pair<Instruction, std::size_t>> order;
    for (std::size_t i = 0; i < instructions.size(); ++i)
        order.emplace_back(parse_instruction(instructions[i]), i);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first.object_class != b.first.object_class) return a.first.object_class < b.first.object_class;
        return a.first.color < b.first.color;
    });

    std::vector<AttentionRow> rows;
    for (const auto& [instr, idx] : order) {
        const std::string& text = instructions[idx];
        Tensor x_l = gru_encode(params, mc, tokenize(text), nullptr);
        AttentionRow row;
        row.text = text;
        row.is_test = std::find(test.begin(), test.end(), text) != test.end();
        row.values = attention_vector(params.at("fusion.attn.w"), params.at("fusion.attn.b"), x_l, nullptr);
        rows.push_back(std::move(row));
    }
    return rows;
}

/// CSV with a header row; floats printed with enough digits to round-trip
/// bit-exactly.
inline void write_attention_csv(std::ostream& out, const std::vector<AttentionRow>& rows,
                                const std::vector<std::pair<std::string, std::string>>& config_echo = {}) {
    for (const auto& [k, v] : config_echo) out << "# config." << k << "=" << v << "\n";
    if (rows.empty()) return;
    out << "instruction,split";
    for (std::int64_t i = 0; i < rows.front().values.size(); ++i) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), ",a%02d", static_cast<int>(i));
        out << buf;
    }
    out << "\n";
    for (const auto& r : rows) {
        out << '"' << r.text << '"' << ',' << (r.is_test ? "test" : "train");
        for (float v : r.values.data) {
            char buf[24];
            std::snprintf(buf, sizeof(buf), ",%.9g", static_cast<double>(v));
            out << buf;
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// episode traces
// ---------------------------------------------------------------------------

struct TraceSummary {
    int steps = 0;
    float total_reward = 0.f;
    bool success = false;
    int frames_written = 0;
};

/// Writes per-step first-person frames (PPM), a top-down map with the agent
/// path, and a step log. At most 31 frames (initial view + 30 steps).
inline TraceSummary trace_episode_policy(const PolicyFn& policy, const ModelConfig& mc,
                                         const std::string& instruction_text, SpawnMode mode, std::uint64_t seed,
                                         const std::string& out_dir, const WorldConfig& wc = {},
                                         const std::vector<std::pair<std::string, std::string>>& config_echo = {}) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create trace directory: " + out_dir);

    const Instruction instr = parse_instruction(instruction_text);
    const std::vector<int> tokens = tokenize(instruction_text);
    WorldState st = spawn_episode(mode, instr, seed, wc);
    LstmState lstm = lstm_zero_state(mc);

    std::ofstream log(out_dir + "/steps.csv");
    if (!log) throw IoError("cannot open step log in " + out_dir);
    for (const auto& [k, v] : config_echo) log << "# config." << k << "=" << v << "\n";
    log << "step,x,y,heading,action,reward,done\n";

    TraceSummary sum;
    std::vector<std::pair<float, float>> path{{st.agent_x, st.agent_y}};
    auto frame_path = [&](int i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "/frame_%03d.ppm", i);
        return out_dir + buf;
    };

    Frame fr = render_frame(st, mc.image_width, mc.image_height, wc);
    write_ppm(fr, frame_path(sum.frames_written++));
    char line[160];
    std::snprintf(line, sizeof(line), "0,%.4f,%.4f,%.1f,,0,0\n", static_cast<double>(st.agent_x),
                  static_cast<double>(st.agent_y), static_cast<double>(st.heading));
    log << line;

    while (!st.done) {
        const Tensor obs = to_tensor(fr);
        const Action a = policy(st, obs, tokens, lstm);
        const StepResult sr = step(st, a, wc);
        sum.steps += 1;
        sum.total_reward += sr.reward;
        if (sr.done) sum.success = sr.reward > 0.f;
        path.emplace_back(st.agent_x, st.agent_y);

        fr = render_frame(st, mc.image_width, mc.image_height, wc);
        write_ppm(fr, frame_path(sum.frames_written++));
        std::snprintf(line, sizeof(line), "%d,%.4f,%.4f,%.1f,%s,%.3f,%d\n", st.timestep,
                      static_cast<double>(st.agent_x), static_cast<double>(st.agent_y),
                      static_cast<double>(st.heading), action_name(a), static_cast<double>(sr.reward),
                      sr.done ? 1 : 0);
        log << line;
    }
    write_ppm(render_map(st, path, wc), out_dir + "/map.ppm");
    return sum;
}

inline TraceSummary trace_episode(const ModelParams& params, const ModelConfig& mc,
                                  const std::string& instruction_text, SpawnMode mode, std::uint64_t seed,
                                  const std::string& out_dir, const WorldConfig& wc = {},
                                  const std::vector<std::pair<std::string, std::string>>& config_echo = {}) {
    return trace_episode_policy(greedy_policy(params, mc), mc, instruction_text, mode, seed, out_dir, wc,
                                config_echo);
}

}  // namespace gagl
