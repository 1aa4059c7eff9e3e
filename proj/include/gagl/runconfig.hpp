// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: every tunable default, overridable from a plain-text
// key=value file and from command-line flags (flags beat the file, the file
// beats the defaults). Unknown keys are rejected and every run records the
// fully resolved configuration.

#pragma once

#include <fstream>
#include <sstream>

#include "gagl/harness.hpp"

namespace gagl {

struct RunConfig {
    int image_width = 300;
    int image_height = 168;
    std::string mode = "hard";           // easy | medium | hard
    std::string algo = "a3c";            // a3c | bc | dagger
    std::string fusion = "ga";           // ga | concat
    std::string instructions = "train";  // train | desk | path to a file
    std::uint64_t seed = 0;

    // a3c
    long episodes = 100000;
    int workers = 16;
    int horizon = 20;
    float lr = 0.001f;
    float gamma = 0.99f;
    float gae_lambda = 1.0f;
    float entropy_beta = 0.01f;

    // imitation learning
    int il_iterations = 200;
    int il_episodes_per_iter = 10;
    int il_epochs = 10;
    float il_lr = 0.00025f;

    // evaluation / logging
    int eval_episodes = 100;
    long eval_every = 0;       // episodes (a3c) or iterations (il) between eval checkpoints
    float stop_accuracy = 0.f; // stop training once evaluation reaches this (0 = never)
    long log_every = 1;

    // environment
    float turn_deg = 30.f;
    float move_step = 0.5f;
    float contact_radius = 0.5f;
    int max_steps = 30;
    float reward_target = 1.0f;
    float reward_wrong = -0.2f;

    void apply(const std::string& key, const std::string& value) {
        auto as_int = [&] { return std::stoi(value); };
        auto as_long = [&] { return std::stol(value); };
        auto as_float = [&] { return std::stof(value); };
        if (key == "image_width") image_width = as_int();
        else if (key == "image_height") image_height = as_int();
        else if (key == "mode") mode = value;
        else if (key == "algo") algo = value;
        else if (key == "fusion") fusion = value;
        else if (key == "instructions") instructions = value;
        else if (key == "seed") seed = static_cast<std::uint64_t>(std::stoull(value));
        else if (key == "episodes") episodes = as_long();
        else if (key == "workers") workers = as_int();
        else if (key == "horizon") horizon = as_int();
        else if (key == "lr") lr = as_float();
        else if (key == "gamma") gamma = as_float();
        else if (key == "gae_lambda") gae_lambda = as_float();
        else if (key == "entropy_beta") entropy_beta = as_float();
        else if (key == "il_iterations") il_iterations = as_int();
        else if (key == "il_episodes_per_iter") il_episodes_per_iter = as_int();
        else if (key == "il_epochs") il_epochs = as_int();
        else if (key == "il_lr") il_lr = as_float();
        else if (key == "eval_episodes") eval_episodes = as_int();
        else if (key == "eval_every") eval_every = as_long();
        else if (key == "stop_accuracy") stop_accuracy = as_float();
        else if (key == "log_every") log_every = as_long();
        else if (key == "turn_deg") turn_deg = as_float();
        else if (key == "move_step") move_step = as_float();
        else if (key == "contact_radius") contact_radius = as_float();
        else if (key == "max_steps") max_steps = as_int();
        else if (key == "reward_target") reward_target = as_float();
        else if (key == "reward_wrong") reward_wrong = as_float();
        else throw ConfigError("unknown configuration key: " + key);
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file: " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto first = line.find_first_not_of(" \t\r\n");
            if (first == std::string::npos) continue;
            const auto last = line.find_last_not_of(" \t\r\n");
            line = line.substr(first, last - first + 1);
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
            std::string key = line.substr(0, eq), value = line.substr(eq + 1);
            while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
            while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) value.erase(0, 1);
            try {
                apply(key, value);
            } catch (const std::invalid_argument&) {
                throw ConfigError(path + ":" + std::to_string(lineno) + ": bad value for " + key);
            }
        }
    }

    SpawnMode spawn_mode() const {
        if (mode == "easy") return SpawnMode::Easy;
        if (mode == "medium") return SpawnMode::Medium;
        if (mode == "hard") return SpawnMode::Hard;
        throw ConfigError("unknown mode: " + mode);
    }

    FusionKind fusion_kind() const {
        if (fusion == "ga") return FusionKind::GatedAttention;
        if (fusion == "concat") return FusionKind::Concat;
        throw ConfigError("unknown fusion: " + fusion);
    }

    LearnerKind learner_kind() const {
        if (algo == "a3c") return LearnerKind::A3C;
        if (algo == "bc") return LearnerKind::BC;
        if (algo == "dagger") return LearnerKind::DAgger;
        throw ConfigError("unknown algorithm: " + algo);
    }

    ModelConfig model_config() const {
        ModelConfig mc;
        mc.image_width = image_width;
        mc.image_height = image_height;
        mc.fusion = fusion_kind();
        mc.learner = learner_kind();
        mc.vocab_size = static_cast<int>(vocabulary().size());
        return mc;
    }

    WorldConfig world_config() const {
        WorldConfig wc;
        wc.turn_deg = turn_deg;
        wc.move_step = move_step;
        wc.contact_radius = contact_radius;
        wc.max_steps = max_steps;
        wc.reward_target = reward_target;
        wc.reward_wrong = reward_wrong;
        return wc;
    }

    /// Training instruction list per the `instructions` key.
    std::vector<std::string> instruction_list() const {
        if (instructions == "train") return train_test_split().train;
        if (instructions == "desk") return desk_instructions();
        if (instructions == "test") return train_test_split().test;
        std::ifstream in(instructions);
        if (!in) throw IoError("cannot open instruction list: " + instructions);
        std::vector<std::string> out;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) out.push_back(line);
        }
        if (out.empty()) throw ConfigError("instruction list is empty: " + instructions);
        return out;
    }

    /// Fully resolved configuration for reproducibility headers.
    std::vector<std::pair<std::string, std::string>> items() const {
        auto f = [](float v) {
            std::ostringstream os;
            os << v;
            return os.str();
        };
        return {
            {"image_width", std::to_string(image_width)},
            {"image_height", std::to_string(image_height)},
            {"mode", mode},
            {"algo", algo},
            {"fusion", fusion},
            {"instructions", instructions},
            {"seed", std::to_string(seed)},
            {"episodes", std::to_string(episodes)},
            {"workers", std::to_string(workers)},
            {"horizon", std::to_string(horizon)},
            {"lr", f(lr)},
            {"gamma", f(gamma)},
            {"gae_lambda", f(gae_lambda)},
            {"entropy_beta", f(entropy_beta)},
            {"il_iterations", std::to_string(il_iterations)},
            {"il_episodes_per_iter", std::to_string(il_episodes_per_iter)},
            {"il_epochs", std::to_string(il_epochs)},
            {"il_lr", f(il_lr)},
            {"eval_episodes", std::to_string(eval_episodes)},
            {"eval_every", std::to_string(eval_every)},
            {"stop_accuracy", f(stop_accuracy)},
            {"log_every", std::to_string(log_every)},
            {"turn_deg", f(turn_deg)},
            {"move_step", f(move_step)},
            {"contact_radius", f(contact_radius)},
            {"max_steps", std::to_string(max_steps)},
            {"reward_target", f(reward_target)},
            {"reward_wrong", f(reward_wrong)},
        };
    }
};

}  // namespace gagl
