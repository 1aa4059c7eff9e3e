// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Policy optimization: A3C with generalized advantage estimation and entropy
// regularization, Behavioral Cloning and DAgger with dataset aggregation,
// and the SGD/RMSProp update rules.

#pragma once

#include <atomic>
#include <deque>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>

#include "gagl/nn.hpp"
#include "gagl/oracle.hpp"
#include "gagl/render.hpp"

namespace gagl {

// ---------------------------------------------------------------------------
// advantage estimation and losses
// ---------------------------------------------------------------------------

struct GaeResult {
    std::vector<float> advantages;
    std::vector<float> returns;
};

/// delta_t = r_t + gamma*V_{t+1} - V_t with V past the end equal to the
/// bootstrap; A_t = sum_l (gamma*lambda)^l delta_{t+l}; returns = A + V.
inline GaeResult compute_gae(std::span<const float> rewards, std::span<const float> values, float bootstrap,
                             float gamma, float lambda) {
    if (rewards.size() != values.size()) throw ContractError("compute_gae: rewards/values length mismatch");
    const std::size_t n = rewards.size();
    GaeResult out;
    out.advantages.assign(n, 0.f);
    out.returns.assign(n, 0.f);
    float acc = 0.f;
    for (std::size_t i = n; i-- > 0;) {
        const float next_v = (i + 1 < n) ? values[i + 1] : bootstrap;
        const float delta = rewards[i] + gamma * next_v - values[i];
        acc = delta + gamma * lambda * acc;
        out.advantages[i] = acc;
        out.returns[i] = acc + values[i];
    }
    return out;
}

/// Shannon entropy with 0*ln(0) = 0.
inline float entropy(std::span<const float> probs) {
    float h = 0.f;
    for (float p : probs)
        if (p > 0.f) h -= p * std::log(p);
    return h;
}

inline float huber(float pred, float target, float delta = 1.f) {
    return ops::huber_scalar(pred - target, delta);
}

// ---------------------------------------------------------------------------
// optimizers
// ---------------------------------------------------------------------------

inline void sgd_step(ModelParams& params, const NamedGrads& grads, float lr) {
    for (auto& [name, t] : params.tensors) {
        auto it = grads.find(name);
        if (it == grads.end()) throw ContractError("sgd_step: missing gradient for " + name);
        if (!t.same_shape(it->second)) throw DimensionError("sgd_step: gradient shape mismatch for " + name);
        ops::axpy(-lr, it->second.data.data(), t.data.data(), t.size());
    }
}

struct RmsPropState {
    std::map<std::string, Tensor> v;
};

/// v <- alpha*v + (1-alpha)*g^2 ; p <- p - lr*g/(sqrt(v)+eps)
inline void rmsprop_step(ModelParams& params, const NamedGrads& grads, RmsPropState& state, float lr,
                         float alpha = 0.99f, float eps = 1e-8f) {
    for (auto& [name, t] : params.tensors) {
        auto it = grads.find(name);
        if (it == grads.end()) throw ContractError("rmsprop_step: missing gradient for " + name);
        auto [vit, inserted] = state.v.try_emplace(name, Tensor(t.shape));
        Tensor& v = vit->second;
        const std::vector<float>& g = it->second.data;
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            v.data[i] = alpha * v.data[i] + (1.f - alpha) * g[i] * g[i];
            t.data[i] -= lr * g[i] / (std::sqrt(v.data[i]) + eps);
        }
    }
}

// ---------------------------------------------------------------------------
// trajectories
// ---------------------------------------------------------------------------

struct Transition {
    Frame obs;
    std::vector<int> tokens;
    int action = 0;
    float reward = 0.f;
    float value = 0.f;
    float log_prob = 0.f;
    bool done = false;
};

struct Trajectory {
    std::vector<Transition> steps;
    float bootstrap = 0.f;  // value estimate past a non-terminal cutoff
};

/// Per-step tape handles needed to assemble the A3C loss.
struct A3CStepVars {
    Tensor logits;  // taped
    Tensor value;   // taped, [1]
    int action = 0;
};

/// loss = sum_t[-log pi(a_t)*A_t] + 1/2 sum_t (V_t - ret_t)^2
///        - beta * sum_t H(pi(.|s_t)),
/// with advantages and returns treated as constants.
inline Tensor a3c_loss(Tape& tape, std::span<const A3CStepVars> steps, std::span<const float> advantages,
                       std::span<const float> returns, float entropy_beta) {
    if (steps.size() != advantages.size() || steps.size() != returns.size())
        throw ContractError("a3c_loss: step/advantage length mismatch");
    Tensor total = tape.constant(Tensor::scalar(0.f));
    for (std::size_t t = 0; t < steps.size(); ++t) {
        Tensor logp = tape.log_softmax(steps[t].logits);
        Tensor pg = tape.affine(tape.pick(logp, steps[t].action), -advantages[t], 0.f);
        Tensor vdiff = tape.affine(steps[t].value, 1.f, -returns[t]);
        Tensor vloss = tape.affine(tape.hadamard(vdiff, vdiff), 0.5f, 0.f);
        Tensor probs = tape.softmax(steps[t].logits);
        Tensor ent = tape.affine(tape.sum(tape.hadamard(probs, logp)), -1.f, 0.f);
        Tensor term = tape.add(tape.add(pg, vloss), tape.affine(ent, -entropy_beta, 0.f));
        total = tape.add(total, term);
    }
    return total;
}

// ---------------------------------------------------------------------------
// shared parameter store (A3C)
// ---------------------------------------------------------------------------

/// Shared parameters with atomic gradient application and consistent
/// snapshot reads. Actors may apply gradients computed from stale
/// snapshots.
class ParamStore {
public:
    explicit ParamStore(ModelParams initial) : params_(std::move(initial)) {}

    ModelParams snapshot() const {
        std::lock_guard<std::mutex> lock(mu_);
        return params_;
    }

    void apply_sgd(const NamedGrads& grads, float lr) {
        std::lock_guard<std::mutex> lock(mu_);
        sgd_step(params_, grads, lr);
        ++applies_;
    }

    long apply_count() const {
        std::lock_guard<std::mutex> lock(mu_);
        return applies_;
    }

private:
    mutable std::mutex mu_;
    ModelParams params_;
    long applies_ = 0;
};

// ---------------------------------------------------------------------------
// A3C training
// ---------------------------------------------------------------------------

struct TrainEvent {
    long episode = 0;
    double window_accuracy = 0.0;  // success rate over the trailing window
    float last_loss = 0.f;
    const ModelParams* params = nullptr;
};

using TrainMonitor = std::function<bool(const TrainEvent&)>;  // return true to stop

struct A3CConfig {
    int workers = 16;
    float lr = 0.001f;
    float gamma = 0.99f;
    float gae_lambda = 1.0f;
    float entropy_beta = 0.01f;
    int horizon = 20;
    long episode_budget = 100000;
    std::uint64_t seed = 0;
    long monitor_every = 0;  // episodes between monitor calls (0 = never)
    TrainMonitor monitor;
    std::ostream* progress = nullptr;
};

namespace detail {

struct SharedTrainState {
    std::atomic<long> next_episode{0};
    std::atomic<long> finished_episodes{0};
    std::atomic<bool> stop{false};
    std::mutex log_mu;
    std::deque<int> window;
    long window_successes = 0;
};

inline int sample_categorical(const Tensor& probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::int64_t i = 0; i < probs.size(); ++i) {
        acc += probs.data[static_cast<std::size_t>(i)];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
}

inline void a3c_worker(const A3CConfig& cfg, const ModelConfig& mc, const WorldConfig& wc, SpawnMode mode,
                       const std::vector<std::string>& instructions, ParamStore& store, SharedTrainState& shared) {
    ModelParams local = store.snapshot();

    while (!shared.stop.load(std::memory_order_relaxed)) {
        const long ep = shared.next_episode.fetch_add(1);
        if (ep >= cfg.episode_budget) break;

        Rng ep_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(ep) * 2 + 1));
        const std::string& text = instructions[static_cast<std::size_t>(
            ep_rng.below(static_cast<int>(instructions.size())))];
        const Instruction instr = parse_instruction(text);
        const std::vector<int> tokens = tokenize(text);
        WorldState st = spawn_episode(mode, instr, derive_seed(cfg.seed, static_cast<std::uint64_t>(ep) * 2), wc);

        LstmState lstm = lstm_zero_state(mc);  // values only; re-bound per segment
        float episode_reward = 0.f;
        float last_loss = 0.f;
        bool success = false;

        while (!st.done && !shared.stop.load(std::memory_order_relaxed)) {
            Tape tape;
            ModelParams bound = bind_params(tape, local);
            Tensor x_l = gru_encode(bound, mc, tokens, &tape);
            LstmState seg_state{tape.constant(lstm.hidden), tape.constant(lstm.cell)};

            std::vector<A3CStepVars> steps;
            std::vector<float> rewards, values;
            bool terminal = false;
            for (int h = 0; h < cfg.horizon && !st.done; ++h) {
                Tensor obs = render(st, mc.image_width, mc.image_height, wc);
                PolicyOutput out = policy_forward_encoded(bound, mc, obs, x_l, &seg_state, &tape);
                const Tensor probs = ops::softmax(out.logits);
                const int action = sample_categorical(probs, ep_rng);
                const StepResult sr = step(st, static_cast<Action>(action), wc);

                steps.push_back({out.logits, *out.value, action});
                rewards.push_back(sr.reward);
                values.push_back(out.value->data[0]);
                seg_state = *out.state;
                episode_reward += sr.reward;
                if (sr.done) {
                    terminal = true;
                    success = sr.reward > 0.f;
                }
            }
            if (steps.empty()) break;

            float bootstrap = 0.f;
            if (!terminal) {
                Tensor obs = render(st, mc.image_width, mc.image_height, wc);
                LstmState plain{seg_state.hidden, seg_state.cell};
                plain.hidden.node = plain.cell.node = -1;
                PolicyOutput out = policy_forward(local, mc, obs, tokens, &plain, nullptr);
                bootstrap = out.value->data[0];
            }
            const GaeResult gae = compute_gae(rewards, values, bootstrap, cfg.gamma, cfg.gae_lambda);
            Tensor loss = a3c_loss(tape, steps, gae.advantages, gae.returns, cfg.entropy_beta);
            last_loss = loss.data[0];

            const NamedGrads grads = collect_grads(bound, tape.backward(loss));
            store.apply_sgd(grads, cfg.lr);
            local = store.snapshot();

            lstm.hidden = seg_state.hidden;
            lstm.cell = seg_state.cell;
            lstm.hidden.node = lstm.cell.node = -1;
        }

        const long finished = shared.finished_episodes.fetch_add(1) + 1;
        double window_acc;
        {
            std::lock_guard<std::mutex> lock(shared.log_mu);
            shared.window.push_back(success ? 1 : 0);
            shared.window_successes += success ? 1 : 0;
            if (shared.window.size() > 100) {
                shared.window_successes -= shared.window.front();
                shared.window.pop_front();
            }
            window_acc = static_cast<double>(shared.window_successes) /
                         static_cast<double>(shared.window.size());
            if (cfg.progress) {
                (*cfg.progress) << "episode=" << finished << " steps=" << st.timestep
                                << " reward=" << episode_reward << " success=" << (success ? 1 : 0)
                                << " accuracy=" << window_acc << " loss=" << last_loss << "\n";
            }
        }
        if (cfg.monitor && cfg.monitor_every > 0 && finished % cfg.monitor_every == 0) {
            const ModelParams snap = store.snapshot();
            TrainEvent ev{finished, window_acc, last_loss, &snap};
            if (cfg.monitor(ev)) shared.stop.store(true, std::memory_order_relaxed);
        }
    }
}

}  // namespace detail

/// Runs `workers` concurrent actors against a shared parameter store. Each
/// actor snapshots the parameters, rolls out up to the horizon sampling from
/// the policy, computes the A3C loss gradients locally and applies them
/// atomically. A single worker with a fixed seed is bit-reproducible.
inline ModelParams a3c_train(const A3CConfig& cfg, const ModelConfig& mc, const WorldConfig& wc, SpawnMode mode,
                             const std::vector<std::string>& instructions, ModelParams initial) {
    if (cfg.workers < 1) throw ContractError("a3c_train: worker count must be >= 1");
    if (instructions.empty()) throw ContractError("a3c_train: no training instructions");

    ParamStore store(std::move(initial));
    detail::SharedTrainState shared;
    if (cfg.workers == 1) {
        detail::a3c_worker(cfg, mc, wc, mode, instructions, store, shared);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(cfg.workers));
        for (int w = 0; w < cfg.workers; ++w)
            threads.emplace_back(detail::a3c_worker, std::cref(cfg), std::cref(mc), std::cref(wc), mode,
                                 std::cref(instructions), std::ref(store), std::ref(shared));
        for (auto& t : threads) t.join();
    }
    return store.snapshot();
}

/// Variant that also reports the number of gradient applications.
inline std::pair<ModelParams, long> a3c_train_counted(const A3CConfig& cfg, const ModelConfig& mc,
                                                      const WorldConfig& wc, SpawnMode mode,
                                                      const std::vector<std::string>& instructions,
                                                      ModelParams initial) {
    if (cfg.workers < 1) throw ContractError("a3c_train: worker count must be >= 1");
    ParamStore store(std::move(initial));
    detail::SharedTrainState shared;
    detail::a3c_worker(cfg, mc, wc, mode, instructions, store, shared);
    return {store.snapshot(), store.apply_count()};
}

// ---------------------------------------------------------------------------
// imitation learning (Behavioral Cloning and DAgger)
// ---------------------------------------------------------------------------

struct ILSample {
    Frame obs;
    std::vector<int> tokens;
    int oracle_action = 0;
};

/// Grows across iterations; never shrinks.
struct AggregatedDataset {
    std::vector<ILSample> samples;
};

struct ILConfig {
    int iterations = 200;
    int episodes_per_iter = 10;
    int epochs = 10;
    float lr = 0.00025f;
    float rms_alpha = 0.99f;
    float rms_eps = 1e-8f;
    bool dagger = false;  // false = behavioral cloning (oracle executes everything)
    std::uint64_t seed = 0;
    long monitor_every = 0;  // iterations between monitor calls
    TrainMonitor monitor;
    std::ostream* progress = nullptr;
};

/// Exploration coefficient: linear decay from 1 to 0 for DAgger, constant 1
/// for behavioral cloning.
inline float il_beta(const ILConfig& cfg, int iter) {
    if (!cfg.dagger) return 1.0f;
    if (cfg.iterations <= 1) return 1.0f;
    return 1.0f - static_cast<float>(iter) / static_cast<float>(cfg.iterations - 1);
}

struct ILIterStats {
    long executed_oracle = 0;
    long executed_policy = 0;
    std::vector<float> epoch_losses;  // mean Huber loss per epoch
};

/// Mean Huber loss of the current policy over a dataset (no updates).
inline float il_dataset_loss(const ModelParams& params, const ModelConfig& mc, const AggregatedDataset& data) {
    if (data.samples.empty()) return 0.f;
    double acc = 0.0;
    for (const ILSample& s : data.samples) {
        PolicyOutput out = policy_forward(params, mc, to_tensor(s.obs), s.tokens, nullptr, nullptr);
        acc += ops::huber_onehot(ops::softmax(out.logits), s.oracle_action, 1.f);
    }
    return static_cast<float>(acc / static_cast<double>(data.samples.size()));
}

/// One outer iteration: roll out episodes executing the oracle action with
/// probability beta_i (otherwise the policy's sampled action), always
/// labelling states with the oracle action; then 10 RMSProp epochs over the
/// full aggregated dataset minimizing elementwise Huber loss between the
/// action distribution and the one-hot oracle action.
inline ILIterStats il_iteration(const ILConfig& cfg, int iter, ModelParams& params, RmsPropState& opt,
                                AggregatedDataset& data, const ModelConfig& mc, const WorldConfig& wc,
                                SpawnMode mode, const std::vector<std::string>& instructions) {
    ILIterStats stats;
    const float beta = il_beta(cfg, iter);
    Rng rng(derive_seed(cfg.seed, 0xD46A + static_cast<std::uint64_t>(iter)));

    for (int e = 0; e < cfg.episodes_per_iter; ++e) {
        const std::string& text = instructions[static_cast<std::size_t>(
            rng.below(static_cast<int>(instructions.size())))];
        const Instruction instr = parse_instruction(text);
        const std::vector<int> tokens = tokenize(text);
        WorldState st = spawn_episode(mode, instr, rng.bits(), wc);

        while (!st.done) {
            const Frame frame = render_frame(st, mc.image_width, mc.image_height, wc);
            const Action best = oracle_action(st, wc);
            data.samples.push_back({frame, tokens, static_cast<int>(best)});

            Action executed;
            if (rng.uniform() < beta) {
                executed = best;
                ++stats.executed_oracle;
            } else {
                PolicyOutput out = policy_forward(params, mc, to_tensor(frame), tokens, nullptr, nullptr);
                executed = static_cast<Action>(detail::sample_categorical(ops::softmax(out.logits), rng));
                ++stats.executed_policy;
            }
            step(st, executed, wc);
        }
    }

    std::vector<std::size_t> idx(data.samples.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(idx);
        double epoch_loss = 0.0;
        for (std::size_t i : idx) {
            const ILSample& s = data.samples[i];
            Tape tape;
            ModelParams bound = bind_params(tape, params);
            PolicyOutput out = policy_forward(bound, mc, to_tensor(s.obs), s.tokens, nullptr, &tape);
            Tensor loss = tape.huber_onehot(tape.softmax(out.logits), s.oracle_action, 1.f);
            epoch_loss += loss.data[0];
            rmsprop_step(params, collect_grads(bound, tape.backward(loss)), opt, cfg.lr, cfg.rms_alpha,
                         cfg.rms_eps);
        }
        stats.epoch_losses.push_back(static_cast<float>(epoch_loss / static_cast<double>(idx.size())));
    }
    return stats;
}

/// Full BC/DAgger run.
inline ModelParams il_train(const ILConfig& cfg, const ModelConfig& mc, const WorldConfig& wc, SpawnMode mode,
                            const std::vector<std::string>& instructions, ModelParams params) {
    if (instructions.empty()) throw ContractError("il_train: no training instructions");
    RmsPropState opt;
    AggregatedDataset data;
    for (int i = 0; i < cfg.iterations; ++i) {
        const ILIterStats stats = il_iteration(cfg, i, params, opt, data, mc, wc, mode, instructions);
        if (cfg.progress) {
            const long total = stats.executed_oracle + stats.executed_policy;
            (*cfg.progress) << "iter=" << i << " beta=" << il_beta(cfg, i) << " dataset=" << data.samples.size()
                            << " oracle_fraction="
                            << (total ? static_cast<double>(stats.executed_oracle) / static_cast<double>(total)
                                      : 1.0)
                            << " loss=" << (stats.epoch_losses.empty() ? 0.f : stats.epoch_losses.back()) << "\n";
        }
        if (cfg.monitor && cfg.monitor_every > 0 && (i + 1) % cfg.monitor_every == 0) {
            TrainEvent ev{i + 1, 0.0, stats.epoch_losses.empty() ? 0.f : stats.epoch_losses.back(), &params};
            if (cfg.monitor(ev)) break;
        }
    }
    return params;
}

}  // namespace gagl
