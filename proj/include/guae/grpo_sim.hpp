#pragma once

// Desk-scale GRPO trainer: a tabular softmax policy over a contextual bandit
// with near-binary rewards, optimized by plain gradient ascent on the
// KL-regularized group objective. Used to reproduce advantage collapse and to
// compare estimators under common random numbers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "guae/advantage.hpp"
#include "guae/diagnostics.hpp"
#include "guae/error.hpp"
#include "guae/policy.hpp"

namespace guae {

struct BanditEnv {
  std::size_t n_states = 1;
  std::size_t n_actions = 2;
  /// Correct action per state.
  std::vector<std::size_t> target;
  double reward_correct = 1.0;
  double reward_wrong = 0.0;

  static BanditEnv make(std::size_t n_states, std::size_t n_actions) {
    BanditEnv env;
    env.n_states = n_states;
    env.n_actions = n_actions;
    env.target.resize(n_states);
    for (std::size_t s = 0; s < n_states; ++s) env.target[s] = n_actions ? s % n_actions : 0;
    return env;
  }

  double reward(std::size_t state, std::size_t action) const {
    return action == target[state] ? reward_correct : reward_wrong;
  }

  void validate() const {
    if (n_states == 0 || n_actions == 0) throw Error(ErrorCode::InvalidConfig, "environment needs states and actions");
    if (target.size() != n_states) throw Error(ErrorCode::InvalidConfig, "one target per state required");
    for (auto t : target) {
      if (t >= n_actions) throw Error(ErrorCode::InvalidConfig, "target action out of range");
    }
    for (double r : {reward_correct, reward_wrong}) {
      if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::InvalidConfig, "reward levels must lie in [0,1]");
    }
  }
};

struct TrainConfig {
  std::size_t K = 8;
  double beta = 0.01;
  double learning_rate = 0.05;
  std::size_t steps = 500;
  EstimatorConfig estimator{};
  /// Sampling temperature; the objective always uses the untempered policy.
  double temperature = 1.0;

  void validate() const {
    if (K < 1) throw Error(ErrorCode::InvalidConfig, "K must be at least 1");
    if (!(beta >= 0.0)) throw Error(ErrorCode::InvalidConfig, "beta must be non-negative");
    if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "learning_rate must be positive");
    if (!(temperature > 0.0)) throw Error(ErrorCode::InvalidConfig, "temperature must be positive");
  }
};

// ---------------------------------------------------------------------------
// Randomness

/// Independent generator for one (step, state) cell derived from the master
/// seed. Evaluation order of cells therefore cannot change any draw.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t step, std::uint64_t state) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                    static_cast<std::uint32_t>(state), static_cast<std::uint32_t>(state >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t sample_categorical(std::span<const double> probs, double u) {
  double acc = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    acc += probs[j];
    if (u < acc) return j;
  }
  // u landed in the rounding gap above the cumulative sum; take the last
  // action with non-zero mass.
  for (std::size_t j = probs.size(); j-- > 0;) {
    if (probs[j] > 0.0) return j;
  }
  return probs.size() - 1;
}

struct Rollout {
  RolloutGroup group;
  std::vector<std::size_t> actions;
};

inline Rollout rollout(const BanditEnv& env, const PolicyState& pol, std::size_t state, std::size_t K,
                       double temperature = 1.0) {
  if (state >= env.n_states) throw Error(ErrorCode::InvalidRange, "state out of range");
  auto rng = stream_rng(pol.seed(), pol.step(), state);
  const auto probs = softmax(pol.logits().row(state), temperature);
  Rollout r;
  r.group.group_id = "s" + std::to_string(state) + "@" + std::to_string(pol.step());
  r.group.step_index = static_cast<long long>(pol.step());
  r.actions.reserve(K);
  r.group.rewards.reserve(K);
  for (std::size_t i = 0; i < K; ++i) {
    const auto a = sample_categorical(probs, uniform01(rng));
    r.actions.push_back(a);
    r.group.rewards.push_back(env.reward(state, a));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Training

struct TraceRow {
  std::uint64_t step = 0;
  std::size_t state = 0;
  double mean_reward = 0.0;
  double group_sigma = 0.0;
  double mean_abs_adv = 0.0;
  double p_small_adv_001 = 0.0;
  double p_small_adv_01 = 0.0;
  double grad_norm = 0.0;
  double kl_to_ref = 0.0;
};

/// Everything observed for one (step, state) cell, before the update is applied.
struct StepRecord {
  TraceRow row;
  const Rollout* rollout = nullptr;
  const AdvantageResult* advantage = nullptr;
  std::span<const double> grad;
  std::span<const double> probs;
  std::span<const double> kl_grad;
};

using StepObserver = std::function<void(const StepRecord&)>;

struct Trace {
  std::vector<TraceRow> rows;
  PolicyState final_policy;
};

inline double l2_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

inline Trace train(const BanditEnv& env, const TrainConfig& cfg, PolicyState pol, const StepObserver& observe = {}) {
  env.validate();
  cfg.validate();
  if (pol.n_states() != env.n_states || pol.n_actions() != env.n_actions) {
    throw Error(ErrorCode::InvalidConfig, "policy shape does not match environment");
  }
  Trace trace{{}, pol};
  trace.rows.reserve(cfg.steps * env.n_states);
  std::vector<std::vector<double>> grads(env.n_states);

  for (std::size_t t = 0; t < cfg.steps; ++t) {
    for (std::size_t s = 0; s < env.n_states; ++s) {
      const auto ro = rollout(env, pol, s, cfg.K, cfg.temperature);
      const auto adv = estimate(ro.group, cfg.estimator);
      auto og = objective_and_gradient(pol, s, ro.actions, adv.advantages, cfg.beta);

      TraceRow row;
      row.step = pol.step();
      row.state = s;
      const auto st = moments(ro.group.rewards, 0);
      row.mean_reward = st.mean;
      row.group_sigma = st.sigma;
      row.mean_abs_adv = mean_abs(adv.advantages);
      row.p_small_adv_001 = near_zero_mass(adv.advantages, 0.01);
      row.p_small_adv_01 = near_zero_mass(adv.advantages, 0.1);
      row.grad_norm = l2_norm(og.grad);
      row.kl_to_ref = pol.kl_to_ref(s);
      trace.rows.push_back(row);

      if (observe) {
        const auto probs = pol.probs(s);
        const auto kg = kl_gradient(pol.logits().row(s), pol.reference().row(s));
        observe(StepRecord{row, &ro, &adv, og.grad, probs, kg});
      }
      grads[s] = std::move(og.grad);
    }
    for (std::size_t s = 0; s < env.n_states; ++s) {
      auto z = pol.logits().row(s);
      for (std::size_t j = 0; j < z.size(); ++j) z[j] += cfg.learning_rate * grads[s][j];
    }
    pol.advance();
  }
  trace.final_policy = std::move(pol);
  return trace;
}

// ---------------------------------------------------------------------------
// Initial policies

enum class InitKind { Uniform, Correct, Wrong };

/// Logits that put `mass` on the target action (Correct) or on the action
/// after it (Wrong), spreading the rest evenly. Uniform ignores `mass`.
inline LogitTable make_initial_logits(const BanditEnv& env, InitKind kind, double mass = 0.99) {
  LogitTable z(env.n_states, env.n_actions, 0.0);
  if (kind == InitKind::Uniform || env.n_actions < 2) return z;
  if (!(mass > 0.0 && mass < 1.0)) throw Error(ErrorCode::InvalidConfig, "initial mass must lie in (0,1)");
  const double rest = (1.0 - mass) / static_cast<double>(env.n_actions - 1);
  for (std::size_t s = 0; s < env.n_states; ++s) {
    const std::size_t hot = kind == InitKind::Correct ? env.target[s] : (env.target[s] + 1) % env.n_actions;
    auto row = z.row(s);
    for (std::size_t j = 0; j < env.n_actions; ++j) row[j] = std::log(j == hot ? mass : rest);
  }
  return z;
}

// ---------------------------------------------------------------------------
// Synthetic collapse schedule

struct CollapseStats {
  double p_small_001 = 0.0;
  double p_small_01 = 0.0;
  double mean_abs_adv = 0.0;
};

struct CollapsePoint {
  double collapse_prob = 0.0;
  std::size_t n_groups = 0;
  double all_equal_ratio = 0.0;
  CollapseStats base;
  CollapseStats guae;
};

/// For each schedule value q, draws `groups_per_point` groups of size cfg.K:
/// with probability q an all-0 or all-1 group (even odds), otherwise
/// Bernoulli(bernoulli_p) rewards. Both estimators see identical groups.
inline std::vector<CollapsePoint> collapse_schedule_sim(const TrainConfig& cfg, std::span<const double> schedule,
                                                        std::uint64_t seed, std::size_t groups_per_point = 10000,
                                                        double bernoulli_p = 0.5) {
  cfg.validate();
  EstimatorConfig base_cfg = cfg.estimator;
  base_cfg.variant = EstimatorVariant::BaseGrpo;
  EstimatorConfig guae_cfg = cfg.estimator;
  guae_cfg.variant = EstimatorVariant::GuAE;

  std::vector<CollapsePoint> out;
  std::vector<double> rewards(cfg.K);
  for (std::size_t idx = 0; idx < schedule.size(); ++idx) {
    const double q = schedule[idx];
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidRange, "collapse probability outside [0,1]");
    auto rng = stream_rng(seed, idx, 0xC011A95Eu);
    std::vector<double> base_adv;
    std::vector<double> guae_adv;
    base_adv.reserve(groups_per_point * cfg.K);
    guae_adv.reserve(groups_per_point * cfg.K);
    std::size_t all_equal = 0;
    for (std::size_t g = 0; g < groups_per_point; ++g) {
      if (uniform01(rng) < q) {
        const double c = uniform01(rng) < 0.5 ? 0.0 : 1.0;
        std::fill(rewards.begin(), rewards.end(), c);
      } else {
        for (auto& r : rewards) r = uniform01(rng) < bernoulli_p ? 1.0 : 0.0;
      }
      all_equal += std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards.front(); });
      const auto b = estimate(rewards, base_cfg);
      const auto a = estimate(rewards, guae_cfg);
      base_adv.insert(base_adv.end(), b.advantages.begin(), b.advantages.end());
      guae_adv.insert(guae_adv.end(), a.advantages.begin(), a.advantages.end());
    }
    CollapsePoint p;
    p.collapse_prob = q;
    p.n_groups = groups_per_point;
    if (groups_per_point > 0) {
      p.all_equal_ratio = static_cast<double>(all_equal) / static_cast<double>(groups_per_point);
      p.base = {near_zero_mass(base_adv, 0.01), near_zero_mass(base_adv, 0.1), mean_abs(base_adv)};
      p.guae = {near_zero_mass(guae_adv, 0.01), near_zero_mass(guae_adv, 0.1), mean_abs(guae_adv)};
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace guae
