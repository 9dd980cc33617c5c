#pragma once

// Tabular softmax policy with a frozen reference and the KL-regularized
// group objective
//
//   J = (1/K) sum_i A_i log pi(a_i | s) - beta KL(pi(.|s) || pi_ref(.|s))
//
// together with its exact gradient with respect to the logits of state s.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "guae/error.hpp"

namespace guae {

/// Row-major n_states x n_actions table of logits.
class LogitTable {
 public:
  LogitTable() = default;
  LogitTable(std::size_t n_states, std::size_t n_actions, double fill = 0.0)
      : n_states_(n_states), n_actions_(n_actions), data_(n_states * n_actions, fill) {}

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }

  std::span<double> row(std::size_t s) { return {data_.data() + s * n_actions_, n_actions_}; }
  std::span<const double> row(std::size_t s) const { return {data_.data() + s * n_actions_, n_actions_}; }

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const LogitTable&, const LogitTable&) = default;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> data_;
};

inline std::vector<double> log_softmax(std::span<const double> z, double temperature = 1.0) {
  std::vector<double> out(z.size());
  if (z.empty()) return out;
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : z) hi = std::max(hi, v / temperature);
  double acc = 0.0;
  for (double v : z) acc += std::exp(v / temperature - hi);
  const double lse = hi + std::log(acc);
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[j] / temperature - lse;
  return out;
}

inline std::vector<double> softmax(std::span<const double> z, double temperature = 1.0) {
  auto out = log_softmax(z, temperature);
  for (auto& v : out) v = std::exp(v);
  return out;
}

/// Exact categorical KL(softmax(z) || softmax(z_ref)).
inline double kl_divergence(std::span<const double> z, std::span<const double> z_ref) {
  const auto lp = log_softmax(z);
  const auto lq = log_softmax(z_ref);
  double kl = 0.0;
  for (std::size_t j = 0; j < lp.size(); ++j) kl += std::exp(lp[j]) * (lp[j] - lq[j]);
  return kl;
}

/// d KL / d z_k = pi_k (log pi_k - log ref_k - KL).
inline std::vector<double> kl_gradient(std::span<const double> z, std::span<const double> z_ref) {
  const auto lp = log_softmax(z);
  const auto lq = log_softmax(z_ref);
  std::vector<double> diff(lp.size());
  double kl = 0.0;
  for (std::size_t j = 0; j < lp.size(); ++j) {
    diff[j] = lp[j] - lq[j];
    kl += std::exp(lp[j]) * diff[j];
  }
  std::vector<double> g(lp.size());
  for (std::size_t j = 0; j < lp.size(); ++j) g[j] = std::exp(lp[j]) * (diff[j] - kl);
  return g;
}

/// Trainable logits plus the reference snapshot they are regularized toward.
/// The reference is fixed at construction.
class PolicyState {
 public:
  PolicyState(LogitTable logits, std::uint64_t seed) : logits_(logits), ref_(std::move(logits)), seed_(seed) {}

  PolicyState(LogitTable logits, LogitTable reference, std::uint64_t seed)
      : logits_(std::move(logits)), ref_(std::move(reference)), seed_(seed) {
    if (logits_.n_states() != ref_.n_states() || logits_.n_actions() != ref_.n_actions()) {
      throw Error(ErrorCode::InvalidConfig, "reference shape differs from policy shape");
    }
  }

  const LogitTable& logits() const noexcept { return logits_; }
  LogitTable& logits() noexcept { return logits_; }
  const LogitTable& reference() const noexcept { return ref_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t step() const noexcept { return step_; }
  void advance() noexcept { ++step_; }

  std::size_t n_states() const noexcept { return logits_.n_states(); }
  std::size_t n_actions() const noexcept { return logits_.n_actions(); }

  std::vector<double> probs(std::size_t state) const { return softmax(logits_.row(state)); }
  double kl_to_ref(std::size_t state) const { return kl_divergence(logits_.row(state), ref_.row(state)); }

 private:
  LogitTable logits_;
  LogitTable ref_;
  std::uint64_t seed_;
  std::uint64_t step_ = 0;
};

struct ObjectiveGradient {
  double value = 0.0;
  std::vector<double> grad;
};

/// Objective value from raw row logits; shared by the analytic path and by
/// numerical checks.
inline double group_objective(std::span<const double> z, std::span<const double> z_ref,
                              std::span<const std::size_t> actions, std::span<const double> advantages,
                              double beta) {
  const auto lp = log_softmax(z);
  double pg = 0.0;
  for (std::size_t i = 0; i < actions.size(); ++i) pg += advantages[i] * lp[actions[i]];
  const double k = actions.empty() ? 1.0 : static_cast<double>(actions.size());
  return pg / k - beta * kl_divergence(z, z_ref);
}

inline ObjectiveGradient objective_and_gradient(std::span<const double> z, std::span<const double> z_ref,
                                                std::span<const std::size_t> actions,
                                                std::span<const double> advantages, double beta) {
  if (actions.size() != advantages.size()) {
    throw Error(ErrorCode::InvalidConfig, "actions and advantages differ in length");
  }
  const auto lp = log_softmax(z);
  const std::size_t n = z.size();
  std::vector<double> pi(n);
  for (std::size_t j = 0; j < n; ++j) pi[j] = std::exp(lp[j]);

  ObjectiveGradient out;
  out.grad.assign(n, 0.0);
  const double k = actions.empty() ? 1.0 : static_cast<double>(actions.size());
  double a_sum = 0.0;
  double pg = 0.0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    out.grad[actions[i]] += advantages[i];
    a_sum += advantages[i];
    pg += advantages[i] * lp[actions[i]];
  }
  // d log pi_a / d z = e_a - pi
  for (std::size_t j = 0; j < n; ++j) out.grad[j] = (out.grad[j] - a_sum * pi[j]) / k;

  const auto kg = kl_gradient(z, z_ref);
  for (std::size_t j = 0; j < n; ++j) out.grad[j] -= beta * kg[j];
  out.value = pg / k - beta * kl_divergence(z, z_ref);
  return out;
}

inline ObjectiveGradient objective_and_gradient(const PolicyState& pol, std::size_t state,
                                                std::span<const std::size_t> actions,
                                                std::span<const double> advantages, double beta) {
  return objective_and_gradient(pol.logits().row(state), pol.reference().row(state), actions, advantages, beta);
}

}  // namespace guae
