#pragma once

// Group-relative advantage estimators over rollout-group rewards:
//
//   BaseGrpo    A_i = (r_i - mu) / (sigma + eps)
//   AnchorOnly  A_i = (r_i - mu_ext) / (sigma_ext + eps)
//   VatOnly     A_i = (r_i - mu) / (sigma^p + eps),          p = p(sigma)
//   GuAE        A_i = (r_i - mu_ext) / (sigma_ext^p + eps),  p = p(sigma_ext)
//
// mu_ext / sigma_ext are population statistics of {r_1..r_K, 0, 1}. The
// exponent p interpolates between p_low and p_high through a logistic gate on
// the relative deviation of the scale from sigma0.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "guae/error.hpp"

namespace guae {

enum class EstimatorVariant { BaseGrpo, AnchorOnly, VatOnly, GuAE };

constexpr std::string_view to_string(EstimatorVariant v) {
  switch (v) {
    case EstimatorVariant::BaseGrpo: return "base";
    case EstimatorVariant::AnchorOnly: return "anchor-only";
    case EstimatorVariant::VatOnly: return "vat-only";
    case EstimatorVariant::GuAE: return "guae";
  }
  return "base";
}

inline std::optional<EstimatorVariant> parse_variant(std::string_view s) {
  if (s == "base" || s == "grpo" || s == "base-grpo") return EstimatorVariant::BaseGrpo;
  if (s == "anchor-only" || s == "anchor") return EstimatorVariant::AnchorOnly;
  if (s == "vat-only" || s == "vat") return EstimatorVariant::VatOnly;
  if (s == "guae") return EstimatorVariant::GuAE;
  return std::nullopt;
}

constexpr bool uses_anchors(EstimatorVariant v) {
  return v == EstimatorVariant::AnchorOnly || v == EstimatorVariant::GuAE;
}
constexpr bool uses_tempering(EstimatorVariant v) {
  return v == EstimatorVariant::VatOnly || v == EstimatorVariant::GuAE;
}

/// (hi - lo) / sqrt(12): standard deviation of the uniform law on [lo, hi].
inline double sigma0_uniform(double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorCode::InvalidRange, "sigma0_uniform requires hi > lo");
  return (hi - lo) / std::sqrt(12.0);
}

struct EstimatorConfig {
  EstimatorVariant variant = EstimatorVariant::GuAE;
  double epsilon = 1e-6;
  double sigma0 = 0.28867513459481287;  // 1 / sqrt(12)
  double tau_gate = 5.0;
  double p_low = 1.5;
  double p_high = 0.8;
  /// Divide-by-K statistics for the empirical (non-anchored) group. Anchored
  /// statistics are always population statistics over K + 2 points.
  bool population_std = true;

  void validate() const {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
    if (!(sigma0 > 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma0 must be positive");
    if (!(tau_gate > 0.0)) throw Error(ErrorCode::InvalidConfig, "tau_gate must be positive");
    if (!(p_low > 1.0 && 1.0 > p_high && p_high > 0.0)) {
      throw Error(ErrorCode::InvalidConfig, "require p_low > 1 > p_high > 0");
    }
  }
};

struct RolloutGroup {
  std::string group_id;
  std::vector<double> rewards;
  std::optional<long long> step_index;

  void validate() const {
    if (rewards.empty()) throw Error(ErrorCode::EmptyInput, "rollout group has no rewards");
    for (double r : rewards) {
      if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::InvalidRange, "reward outside [0,1]");
    }
  }
};

struct AdvantageResult {
  std::vector<double> advantages;
  double mu = 0.0;
  double sigma = 0.0;
  std::optional<double> gate;
  std::optional<double> exponent;
  EstimatorVariant variant = EstimatorVariant::BaseGrpo;
};

struct MomentPair {
  double mean = 0.0;
  double sigma = 0.0;
};

/// Mean and standard deviation. The mean is accumulated as an offset from the
/// first element so that a constant group has mean equal to that constant
/// bit-for-bit. `ddof` is 0 for population, 1 for sample statistics.
inline MomentPair moments(std::span<const double> xs, int ddof = 0) {
  MomentPair m;
  if (xs.empty()) return m;
  const double base = xs.front();
  double shift = 0.0;
  for (double x : xs) shift += x - base;
  const auto n = static_cast<double>(xs.size());
  m.mean = base + shift / n;
  const double denom = n - ddof;
  if (denom <= 0.0) return m;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.sigma = std::sqrt(ss / denom);
  return m;
}

inline MomentPair empirical_stats(std::span<const double> rewards, bool population = true) {
  return moments(rewards, population ? 0 : 1);
}

/// Population statistics of the rewards extended with the anchors {0, 1}.
inline MomentPair anchor_stats(std::span<const double> rewards) {
  std::vector<double> ext(rewards.begin(), rewards.end());
  ext.push_back(0.0);
  ext.push_back(1.0);
  return moments(ext, 0);
}

/// Deterministic floor on the anchored scale: 1 / sqrt(2 (K + 2)).
inline double anchor_sigma_floor(std::size_t k) { return 1.0 / std::sqrt(2.0 * (static_cast<double>(k) + 2.0)); }

struct Tempering {
  double gate = 0.5;
  double p = 1.0;
};

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Tempering vat_exponent(double sigma, const EstimatorConfig& cfg) {
  const double deviation = (sigma - cfg.sigma0) / (cfg.sigma0 + cfg.epsilon);
  Tempering t;
  t.gate = logistic(cfg.tau_gate * deviation);
  t.p = cfg.p_low + t.gate * (cfg.p_high - cfg.p_low);
  return t;
}

namespace detail {

inline std::vector<double> normalize(std::span<const double> rewards, double mu, double denom) {
  std::vector<double> out;
  out.reserve(rewards.size());
  for (double r : rewards) out.push_back((r - mu) / denom);
  return out;
}

}  // namespace detail

inline AdvantageResult base_grpo(std::span<const double> rewards, const EstimatorConfig& cfg = {}) {
  const auto st = empirical_stats(rewards, cfg.population_std);
  AdvantageResult res;
  res.variant = EstimatorVariant::BaseGrpo;
  res.mu = st.mean;
  res.sigma = st.sigma;
  res.advantages = detail::normalize(rewards, st.mean, st.sigma + cfg.epsilon);
  return res;
}

inline AdvantageResult estimate(std::span<const double> rewards, const EstimatorConfig& cfg) {
  switch (cfg.variant) {
    case EstimatorVariant::BaseGrpo:
      return base_grpo(rewards, cfg);
    case EstimatorVariant::AnchorOnly: {
      const auto st = anchor_stats(rewards);
      AdvantageResult res;
      res.variant = cfg.variant;
      res.mu = st.mean;
      res.sigma = st.sigma;
      res.advantages = detail::normalize(rewards, st.mean, st.sigma + cfg.epsilon);
      return res;
    }
    case EstimatorVariant::VatOnly: {
      const auto st = empirical_stats(rewards, cfg.population_std);
      const auto t = vat_exponent(st.sigma, cfg);
      // A zero scale cannot be raised to a power meaningfully; eps stands in.
      const double scale = st.sigma > 0.0 ? st.sigma : cfg.epsilon;
      AdvantageResult res;
      res.variant = cfg.variant;
      res.mu = st.mean;
      res.sigma = st.sigma;
      res.gate = t.gate;
      res.exponent = t.p;
      res.advantages = detail::normalize(rewards, st.mean, std::pow(scale, t.p) + cfg.epsilon);
      return res;
    }
    case EstimatorVariant::GuAE: {
      const auto st = anchor_stats(rewards);
      const auto t = vat_exponent(st.sigma, cfg);
      AdvantageResult res;
      res.variant = cfg.variant;
      res.mu = st.mean;
      res.sigma = st.sigma;
      res.gate = t.gate;
      res.exponent = t.p;
      res.advantages = detail::normalize(rewards, st.mean, std::pow(st.sigma, t.p) + cfg.epsilon);
      return res;
    }
  }
  return base_grpo(rewards, cfg);
}

inline AdvantageResult estimate(const RolloutGroup& g, const EstimatorConfig& cfg) {
  return estimate(std::span<const double>(g.rewards), cfg);
}

}  // namespace guae
