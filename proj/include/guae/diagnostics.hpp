#pragma once

// Collapse diagnostics over rollout groups and advantage sets: per-group
// scatter statistics, near-zero advantage mass P(|A| < delta), and advantage
// histograms. Aggregates are shard-mergeable and independent of input order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "guae/advantage.hpp"
#include "guae/error.hpp"

namespace guae {

inline constexpr double kDefaultLowStdThreshold = 0.01;
inline const std::vector<double> kDefaultDeltas = {0.01, 0.1};

/// Fraction of entries with |A| < delta (strict).
inline double near_zero_mass(std::span<const double> advantages, double delta) {
  if (advantages.empty()) throw Error(ErrorCode::EmptyInput, "near_zero_mass of an empty list");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidRange, "delta must be positive");
  const auto hits = std::count_if(advantages.begin(), advantages.end(),
                                  [delta](double a) { return std::abs(a) < delta; });
  return static_cast<double>(hits) / static_cast<double>(advantages.size());
}

inline double mean_abs(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += std::abs(x);
  return acc / static_cast<double>(xs.size());
}

// ---------------------------------------------------------------------------
// Histogram

/// Bins are left-closed, right-open: [e_i, e_{i+1}). Values below the first
/// edge land in `underflow`; values at or above the last edge, and NaN, land
/// in `overflow`.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;

  std::size_t total() const {
    std::size_t t = underflow + overflow;
    for (auto c : counts) t += c;
    return t;
  }

  void add(double x) {
    if (x < edges.front()) {
      ++underflow;
    } else if (!(x < edges.back())) {
      ++overflow;
    } else {
      const auto it = std::upper_bound(edges.begin(), edges.end(), x);
      ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
  }

  void merge(const Histogram& other) {
    if (other.edges != edges) throw Error(ErrorCode::InvalidConfig, "histogram edges differ");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    underflow += other.underflow;
    overflow += other.overflow;
  }

  friend bool operator==(const Histogram&, const Histogram&) = default;
};

inline Histogram make_histogram(std::vector<double> edges) {
  if (edges.size() < 2) throw Error(ErrorCode::InvalidRange, "histogram needs at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw Error(ErrorCode::InvalidRange, "histogram edges must increase strictly");
  }
  Histogram h;
  h.counts.assign(edges.size() - 1, 0);
  h.edges = std::move(edges);
  return h;
}

/// 0.1-wide bins from -3.05 to 3.05, so that zero sits in the middle of
/// the bin [-0.05, 0.05).
inline std::vector<double> default_histogram_edges() {
  std::vector<double> e;
  for (int i = 0; i <= 61; ++i) e.push_back(static_cast<double>(10 * i - 305) / 100.0);
  return e;
}

inline Histogram advantage_histogram(std::span<const double> advantages, std::vector<double> edges) {
  auto h = make_histogram(std::move(edges));
  for (double a : advantages) h.add(a);
  return h;
}

// ---------------------------------------------------------------------------
// Group statistics

struct GroupStats {
  double mean = 0.0;
  double sigma = 0.0;
  bool all_equal = false;
  bool low_std = false;
};

inline GroupStats group_stats(std::span<const double> rewards, double low_std_threshold = kDefaultLowStdThreshold) {
  GroupStats g;
  if (rewards.empty()) return g;
  const auto m = moments(rewards, 0);
  g.mean = m.mean;
  g.sigma = m.sigma;
  g.all_equal = std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards.front(); });
  g.low_std = g.sigma < low_std_threshold;
  return g;
}

struct DiagnosticsReport {
  std::size_t n_groups = 0;
  std::size_t n_advantages = 0;
  double low_std_ratio = 0.0;
  double all_equal_ratio = 0.0;
  std::map<double, double> near_zero_mass;
  double mean_abs_advantage = 0.0;
  Histogram histogram;
};

/// Streaming aggregator. Counts are integers and |A| values are summed in
/// sorted order, so the report does not depend on how groups were sharded or
/// ordered.
class DiagnosticsAccumulator {
 public:
  explicit DiagnosticsAccumulator(double low_std_threshold = kDefaultLowStdThreshold,
                                  std::vector<double> edges = default_histogram_edges())
      : threshold_(low_std_threshold), hist_(make_histogram(std::move(edges))) {
    if (!(low_std_threshold > 0.0)) throw Error(ErrorCode::InvalidConfig, "low-std threshold must be positive");
  }

  GroupStats add_group(std::span<const double> rewards, std::span<const double> advantages) {
    const auto g = group_stats(rewards, threshold_);
    ++n_groups_;
    n_all_equal_ += g.all_equal ? 1 : 0;
    n_low_std_ += g.low_std ? 1 : 0;
    add_advantages(advantages);
    return g;
  }

  void add_advantages(std::span<const double> advantages) {
    for (double a : advantages) {
      abs_adv_.push_back(std::abs(a));
      hist_.add(a);
    }
  }

  void merge(const DiagnosticsAccumulator& other) {
    n_groups_ += other.n_groups_;
    n_all_equal_ += other.n_all_equal_;
    n_low_std_ += other.n_low_std_;
    abs_adv_.insert(abs_adv_.end(), other.abs_adv_.begin(), other.abs_adv_.end());
    hist_.merge(other.hist_);
  }

  DiagnosticsReport report(const std::vector<double>& deltas = kDefaultDeltas) const {
    DiagnosticsReport r;
    r.n_groups = n_groups_;
    r.n_advantages = abs_adv_.size();
    if (n_groups_ > 0) {
      r.low_std_ratio = static_cast<double>(n_low_std_) / static_cast<double>(n_groups_);
      r.all_equal_ratio = static_cast<double>(n_all_equal_) / static_cast<double>(n_groups_);
    }
    auto sorted = abs_adv_;
    std::sort(sorted.begin(), sorted.end());
    for (double d : deltas) {
      double mass = 0.0;
      if (!sorted.empty()) {
        const auto below = std::lower_bound(sorted.begin(), sorted.end(), d) - sorted.begin();
        mass = static_cast<double>(below) / static_cast<double>(sorted.size());
      }
      r.near_zero_mass[d] = mass;
    }
    double acc = 0.0;
    for (double a : sorted) acc += a;
    r.mean_abs_advantage = sorted.empty() ? 0.0 : acc / static_cast<double>(sorted.size());
    r.histogram = hist_;
    return r;
  }

 private:
  double threshold_;
  std::size_t n_groups_ = 0;
  std::size_t n_all_equal_ = 0;
  std::size_t n_low_std_ = 0;
  std::vector<double> abs_adv_;
  Histogram hist_;
};

struct ScatterResult {
  std::vector<GroupStats> groups;
  DiagnosticsReport report;
};

/// Per-group scatter statistics plus the aggregate report. Advantages for the
/// near-zero mass and histogram are computed with `est`.
inline ScatterResult group_scatter(std::span<const RolloutGroup> groups,
                                   double low_std_threshold = kDefaultLowStdThreshold,
                                   const EstimatorConfig& est = {EstimatorVariant::BaseGrpo}) {
  DiagnosticsAccumulator acc(low_std_threshold);
  ScatterResult out;
  out.groups.reserve(groups.size());
  for (const auto& g : groups) {
    const auto adv = estimate(g, est);
    out.groups.push_back(acc.add_group(g.rewards, adv.advantages));
  }
  out.report = acc.report();
  return out;
}

}  // namespace guae
