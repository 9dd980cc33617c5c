#pragma once

// Text formats shared by the command-line workflows: shortest round-trip
// number formatting, flat key/value settings, and the CSV products.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "guae/advantage.hpp"
#include "guae/diagnostics.hpp"
#include "guae/error.hpp"
#include "guae/grpo_sim.hpp"
#include "guae/reward.hpp"

namespace guae {

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// ---------------------------------------------------------------------------
// Settings: a flat key/value document whose keys mirror the config field
// names. Lines are `key = value` (or `key: value`); `#` starts a comment.

using Settings = std::map<std::string, std::string>;

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline Settings parse_settings(std::string_view text) {
  Settings out;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    auto sep = t.find_first_of("=:");
    if (sep == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(std::string_view(t).substr(0, sep));
    std::string value = trim(std::string_view(t).substr(sep + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": empty key");
    out[key] = value;
  }
  return out;
}

/// Reads a settings file. A JSON document is accepted too: either a flat
/// object or a run manifest, whose "config" object is used.
inline Settings load_settings_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::string head = trim(text);
  if (!head.empty() && head.front() == '{') {
    auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::InvalidConfig, "config is not a JSON object");
    const auto& obj = doc.contains("config") && doc["config"].is_object() ? doc["config"] : doc;
    Settings out;
    for (const auto& [k, v] : obj.items()) out[k] = v.is_string() ? v.get<std::string>() : v.dump();
    return out;
  }
  return parse_settings(text);
}

namespace detail {

inline double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw Error(ErrorCode::InvalidConfig, key + ": not a finite number: '" + v + "'");
  }
  return out;
}

inline std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw Error(ErrorCode::InvalidConfig, key + ": not a non-negative integer: '" + v + "'");
  }
  return out;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::InvalidConfig, key + ": not a boolean: '" + v + "'");
}

}  // namespace detail

inline std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    auto comma = v.find(',', pos);
    if (comma == std::string::npos) comma = v.size();
    const std::string item = trim(std::string_view(v).substr(pos, comma - pos));
    if (!item.empty()) out.push_back(detail::to_real(key, item));
    pos = comma + 1;
  }
  return out;
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    auto comma = v.find(',', pos);
    if (comma == std::string::npos) comma = v.size();
    std::string item = trim(std::string_view(v).substr(pos, comma - pos));
    if (!item.empty()) out.push_back(std::move(item));
    pos = comma + 1;
  }
  return out;
}

/// Typed view over Settings that records which keys were consumed.
class SettingsReader {
 public:
  explicit SettingsReader(const Settings& s) : s_(s) {}

  void real(const char* key, double& dst) {
    if (auto v = get(key)) dst = detail::to_real(key, *v);
  }
  void uint(const char* key, std::size_t& dst) {
    if (auto v = get(key)) dst = static_cast<std::size_t>(detail::to_uint(key, *v));
  }
  void uint64(const char* key, std::uint64_t& dst) {
    if (auto v = get(key)) dst = detail::to_uint(key, *v);
  }
  void boolean(const char* key, bool& dst) {
    if (auto v = get(key)) dst = detail::to_bool(key, *v);
  }
  void string(const char* key, std::string& dst) {
    if (auto v = get(key)) dst = *v;
  }

 private:
  std::optional<std::string> get(const char* key) const {
    auto it = s_.find(key);
    if (it == s_.end()) return std::nullopt;
    return it->second;
  }
  const Settings& s_;
};

inline RewardConfig reward_config_from(const Settings& s) {
  RewardConfig c;
  SettingsReader r(s);
  r.real("lambda", c.lambda);
  r.real("tau_click", c.tau_click);
  r.real("click_threshold", c.click_threshold);
  r.real("rho", c.rho);
  r.boolean("enumerated_partial_credit", c.enumerated_partial_credit);
  r.real("text_grounding_min", c.text_grounding_min);
  c.validate();
  return c;
}

inline void write_settings(Settings& s, const RewardConfig& c) {
  s["lambda"] = format_double(c.lambda);
  s["tau_click"] = format_double(c.tau_click);
  s["click_threshold"] = format_double(c.click_threshold);
  s["rho"] = format_double(c.rho);
  s["enumerated_partial_credit"] = c.enumerated_partial_credit ? "true" : "false";
  s["text_grounding_min"] = format_double(c.text_grounding_min);
}

inline EstimatorConfig estimator_config_from(const Settings& s) {
  EstimatorConfig c;
  SettingsReader r(s);
  std::string variant(to_string(c.variant));
  r.string("variant", variant);
  auto v = parse_variant(variant);
  if (!v) throw Error(ErrorCode::InvalidConfig, "variant: unknown estimator '" + variant + "'");
  c.variant = *v;
  r.real("epsilon", c.epsilon);
  r.real("sigma0", c.sigma0);
  r.real("tau_gate", c.tau_gate);
  r.real("p_low", c.p_low);
  r.real("p_high", c.p_high);
  r.boolean("population_std", c.population_std);
  c.validate();
  return c;
}

inline void write_settings(Settings& s, const EstimatorConfig& c) {
  s["variant"] = std::string(to_string(c.variant));
  s["epsilon"] = format_double(c.epsilon);
  s["sigma0"] = format_double(c.sigma0);
  s["tau_gate"] = format_double(c.tau_gate);
  s["p_low"] = format_double(c.p_low);
  s["p_high"] = format_double(c.p_high);
  s["population_std"] = c.population_std ? "true" : "false";
}

inline TrainConfig train_config_from(const Settings& s) {
  TrainConfig c;
  SettingsReader r(s);
  r.uint("K", c.K);
  r.real("beta", c.beta);
  r.real("learning_rate", c.learning_rate);
  r.uint("steps", c.steps);
  r.real("temperature", c.temperature);
  c.estimator = estimator_config_from(s);
  c.validate();
  return c;
}

inline void write_settings(Settings& s, const TrainConfig& c) {
  s["K"] = std::to_string(c.K);
  s["beta"] = format_double(c.beta);
  s["learning_rate"] = format_double(c.learning_rate);
  s["steps"] = std::to_string(c.steps);
  s["temperature"] = format_double(c.temperature);
  write_settings(s, c.estimator);
}

/// One-line "key=value ..." rendering, keys sorted.
inline std::string settings_line(const Settings& s) {
  std::string out;
  for (const auto& [k, v] : s) {
    if (!out.empty()) out.push_back(' ');
    out += k + "=" + v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV products

inline void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows, const Settings& config) {
  os << "# config: " << settings_line(config) << '\n';
  os << "step,state,mean_reward,group_sigma,mean_abs_adv,p_small_adv_001,p_small_adv_01,grad_norm,kl_to_ref\n";
  for (const auto& r : rows) {
    os << r.step << ',' << r.state << ',' << format_double(r.mean_reward) << ',' << format_double(r.group_sigma)
       << ',' << format_double(r.mean_abs_adv) << ',' << format_double(r.p_small_adv_001) << ','
       << format_double(r.p_small_adv_01) << ',' << format_double(r.grad_norm) << ','
       << format_double(r.kl_to_ref) << '\n';
  }
}

inline void write_collapse_csv(std::ostream& os, std::span<const CollapsePoint> pts) {
  os << "collapse_prob,n_groups,all_equal_ratio,base_p_small_adv_001,base_p_small_adv_01,base_mean_abs_adv,"
        "guae_p_small_adv_001,guae_p_small_adv_01,guae_mean_abs_adv\n";
  for (const auto& p : pts) {
    os << format_double(p.collapse_prob) << ',' << p.n_groups << ',' << format_double(p.all_equal_ratio) << ','
       << format_double(p.base.p_small_001) << ',' << format_double(p.base.p_small_01) << ','
       << format_double(p.base.mean_abs_adv) << ',' << format_double(p.guae.p_small_001) << ','
       << format_double(p.guae.p_small_01) << ',' << format_double(p.guae.mean_abs_adv) << '\n';
  }
}

inline std::string delta_label(double d) {
  std::string s = format_double(d);
  for (auto& c : s) {
    if (c == '.') c = '_';
  }
  return s;
}

inline void write_report_csv(std::ostream& os, const DiagnosticsReport& r, std::size_t skipped_lines) {
  os << "n_groups,skipped_lines,n_advantages,low_std_ratio,all_equal_ratio";
  for (const auto& [d, m] : r.near_zero_mass) os << ",near_zero_mass_" << delta_label(d);
  os << ",mean_abs_advantage\n";
  os << r.n_groups << ',' << skipped_lines << ',' << r.n_advantages << ',' << format_double(r.low_std_ratio) << ','
     << format_double(r.all_equal_ratio);
  for (const auto& [d, m] : r.near_zero_mass) os << ',' << format_double(m);
  os << ',' << format_double(r.mean_abs_advantage) << '\n';
}

inline void write_hist_csv(std::ostream& os, const Histogram& h) {
  os << "bin_left,bin_right,count\n";
  os << "-inf," << format_double(h.edges.front()) << ',' << h.underflow << '\n';
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
  }
  os << format_double(h.edges.back()) << ",inf," << h.overflow << '\n';
}

}  // namespace guae
