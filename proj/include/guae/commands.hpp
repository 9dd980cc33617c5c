#pragma once

// Batch workflows behind the `guae` command-line tool. Each command reads its
// inputs, writes its outputs plus a JSON run manifest, and returns a process
// exit status. Individual bad records never abort a batch.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "guae/action.hpp"
#include "guae/advantage.hpp"
#include "guae/diagnostics.hpp"
#include "guae/error.hpp"
#include "guae/grpo_sim.hpp"
#include "guae/io.hpp"
#include "guae/reward.hpp"

namespace guae {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitStatus : int { kExitOk = 0, kExitIo = 2, kExitConfig = 3 };

namespace detail {

using OJson = nlohmann::ordered_json;

inline std::uint64_t seed_from(const Settings& s) {
  std::uint64_t seed = 42;
  SettingsReader(s).uint64("seed", seed);
  return seed;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open input '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

inline bool blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write '" + path.string() + "'");
  return out;
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::FileNotFound, "cannot create directory '" + dir.string() + "'");
  }
}

inline void write_manifest(const std::filesystem::path& path, const std::string& command, const Settings& config,
                           std::uint64_t seed, const std::vector<std::string>& inputs,
                           const std::vector<std::string>& outputs) {
  OJson m;
  m["command"] = command;
  OJson cfg = OJson::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  m["config"] = std::move(cfg);
  m["seed"] = seed;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["tool_version"] = kToolVersion;
  auto out = open_out(path);
  out << m.dump(2) << '\n';
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::FileNotFound ? kExitIo : kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

inline std::vector<double> read_rewards(const nlohmann::json& rec) {
  auto it = rec.find("rewards");
  if (it == rec.end() || !it->is_array()) throw std::invalid_argument("missing 'rewards' array");
  std::vector<double> rewards;
  for (const auto& v : *it) {
    if (!v.is_number()) throw std::invalid_argument("non-numeric reward");
    rewards.push_back(v.get<double>());
  }
  RolloutGroup{"", rewards, std::nullopt}.validate();
  return rewards;
}

inline std::string group_id_of(const nlohmann::json& rec, std::size_t lineno) {
  auto it = rec.find("group_id");
  if (it == rec.end()) return "line" + std::to_string(lineno);
  return it->is_string() ? it->get<std::string>() : it->dump();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// score

/// Input JSONL: {"thought": str, "prediction": str, "reference": action-doc}.
/// Output JSONL: one record per non-blank input line, in input order.
inline int cmd_score(const std::string& in_path, const std::string& out_path, const Settings& settings,
                     std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const auto cfg = reward_config_from(settings);
    ParseOptions parse;
    SettingsReader(settings).boolean("strict_parse", parse.strict);
    const auto seed = detail::seed_from(settings);
    const auto lines = detail::read_lines(in_path);
    auto out = detail::open_out(out_path);

    std::size_t lineno = 0;
    for (const auto& line : lines) {
      ++lineno;
      if (detail::blank(line)) continue;
      detail::OJson o;
      o["line"] = lineno;
      std::string record_error;
      auto rec = nlohmann::json::parse(line, nullptr, false);
      std::optional<Action> reference;
      std::string thought;
      std::string prediction;
      if (rec.is_discarded() || !rec.is_object()) {
        record_error = "record is not a JSON object";
      } else {
        if (auto t = rec.find("thought"); t != rec.end() && t->is_string()) thought = t->get<std::string>();
        auto p = rec.find("prediction");
        if (p != rec.end()) prediction = p->is_string() ? p->get<std::string>() : p->dump();
        auto r = rec.find("reference");
        if (r == rec.end()) {
          record_error = "missing 'reference'";
        } else {
          auto parsed = r->is_string() ? parse_action(r->get<std::string>()) : parse_action(*r);
          if (parsed) {
            reference = *parsed;
          } else {
            record_error = "invalid reference: " + std::string(to_string(parsed.error().code));
          }
        }
      }

      RewardBreakdown b;
      StepVerdict step;
      if (reference) {
        b = combined_reward(thought, prediction, *reference, cfg, parse);
        if (auto pred = parse_action(prediction, parse)) step = evaluate_step(*pred, *reference, cfg);
      } else {
        b.verdict = make_verdict(0.0, {});
      }
      o["r_am"] = b.r_am;
      o["r_cons"] = reference ? b.r_cons : 0.0;
      o["r_combined"] = reference ? b.r_combined : 0.0;
      o["phi"] = b.phi;
      o["type_match"] = b.type_match;
      o["label"] = to_string(b.verdict.label);
      o["s"] = b.verdict.s;
      o["cues"] = b.verdict.cues;
      o["parse_error"] = b.parse_error ? detail::OJson(to_string(b.parse_error->code)) : detail::OJson(nullptr);
      o["type_ok"] = step.type_ok;
      o["grounding_ok"] = step.grounding_ok;
      o["success"] = step.success;
      o["record_error"] = record_error.empty() ? detail::OJson(nullptr) : detail::OJson(record_error);
      out << o.dump() << '\n';
    }
    out.close();

    Settings effective;
    write_settings(effective, cfg);
    effective["strict_parse"] = parse.strict ? "true" : "false";
    effective["seed"] = std::to_string(seed);
    detail::write_manifest(out_path + ".manifest.json", "score", effective, seed, {in_path}, {out_path});
    return int{kExitOk};
  });
}

// ---------------------------------------------------------------------------
// advantage

/// Input JSONL group logs {"group_id", "rewards", "step"?}; output echoes each
/// record and appends advantages, mu, sigma, gate, p and variant.
inline int cmd_advantage(const std::string& in_path, const std::string& out_path, const Settings& settings,
                         std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const auto cfg = estimator_config_from(settings);
    const auto seed = detail::seed_from(settings);
    const auto lines = detail::read_lines(in_path);
    auto out = detail::open_out(out_path);

    std::size_t lineno = 0;
    for (const auto& line : lines) {
      ++lineno;
      if (detail::blank(line)) continue;
      auto rec = detail::OJson::parse(line, nullptr, false);
      detail::OJson o;
      try {
        if (rec.is_discarded() || !rec.is_object()) throw std::invalid_argument("record is not a JSON object");
        const auto rewards = detail::read_rewards(nlohmann::json::parse(line));
        const auto res = estimate(rewards, cfg);
        o = rec;
        o["advantages"] = res.advantages;
        o["mu"] = res.mu;
        o["sigma"] = res.sigma;
        o["gate"] = res.gate ? detail::OJson(*res.gate) : detail::OJson(nullptr);
        o["p"] = res.exponent ? detail::OJson(*res.exponent) : detail::OJson(nullptr);
        o["variant"] = to_string(res.variant);
      } catch (const std::exception& e) {
        o = detail::OJson::object();
        o["line"] = lineno;
        o["error"] = e.what();
      }
      out << o.dump() << '\n';
    }
    out.close();

    Settings effective;
    write_settings(effective, cfg);
    effective["seed"] = std::to_string(seed);
    detail::write_manifest(out_path + ".manifest.json", "advantage", effective, seed, {in_path}, {out_path});
    return int{kExitOk};
  });
}

// ---------------------------------------------------------------------------
// simulate

struct SimulationSetup {
  BanditEnv env;
  TrainConfig train;
  InitKind init = InitKind::Uniform;
  double init_mass = 0.99;
  std::vector<EstimatorVariant> variants;
  std::vector<double> schedule;
  std::size_t schedule_groups = 10000;
  double schedule_bernoulli_p = 0.5;
  std::uint64_t seed = 42;
  Settings effective;
};

inline SimulationSetup simulation_setup_from(const Settings& s) {
  SimulationSetup st;
  SettingsReader r(s);
  st.train = train_config_from(s);
  std::size_t n_states = 1;
  std::size_t n_actions = 5;
  r.uint("n_states", n_states);
  r.uint("n_actions", n_actions);
  st.env = BanditEnv::make(n_states, n_actions);
  r.real("reward_correct", st.env.reward_correct);
  r.real("reward_wrong", st.env.reward_wrong);
  st.env.validate();

  std::string init = "uniform";
  r.string("init", init);
  if (init == "uniform") st.init = InitKind::Uniform;
  else if (init == "correct") st.init = InitKind::Correct;
  else if (init == "wrong") st.init = InitKind::Wrong;
  else throw Error(ErrorCode::InvalidConfig, "init: expected uniform, correct or wrong");
  r.real("init_mass", st.init_mass);
  if (!(st.init_mass > 0.0 && st.init_mass < 1.0)) throw Error(ErrorCode::InvalidConfig, "init_mass must lie in (0,1)");

  std::string compare;
  r.string("compare", compare);
  for (const auto& name : split_list(compare)) {
    auto v = parse_variant(name);
    if (!v) throw Error(ErrorCode::InvalidConfig, "compare: unknown estimator '" + name + "'");
    st.variants.push_back(*v);
  }
  std::string schedule;
  r.string("schedule", schedule);
  st.schedule = parse_real_list("schedule", schedule);
  for (double q : st.schedule) {
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidConfig, "schedule values must lie in [0,1]");
  }
  r.uint("schedule_groups", st.schedule_groups);
  r.real("schedule_bernoulli_p", st.schedule_bernoulli_p);
  if (!(st.schedule_bernoulli_p >= 0.0 && st.schedule_bernoulli_p <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "schedule_bernoulli_p must lie in [0,1]");
  }
  st.seed = detail::seed_from(s);

  write_settings(st.effective, st.train);
  st.effective["n_states"] = std::to_string(n_states);
  st.effective["n_actions"] = std::to_string(n_actions);
  st.effective["reward_correct"] = format_double(st.env.reward_correct);
  st.effective["reward_wrong"] = format_double(st.env.reward_wrong);
  st.effective["init"] = init;
  st.effective["init_mass"] = format_double(st.init_mass);
  st.effective["compare"] = compare;
  st.effective["schedule"] = schedule;
  st.effective["schedule_groups"] = std::to_string(st.schedule_groups);
  st.effective["schedule_bernoulli_p"] = format_double(st.schedule_bernoulli_p);
  st.effective["seed"] = std::to_string(st.seed);
  return st;
}

/// Writes trace.csv (or trace_<variant>.csv per compared estimator, all runs
/// sharing the seed and hence the random stream), collapse.csv when a schedule
/// is configured, and manifest.json.
inline int cmd_simulate(const std::string& out_dir, const Settings& settings, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const auto st = simulation_setup_from(settings);
    const std::filesystem::path dir(out_dir);
    detail::ensure_dir(dir);
    std::vector<std::string> outputs;

    auto run_one = [&](EstimatorVariant v, const std::string& file) {
      TrainConfig cfg = st.train;
      cfg.estimator.variant = v;
      Settings echo = st.effective;
      echo["variant"] = std::string(to_string(v));
      const PolicyState pol(make_initial_logits(st.env, st.init, st.init_mass), st.seed);
      const auto trace = train(st.env, cfg, pol);
      auto out = detail::open_out(dir / file);
      write_trace_csv(out, trace.rows, echo);
      outputs.push_back((dir / file).string());
    };

    if (st.variants.empty()) {
      run_one(st.train.estimator.variant, "trace.csv");
    } else {
      for (auto v : st.variants) run_one(v, "trace_" + std::string(to_string(v)) + ".csv");
    }
    if (!st.schedule.empty()) {
      const auto pts =
          collapse_schedule_sim(st.train, st.schedule, st.seed, st.schedule_groups, st.schedule_bernoulli_p);
      auto out = detail::open_out(dir / "collapse.csv");
      write_collapse_csv(out, pts);
      outputs.push_back((dir / "collapse.csv").string());
    }
    detail::write_manifest(dir / "manifest.json", "simulate", st.effective, st.seed, {}, outputs);
    return int{kExitOk};
  });
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseResult {
  std::vector<std::string> group_ids;
  std::vector<GroupStats> groups;
  DiagnosticsReport report;
  std::size_t skipped_lines = 0;
};

/// Ingests group-log or advantage-report lines. Records that carry
/// "advantages" use them as-is; otherwise advantages are computed with `est`.
inline void diagnose_lines(const std::vector<std::string>& lines, const EstimatorConfig& est,
                           DiagnosticsAccumulator& acc, DiagnoseResult& res, std::size_t first_lineno = 1) {
  std::size_t lineno = first_lineno - 1;
  for (const auto& line : lines) {
    ++lineno;
    if (detail::blank(line)) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      if (!rec.is_object()) throw std::invalid_argument("not an object");
      const auto rewards = detail::read_rewards(rec);
      std::vector<double> adv;
      if (auto a = rec.find("advantages"); a != rec.end() && a->is_array()) {
        for (const auto& v : *a) {
          if (!v.is_number()) throw std::invalid_argument("non-numeric advantage");
          adv.push_back(v.get<double>());
        }
      } else {
        adv = estimate(rewards, est).advantages;
      }
      res.groups.push_back(acc.add_group(rewards, adv));
      res.group_ids.push_back(detail::group_id_of(rec, lineno));
    } catch (const std::exception&) {
      ++res.skipped_lines;
    }
  }
}

inline int cmd_diagnose(const std::string& in_path, const std::string& out_dir, const Settings& settings,
                        std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    Settings s = settings;
    if (!s.count("variant")) s["variant"] = "base";
    const auto est = estimator_config_from(s);
    double threshold = kDefaultLowStdThreshold;
    SettingsReader(s).real("low_std_threshold", threshold);
    std::vector<double> deltas = kDefaultDeltas;
    if (auto it = s.find("deltas"); it != s.end()) deltas = parse_real_list("deltas", it->second);
    for (double d : deltas) {
      if (!(d > 0.0)) throw Error(ErrorCode::InvalidConfig, "deltas must be positive");
    }
    const auto seed = detail::seed_from(s);
    const auto lines = detail::read_lines(in_path);

    DiagnosticsAccumulator acc(threshold);
    DiagnoseResult res;
    diagnose_lines(lines, est, acc, res);
    res.report = acc.report(deltas);

    const std::filesystem::path dir(out_dir);
    detail::ensure_dir(dir);
    {
      auto out = detail::open_out(dir / "report.csv");
      write_report_csv(out, res.report, res.skipped_lines);
    }
    {
      auto out = detail::open_out(dir / "scatter.csv");
      out << "group_id,mean,sigma,all_equal,low_std\n";
      for (std::size_t i = 0; i < res.groups.size(); ++i) {
        const auto& g = res.groups[i];
        out << csv_escape(res.group_ids[i]) << ',' << format_double(g.mean) << ',' << format_double(g.sigma) << ','
            << (g.all_equal ? 1 : 0) << ',' << (g.low_std ? 1 : 0) << '\n';
      }
    }
    {
      auto out = detail::open_out(dir / "hist.csv");
      write_hist_csv(out, res.report.histogram);
    }
    Settings effective;
    write_settings(effective, est);
    effective["low_std_threshold"] = format_double(threshold);
    std::string dl;
    for (double d : deltas) dl += (dl.empty() ? "" : ",") + format_double(d);
    effective["deltas"] = dl;
    effective["seed"] = std::to_string(seed);
    detail::write_manifest(dir / "manifest.json", "diagnose", effective, seed, {in_path},
                           {(dir / "report.csv").string(), (dir / "scatter.csv").string(),
                            (dir / "hist.csv").string()});
    return int{kExitOk};
  });
}

}  // namespace guae
