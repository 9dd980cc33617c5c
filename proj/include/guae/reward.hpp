#pragma once

// Faithfulness-first reward: per-category action match, rule-based
// thought/action consistency, their convex combination, and the step-level
// Type / Grounding / SR verdicts.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guae/action.hpp"
#include "guae/edit_distance.hpp"
#include "guae/error.hpp"

namespace guae {

struct RewardConfig {
  double lambda = 0.85;
  /// Click decay scale, normalized 0..999 units.
  double tau_click = 60.0;
  /// Clicks farther than this (normalized units) score zero and fail grounding.
  double click_threshold = 140.0;
  /// Credit for an enumerated action whose type matches but argument does not.
  double rho = 0.5;
  /// When false, enumerated type-only matches score 0 instead of rho.
  bool enumerated_partial_credit = true;
  /// Grounding threshold on text similarity for Type actions.
  double text_grounding_min = 0.9;

  void validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::InvalidConfig, "lambda must lie in [0,1]");
    if (!(tau_click > 0.0)) throw Error(ErrorCode::InvalidConfig, "tau_click must be positive");
    if (!(click_threshold > 0.0)) throw Error(ErrorCode::InvalidConfig, "click_threshold must be positive");
    if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::InvalidConfig, "rho must lie in (0,1)");
    if (!(text_grounding_min >= 0.0 && text_grounding_min <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "text_grounding_min must lie in [0,1]");
    }
  }
};

// ---------------------------------------------------------------------------
// Geometry helpers

enum class SwipeDirection { None, Up, Down, Left, Right };

constexpr std::string_view to_string(SwipeDirection d) {
  switch (d) {
    case SwipeDirection::None: return "none";
    case SwipeDirection::Up: return "up";
    case SwipeDirection::Down: return "down";
    case SwipeDirection::Left: return "left";
    case SwipeDirection::Right: return "right";
  }
  return "none";
}

/// Dominant axis of (to - from) in screen coordinates (y grows downward).
/// Ties go to the vertical axis; a zero-length gesture has no direction.
inline SwipeDirection quantize_direction(Point from, Point to) {
  const int dx = to.x - from.x;
  const int dy = to.y - from.y;
  if (dx == 0 && dy == 0) return SwipeDirection::None;
  if (std::abs(dy) >= std::abs(dx)) return dy > 0 ? SwipeDirection::Down : SwipeDirection::Up;
  return dx > 0 ? SwipeDirection::Right : SwipeDirection::Left;
}

inline SwipeDirection swipe_direction(const Action& a) {
  if (a.kind() != ActionKind::Swipe) return SwipeDirection::None;
  return quantize_direction(*a.coordinate(), *a.coordinate_end());
}

inline double distance(Point a, Point b) {
  return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

// ---------------------------------------------------------------------------
// Action match

struct ActionMatch {
  double phi = 0.0;
  double r_am = 0.0;
  bool type_match = false;
};

/// exp(-d / tau) inside the threshold, 0 outside.
inline double click_score(double d, const RewardConfig& cfg) {
  return d <= cfg.click_threshold ? std::exp(-d / cfg.tau_click) : 0.0;
}

inline double swipe_score(const Action& pred, const Action& ref) {
  if (swipe_direction(pred) != swipe_direction(ref)) return 0.0;
  const double m_pred = distance(*pred.coordinate(), *pred.coordinate_end());
  const double m_ref = distance(*ref.coordinate(), *ref.coordinate_end());
  const double hi = std::max(m_pred, m_ref);
  const double psi = hi == 0.0 ? 1.0 : std::min(m_pred, m_ref) / hi;
  return 0.5 + 0.5 * psi;
}

inline ActionMatch action_match(const Action& pred, const Action& ref, const RewardConfig& cfg = {}) {
  ActionMatch m;
  m.type_match = pred.kind() == ref.kind();
  if (!m.type_match) return m;

  switch (ref.kind()) {
    case ActionKind::Click:
      m.phi = click_score(distance(*pred.coordinate(), *ref.coordinate()), cfg);
      break;
    case ActionKind::Type:
      m.phi = text_similarity(*pred.text(), *ref.text());
      break;
    case ActionKind::Swipe:
      m.phi = swipe_score(pred, ref);
      break;
    case ActionKind::SystemButton:
      m.phi = pred.button() == ref.button() ? 1.0 : 0.0;
      break;
    case ActionKind::Terminate:
      m.phi = pred.status() == ref.status() ? 1.0 : 0.0;
      break;
  }
  m.r_am = m.phi;
  if (category_of(ref) == ActionCategory::DiscreteEnumerated && m.phi == 0.0 && cfg.enumerated_partial_credit) {
    m.r_am = cfg.rho;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Thought / action consistency

enum class ConsistencyLabel { Consistent, Neutral, Contradictory };

constexpr std::string_view to_string(ConsistencyLabel l) {
  switch (l) {
    case ConsistencyLabel::Consistent: return "consistent";
    case ConsistencyLabel::Neutral: return "neutral";
    case ConsistencyLabel::Contradictory: return "contradictory";
  }
  return "neutral";
}

struct ConsistencyVerdict {
  ConsistencyLabel label = ConsistencyLabel::Neutral;
  double s = 0.0;
  /// Extracted cues, "<family>:<token>", in extraction order.
  std::vector<std::string> cues;
};

inline constexpr double kArgumentConflictScore = -0.5;
inline constexpr double kTypeConflictScore = -1.0;

namespace detail {

struct Lexicon {
  ActionKind kind;
  std::vector<std::vector<std::string_view>> phrases;
};

// Families in decreasing priority. Inflected forms are included so that
// "typing" or "scrolling" count as cues.
inline const std::array<Lexicon, 5>& intent_lexicons() {
  static const std::array<Lexicon, 5> lex = {{
      {ActionKind::Terminate,
       {{"terminate"}, {"terminating"}, {"stop"}, {"task", "complete"}, {"finish"}, {"finished"},
        {"infeasible"}}},
      {ActionKind::SystemButton, {{"back"}, {"home"}, {"navigate", "back"}, {"go", "back"}}},
      {ActionKind::Type,
       {{"type"}, {"typing"}, {"enter"}, {"entering"}, {"input"}, {"fill"}, {"filling"}}},
      {ActionKind::Swipe,
       {{"swipe"}, {"swiping"}, {"scroll"}, {"scrolling"}, {"drag"}, {"dragging"}}},
      {ActionKind::Click,
       {{"click"}, {"clicking"}, {"tap"}, {"tapping"}, {"press"}, {"pressing"}, {"select"}}},
  }};
  return lex;
}

inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : s) {
    if (c < 0x80 && std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline bool contains_phrase(const std::vector<std::string>& toks, const std::vector<std::string_view>& phrase) {
  if (phrase.empty() || toks.size() < phrase.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= toks.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < phrase.size() && hit; ++k) hit = toks[i + k] == phrase[k];
    if (hit) return true;
  }
  return false;
}

inline bool has_token(const std::vector<std::string>& toks, std::string_view w) {
  return std::find(toks.begin(), toks.end(), w) != toks.end();
}

inline bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u);
}

/// Quoted spans: "...", '...' (apostrophes inside words are not quotes) and
/// typographic double quotes.
inline std::vector<std::string> quoted_spans(std::string_view s) {
  static constexpr std::string_view kOpen = "\xE2\x80\x9C";
  static constexpr std::string_view kClose = "\xE2\x80\x9D";
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '"') {
      const auto end = s.find('"', i + 1);
      if (end == std::string_view::npos) break;
      if (end > i + 1) out.emplace_back(s.substr(i + 1, end - i - 1));
      i = end + 1;
    } else if (s[i] == '\'' && (i == 0 || !is_word_byte(s[i - 1]))) {
      std::size_t end = i + 1;
      while (end < s.size() && !(s[end] == '\'' && (end + 1 == s.size() || !is_word_byte(s[end + 1])))) ++end;
      if (end >= s.size()) {
        ++i;
        continue;
      }
      if (end > i + 1) out.emplace_back(s.substr(i + 1, end - i - 1));
      i = end + 1;
    } else if (s.substr(i, kOpen.size()) == kOpen) {
      const auto end = s.find(kClose, i + kOpen.size());
      if (end == std::string_view::npos) break;
      if (end > i + kOpen.size()) out.emplace_back(s.substr(i + kOpen.size(), end - i - kOpen.size()));
      i = end + kClose.size();
    } else {
      ++i;
    }
  }
  return out;
}

inline std::string join(const std::vector<std::string_view>& phrase) {
  std::string out;
  for (auto w : phrase) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace detail

inline ConsistencyVerdict make_verdict(double s, std::vector<std::string> cues) {
  ConsistencyVerdict v;
  v.s = std::clamp(s, -1.0, 1.0);
  v.label = v.s > 0.0 ? ConsistencyLabel::Consistent
                      : (v.s < 0.0 ? ConsistencyLabel::Contradictory : ConsistencyLabel::Neutral);
  v.cues = std::move(cues);
  return v;
}

inline ConsistencyVerdict score_consistency(std::string_view thought, const Action& pred) {
  const auto toks = detail::tokenize(thought);
  std::vector<std::string> cues;
  std::optional<ActionKind> intent;

  for (const auto& fam : detail::intent_lexicons()) {
    for (const auto& phrase : fam.phrases) {
      if (detail::contains_phrase(toks, phrase)) {
        cues.push_back(std::string(to_string(fam.kind)) + ":" + detail::join(phrase));
        if (!intent) intent = fam.kind;
      }
    }
  }
  if (!intent) return make_verdict(0.0, std::move(cues));
  if (*intent != pred.kind()) return make_verdict(kTypeConflictScore, std::move(cues));

  bool conflict = false;
  switch (pred.kind()) {
    case ActionKind::Type: {
      const std::string typed = normalize_text(*pred.text());
      for (const auto& q : detail::quoted_spans(thought)) {
        cues.push_back("quote:" + q);
        const std::string want = normalize_text(q);
        if (!want.empty() && typed.find(want) == std::string::npos) conflict = true;
      }
      break;
    }
    case ActionKind::Swipe: {
      static constexpr std::array<std::pair<std::string_view, SwipeDirection>, 4> kDirs = {{
          {"up", SwipeDirection::Up},
          {"down", SwipeDirection::Down},
          {"left", SwipeDirection::Left},
          {"right", SwipeDirection::Right},
      }};
      for (const auto& tok : toks) {
        auto it = std::find_if(kDirs.begin(), kDirs.end(), [&](const auto& d) { return d.first == tok; });
        if (it != kDirs.end()) {
          cues.push_back("direction:" + tok);
          conflict = it->second != swipe_direction(pred);
          break;
        }
      }
      break;
    }
    case ActionKind::SystemButton: {
      const bool back = detail::has_token(toks, "back");
      const bool home = detail::has_token(toks, "home");
      if (back != home) {
        const Button stated = back ? Button::Back : Button::Home;
        cues.push_back(std::string("button:") + (back ? "back" : "home"));
        conflict = stated != *pred.button();
      }
      break;
    }
    case ActionKind::Terminate: {
      static constexpr std::array<std::string_view, 5> kFail = {"infeasible", "fail", "failed", "failure",
                                                                "impossible"};
      static constexpr std::array<std::string_view, 6> kOk = {"complete", "completed", "success",
                                                              "successful", "successfully", "done"};
      const bool fail = std::any_of(kFail.begin(), kFail.end(), [&](auto w) { return detail::has_token(toks, w); });
      const bool ok = std::any_of(kOk.begin(), kOk.end(), [&](auto w) { return detail::has_token(toks, w); });
      if (fail != ok) {
        cues.push_back(std::string("status:") + (ok ? "success" : "failure"));
        conflict = (ok ? Status::Success : Status::Failure) != *pred.status();
      }
      break;
    }
    case ActionKind::Click:
      break;
  }
  return make_verdict(conflict ? kArgumentConflictScore : 1.0, std::move(cues));
}

/// (s + 1) / 2.
inline double consistency_reward(const ConsistencyVerdict& v) { return (std::clamp(v.s, -1.0, 1.0) + 1.0) / 2.0; }

// ---------------------------------------------------------------------------
// Combined reward

struct RewardBreakdown {
  double r_am = 0.0;
  double r_cons = 0.0;
  double r_combined = 0.0;
  double phi = 0.0;
  bool type_match = false;
  ConsistencyVerdict verdict;
  /// Set when the prediction could not be parsed; the action then scores 0.
  std::optional<ParseFailure> parse_error;
};

inline double combine(double r_am, double r_cons, double lambda) { return lambda * r_am + (1.0 - lambda) * r_cons; }

inline RewardBreakdown combined_reward(std::string_view thought, std::string_view predicted_raw,
                                       const Action& reference, const RewardConfig& cfg = {},
                                       const ParseOptions& parse = {}) {
  RewardBreakdown out;
  const auto pred = parse_action(predicted_raw, parse);
  if (pred) {
    const auto m = action_match(*pred, reference, cfg);
    out.phi = m.phi;
    out.r_am = m.r_am;
    out.type_match = m.type_match;
    out.verdict = score_consistency(thought, *pred);
  } else {
    out.parse_error = pred.error();
    out.verdict = make_verdict(0.0, {});
  }
  out.r_cons = consistency_reward(out.verdict);
  out.r_combined = combine(out.r_am, out.r_cons, cfg.lambda);
  return out;
}

// ---------------------------------------------------------------------------
// Step-level metrics

struct StepVerdict {
  bool type_ok = false;
  bool grounding_ok = false;
  bool success = false;
};

inline StepVerdict evaluate_step(const Action& pred, const Action& ref, const RewardConfig& cfg = {}) {
  StepVerdict v;
  v.type_ok = pred.kind() == ref.kind();
  if (v.type_ok) {
    switch (ref.kind()) {
      case ActionKind::Click:
        v.grounding_ok = distance(*pred.coordinate(), *ref.coordinate()) <= cfg.click_threshold;
        break;
      case ActionKind::Type:
        v.grounding_ok = text_similarity(*pred.text(), *ref.text()) >= cfg.text_grounding_min;
        break;
      case ActionKind::Swipe:
        v.grounding_ok = swipe_direction(pred) == swipe_direction(ref);
        break;
      case ActionKind::SystemButton:
        v.grounding_ok = pred.button() == ref.button();
        break;
      case ActionKind::Terminate:
        v.grounding_ok = pred.status() == ref.status();
        break;
    }
  }
  v.success = v.type_ok && v.grounding_ok;
  return v;
}

}  // namespace guae
