#pragma once

// Canonical GUI action space, tool-call parsing and coordinate handling.
//
// Wire format (one UTF-8 JSON document per action):
//   {"name":"click","arguments":{"coordinate":[x,y]}}
//   {"name":"swipe","arguments":{"coordinate":[x,y],"coordinate2":[x,y]}}
//   {"name":"type","arguments":{"text":"..."}}
//   {"name":"system_button","arguments":{"button":"Back"|"Home"}}
//   {"name":"terminate","arguments":{"status":"success"|"failure"}}
// Coordinates live in a normalized 0..999 screen space.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "json.hpp"

#include "guae/error.hpp"

namespace guae {

inline constexpr int kCoordMax = 999;

enum class ActionKind { Click, Swipe, Type, SystemButton, Terminate };
enum class ActionCategory { Coordinate, TextOrGesture, DiscreteEnumerated };
enum class Button { Back, Home };
enum class Status { Success, Failure };

struct Point {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Point&, const Point&) = default;
};

struct ScreenSize {
  int width = 1;
  int height = 1;
};

constexpr std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Click: return "click";
    case ActionKind::Swipe: return "swipe";
    case ActionKind::Type: return "type";
    case ActionKind::SystemButton: return "system_button";
    case ActionKind::Terminate: return "terminate";
  }
  return "unknown";
}

constexpr std::string_view to_string(Button b) { return b == Button::Back ? "Back" : "Home"; }
constexpr std::string_view to_string(Status s) {
  return s == Status::Success ? "success" : "failure";
}

constexpr std::string_view to_string(ActionCategory c) {
  switch (c) {
    case ActionCategory::Coordinate: return "coordinate";
    case ActionCategory::TextOrGesture: return "text_or_gesture";
    case ActionCategory::DiscreteEnumerated: return "discrete_enumerated";
  }
  return "unknown";
}

/// A canonical action. Construction goes through the named factories, which
/// guarantee that exactly the arguments required by the kind are present and
/// that coordinates are inside [0, 999].
class Action {
 public:
  static Action click(Point p) {
    Action a(ActionKind::Click);
    a.coordinate_ = clamp(p);
    return a;
  }
  static Action swipe(Point from, Point to) {
    Action a(ActionKind::Swipe);
    a.coordinate_ = clamp(from);
    a.coordinate_end_ = clamp(to);
    return a;
  }
  static Action type(std::string text) {
    Action a(ActionKind::Type);
    a.text_ = std::move(text);
    return a;
  }
  static Action system_button(Button b) {
    Action a(ActionKind::SystemButton);
    a.button_ = b;
    return a;
  }
  static Action terminate(Status s) {
    Action a(ActionKind::Terminate);
    a.status_ = s;
    return a;
  }

  ActionKind kind() const noexcept { return kind_; }
  const std::optional<Point>& coordinate() const noexcept { return coordinate_; }
  const std::optional<Point>& coordinate_end() const noexcept { return coordinate_end_; }
  const std::optional<std::string>& text() const noexcept { return text_; }
  const std::optional<Button>& button() const noexcept { return button_; }
  const std::optional<Status>& status() const noexcept { return status_; }

  friend bool operator==(const Action&, const Action&) = default;

 private:
  explicit Action(ActionKind k) : kind_(k) {}

  static Point clamp(Point p) {
    return {std::clamp(p.x, 0, kCoordMax), std::clamp(p.y, 0, kCoordMax)};
  }

  ActionKind kind_;
  std::optional<Point> coordinate_;
  std::optional<Point> coordinate_end_;
  std::optional<std::string> text_;
  std::optional<Button> button_;
  std::optional<Status> status_;
};

constexpr ActionCategory category_of(ActionKind k) {
  switch (k) {
    case ActionKind::Click: return ActionCategory::Coordinate;
    case ActionKind::Swipe:
    case ActionKind::Type: return ActionCategory::TextOrGesture;
    case ActionKind::SystemButton:
    case ActionKind::Terminate: return ActionCategory::DiscreteEnumerated;
  }
  return ActionCategory::DiscreteEnumerated;
}

inline ActionCategory category_of(const Action& a) { return category_of(a.kind()); }

// ---------------------------------------------------------------------------
// Parsing

enum class ParseError { MalformedDocument, UnknownActionType, MissingArgument, OutOfRangeArgument };

constexpr std::string_view to_string(ParseError e) {
  switch (e) {
    case ParseError::MalformedDocument: return "MalformedDocument";
    case ParseError::UnknownActionType: return "UnknownActionType";
    case ParseError::MissingArgument: return "MissingArgument";
    case ParseError::OutOfRangeArgument: return "OutOfRangeArgument";
  }
  return "Unknown";
}

struct ParseFailure {
  ParseError code;
  std::string detail;
};

class ParseResult {
 public:
  ParseResult(Action a) : v_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
  ParseResult(ParseFailure f) : v_(std::move(f)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const noexcept { return std::holds_alternative<Action>(v_); }
  explicit operator bool() const noexcept { return ok(); }

  const Action& value() const { return std::get<Action>(v_); }
  const ParseFailure& error() const { return std::get<ParseFailure>(v_); }

  const Action* operator->() const { return &value(); }
  const Action& operator*() const { return value(); }

 private:
  std::variant<Action, ParseFailure> v_;
};

struct ParseOptions {
  /// Reject coordinates outside [0, 999] instead of clamping them.
  bool strict = false;
};

namespace detail {

inline std::string normalize_name(std::string_view raw) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!raw.empty() && is_space(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
  while (!raw.empty() && is_space(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (c == '-' || c == ' ') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  return out;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

using Json = nlohmann::json;

inline std::variant<Point, ParseFailure> read_point(const Json& args, const char* key,
                                                    const ParseOptions& opts) {
  auto it = args.find(key);
  if (it == args.end() || it->is_null()) {
    return ParseFailure{ParseError::MissingArgument, std::string("missing '") + key + "'"};
  }
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
    return ParseFailure{ParseError::MalformedDocument,
                        std::string("'") + key + "' must be a two-element numeric array"};
  }
  int xy[2];
  for (int i = 0; i < 2; ++i) {
    const double v = (*it)[i].get<double>();
    if (!std::isfinite(v)) {
      return ParseFailure{ParseError::MalformedDocument, std::string("non-finite '") + key + "'"};
    }
    const double r = std::round(v);
    if (r < 0.0 || r > kCoordMax) {
      if (opts.strict) {
        return ParseFailure{ParseError::OutOfRangeArgument,
                            std::string("'") + key + "' outside [0, 999]"};
      }
    }
    xy[i] = static_cast<int>(std::clamp(r, 0.0, static_cast<double>(kCoordMax)));
  }
  return Point{xy[0], xy[1]};
}

}  // namespace detail

/// Parses an already-decoded tool-call document.
inline ParseResult parse_action(const nlohmann::json& doc, const ParseOptions& opts = {}) {
  using detail::Json;
  if (!doc.is_object()) return ParseFailure{ParseError::MalformedDocument, "not a JSON object"};
  auto name_it = doc.find("name");
  if (name_it == doc.end() || !name_it->is_string()) {
    return ParseFailure{ParseError::MalformedDocument, "missing string 'name'"};
  }
  static const Json kEmpty = Json::object();
  const Json* args = &kEmpty;
  if (auto a = doc.find("arguments"); a != doc.end() && !a->is_null()) {
    if (!a->is_object()) return ParseFailure{ParseError::MalformedDocument, "'arguments' must be an object"};
    args = &*a;
  }

  const std::string name = detail::normalize_name(name_it->get_ref<const std::string&>());

  if (name == "click") {
    auto p = detail::read_point(*args, "coordinate", opts);
    if (auto* f = std::get_if<ParseFailure>(&p)) return *f;
    return Action::click(std::get<Point>(p));
  }
  if (name == "swipe") {
    auto p = detail::read_point(*args, "coordinate", opts);
    if (auto* f = std::get_if<ParseFailure>(&p)) return *f;
    auto q = detail::read_point(*args, "coordinate2", opts);
    if (auto* f = std::get_if<ParseFailure>(&q)) return *f;
    return Action::swipe(std::get<Point>(p), std::get<Point>(q));
  }
  if (name == "type") {
    auto t = args->find("text");
    if (t == args->end() || t->is_null()) return ParseFailure{ParseError::MissingArgument, "missing 'text'"};
    if (!t->is_string()) return ParseFailure{ParseError::MalformedDocument, "'text' must be a string"};
    const auto& s = t->get_ref<const std::string&>();
    if (s.empty()) return ParseFailure{ParseError::MissingArgument, "empty 'text'"};
    return Action::type(s);
  }
  if (name == "system_button") {
    auto b = args->find("button");
    if (b == args->end() || b->is_null()) return ParseFailure{ParseError::MissingArgument, "missing 'button'"};
    if (!b->is_string()) return ParseFailure{ParseError::MalformedDocument, "'button' must be a string"};
    const std::string v = detail::lower(b->get_ref<const std::string&>());
    if (v == "back") return Action::system_button(Button::Back);
    if (v == "home") return Action::system_button(Button::Home);
    return ParseFailure{ParseError::OutOfRangeArgument, "button must be Back or Home"};
  }
  if (name == "terminate") {
    auto s = args->find("status");
    if (s == args->end() || s->is_null()) return ParseFailure{ParseError::MissingArgument, "missing 'status'"};
    if (!s->is_string()) return ParseFailure{ParseError::MalformedDocument, "'status' must be a string"};
    const std::string v = detail::lower(s->get_ref<const std::string&>());
    if (v == "success") return Action::terminate(Status::Success);
    if (v == "failure") return Action::terminate(Status::Failure);
    return ParseFailure{ParseError::OutOfRangeArgument, "status must be success or failure"};
  }
  return ParseFailure{ParseError::UnknownActionType, "unknown action '" + name + "'"};
}

/// Parses raw tool-call text. Never throws; arbitrary bytes yield a typed failure.
inline ParseResult parse_action(std::string_view raw, const ParseOptions& opts = {}) {
  auto doc = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return ParseFailure{ParseError::MalformedDocument, "unparsable JSON"};
  return parse_action(doc, opts);
}

inline ParseResult parse_action(const char* raw, const ParseOptions& opts = {}) {
  return parse_action(std::string_view(raw), opts);
}

inline ParseResult parse_action(const std::string& raw, const ParseOptions& opts = {}) {
  return parse_action(std::string_view(raw), opts);
}

inline nlohmann::ordered_json to_json(const Action& a) {
  nlohmann::ordered_json args = nlohmann::ordered_json::object();
  auto pt = [](Point p) { return nlohmann::ordered_json::array({p.x, p.y}); };
  switch (a.kind()) {
    case ActionKind::Click: args["coordinate"] = pt(*a.coordinate()); break;
    case ActionKind::Swipe:
      args["coordinate"] = pt(*a.coordinate());
      args["coordinate2"] = pt(*a.coordinate_end());
      break;
    case ActionKind::Type: args["text"] = *a.text(); break;
    case ActionKind::SystemButton: args["button"] = to_string(*a.button()); break;
    case ActionKind::Terminate: args["status"] = to_string(*a.status()); break;
  }
  nlohmann::ordered_json doc;
  doc["name"] = to_string(a.kind());
  doc["arguments"] = std::move(args);
  return doc;
}

/// Canonical compact document, e.g. {"name":"click","arguments":{"coordinate":[500,500]}}.
inline std::string serialize(const Action& a) { return to_json(a).dump(); }

// ---------------------------------------------------------------------------
// Pixel space

struct PixelAction {
  ActionKind kind;
  Point coordinate;
  std::optional<Point> coordinate_end;
};

/// Maps c to round(c / 999 * dim), clamped to a zero-based pixel index.
inline int to_pixel(int c, int dim) {
  const long v = std::lround(static_cast<double>(c) / kCoordMax * dim);
  return static_cast<int>(std::clamp<long>(v, 0, dim - 1));
}

inline PixelAction rescale_to_pixels(const Action& a, ScreenSize s) {
  if (s.width < 1 || s.height < 1) throw Error(ErrorCode::InvalidRange, "screen size must be positive");
  if (!a.coordinate()) throw Error(ErrorCode::NoCoordinates, std::string(to_string(a.kind())) + " has no coordinates");
  auto map = [&](Point p) { return Point{to_pixel(p.x, s.width), to_pixel(p.y, s.height)}; };
  PixelAction out{a.kind(), map(*a.coordinate()), std::nullopt};
  if (a.coordinate_end()) out.coordinate_end = map(*a.coordinate_end());
  return out;
}

}  // namespace guae
