#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace guae {

/// Unit-cost Levenshtein distance over any pair of random-access ranges with
/// comparable elements. Two-row dynamic program, O(|a|·|b|) time.
template <typename A, typename B>
std::size_t levenshtein(const A& a, const B& b) {
  const std::size_t n = std::size(a);
  const std::size_t m = std::size(b);
  if (n == 0) return m;
  if (m == 0) return n;

  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;

  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

/// Decodes UTF-8 into code points. Ill-formed bytes are passed through as
/// single units so that every input has a deterministic decoding.
inline std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(c);
      ++i;
    } else {
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

/// Trims ASCII whitespace and folds ASCII letters to lower case. Non-ASCII
/// bytes are left untouched.
inline std::string normalize_text(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  std::string out(s);
  for (auto& c : out) {
    if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

/// 1 - lev(a, b) / max(|a|, |b|, 1), computed on normalized code points.
inline double text_similarity(std::string_view a, std::string_view b) {
  const auto x = utf8_decode(normalize_text(a));
  const auto y = utf8_decode(normalize_text(b));
  const std::size_t denom = std::max<std::size_t>({x.size(), y.size(), 1});
  return 1.0 - static_cast<double>(levenshtein(x, y)) / static_cast<double>(denom);
}

}  // namespace guae
