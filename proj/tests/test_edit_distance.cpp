#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "guae/edit_distance.hpp"

namespace guae {
namespace {

// Full-matrix Wagner-Fischer, kept separate from the two-row implementation.
std::size_t full_matrix_levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

// Exhaustive recursion straight from the definition; tiny inputs only.
std::size_t recursive_levenshtein(const std::string& a, const std::string& b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::string ta = a.substr(1), tb = b.substr(1);
  if (a[0] == b[0]) return recursive_levenshtein(ta, tb);
  return 1 + std::min({recursive_levenshtein(ta, b), recursive_levenshtein(a, tb), recursive_levenshtein(ta, tb)});
}

TEST(Levenshtein, KnownPairs) {
  EXPECT_EQ(levenshtein(std::string("test"), std::string("test")), 0u);
  EXPECT_EQ(levenshtein(std::string("hello"), std::string("ell")), 2u);
  EXPECT_EQ(levenshtein(std::string("helo"), std::string("hello")), 1u);
  EXPECT_EQ(levenshtein(std::string("kitten"), std::string("sitting")), 3u);
  EXPECT_EQ(levenshtein(std::string(""), std::string("hello")), 5u);
  EXPECT_EQ(levenshtein(std::string("Test"), std::string("test")), 1u);
}

TEST(Levenshtein, MatchesOraclesOnRandomStrings) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> len(0, 7), ch(0, 3);
  for (int i = 0; i < 3000; ++i) {
    std::string a, b;
    for (int k = len(rng); k > 0; --k) a.push_back(static_cast<char>('a' + ch(rng)));
    for (int k = len(rng); k > 0; --k) b.push_back(static_cast<char>('a' + ch(rng)));
    const auto got = levenshtein(a, b);
    EXPECT_EQ(got, full_matrix_levenshtein(a, b)) << a << " / " << b;
    EXPECT_EQ(got, recursive_levenshtein(a, b)) << a << " / " << b;
    EXPECT_EQ(got, levenshtein(b, a));
  }
}

TEST(TextSimilarity, WorkedExamples) {
  EXPECT_DOUBLE_EQ(text_similarity("helo", "hello"), 0.8);
  EXPECT_DOUBLE_EQ(text_similarity("  Hello ", "hello"), 1.0);
  EXPECT_DOUBLE_EQ(text_similarity("", ""), 1.0);
  EXPECT_DOUBLE_EQ(text_similarity("abc", ""), 0.0);
}

TEST(TextSimilarity, CountsCodePointsNotBytes) {
  // "café" vs "cafe": one substitution over four code points.
  EXPECT_DOUBLE_EQ(text_similarity("caf\xC3\xA9", "cafe"), 0.75);
}

TEST(TextSimilarity, SymmetricAndOneIffEqual) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> len(0, 6), ch(0, 5);
  for (int i = 0; i < 2000; ++i) {
    std::string a, b;
    for (int k = len(rng); k > 0; --k) a.push_back("abAB x"[ch(rng)]);
    for (int k = len(rng); k > 0; --k) b.push_back("abAB x"[ch(rng)]);
    const double s = text_similarity(a, b);
    EXPECT_EQ(s, text_similarity(b, a));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_EQ(s == 1.0, normalize_text(a) == normalize_text(b)) << '"' << a << "\" \"" << b << '"';
  }
}

TEST(Utf8, IllFormedBytesPassThrough) {
  const auto cps = utf8_decode("a\xFF\xC3");
  ASSERT_EQ(cps.size(), 3u);
  EXPECT_EQ(cps[0], U'a');
  EXPECT_EQ(cps[1], 0xFFu);
  EXPECT_EQ(cps[2], 0xC3u);
}

}  // namespace
}  // namespace guae
