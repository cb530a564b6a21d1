#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cqj {

/// Ordered lowercase word tokens; each token is non-empty and whitespace-free.
using TokenList = std::vector<std::string>;

/// Lowercases ASCII and splits on every run of characters that are not ASCII
/// letters or digits. Bytes >= 0x80 (UTF-8 continuation/lead bytes) are kept
/// inside words so non-ASCII words survive intact.
TokenList tokenize(std::string_view text);

struct LexiconEntry {
  double polarity = 0.0;      // [-1, 1]
  double subjectivity = 0.0;  // [0, 1]

  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

class SentimentLexicon {
 public:
  SentimentLexicon() = default;

  /// Throws Error(BadConfig) when a value violates its range.
  void add_word(std::string word, double polarity, double subjectivity);
  void add_negator(std::string word);
  void add_intensifier(std::string word, double multiplier);

  const LexiconEntry* find(std::string_view word) const;
  bool is_negator(std::string_view word) const;
  /// Multiplier for an intensifier, or 1.0 when `word` is not one.
  double intensity(std::string_view word) const;

  const std::map<std::string, LexiconEntry, std::less<>>& entries() const { return entries_; }
  const std::set<std::string, std::less<>>& negators() const { return negators_; }
  const std::map<std::string, double, std::less<>>& intensifiers() const { return intensifiers_; }

  /// Parses the lexicon text format:
  ///
  ///     # comment
  ///     word<TAB>polarity<TAB>subjectivity
  ///     [negators]
  ///     not
  ///     [intensifiers]
  ///     very<TAB>1.3
  ///
  /// Lines before any section header belong to the word list (`[words]`).
  static SentimentLexicon parse(std::string_view text);
  static SentimentLexicon load(const std::filesystem::path& path);
  std::string serialize() const;

  friend bool operator==(const SentimentLexicon&, const SentimentLexicon&) = default;

 private:
  std::map<std::string, LexiconEntry, std::less<>> entries_;
  std::set<std::string, std::less<>> negators_;
  std::map<std::string, double, std::less<>> intensifiers_;
};

struct SentimentScore {
  double polarity = 0.0;
  double subjectivity = 0.0;
};

/// Mean polarity/subjectivity over lexicon hits. A hit's polarity is scaled by
/// the multiplier of an intensifier directly before it and sign-flipped when a
/// negator occurs within the two preceding tokens. Polarity is clamped to
/// [-1, 1]. No hits gives (0, 0).
SentimentScore score_sentiment(const TokenList& tokens, const SentimentLexicon& lexicon);
SentimentScore score_sentiment(std::string_view text, const SentimentLexicon& lexicon);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
};

/// ROUGE-1 with clipped (multiset) unigram overlap.
RougeScore rouge1(const TokenList& candidate, const TokenList& reference);

}  // namespace cqj
