#include "cqj/textcore.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "cqj/common.hpp"
#include "text_util.hpp"

namespace cqj {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

double parse_double(std::string_view s, std::size_t line) {
  try {
    std::size_t used = 0;
    std::string tmp(s);
    double v = std::stod(tmp, &used);
    if (used != tmp.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::BadConfig, fmt::format("lexicon line {}: bad number '{}'", line, s));
  }
}

}  // namespace

TokenList tokenize(std::string_view text) {
  TokenList out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void SentimentLexicon::add_word(std::string word, double polarity, double subjectivity) {
  if (!(polarity >= -1.0 && polarity <= 1.0))
    throw Error(Errc::BadConfig, fmt::format("polarity of '{}' outside [-1,1]", word));
  if (!(subjectivity >= 0.0 && subjectivity <= 1.0))
    throw Error(Errc::BadConfig, fmt::format("subjectivity of '{}' outside [0,1]", word));
  entries_[std::move(word)] = LexiconEntry{polarity, subjectivity};
}

void SentimentLexicon::add_negator(std::string word) { negators_.insert(std::move(word)); }

void SentimentLexicon::add_intensifier(std::string word, double multiplier) {
  if (!(multiplier > 0.0))
    throw Error(Errc::BadConfig, fmt::format("intensifier '{}' must have multiplier > 0", word));
  intensifiers_[std::move(word)] = multiplier;
}

const LexiconEntry* SentimentLexicon::find(std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

bool SentimentLexicon::is_negator(std::string_view word) const { return negators_.contains(word); }

double SentimentLexicon::intensity(std::string_view word) const {
  auto it = intensifiers_.find(word);
  return it == intensifiers_.end() ? 1.0 : it->second;
}

SentimentLexicon SentimentLexicon::parse(std::string_view text) {
  enum class Section { Words, Negators, Intensifiers } section = Section::Words;
  SentimentLexicon lex;
  std::size_t lineno = 0;
  for (std::string_view raw : detail::split_lines(text)) {
    ++lineno;
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line == "[words]") section = Section::Words;
      else if (line == "[negators]") section = Section::Negators;
      else if (line == "[intensifiers]") section = Section::Intensifiers;
      else throw Error(Errc::BadConfig, fmt::format("lexicon line {}: unknown section {}", lineno, line));
      continue;
    }
    auto fields = detail::split(line, '\t');
    switch (section) {
      case Section::Words:
        if (fields.size() != 3)
          throw Error(Errc::BadConfig, fmt::format("lexicon line {}: expected 3 fields", lineno));
        lex.add_word(std::string(fields[0]), parse_double(fields[1], lineno),
                     parse_double(fields[2], lineno));
        break;
      case Section::Negators:
        lex.add_negator(std::string(fields[0]));
        break;
      case Section::Intensifiers:
        if (fields.size() != 2)
          throw Error(Errc::BadConfig, fmt::format("lexicon line {}: expected 2 fields", lineno));
        lex.add_intensifier(std::string(fields[0]), parse_double(fields[1], lineno));
        break;
    }
  }
  return lex;
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path));
}

std::string SentimentLexicon::serialize() const {
  std::string out;
  for (const auto& [w, e] : entries_) out += fmt::format("{}\t{:.17g}\t{:.17g}\n", w, e.polarity, e.subjectivity);
  out += "[negators]\n";
  for (const auto& w : negators_) out += w + "\n";
  out += "[intensifiers]\n";
  for (const auto& [w, m] : intensifiers_) out += fmt::format("{}\t{:.17g}\n", w, m);
  return out;
}

SentimentScore score_sentiment(const TokenList& tokens, const SentimentLexicon& lexicon) {
  double pol_sum = 0.0;
  double subj_sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const LexiconEntry* e = lexicon.find(tokens[i]);
    if (e == nullptr) continue;
    double p = e->polarity;
    if (i >= 1) p *= lexicon.intensity(tokens[i - 1]);
    bool negated = (i >= 1 && lexicon.is_negator(tokens[i - 1])) ||
                   (i >= 2 && lexicon.is_negator(tokens[i - 2]));
    if (negated) p = -p;
    pol_sum += p;
    subj_sum += e->subjectivity;
    ++hits;
  }
  if (hits == 0) return {};
  const auto n = static_cast<double>(hits);
  return {std::clamp(pol_sum / n, -1.0, 1.0), std::clamp(subj_sum / n, 0.0, 1.0)};
}

SentimentScore score_sentiment(std::string_view text, const SentimentLexicon& lexicon) {
  return score_sentiment(tokenize(text), lexicon);
}

RougeScore rouge1(const TokenList& candidate, const TokenList& reference) {
  std::unordered_map<std::string_view, std::size_t> ref_counts;
  for (const auto& t : reference) ++ref_counts[t];
  std::size_t overlap = 0;
  for (const auto& t : candidate) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  RougeScore r;
  if (!candidate.empty()) r.precision = static_cast<double>(overlap) / static_cast<double>(candidate.size());
  if (!reference.empty()) r.recall = static_cast<double>(overlap) / static_cast<double>(reference.size());
  return r;
}

}  // namespace cqj
