#pragma once

#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "cqj/corpus.hpp"
#include "cqj/textcore.hpp"

namespace cqj {

enum class QueryTypeHint { Ambiguous, Faceted, None };
enum class QueryType { Ambiguous, Faceted, Unknown };

std::string_view to_string(QueryTypeHint h) noexcept;
std::string_view to_string(QueryType t) noexcept;
std::optional<QueryTypeHint> parse_query_type_hint(std::string_view s) noexcept;

/// Literal slot marker inside a template pattern.
inline constexpr std::string_view kSlotMarker = "____";

/// A clarifying-question template such as
/// `What (would you like|do you want) to do with ____?`.
///
/// Parenthesised groups are alternations, `____` is the (optional, at most one)
/// slot. Matching is case-insensitive, tolerant of extra whitespace, and the
/// trailing `?` is optional.
class TemplatePattern {
 public:
  TemplatePattern(int id, std::string pattern, QueryTypeHint hint);

  int id() const { return id_; }
  const std::string& pattern() const { return pattern_; }
  QueryTypeHint hint() const { return hint_; }
  bool has_slot() const { return has_slot_; }

  /// Slot text on a match ("" for slotless templates).
  std::optional<std::string> match(std::string_view question) const;
  /// Fills the slot (and picks the first alternative of each group).
  std::string instantiate(std::string_view slot_value) const;

 private:
  int id_;
  std::string pattern_;
  QueryTypeHint hint_;
  bool has_slot_ = false;
  std::regex regex_;
};

using TemplateRegistry = std::vector<TemplatePattern>;

/// Built-in registry with the seven common MIMICS clarification templates.
TemplateRegistry default_templates();
/// `id<TAB>pattern<TAB>hint` per line; `#` comments. Ids must be unique.
TemplateRegistry parse_templates(std::string_view text);
TemplateRegistry load_templates(const std::filesystem::path& path);
std::string serialize_templates(const TemplateRegistry& templates);
const TemplatePattern* find_template(const TemplateRegistry& templates, int id);

struct TemplateMatch {
  int template_id = 0;
  std::string slot_text;
};

/// First matching template in registration order, or nullopt.
std::optional<TemplateMatch> match_template(std::string_view question, const TemplateRegistry& templates);

struct TypingRules {
  bool use_template_hints = true;
  /// Faceted when at least this fraction of options contain the query.
  double facet_option_fraction = 0.5;
};

QueryType classify_query_type(const ClarificationRecord& record, const std::optional<TemplateMatch>& match,
                              const TemplateRegistry& templates, const TypingRules& rules = {});

struct FeatureVector {
  std::size_t question_len_words = 0;
  std::size_t query_len_words = 0;
  std::size_t n_options = 0;
  double polarity = 0.0;
  double subjectivity = 0.0;
  double rouge_precision = 0.0;
  double rouge_recall = 0.0;
  std::optional<int> template_id;
  QueryType query_type = QueryType::Unknown;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct FeatureOptions {
  /// Score sentiment over question + options instead of the question alone.
  bool include_options_in_sentiment = false;
};

/// Everything feature extraction depends on, bundled so it can be persisted.
struct FeatureContext {
  SentimentLexicon lexicon;
  TemplateRegistry templates = default_templates();
  TypingRules rules;
  FeatureOptions options;
};

FeatureVector extract_features(const ClarificationRecord& record, const SentimentLexicon& lexicon,
                               const TemplateRegistry& templates, const TypingRules& rules = {},
                               const FeatureOptions& options = {});
FeatureVector extract_features(const ClarificationRecord& record, const FeatureContext& ctx);
std::vector<FeatureVector> extract_features(const std::vector<ClarificationRecord>& records,
                                            const FeatureContext& ctx);

}  // namespace cqj
