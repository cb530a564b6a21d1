#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqj/corpus.hpp"
#include "cqj/features.hpp"

namespace cqj {

enum class GroupKey { TemplateId, NOptions, QueryLenBucket, QuestionLenBucket, QueryType };

std::string_view to_string(GroupKey k) noexcept;
std::optional<GroupKey> parse_group_key(std::string_view s) noexcept;

/// Word-count buckets given by inclusive upper bounds; values above the last
/// bound fall into an open-ended bucket. {4,7,10} gives "<=4", "5-7", "8-10", "11+".
struct LengthBuckets {
  std::vector<std::size_t> upper_bounds;

  std::size_t index_of(std::size_t n) const;
  std::string name(std::size_t index) const;
  std::size_t count() const { return upper_bounds.size() + 1; }
};

struct AnalysisConfig {
  LengthBuckets query_len{{1, 2, 3, 4, 5}};
  LengthBuckets question_len{{4, 7, 10}};
};

/// Label counts for one group and the frequency-normalized rates derived from them.
struct RateCell {
  PerLabel<std::size_t> counts{};
  PerLabel<double> rates{};
  std::size_t support = 0;

  void add(Label l) {
    ++counts[static_cast<std::size_t>(ordinal(l))];
    ++support;
  }
  void finalize();
};

struct RateRow {
  std::string group;
  double sort_key = 0.0;
  RateCell cell;
};

struct RateTable {
  std::string grouping;
  std::vector<RateRow> rows;  // sorted by group value
};

/// rate(g, l) = count(g, l) / count(g). Every record must be labeled.
/// Throws EmptyInput, MissingLabels or LengthMismatch.
RateTable usefulness_rates(const std::vector<ClarificationRecord>& records,
                           const std::vector<FeatureVector>& features, GroupKey key,
                           const AnalysisConfig& config = {});

struct TemplateRateRow {
  int template_id = 0;
  std::string pattern;
  std::map<std::string, RateCell> per_dataset;  // keyed by dataset display name
  RateCell overall;
  double combined = 0.0;  // sum of per-dataset Good rates
};

struct TemplateRateTable {
  std::vector<std::string> datasets;
  std::vector<TemplateRateRow> rows;  // sorted by combined desc, then id
};

/// Per-template usefulness rates split by dataset. Questions matching no
/// template are ignored; templates with no records are omitted.
TemplateRateTable template_usefulness(const std::vector<ClarificationRecord>& records,
                                      const std::vector<FeatureVector>& features,
                                      const TemplateRegistry& templates);

struct CorrelationEntry {
  std::string feature;
  std::optional<double> pearson;   // nullopt when either variable is constant
  std::optional<double> spearman;
  std::size_t n = 0;
};

struct CorrelationReport {
  std::vector<CorrelationEntry> entries;
};

std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
/// Pearson over average ranks.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

/// Names and values of the numeric FeatureVector columns, in report order.
std::vector<std::string> numeric_feature_names();
std::vector<double> numeric_feature_values(const FeatureVector& f);

/// Correlates every numeric feature with the label ordinal (Bad=0, Fair=1, Good=2).
/// Throws LengthMismatch or TooFewSamples (< 2).
CorrelationReport correlate(const std::vector<FeatureVector>& features, const std::vector<Label>& labels);

std::string rate_table_json(const RateTable& t);
std::string rate_table_markdown(const RateTable& t);
std::string rate_table_csv(const RateTable& t);
std::string template_table_json(const TemplateRateTable& t);
std::string template_table_markdown(const TemplateRateTable& t);
std::string template_table_csv(const TemplateRateTable& t);
std::string correlation_json(const CorrelationReport& r);
std::string correlation_markdown(const CorrelationReport& r);
std::string correlation_csv(const CorrelationReport& r);

}  // namespace cqj
