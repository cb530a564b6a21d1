#include "cqj/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "text_util.hpp"

namespace cqj {

using json = nlohmann::ordered_json;
using detail::fixed4;

std::string_view to_string(GroupKey k) noexcept {
  switch (k) {
    case GroupKey::TemplateId: return "template_id";
    case GroupKey::NOptions: return "n_options";
    case GroupKey::QueryLenBucket: return "query_len_bucket";
    case GroupKey::QuestionLenBucket: return "question_len_bucket";
    case GroupKey::QueryType: return "query_type";
  }
  return "?";
}

std::optional<GroupKey> parse_group_key(std::string_view s) noexcept {
  for (auto k : {GroupKey::TemplateId, GroupKey::NOptions, GroupKey::QueryLenBucket, GroupKey::QuestionLenBucket,
                 GroupKey::QueryType})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::size_t LengthBuckets::index_of(std::size_t n) const {
  auto it = std::lower_bound(upper_bounds.begin(), upper_bounds.end(), n);
  return static_cast<std::size_t>(it - upper_bounds.begin());
}

std::string LengthBuckets::name(std::size_t index) const {
  if (upper_bounds.empty()) return "all";
  if (index >= upper_bounds.size()) return fmt::format("{}+", upper_bounds.back() + 1);
  const std::size_t hi = upper_bounds[index];
  if (index == 0) return hi <= 1 ? fmt::format("{}", hi) : fmt::format("<={}", hi);
  const std::size_t lo = upper_bounds[index - 1] + 1;
  return lo == hi ? fmt::format("{}", hi) : fmt::format("{}-{}", lo, hi);
}

void RateCell::finalize() {
  for (std::size_t i = 0; i < kNumLabels; ++i)
    rates[i] = support == 0 ? 0.0 : static_cast<double>(counts[i]) / static_cast<double>(support);
}

namespace {

void check_inputs(const std::vector<ClarificationRecord>& records, const std::vector<FeatureVector>& features) {
  if (records.empty()) throw Error(Errc::EmptyInput, "no records to analyze");
  if (records.size() != features.size())
    throw Error(Errc::LengthMismatch, fmt::format("{} records but {} feature vectors", records.size(), features.size()));
  for (const auto& r : records)
    if (!r.label) throw Error(Errc::MissingLabels, "record '" + r.id + "' has no label");
}

std::pair<std::string, double> group_of(const FeatureVector& f, GroupKey key, const AnalysisConfig& cfg) {
  switch (key) {
    case GroupKey::TemplateId:
      if (f.template_id) return {fmt::format("T{}", *f.template_id), static_cast<double>(*f.template_id)};
      return {"none", std::numeric_limits<double>::infinity()};
    case GroupKey::NOptions:
      return {fmt::format("{}", f.n_options), static_cast<double>(f.n_options)};
    case GroupKey::QueryLenBucket: {
      auto i = cfg.query_len.index_of(f.query_len_words);
      return {cfg.query_len.name(i), static_cast<double>(i)};
    }
    case GroupKey::QuestionLenBucket: {
      auto i = cfg.question_len.index_of(f.question_len_words);
      return {cfg.question_len.name(i), static_cast<double>(i)};
    }
    case GroupKey::QueryType:
      return {std::string(to_string(f.query_type)), static_cast<double>(static_cast<int>(f.query_type))};
  }
  return {"?", 0.0};
}

}  // namespace

RateTable usefulness_rates(const std::vector<ClarificationRecord>& records,
                           const std::vector<FeatureVector>& features, GroupKey key,
                           const AnalysisConfig& config) {
  check_inputs(records, features);
  std::map<std::pair<double, std::string>, RateCell> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [name, order] = group_of(features[i], key, config);
    groups[{order, name}].add(*records[i].label);
  }
  RateTable t;
  t.grouping = std::string(to_string(key));
  for (auto& [k, cell] : groups) {
    cell.finalize();
    t.rows.push_back({k.second, k.first, cell});
  }
  return t;
}

TemplateRateTable template_usefulness(const std::vector<ClarificationRecord>& records,
                                      const std::vector<FeatureVector>& features,
                                      const TemplateRegistry& templates) {
  check_inputs(records, features);
  TemplateRateTable t;
  std::map<int, TemplateRateRow> rows;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!features[i].template_id) continue;
    const int id = *features[i].template_id;
    auto& row = rows[id];
    row.template_id = id;
    const std::string ds = records[i].dataset.display_name();
    row.per_dataset[ds].add(*records[i].label);
    row.overall.add(*records[i].label);
    if (std::find(t.datasets.begin(), t.datasets.end(), ds) == t.datasets.end()) t.datasets.push_back(ds);
  }
  std::sort(t.datasets.begin(), t.datasets.end());
  for (auto& [id, row] : rows) {
    if (const auto* tp = find_template(templates, id)) row.pattern = tp->pattern();
    row.overall.finalize();
    row.combined = 0.0;
    for (auto& [ds, cell] : row.per_dataset) {
      cell.finalize();
      row.combined += cell.rates[ordinal(Label::Good)];
    }
    t.rows.push_back(std::move(row));
  }
  std::stable_sort(t.rows.begin(), t.rows.end(), [](const TemplateRateRow& a, const TemplateRateRow& b) {
    if (a.combined != b.combined) return a.combined > b.combined;
    return a.template_id < b.template_id;
  });
  return t;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::LengthMismatch, "pearson: sizes differ");
  if (x.size() < 2) throw Error(Errc::TooFewSamples, "pearson: need at least two samples");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::LengthMismatch, "spearman: sizes differ");
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  return pearson(rx, ry);
}

std::vector<std::string> numeric_feature_names() {
  return {"question_len_words", "query_len_words", "n_options", "polarity",
          "subjectivity",       "rouge_precision", "rouge_recall"};
}

std::vector<double> numeric_feature_values(const FeatureVector& f) {
  return {static_cast<double>(f.question_len_words),
          static_cast<double>(f.query_len_words),
          static_cast<double>(f.n_options),
          f.polarity,
          f.subjectivity,
          f.rouge_precision,
          f.rouge_recall};
}

CorrelationReport correlate(const std::vector<FeatureVector>& features, const std::vector<Label>& labels) {
  if (features.size() != labels.size())
    throw Error(Errc::LengthMismatch, fmt::format("{} feature vectors but {} labels", features.size(), labels.size()));
  if (features.size() < 2) throw Error(Errc::TooFewSamples, "correlation needs at least two samples");

  std::vector<double> y;
  y.reserve(labels.size());
  for (auto l : labels) y.push_back(ordinal(l));

  const auto names = numeric_feature_names();
  std::vector<std::vector<double>> columns(names.size());
  for (const auto& f : features) {
    auto v = numeric_feature_values(f);
    for (std::size_t c = 0; c < v.size(); ++c) columns[c].push_back(v[c]);
  }
  CorrelationReport report;
  for (std::size_t c = 0; c < names.size(); ++c)
    report.entries.push_back({names[c], pearson(columns[c], y), spearman(columns[c], y), features.size()});
  return report;
}

namespace {

json cell_json(const RateCell& c) {
  json j;
  json rates, counts;
  for (auto l : kAllLabels) {
    rates[std::string(to_string(l))] = c.rates[ordinal(l)];
    counts[std::string(to_string(l))] = c.counts[ordinal(l)];
  }
  j["rates"] = rates;
  j["counts"] = counts;
  j["support"] = c.support;
  return j;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string opt_str(const std::optional<double>& v) { return v ? fixed4(*v) : std::string("undefined"); }

}  // namespace

std::string rate_table_json(const RateTable& t) {
  json j;
  j["grouping"] = t.grouping;
  j["rows"] = json::array();
  for (const auto& r : t.rows) {
    json row = cell_json(r.cell);
    row["group"] = r.group;
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string rate_table_markdown(const RateTable& t) {
  std::string out = fmt::format("| {} | Bad | Fair | Good | support |\n|---|---|---|---|---|\n", t.grouping);
  for (const auto& r : t.rows)
    out += fmt::format("| {} | {} | {} | {} | {} |\n", r.group, fixed4(r.cell.rates[0]), fixed4(r.cell.rates[1]),
                       fixed4(r.cell.rates[2]), r.cell.support);
  return out;
}

std::string rate_table_csv(const RateTable& t) {
  std::string out = fmt::format("{},bad,fair,good,support\n", t.grouping);
  for (const auto& r : t.rows)
    out += fmt::format("{},{:.10g},{:.10g},{:.10g},{}\n", r.group, r.cell.rates[0], r.cell.rates[1], r.cell.rates[2],
                       r.cell.support);
  return out;
}

std::string template_table_json(const TemplateRateTable& t) {
  json j;
  j["datasets"] = t.datasets;
  j["rows"] = json::array();
  for (const auto& r : t.rows) {
    json row;
    row["template_id"] = r.template_id;
    row["pattern"] = r.pattern;
    json per = json::object();
    for (const auto& [ds, cell] : r.per_dataset) per[ds] = cell_json(cell);
    row["per_dataset"] = per;
    row["overall"] = cell_json(r.overall);
    row["combined"] = r.combined;
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string template_table_markdown(const TemplateRateTable& t) {
  std::string head = "| CQ Template |";
  std::string rule = "|---|";
  for (const auto& ds : t.datasets) {
    head += fmt::format(" {} Good | {} Fair | {} Bad |", ds, ds, ds);
    rule += "---|---|---|";
  }
  head += " Comb. |\n";
  rule += "---|\n";
  std::string out = head + rule;
  for (const auto& r : t.rows) {
    std::string pattern = r.pattern;
    std::string escaped;
    for (char c : pattern) {
      if (c == '|') escaped += "\\|";
      else escaped.push_back(c);
    }
    out += "| " + escaped + " |";
    for (const auto& ds : t.datasets) {
      auto it = r.per_dataset.find(ds);
      if (it == r.per_dataset.end()) {
        out += " - | - | - |";
      } else {
        const auto& c = it->second;
        out += fmt::format(" {} | {} | {} |", fixed4(c.rates[2]), fixed4(c.rates[1]), fixed4(c.rates[0]));
      }
    }
    out += fmt::format(" {} |\n", fixed4(r.combined));
  }
  return out;
}

std::string template_table_csv(const TemplateRateTable& t) {
  std::string out = "template_id,dataset,bad,fair,good,support,combined\n";
  for (const auto& r : t.rows)
    for (const auto& [ds, c] : r.per_dataset)
      out += fmt::format("{},{},{:.10g},{:.10g},{:.10g},{},{:.10g}\n", r.template_id, ds, c.rates[0], c.rates[1],
                         c.rates[2], c.support, r.combined);
  return out;
}

std::string correlation_json(const CorrelationReport& r) {
  json j;
  j["method"] = "pearson";
  j["label_encoding"] = {{"Bad", 0}, {"Fair", 1}, {"Good", 2}};
  j["features"] = json::array();
  for (const auto& e : r.entries) {
    json f;
    f["feature"] = e.feature;
    f["pearson"] = opt_json(e.pearson);
    f["spearman"] = opt_json(e.spearman);
    f["undefined"] = !e.pearson.has_value();
    f["n"] = e.n;
    j["features"].push_back(std::move(f));
  }
  return j.dump(2) + "\n";
}

std::string correlation_markdown(const CorrelationReport& r) {
  std::string out = "| feature | pearson | spearman | n |\n|---|---|---|---|\n";
  for (const auto& e : r.entries)
    out += fmt::format("| {} | {} | {} | {} |\n", e.feature, opt_str(e.pearson), opt_str(e.spearman), e.n);
  return out;
}

std::string correlation_csv(const CorrelationReport& r) {
  std::string out = "feature,pearson,spearman,n\n";
  for (const auto& e : r.entries)
    out += fmt::format("{},{},{},{}\n", e.feature, e.pearson ? fmt::format("{:.10g}", *e.pearson) : "",
                       e.spearman ? fmt::format("{:.10g}", *e.spearman) : "", e.n);
  return out;
}

}  // namespace cqj
