#include "cqj/features.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "text_util.hpp"

namespace cqj {

std::string_view to_string(QueryTypeHint h) noexcept {
  switch (h) {
    case QueryTypeHint::Ambiguous: return "Ambiguous";
    case QueryTypeHint::Faceted: return "Faceted";
    case QueryTypeHint::None: return "None";
  }
  return "None";
}

std::string_view to_string(QueryType t) noexcept {
  switch (t) {
    case QueryType::Ambiguous: return "Ambiguous";
    case QueryType::Faceted: return "Faceted";
    case QueryType::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::optional<QueryTypeHint> parse_query_type_hint(std::string_view s) noexcept {
  if (s == "Ambiguous") return QueryTypeHint::Ambiguous;
  if (s == "Faceted") return QueryTypeHint::Faceted;
  if (s == "None") return QueryTypeHint::None;
  return std::nullopt;
}

namespace {

void append_escaped(std::string& re, char c) {
  static const std::string_view special = R"(\^$.|?*+()[]{}/)";
  if (special.find(c) != std::string_view::npos) re.push_back('\\');
  re.push_back(c);
}

// Literal text: whitespace runs become \s+, everything else is escaped.
void append_literal(std::string& re, std::string_view text) {
  bool in_space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t') {
      if (!in_space) re += "\\s+";
      in_space = true;
      continue;
    }
    in_space = false;
    append_escaped(re, c);
  }
}

std::string compile_pattern(std::string_view pattern, int id, bool* has_slot) {
  std::string body(detail::trim(pattern));
  while (!body.empty() && body.back() == '?') body.pop_back();
  body = std::string(detail::trim(body));

  std::size_t slots = 0;
  for (auto pos = body.find(kSlotMarker); pos != std::string::npos; pos = body.find(kSlotMarker, pos + 1)) ++slots;
  if (slots > 1) throw Error(Errc::BadConfig, fmt::format("template {} has more than one slot", id));
  *has_slot = slots == 1;

  std::string re = "^\\s*";
  std::size_t i = 0;
  while (i < body.size()) {
    if (body.compare(i, kSlotMarker.size(), kSlotMarker) == 0) {
      re += "(.+?)";
      i += kSlotMarker.size();
    } else if (body[i] == '(') {
      auto close = body.find(')', i);
      if (close == std::string::npos) throw Error(Errc::BadConfig, fmt::format("template {}: unbalanced '('", id));
      re += "(?:";
      bool first = true;
      for (auto alt : detail::split(std::string_view(body).substr(i + 1, close - i - 1), '|')) {
        if (!first) re += '|';
        first = false;
        append_literal(re, detail::trim(alt));
      }
      re += ')';
      i = close + 1;
    } else {
      auto next = body.find_first_of("(_", i + 1);
      // A lone underscore is literal text; only the full marker is a slot.
      while (next != std::string::npos && body[next] == '_' &&
             body.compare(next, kSlotMarker.size(), kSlotMarker) != 0)
        next = body.find_first_of("(_", next + 1);
      std::size_t end = next == std::string::npos ? body.size() : next;
      append_literal(re, std::string_view(body).substr(i, end - i));
      i = end;
    }
  }
  re += "\\s*[?.!]*\\s*$";
  return re;
}

}  // namespace

TemplatePattern::TemplatePattern(int id, std::string pattern, QueryTypeHint hint)
    : id_(id), pattern_(std::move(pattern)), hint_(hint) {
  auto re = compile_pattern(pattern_, id_, &has_slot_);
  regex_ = std::regex(re, std::regex::ECMAScript | std::regex::icase);
}

std::optional<std::string> TemplatePattern::match(std::string_view question) const {
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(question.begin(), question.end(), m, regex_)) return std::nullopt;
  if (!has_slot_) return std::string{};
  std::string slot(detail::trim(std::string_view(&*m[1].first, static_cast<std::size_t>(m[1].length()))));
  if (tokenize(slot).empty()) return std::nullopt;
  return slot;
}

std::string TemplatePattern::instantiate(std::string_view slot_value) const {
  std::string out;
  std::size_t i = 0;
  while (i < pattern_.size()) {
    if (pattern_.compare(i, kSlotMarker.size(), kSlotMarker) == 0) {
      out += slot_value;
      i += kSlotMarker.size();
    } else if (pattern_[i] == '(') {
      auto close = pattern_.find(')', i);
      out += detail::trim(detail::split(std::string_view(pattern_).substr(i + 1, close - i - 1), '|').front());
      i = close + 1;
    } else {
      out.push_back(pattern_[i++]);
    }
  }
  return out;
}

TemplateRegistry default_templates() {
  return {
      {1, "What (would you like|do you want) to do with ____?", QueryTypeHint::Faceted},
      {2, "What (would you like|do you want) to know about ____?", QueryTypeHint::Faceted},
      {3, "(Which|What) ____ are you looking for?", QueryTypeHint::Faceted},
      {4, "(Which|What) ____ do you mean?", QueryTypeHint::Ambiguous},
      {5, "What are you trying to do?", QueryTypeHint::None},
      {6, "Who are you shopping for?", QueryTypeHint::None},
      {7, "Do you have ____ in mind?", QueryTypeHint::Faceted},
  };
}

TemplateRegistry parse_templates(std::string_view text) {
  TemplateRegistry out;
  std::set<int> ids;
  std::size_t lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto f = detail::split(line, '\t');
    if (f.size() != 3) throw Error(Errc::BadConfig, fmt::format("templates line {}: expected 3 fields", lineno));
    int id = 0;
    try {
      id = std::stoi(std::string(f[0]));
    } catch (const std::exception&) {
      throw Error(Errc::BadConfig, fmt::format("templates line {}: bad id", lineno));
    }
    auto hint = parse_query_type_hint(detail::trim(f[2]));
    if (!hint) throw Error(Errc::BadConfig, fmt::format("templates line {}: bad hint '{}'", lineno, f[2]));
    if (!ids.insert(id).second) throw Error(Errc::BadConfig, fmt::format("templates line {}: duplicate id {}", lineno, id));
    out.emplace_back(id, std::string(detail::trim(f[1])), *hint);
  }
  if (out.empty()) throw Error(Errc::BadConfig, "template registry is empty");
  return out;
}

TemplateRegistry load_templates(const std::filesystem::path& path) { return parse_templates(detail::read_file(path)); }

std::string serialize_templates(const TemplateRegistry& templates) {
  std::string out;
  for (const auto& t : templates) out += fmt::format("{}\t{}\t{}\n", t.id(), t.pattern(), to_string(t.hint()));
  return out;
}

const TemplatePattern* find_template(const TemplateRegistry& templates, int id) {
  for (const auto& t : templates)
    if (t.id() == id) return &t;
  return nullptr;
}

std::optional<TemplateMatch> match_template(std::string_view question, const TemplateRegistry& templates) {
  for (const auto& t : templates)
    if (auto slot = t.match(question)) return TemplateMatch{t.id(), std::move(*slot)};
  return std::nullopt;
}

QueryType classify_query_type(const ClarificationRecord& record, const std::optional<TemplateMatch>& match,
                              const TemplateRegistry& templates, const TypingRules& rules) {
  if (rules.use_template_hints && match) {
    if (const auto* t = find_template(templates, match->template_id)) {
      if (t->hint() == QueryTypeHint::Ambiguous) return QueryType::Ambiguous;
      if (t->hint() == QueryTypeHint::Faceted) return QueryType::Faceted;
    }
  }
  if (record.options.empty()) return QueryType::Unknown;
  const std::string query = detail::to_lower(detail::trim(record.query));
  std::size_t containing = 0;
  for (const auto& o : record.options)
    if (detail::to_lower(o).find(query) != std::string::npos) ++containing;
  const double fraction = static_cast<double>(containing) / static_cast<double>(record.options.size());
  return fraction >= rules.facet_option_fraction ? QueryType::Faceted : QueryType::Unknown;
}

FeatureVector extract_features(const ClarificationRecord& record, const SentimentLexicon& lexicon,
                               const TemplateRegistry& templates, const TypingRules& rules,
                               const FeatureOptions& options) {
  const TokenList question = tokenize(record.question);
  const TokenList query = tokenize(record.query);

  FeatureVector f;
  f.question_len_words = question.size();
  f.query_len_words = query.size();
  f.n_options = record.options.size();

  SentimentScore s;
  if (options.include_options_in_sentiment) {
    std::string text = record.question;
    for (const auto& o : record.options) text += " . " + o;
    s = score_sentiment(text, lexicon);
  } else {
    s = score_sentiment(question, lexicon);
  }
  f.polarity = s.polarity;
  f.subjectivity = s.subjectivity;

  const RougeScore r = rouge1(question, query);
  f.rouge_precision = r.precision;
  f.rouge_recall = r.recall;

  auto match = match_template(record.question, templates);
  if (match) f.template_id = match->template_id;
  f.query_type = classify_query_type(record, match, templates, rules);
  return f;
}

FeatureVector extract_features(const ClarificationRecord& record, const FeatureContext& ctx) {
  return extract_features(record, ctx.lexicon, ctx.templates, ctx.rules, ctx.options);
}

std::vector<FeatureVector> extract_features(const std::vector<ClarificationRecord>& records,
                                            const FeatureContext& ctx) {
  std::vector<FeatureVector> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(extract_features(r, ctx));
  return out;
}

}  // namespace cqj
