#include "cqj/corpus.hpp"

#include <charconv>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "text_util.hpp"

namespace cqj {

using detail::trim;
using json = nlohmann::ordered_json;

Dataset Dataset::from_name(std::string_view name) {
  if (name == "MimicsManual") return mimics_manual();
  if (name == "MimicsDuo") return mimics_duo();
  return {Kind::Other, std::string(name)};
}

std::string Dataset::display_name() const {
  switch (kind) {
    case Kind::MimicsManual: return "MimicsManual";
    case Kind::MimicsDuo: return "MimicsDuo";
    case Kind::Other: return name;
  }
  return name;
}

void validate(const ClarificationRecord& r) {
  if (trim(r.query).empty() || trim(r.question).empty())
    throw Error(Errc::EmptyQueryOrQuestion, "record '" + r.id + "' has an empty query or question");
  if (r.options.size() > kMaxOptions)
    throw Error(Errc::MalformedRow, "record '" + r.id + "' has more than 5 options");
  for (const auto& o : r.options)
    if (o.empty()) throw Error(Errc::MalformedRow, "record '" + r.id + "' has an empty option");
}

namespace {

bool is_option_key(std::string_view key, std::size_t* index) {
  if (!key.starts_with("option_")) return false;
  auto digits = key.substr(7);
  std::size_t n = 0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc{} || p != digits.data() + digits.size() || n < 1 || n > kMaxOptions) return false;
  *index = n;
  return true;
}

char parse_delimiter(std::string_view v) {
  if (v == "tab" || v == "\\t") return '\t';
  if (v == "comma") return ',';
  if (v.size() == 1) return v[0];
  throw Error(Errc::BadConfig, fmt::format("bad delimiter '{}'", v));
}

}  // namespace

void SchemaConfig::validate() const {
  for (const char* required : {"query", "question", "label"})
    if (!column_map.contains(required))
      throw Error(Errc::BadConfig, fmt::format("schema does not bind the '{}' column", required));
  for (const auto& [key, _] : column_map) {
    std::size_t idx = 0;
    if (key == "query" || key == "question" || key == "label" || key == "id" || is_option_key(key, &idx)) continue;
    throw Error(Errc::BadConfig, fmt::format("unknown logical field '{}'", key));
  }
}

std::map<std::string, SchemaConfig> parse_schema_presets(std::string_view text) {
  std::map<std::string, SchemaConfig> out;
  SchemaConfig* cur = nullptr;
  std::size_t lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      cur = &out[std::string(trim(line.substr(1, line.size() - 2)))];
      continue;
    }
    auto eq = line.find('=');
    if (cur == nullptr || eq == std::string_view::npos)
      throw Error(Errc::BadConfig, fmt::format("schema preset line {}: expected 'key = value' in a section", lineno));
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key == "dataset") {
      cur->dataset = Dataset::from_name(value);
    } else if (key == "delimiter") {
      cur->delimiter = parse_delimiter(value);
    } else if (key == "has_header") {
      if (value != "true" && value != "false")
        throw Error(Errc::BadConfig, fmt::format("schema preset line {}: has_header must be true/false", lineno));
      cur->has_header = value == "true";
    } else if (key.starts_with("column.")) {
      cur->column_map[std::string(key.substr(7))] = std::string(value);
    } else if (key.starts_with("label.")) {
      auto lbl = parse_label_name(value);
      if (!lbl) throw Error(Errc::BadConfig, fmt::format("schema preset line {}: unknown label '{}'", lineno, value));
      cur->label_value_map[std::string(key.substr(6))] = *lbl;
    } else {
      throw Error(Errc::BadConfig, fmt::format("schema preset line {}: unknown key '{}'", lineno, key));
    }
  }
  for (const auto& [name, schema] : out) schema.validate();
  return out;
}

std::map<std::string, SchemaConfig> load_schema_presets(const std::filesystem::path& path) {
  return parse_schema_presets(detail::read_file(path));
}

ParseResult parse_corpus(std::string_view raw, const SchemaConfig& schema) {
  schema.validate();
  auto lines = detail::split_lines(raw);

  std::size_t first_data = 0;
  std::vector<std::string> header;
  std::size_t n_cols = 0;
  if (schema.has_header) {
    while (first_data < lines.size() && trim(lines[first_data]).empty()) ++first_data;
    if (first_data == lines.size()) {
      // No header at all: every named column is missing.
      throw Error(Errc::MissingColumn, fmt::format("column '{}' not found (empty file)",
                                                    schema.column_map.at("query")));
    }
    for (auto f : detail::split(lines[first_data], schema.delimiter)) header.emplace_back(trim(f));
    n_cols = header.size();
    ++first_data;
  } else {
    for (std::size_t i = first_data; i < lines.size(); ++i)
      if (!trim(lines[i]).empty()) {
        n_cols = detail::split(lines[i], schema.delimiter).size();
        break;
      }
    for (std::size_t c = 0; c < n_cols; ++c) header.push_back(std::to_string(c));
  }

  std::map<std::string, std::size_t> logical_to_col;
  for (const auto& [field, column] : schema.column_map) {
    auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) {
      if (field.starts_with("option_")) continue;  // releases differ in how many option columns they carry
      if (schema.has_header || n_cols > 0)
        throw Error(Errc::MissingColumn, fmt::format("column '{}' (for {}) not found", column, field));
      continue;  // headerless empty input: nothing to bind
    }
    logical_to_col[field] = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<std::size_t> option_cols;
  for (std::size_t k = 1; k <= kMaxOptions; ++k) {
    auto it = logical_to_col.find(fmt::format("option_{}", k));
    if (it != logical_to_col.end()) option_cols.push_back(it->second);
  }
  std::vector<bool> mapped(n_cols, false);
  for (const auto& [_, col] : logical_to_col) mapped[col] = true;

  ParseResult result;
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (trim(lines[i]).empty()) continue;
    auto fields = detail::split(lines[i], schema.delimiter);
    if (fields.size() != n_cols) {
      result.errors.push_back({lineno, Errc::MalformedRow,
                               fmt::format("expected {} fields, found {}", n_cols, fields.size())});
      continue;
    }
    auto cell = [&](const char* field) -> std::string_view {
      auto it = logical_to_col.find(field);
      return it == logical_to_col.end() ? std::string_view{} : trim(fields[it->second]);
    };

    ClarificationRecord rec;
    rec.dataset = schema.dataset;
    rec.query = std::string(cell("query"));
    rec.question = std::string(cell("question"));
    if (rec.query.empty() || rec.question.empty()) {
      result.errors.push_back({lineno, Errc::EmptyQueryOrQuestion,
                               rec.query.empty() ? "empty query" : "empty question"});
      continue;
    }
    auto raw_label = cell("label");
    if (!raw_label.empty()) {
      auto it = schema.label_value_map.find(std::string(raw_label));
      if (it == schema.label_value_map.end()) {
        result.errors.push_back({lineno, Errc::UnmappableLabel, fmt::format("label '{}' not in label map", raw_label)});
        continue;
      }
      rec.label = it->second;
    }
    auto id = cell("id");
    rec.id = id.empty() ? fmt::format("{}-{}", schema.dataset.display_name(), lineno) : std::string(id);
    for (auto col : option_cols) {
      auto v = trim(fields[col]);
      if (!v.empty()) rec.options.emplace_back(v);
    }
    for (std::size_t c = 0; c < n_cols; ++c)
      if (!mapped[c]) rec.extras[header[c]] = std::string(fields[c]);
    result.records.push_back(std::move(rec));
  }
  return result;
}

std::string format_row_errors(const std::vector<RowError>& errors) {
  std::string out = "line\tcode\tmessage\n";
  for (const auto& e : errors) {
    std::string msg = e.message;
    std::replace(msg.begin(), msg.end(), '\t', ' ');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out += fmt::format("{}\t{}\t{}\n", e.line, to_string(e.code), msg);
  }
  return out;
}

namespace {

json to_json(const ClarificationRecord& r) {
  json j;
  j["id"] = r.id;
  j["dataset"] = r.dataset.display_name();
  j["query"] = r.query;
  j["question"] = r.question;
  j["options"] = r.options;
  j["label"] = r.label ? json(std::string(to_string(*r.label))) : json(nullptr);
  json extras = json::object();
  for (const auto& [k, v] : r.extras) extras[k] = v;
  j["extras"] = std::move(extras);
  return j;
}

ClarificationRecord from_json(const json& j) {
  ClarificationRecord r;
  r.id = j.at("id").get<std::string>();
  r.dataset = Dataset::from_name(j.at("dataset").get<std::string>());
  r.query = j.at("query").get<std::string>();
  r.question = j.at("question").get<std::string>();
  r.options = j.at("options").get<std::vector<std::string>>();
  const auto& lbl = j.at("label");
  if (!lbl.is_null()) {
    auto parsed = parse_label_name(lbl.get<std::string>());
    if (!parsed) throw std::invalid_argument("unknown label " + lbl.get<std::string>());
    r.label = parsed;
  }
  for (const auto& [k, v] : j.at("extras").items()) r.extras[k] = v.get<std::string>();
  return r;
}

}  // namespace

std::string write_jsonl(const std::vector<ClarificationRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<ClarificationRecord> read_jsonl(std::string_view raw) {
  std::vector<ClarificationRecord> out;
  std::size_t lineno = 0;
  for (auto line : detail::split_lines(raw)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      auto rec = from_json(json::parse(line));
      validate(rec);
      out.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw Error(Errc::MalformedLine, fmt::format("line={}: {}", lineno, e.what()));
    }
  }
  return out;
}

std::vector<ClarificationRecord> load_jsonl(const std::filesystem::path& path) {
  return read_jsonl(detail::read_file(path));
}

void save_jsonl(const std::filesystem::path& path, const std::vector<ClarificationRecord>& records) {
  detail::write_file(path, write_jsonl(records));
}

}  // namespace cqj
