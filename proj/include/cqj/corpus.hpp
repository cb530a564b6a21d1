#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqj/common.hpp"

namespace cqj {

struct Dataset {
  enum class Kind { MimicsManual, MimicsDuo, Other };

  Kind kind = Kind::Other;
  std::string name;  // only meaningful for Kind::Other

  static Dataset mimics_manual() { return {Kind::MimicsManual, {}}; }
  static Dataset mimics_duo() { return {Kind::MimicsDuo, {}}; }
  /// "MimicsManual" and "MimicsDuo" map to their kinds; anything else is Other.
  static Dataset from_name(std::string_view name);
  std::string display_name() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

inline constexpr std::size_t kMaxOptions = 5;

struct ClarificationRecord {
  std::string id;
  Dataset dataset;
  std::string query;
  std::string question;
  std::vector<std::string> options;  // non-empty strings, at most kMaxOptions
  std::optional<Label> label;
  std::map<std::string, std::string> extras;

  friend bool operator==(const ClarificationRecord&, const ClarificationRecord&) = default;
};

/// Throws Error(EmptyQueryOrQuestion) or Error(MalformedRow) on a broken invariant.
void validate(const ClarificationRecord& record);

/// How raw delimited rows map onto records.
///
/// `column_map` keys are logical fields: `query`, `question`, `label` (all
/// required), `id` (optional) and `option_1` .. `option_5` (skipped when the file
/// lacks them). Values are column names, or zero-based column indices when
/// `has_header` is false.
struct SchemaConfig {
  std::map<std::string, std::string> column_map;
  std::map<std::string, Label> label_value_map;
  char delimiter = '\t';
  bool has_header = true;
  Dataset dataset;

  void validate() const;
};

/// Parses an INI-style preset file. Each `[name]` section is one schema:
///
///     [mimics-manual]
///     dataset = MimicsManual
///     delimiter = tab
///     has_header = true
///     column.query = query
///     label.2 = Good
std::map<std::string, SchemaConfig> parse_schema_presets(std::string_view text);
std::map<std::string, SchemaConfig> load_schema_presets(const std::filesystem::path& path);

struct RowError {
  std::size_t line = 0;  // 1-based physical line
  Errc code = Errc::MalformedRow;
  std::string message;
};

struct ParseResult {
  std::vector<ClarificationRecord> records;
  std::vector<RowError> errors;
};

/// One record per well-formed data row, in file order; bad rows become
/// RowErrors. Blank lines are not data rows. Throws Error(MissingColumn) if the
/// schema names a column the file does not have.
ParseResult parse_corpus(std::string_view raw, const SchemaConfig& schema);

/// `line<TAB>code<TAB>message` with a header row.
std::string format_row_errors(const std::vector<RowError>& errors);

std::string write_jsonl(const std::vector<ClarificationRecord>& records);
/// Throws Error(MalformedLine) naming the 1-based line.
std::vector<ClarificationRecord> read_jsonl(std::string_view raw);

std::vector<ClarificationRecord> load_jsonl(const std::filesystem::path& path);
void save_jsonl(const std::filesystem::path& path, const std::vector<ClarificationRecord>& records);

}  // namespace cqj
