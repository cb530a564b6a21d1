#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cqj {

enum class Errc {
  // corpus
  MissingColumn,
  UnmappableLabel,
  EmptyQueryOrQuestion,
  MalformedRow,
  MalformedLine,
  BadConfig,
  // analysis
  EmptyInput,
  LengthMismatch,
  TooFewSamples,
  // tfidf
  EmptyCorpus,
  EmptyVocabulary,
  // classifiers
  DimMismatch,
  EmptyTrainingSet,
  SingleClass,
  // pipeline
  TooFewRecords,
  MissingLabels,
  ScalerNotFitted,
  EmptyTestSet,
  ZeroBaseline,
  BadMagic,
  VersionUnsupported,
  Corrupt,
  // llm
  Timeout,
  HttpError,
  Unparseable,
  AuthError,
  // io
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the toolkit; `code()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Usefulness judgement. The ordinal is the enum value.
enum class Label : int { Bad = 0, Fair = 1, Good = 2 };

inline constexpr std::size_t kNumLabels = 3;
inline constexpr std::array<Label, kNumLabels> kAllLabels{Label::Bad, Label::Fair, Label::Good};

constexpr int ordinal(Label l) noexcept { return static_cast<int>(l); }
constexpr Label label_from_ordinal(int o) { return static_cast<Label>(o); }

std::string_view to_string(Label l) noexcept;
/// Exact, case-sensitive canonical names "Bad" / "Fair" / "Good".
std::optional<Label> parse_label_name(std::string_view s) noexcept;

/// Per-class array indexed by label ordinal.
template <typename T>
using PerLabel = std::array<T, kNumLabels>;

}  // namespace cqj
