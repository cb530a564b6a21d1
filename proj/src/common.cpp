#include "cqj/common.hpp"

namespace cqj {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::UnmappableLabel: return "UnmappableLabel";
    case Errc::EmptyQueryOrQuestion: return "EmptyQueryOrQuestion";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::BadConfig: return "BadConfig";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::EmptyVocabulary: return "EmptyVocabulary";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::EmptyTrainingSet: return "EmptyTrainingSet";
    case Errc::SingleClass: return "SingleClass";
    case Errc::TooFewRecords: return "TooFewRecords";
    case Errc::MissingLabels: return "MissingLabels";
    case Errc::ScalerNotFitted: return "ScalerNotFitted";
    case Errc::EmptyTestSet: return "EmptyTestSet";
    case Errc::ZeroBaseline: return "ZeroBaseline";
    case Errc::BadMagic: return "BadMagic";
    case Errc::VersionUnsupported: return "VersionUnsupported";
    case Errc::Corrupt: return "Corrupt";
    case Errc::Timeout: return "Timeout";
    case Errc::HttpError: return "HttpError";
    case Errc::Unparseable: return "Unparseable";
    case Errc::AuthError: return "AuthError";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

std::string_view to_string(Label l) noexcept {
  switch (l) {
    case Label::Bad: return "Bad";
    case Label::Fair: return "Fair";
    case Label::Good: return "Good";
  }
  return "?";
}

std::optional<Label> parse_label_name(std::string_view s) noexcept {
  if (s == "Bad") return Label::Bad;
  if (s == "Fair") return Label::Fair;
  if (s == "Good") return Label::Good;
  return std::nullopt;
}

}  // namespace cqj
