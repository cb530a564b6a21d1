#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cqj/corpus.hpp"

namespace cqj {

/// Sparse vector with strictly increasing indices and non-zero values.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;

  double get(std::size_t index) const;
  double squared_norm() const;
  /// Throws Error(DimMismatch) when an index is out of range or out of order.
  void check() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

struct TfidfConfig {
  std::size_t min_df = 1;
  bool sublinear_tf = false;
  bool l2_normalize = true;

  friend bool operator==(const TfidfConfig&, const TfidfConfig&) = default;
};

/// Unigram TF-IDF with smoothed idf: ln((1 + N) / (1 + df)) + 1.
class TfidfModel {
 public:
  /// Vocabulary is every token with df >= min_df, in lexicographic order.
  /// Throws EmptyCorpus or EmptyVocabulary.
  static TfidfModel fit(const std::vector<std::string>& documents, const TfidfConfig& config = {});

  /// Out-of-vocabulary tokens are ignored.
  SparseVector transform(std::string_view text) const;

  std::size_t dim() const { return idf_.size(); }
  const std::map<std::string, std::uint32_t, std::less<>>& vocabulary() const { return vocabulary_; }
  const std::vector<double>& idf() const { return idf_; }
  const TfidfConfig& config() const { return config_; }

  /// Rebuilds a model from persisted parts; vocabulary is given in index order.
  static TfidfModel from_parts(std::vector<std::string> terms, std::vector<double> idf, TfidfConfig config);
  std::vector<std::string> terms() const;

  friend bool operator==(const TfidfModel&, const TfidfModel&) = default;

 private:
  std::map<std::string, std::uint32_t, std::less<>> vocabulary_;
  std::vector<double> idf_;
  TfidfConfig config_;
};

inline constexpr std::string_view kSeparator = "[SEP]";

/// "query [SEP] question [SEP] option_1 ... option_k".
std::string classification_text(const ClarificationRecord& record);

}  // namespace cqj
