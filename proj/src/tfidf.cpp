#include "cqj/tfidf.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

#include "cqj/textcore.hpp"

namespace cqj {

double SparseVector::get(std::size_t index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), index,
                             [](const auto& e, std::size_t i) { return e.first < i; });
  return it != entries.end() && it->first == index ? it->second : 0.0;
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (const auto& [_, v] : entries) s += v * v;
  return s;
}

void SparseVector::check() const {
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (entries[k].first >= dim)
      throw Error(Errc::DimMismatch, fmt::format("index {} out of range for dim {}", entries[k].first, dim));
    if (k > 0 && entries[k - 1].first >= entries[k].first)
      throw Error(Errc::DimMismatch, "sparse indices must be strictly increasing");
  }
}

TfidfModel TfidfModel::fit(const std::vector<std::string>& documents, const TfidfConfig& config) {
  if (documents.empty()) throw Error(Errc::EmptyCorpus, "cannot fit TF-IDF on zero documents");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    auto tokens = tokenize(doc);
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& t : unique) ++df[t];
  }
  TfidfModel m;
  m.config_ = config;
  const auto n = static_cast<double>(documents.size());
  for (const auto& [term, count] : df) {
    if (count < config.min_df) continue;
    m.vocabulary_.emplace(term, static_cast<std::uint32_t>(m.idf_.size()));
    m.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  if (m.idf_.empty()) throw Error(Errc::EmptyVocabulary, "no token reaches min_df");
  return m;
}

SparseVector TfidfModel::transform(std::string_view text) const {
  std::map<std::uint32_t, std::size_t> counts;
  for (const auto& t : tokenize(text)) {
    auto it = vocabulary_.find(t);
    if (it != vocabulary_.end()) ++counts[it->second];
  }
  SparseVector v;
  v.dim = idf_.size();
  v.entries.reserve(counts.size());
  for (const auto& [idx, c] : counts) {
    const double tf = config_.sublinear_tf ? 1.0 + std::log(static_cast<double>(c)) : static_cast<double>(c);
    v.entries.emplace_back(idx, tf * idf_[idx]);
  }
  if (config_.l2_normalize && !v.entries.empty()) {
    const double norm = std::sqrt(v.squared_norm());
    for (auto& e : v.entries) e.second /= norm;
  }
  return v;
}

TfidfModel TfidfModel::from_parts(std::vector<std::string> terms, std::vector<double> idf, TfidfConfig config) {
  if (terms.size() != idf.size()) throw Error(Errc::Corrupt, "vocabulary and idf sizes differ");
  TfidfModel m;
  m.config_ = config;
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (!m.vocabulary_.emplace(std::move(terms[i]), static_cast<std::uint32_t>(i)).second)
      throw Error(Errc::Corrupt, "duplicate vocabulary term");
  m.idf_ = std::move(idf);
  return m;
}

std::vector<std::string> TfidfModel::terms() const {
  std::vector<std::string> out(vocabulary_.size());
  for (const auto& [t, i] : vocabulary_) out[i] = t;
  return out;
}

std::string classification_text(const ClarificationRecord& record) {
  std::string out = record.query;
  out += ' ';
  out += kSeparator;
  out += ' ';
  out += record.question;
  out += ' ';
  out += kSeparator;
  for (const auto& o : record.options) {
    out += ' ';
    out += o;
  }
  return out;
}

}  // namespace cqj
