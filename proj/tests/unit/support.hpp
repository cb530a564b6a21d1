#pragma once

#include <random>
#include <string>
#include <vector>

#include "cqj/common.hpp"
#include "cqj/corpus.hpp"
#include "cqj/tfidf.hpp"

namespace cqj::test {

inline std::string random_word(std::mt19937_64& rng, std::size_t alphabet = 6) {
  std::uniform_int_distribution<int> len(1, 3), ch(0, static_cast<int>(alphabet) - 1);
  std::string w;
  for (int i = len(rng); i > 0; --i) w += static_cast<char>('a' + ch(rng));
  return w;
}

inline std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t max_len, std::size_t alphabet = 6) {
  std::uniform_int_distribution<std::size_t> n(0, max_len);
  std::vector<std::string> out(n(rng));
  for (auto& t : out) t = random_word(rng, alphabet);
  return out;
}

inline std::string join(const std::vector<std::string>& v, const std::string& sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

inline SparseVector dense_to_sparse(const std::vector<double>& x) {
  SparseVector v;
  v.dim = x.size();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) v.entries.emplace_back(static_cast<std::uint32_t>(i), x[i]);
  return v;
}

inline ClarificationRecord make_record(std::string id, std::string query, std::string question,
                                       std::vector<std::string> options, std::optional<Label> label,
                                       Dataset dataset = Dataset::from_name("MimicsManual")) {
  ClarificationRecord r;
  r.id = std::move(id);
  r.dataset = std::move(dataset);
  r.query = std::move(query);
  r.question = std::move(question);
  r.options = std::move(options);
  r.label = label;
  return r;
}

}  // namespace cqj::test
