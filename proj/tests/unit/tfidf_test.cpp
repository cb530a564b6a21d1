#include <doctest.h>

#include <cmath>
#include <random>

#include "cqj/tfidf.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cqj;

TEST_SUITE("tfidf") {

TEST_CASE("vocabulary and idf by hand") {
  const auto m = TfidfModel::fit({"a b", "b c"}, {1, false, false});
  CHECK(m.terms() == std::vector<std::string>{"a", "b", "c"});
  CHECK(m.vocabulary().at("b") == 1);
  CHECK(m.idf()[1] == doctest::Approx(1.0));
  CHECK(m.idf()[0] == doctest::Approx(std::log(1.5) + 1.0));

  const auto v = m.transform("b b");
  REQUIRE(v.entries.size() == 1);
  CHECK(v.entries[0].first == 1);
  CHECK(v.entries[0].second == doctest::Approx(2.0));

  const auto m2 = TfidfModel::fit({"a b", "b c"}, {2, false, true});
  CHECK(m2.terms() == std::vector<std::string>{"b"});
}

TEST_CASE("degenerate inputs") {
  CHECK_THROWS_AS(TfidfModel::fit({}), Error);
  CHECK_THROWS_AS(TfidfModel::fit({"", "  ", "?!"}), Error);
  const auto m = TfidfModel::fit({"a b"});
  const auto v = m.transform("zzz qqq");
  CHECK(v.entries.empty());
  CHECK(v.dim == 2);
}

TEST_CASE("normalized rows have unit norm") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto docs = oracle::random_corpus(rng, 10, 12);
    TfidfModel m;
    try {
      m = TfidfModel::fit(docs);
    } catch (const Error&) {
      continue;
    }
    for (const auto& d : docs) {
      const auto v = m.transform(d);
      v.check();
      if (!v.entries.empty()) CHECK(std::abs(std::sqrt(v.squared_norm()) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("matches the dense oracle") {
  std::mt19937_64 rng(77);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto docs = oracle::random_corpus(rng, 20, 15);
    const TfidfConfig cfg{static_cast<std::size_t>(1 + trial % 3), trial % 2 == 1, trial % 4 != 3};
    const auto ref = oracle::dense_tfidf(docs, cfg.min_df, cfg.sublinear_tf, cfg.l2_normalize);
    if (ref.vocab.empty()) {
      CHECK_THROWS_AS(TfidfModel::fit(docs, cfg), Error);
      continue;
    }
    const auto m = TfidfModel::fit(docs, cfg);
    REQUIRE(m.terms() == ref.vocab);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      const auto v = m.transform(docs[i]);
      for (std::size_t j = 0; j < ref.vocab.size(); ++j)
        CHECK(std::abs(v.get(j) - ref.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) < 1e-9);
    }
    ++compared;
  }
  CHECK(compared > 30);
}

TEST_CASE("classification text layout") {
  const auto r = test::make_record("1", "jaguar", "Which jaguar do you mean?", {"car", "animal"}, Label::Good);
  CHECK(classification_text(r) == "jaguar [SEP] Which jaguar do you mean? [SEP] car animal");
  const auto bare = test::make_record("2", "q", "Which q?", {}, Label::Good);
  CHECK(classification_text(bare) == "q [SEP] Which q? [SEP]");
}

TEST_CASE("from_parts rebuilds an equal model") {
  const auto m = TfidfModel::fit({"x y z", "y z", "z"});
  CHECK(TfidfModel::from_parts(m.terms(), m.idf(), m.config()) == m);
  CHECK_THROWS_AS(TfidfModel::from_parts({"a", "a"}, {1.0, 1.0}, {}), Error);
}

}
