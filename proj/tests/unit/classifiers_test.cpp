#include <doctest.h>

#include <random>

#include "cqj/classifiers.hpp"
#include "datasets.hpp"

using namespace cqj;

namespace {

double accuracy(const Classifier& m, const data::Toy& t) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < t.X.size(); ++i) ok += predict(m, t.X[i]).label == t.y[i];
  return static_cast<double>(ok) / static_cast<double>(t.X.size());
}

}  // namespace

TEST_SUITE("classifiers") {

TEST_CASE("argmax breaks ties toward the lower ordinal") {
  CHECK(argmax_label({0.0, 2.0, 5.0}) == Label::Good);
  CHECK(argmax_label({0.5, 0.0, 0.5}) == Label::Bad);
  CHECK(argmax_label({-0.3, 0.1, 0.9}) == Label::Good);
}

TEST_CASE("class weights") {
  const std::vector<Label> y{Label::Good, Label::Good, Label::Good, Label::Bad};
  const auto w = class_weights(y, ClassWeighting::InverseFrequency);
  CHECK(w[0] == doctest::Approx(4.0 / (2 * 1)));
  CHECK(w[2] == doctest::Approx(4.0 / (2 * 3)));
  CHECK(class_weights(y, ClassWeighting::None) == PerLabel<double>{1.0, 1.0, 1.0});
}

TEST_CASE("tree: single separable feature gives one split") {
  const data::Toy t{{data::sparse({0.0}), data::sparse({1.0})}, {Label::Bad, Label::Good}};
  const auto m = train_dtc(t.X, t.y);
  CHECK(m.nodes.size() == 3);
  CHECK(m.nodes[0].threshold == 0.5);
  CHECK(accuracy(m, t) == 1.0);
}

TEST_CASE("tree: pure labels give a single leaf") {
  const data::Toy t{{data::sparse({0.0, 1.0}), data::sparse({1.0, 3.0}), data::sparse({2.0, 0.0})},
                    {Label::Fair, Label::Fair, Label::Fair}};
  const auto m = train_dtc(t.X, t.y);
  CHECK(m.nodes.size() == 1);
  CHECK(predict(m, data::sparse({5.0, 5.0})).label == Label::Fair);
}

TEST_CASE("tree: XOR needs depth two") {
  const data::Toy t{{data::sparse({0, 0}), data::sparse({0, 1}), data::sparse({1, 0}), data::sparse({1, 1})},
                    {Label::Bad, Label::Good, Label::Good, Label::Bad}};
  const auto m = train_dtc(t.X, t.y);
  CHECK(m.depth() == 2);
  CHECK(accuracy(m, t) == 1.0);
}

TEST_CASE("tree: leaf counts vote by majority") {
  DecisionTreeModel m;
  m.dim = 1;
  m.nodes.push_back(TreeNode{});
  m.nodes[0].class_counts = {0, 2, 5};
  CHECK(predict(m, data::sparse({0.0})).label == Label::Good);
  CHECK(predict(m, data::sparse({0.0})).scores[2] == doctest::Approx(5.0 / 7.0));
}

TEST_CASE("tree: 100% train accuracy on consistent data, depth limit respected") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    const auto t = data::consistent(rng, 60, 5);
    CHECK(accuracy(train_dtc(t.X, t.y), t) == 1.0);
    DecisionTreeConfig cfg;
    cfg.max_depth = 2;
    CHECK(train_dtc(t.X, t.y, cfg).depth() <= 2);
  }
}

TEST_CASE("tree: explicit zero entries behave like implicit ones") {
  std::mt19937_64 rng(8);
  auto t = data::consistent(rng, 40, 4);
  const auto base = serialize_classifier(train_dtc(t.X, t.y));
  for (auto& x : t.X) {
    SparseVector dense;
    dense.dim = x.dim;
    for (std::uint32_t j = 0; j < x.dim; ++j) dense.entries.emplace_back(j, x.get(j));
    x = dense;
  }
  CHECK(serialize_classifier(train_dtc(t.X, t.y)) == base);
}

TEST_CASE("forest of one full tree equals the tree") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const auto t = data::consistent(rng, 50, 6);
    const auto tree = train_dtc(t.X, t.y);
    RandomForestConfig cfg;
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.features_per_split = 6;
    cfg.seed = static_cast<std::uint64_t>(i);
    const auto forest = train_rfc(t.X, t.y, cfg);
    std::uniform_int_distribution<int> v(0, 3);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> x(6);
      for (auto& e : x) e = v(rng) * 0.5;
      const auto q = data::sparse(x);
      CHECK(predict(forest, q).label == predict(tree, q).label);
    }
  }
}

TEST_CASE("forest is deterministic and thread-count independent") {
  std::mt19937_64 rng(42);
  const auto t = data::noisy_threshold(rng, 120, 4, 0.1);
  RandomForestConfig cfg;
  cfg.n_trees = 15;
  cfg.seed = 42;
  cfg.n_threads = 1;
  const auto a = serialize_classifier(train_rfc(t.X, t.y, cfg));
  cfg.n_threads = 3;
  const auto b = serialize_classifier(train_rfc(t.X, t.y, cfg));
  CHECK(a == b);
  cfg.seed = 43;
  CHECK(serialize_classifier(train_rfc(t.X, t.y, cfg)) != a);
}

TEST_CASE("forest vote ties go to the lower ordinal") {
  RandomForestModel f;
  f.dim = 1;
  for (Label l : {Label::Good, Label::Bad}) {
    DecisionTreeModel m;
    m.dim = 1;
    m.nodes.push_back(TreeNode{});
    m.nodes[0].class_counts[static_cast<std::size_t>(ordinal(l))] = 3;
    f.trees.push_back(m);
  }
  const auto p = predict(f, data::sparse({0.0}));
  CHECK(p.label == Label::Bad);
  CHECK(p.scores[0] == 0.5);
}

TEST_CASE("forest beats or matches a single tree on noisy data") {
  std::mt19937_64 rng(42);
  const auto train = data::noisy_threshold(rng, 200, 5, 0.1);
  const auto test = data::noisy_threshold(rng, 400, 5, 0.0);
  RandomForestConfig cfg;
  cfg.seed = 42;
  CHECK(accuracy(train_rfc(train.X, train.y, cfg), test) >= accuracy(train_dtc(train.X, train.y), test));
}

TEST_CASE("svc separates two and three classes") {
  const data::Toy two{{data::sparse({0.0, 1.0}), data::sparse({1.0, 0.0}), data::sparse({0.2, 0.9}),
                       data::sparse({0.9, 0.1})},
                      {Label::Bad, Label::Good, Label::Bad, Label::Good}};
  const auto m2 = train_svc(two.X, two.y);
  CHECK(accuracy(m2, two) == 1.0);
  CHECK(m2.per_class[1] == std::nullopt);

  std::mt19937_64 rng(42);
  const auto blobs = data::blobs3(rng, 40);
  LinearSvcConfig cfg;
  cfg.seed = 42;
  const auto m3 = train_svc(blobs.X, blobs.y, cfg);
  CHECK(accuracy(m3, blobs) == 1.0);
  CHECK(m3.converged());
}

TEST_CASE("svc reports non-convergence and rejects one-class data") {
  std::mt19937_64 rng(1);
  const auto t = data::noisy_threshold(rng, 100, 3, 0.3);
  LinearSvcConfig cfg;
  cfg.max_iter = 1;
  cfg.tol = 1e-12;
  CHECK_FALSE(train_svc(t.X, t.y, cfg).converged());
  const data::Toy one{{data::sparse({1.0}), data::sparse({2.0})}, {Label::Good, Label::Good}};
  CHECK_THROWS_AS(train_svc(one.X, one.y), Error);
}

TEST_CASE("svc argmax is invariant to positive input scaling of the query") {
  std::mt19937_64 rng(5);
  const auto blobs = data::blobs3(rng, 20);
  LinearSvcConfig cfg;
  cfg.bias = 0.0;
  const auto m = train_svc(blobs.X, blobs.y, cfg);
  for (const auto& x : blobs.X) {
    auto scaled = x;
    for (auto& e : scaled.entries) e.second *= 3.7;
    CHECK(predict(m, scaled).label == predict(m, x).label);
  }
}

TEST_CASE("dimension checks and empty input") {
  const data::Toy t{{data::sparse({0.0, 1.0}), data::sparse({1.0})}, {Label::Bad, Label::Good}};
  CHECK_THROWS_AS(train_dtc(t.X, t.y), Error);
  CHECK_THROWS_AS(train_dtc({}, {}), Error);
  const data::Toy ok{{data::sparse({0.0}), data::sparse({1.0})}, {Label::Bad, Label::Good}};
  const Classifier m = train_dtc(ok.X, ok.y);
  CHECK_THROWS_AS(predict(m, data::sparse({1.0, 2.0})), Error);
}

TEST_CASE("serialization round-trips every model kind") {
  std::mt19937_64 rng(3);
  const auto t = data::consistent(rng, 40, 4);
  RandomForestConfig rf;
  rf.n_trees = 5;
  const std::vector<Classifier> models{train_dtc(t.X, t.y), train_rfc(t.X, t.y, rf), train_svc(t.X, t.y)};
  for (const auto& m : models) {
    const auto bytes = serialize_classifier(m);
    const auto back = deserialize_classifier(bytes);
    CHECK(kind_of(back) == kind_of(m));
    CHECK(serialize_classifier(back) == bytes);
    for (const auto& x : t.X) CHECK(predict(back, x).scores == predict(m, x).scores);
    CHECK_THROWS_AS(deserialize_classifier(bytes.substr(0, bytes.size() / 2)), Error);
  }
  CHECK_THROWS_AS(deserialize_classifier("\x09garbage"), Error);
}

}
