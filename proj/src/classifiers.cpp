#include "cqj/classifiers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "binio.hpp"
#include "rng.hpp"

using cqj::detail::derive_seed;
using cqj::detail::Rng;
using cqj::detail::uniform_index;

namespace cqj {

std::string_view to_string(ClassWeighting w) noexcept {
  return w == ClassWeighting::InverseFrequency ? "inverse_frequency" : "none";
}

PerLabel<double> class_weights(std::span<const Label> y, ClassWeighting weighting) {
  PerLabel<double> w{1.0, 1.0, 1.0};
  if (weighting == ClassWeighting::None) return w;
  PerLabel<std::size_t> n{};
  for (auto l : y) ++n[static_cast<std::size_t>(ordinal(l))];
  const auto present = static_cast<double>(std::count_if(n.begin(), n.end(), [](auto c) { return c > 0; }));
  for (std::size_t k = 0; k < kNumLabels; ++k)
    w[k] = n[k] == 0 ? 0.0 : static_cast<double>(y.size()) / (present * static_cast<double>(n[k]));
  return w;
}

Label argmax_label(const PerLabel<double>& scores) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumLabels; ++k)
    if (scores[k] > scores[best]) best = k;
  return label_from_ordinal(static_cast<int>(best));
}

namespace {

void check_training_input(std::span<const SparseVector> X, std::span<const Label> y) {
  if (X.empty()) throw Error(Errc::EmptyTrainingSet, "no training rows");
  if (X.size() != y.size())
    throw Error(Errc::DimMismatch, fmt::format("{} rows but {} labels", X.size(), y.size()));
  const std::size_t dim = X.front().dim;
  for (const auto& x : X) {
    if (x.dim != dim) throw Error(Errc::DimMismatch, fmt::format("row dim {} differs from {}", x.dim, dim));
    x.check();
  }
}

void check_predict_input(std::size_t dim, const SparseVector& x) {
  if (x.dim != dim) throw Error(Errc::DimMismatch, fmt::format("input dim {} but model dim {}", x.dim, dim));
}

// ---------------------------------------------------------------------------
// Tree growing

using WeightedCounts = PerLabel<double>;

double gini(const WeightedCounts& c) {
  const double total = c[0] + c[1] + c[2];
  if (total <= 0.0) return 0.0;
  double s = 0.0;
  for (double v : c) s += (v / total) * (v / total);
  return 1.0 - s;
}

struct SplitCandidate {
  double impurity = std::numeric_limits<double>::infinity();
  std::int32_t feature = -1;
  double threshold = 0.0;

  bool valid() const { return feature >= 0; }
  // Ties resolved by lower feature index, then lower threshold.
  bool better_than(const SplitCandidate& o) const {
    if (impurity != o.impurity) return impurity < o.impurity;
    if (feature != o.feature) return feature < o.feature;
    return threshold < o.threshold;
  }
};

struct Entry {
  std::uint32_t feature;
  double value;
  int label;
};

double midpoint(double a, double b) {
  double m = a + (b - a) / 2.0;
  return m >= b ? a : m;
}

class TreeGrower {
 public:
  TreeGrower(std::span<const SparseVector> X, std::span<const Label> y, const DecisionTreeConfig& config,
             const PerLabel<double>& weights, std::optional<std::size_t> features_per_split, Rng* rng)
      : X_(X), y_(y), config_(config), weights_(weights), k_(features_per_split), rng_(rng) {}

  DecisionTreeModel grow(std::vector<std::uint32_t> rows) {
    DecisionTreeModel model;
    model.dim = X_.front().dim;
    model.config = config_;
    model.class_weights = weights_;

    struct Pending {
      std::vector<std::uint32_t> rows;
      std::size_t depth;
      std::int32_t parent;
      bool is_left;
    };
    std::vector<Pending> stack;
    stack.push_back({std::move(rows), 0, -1, false});
    while (!stack.empty()) {
      Pending p = std::move(stack.back());
      stack.pop_back();
      const auto index = static_cast<std::int32_t>(model.nodes.size());
      model.nodes.emplace_back();
      if (p.parent >= 0) {
        auto& parent = model.nodes[static_cast<std::size_t>(p.parent)];
        (p.is_left ? parent.left : parent.right) = index;
      }

      PerLabel<std::uint32_t> counts{};
      for (auto r : p.rows) ++counts[static_cast<std::size_t>(ordinal(y_[r]))];
      model.nodes[static_cast<std::size_t>(index)].class_counts = counts;

      const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
      const bool depth_reached = config_.max_depth && p.depth >= *config_.max_depth;
      if (pure || depth_reached || p.rows.size() < config_.min_samples_split) continue;

      const SplitCandidate split = best_split(p.rows, counts);
      if (!split.valid()) continue;

      std::vector<std::uint32_t> left, right;
      for (auto r : p.rows) (X_[r].get(static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
      if (left.empty() || right.empty()) continue;

      auto& node = model.nodes[static_cast<std::size_t>(index)];
      node.feature = split.feature;
      node.threshold = split.threshold;
      // Right is pushed first so the left subtree is numbered first (preorder).
      stack.push_back({std::move(right), p.depth + 1, index, false});
      stack.push_back({std::move(left), p.depth + 1, index, true});
    }
    return model;
  }

 private:
  WeightedCounts weigh(const PerLabel<std::uint32_t>& counts) const {
    WeightedCounts w{};
    for (std::size_t k = 0; k < kNumLabels; ++k) w[k] = static_cast<double>(counts[k]) * weights_[k];
    return w;
  }

  SplitCandidate best_split(const std::vector<std::uint32_t>& rows, const PerLabel<std::uint32_t>& counts) {
    std::vector<Entry> entries;
    for (auto r : rows)
      for (const auto& [f, v] : X_[r].entries) entries.push_back({f, v, ordinal(y_[r])});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      if (a.feature != b.feature) return a.feature < b.feature;
      if (a.value != b.value) return a.value < b.value;
      return a.label < b.label;
    });

    // Feature runs [begin, end) in `entries`.
    struct Run {
      std::uint32_t feature;
      std::size_t begin, end;
    };
    std::vector<Run> runs;
    for (std::size_t i = 0; i < entries.size();) {
      std::size_t j = i;
      while (j < entries.size() && entries[j].feature == entries[i].feature) ++j;
      runs.push_back({entries[i].feature, i, j});
      i = j;
    }

    const WeightedCounts node_w = weigh(counts);
    const auto n_rows = rows.size();
    auto evaluate = [&](const std::vector<std::size_t>& run_ids) {
      SplitCandidate best;
      for (auto ri : run_ids) {
        auto c = evaluate_feature(entries, runs[ri].begin, runs[ri].end, runs[ri].feature, node_w, n_rows);
        if (c.valid() && (!best.valid() || c.better_than(best))) best = c;
      }
      return best;
    };

    std::vector<std::size_t> all(runs.size());
    std::iota(all.begin(), all.end(), 0);
    if (!k_ || *k_ >= runs.size()) return evaluate(all);

    // Draw k present features; fall back to the rest if none of them splits.
    for (std::size_t i = 0; i < *k_; ++i) std::swap(all[i], all[i + uniform_index(*rng_, all.size() - i)]);
    std::vector<std::size_t> chosen(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(*k_));
    std::vector<std::size_t> rest(all.begin() + static_cast<std::ptrdiff_t>(*k_), all.end());
    std::sort(chosen.begin(), chosen.end());
    std::sort(rest.begin(), rest.end());
    auto best = evaluate(chosen);
    if (!best.valid()) best = evaluate(rest);
    return best;
  }

  // Sweeps the sorted values of one feature: negatives, the implicit-zero
  // block, then positives.
  SplitCandidate evaluate_feature(const std::vector<Entry>& entries, std::size_t begin, std::size_t end,
                                  std::uint32_t feature, const WeightedCounts& node_w, std::size_t n_rows) const {
    struct Group {
      double value;
      WeightedCounts w;
    };
    std::vector<Group> groups;
    WeightedCounts nonzero_w{};
    std::size_t nnz = 0;
    for (std::size_t i = begin; i < end; ++i) nnz += entries[i].value != 0.0 ? 1 : 0;
    bool zero_added = nnz == n_rows;  // no zeros at all
    auto add_zero_group = [&] {
      WeightedCounts zw{};
      for (std::size_t k = 0; k < kNumLabels; ++k) zw[k] = std::max(0.0, node_w[k] - nonzero_w[k]);
      groups.push_back({0.0, zw});
      zero_added = true;
    };
    // Weighted totals of the non-zero entries are needed for the zero block.
    for (std::size_t i = begin; i < end; ++i)
      if (entries[i].value != 0.0)
        nonzero_w[static_cast<std::size_t>(entries[i].label)] += weights_[static_cast<std::size_t>(entries[i].label)];
    for (std::size_t i = begin; i < end; ++i) {
      const auto& e = entries[i];
      if (e.value == 0.0) continue;  // explicit zeros belong to the zero block
      if (!zero_added && e.value > 0.0) add_zero_group();
      if (groups.empty() || groups.back().value != e.value) groups.push_back({e.value, {}});
      groups.back().w[static_cast<std::size_t>(e.label)] += weights_[static_cast<std::size_t>(e.label)];
    }
    if (!zero_added) add_zero_group();

    SplitCandidate best;
    if (groups.size() < 2) return best;
    const double total = node_w[0] + node_w[1] + node_w[2];
    WeightedCounts left{};
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
      for (std::size_t k = 0; k < kNumLabels; ++k) left[k] += groups[g].w[k];
      WeightedCounts right{};
      for (std::size_t k = 0; k < kNumLabels; ++k) right[k] = std::max(0.0, node_w[k] - left[k]);
      const double wl = left[0] + left[1] + left[2];
      const double wr = right[0] + right[1] + right[2];
      const double impurity = total > 0.0 ? (wl * gini(left) + wr * gini(right)) / total : 0.0;
      SplitCandidate c{impurity, static_cast<std::int32_t>(feature), midpoint(groups[g].value, groups[g + 1].value)};
      if (!best.valid() || c.better_than(best)) best = c;
    }
    return best;
  }

  std::span<const SparseVector> X_;
  std::span<const Label> y_;
  const DecisionTreeConfig& config_;
  PerLabel<double> weights_;
  std::optional<std::size_t> k_;
  Rng* rng_;
};

}  // namespace

std::size_t DecisionTreeModel::depth() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (!n.is_leaf()) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

DecisionTreeModel train_dtc(std::span<const SparseVector> X, std::span<const Label> y,
                            const DecisionTreeConfig& config) {
  check_training_input(X, y);
  std::vector<std::uint32_t> rows(X.size());
  std::iota(rows.begin(), rows.end(), 0u);
  TreeGrower grower(X, y, config, class_weights(y, config.class_weighting), std::nullopt, nullptr);
  return grower.grow(std::move(rows));
}

Prediction predict(const DecisionTreeModel& model, const SparseVector& x) {
  check_predict_input(model.dim, x);
  std::size_t i = 0;
  while (!model.nodes[i].is_leaf()) {
    const auto& n = model.nodes[i];
    i = static_cast<std::size_t>(x.get(static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right);
  }
  const auto& leaf = model.nodes[i];
  Prediction p;
  double total = 0.0;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    p.scores[k] = static_cast<double>(leaf.class_counts[k]) * model.class_weights[k];
    total += p.scores[k];
  }
  if (total > 0.0)
    for (auto& s : p.scores) s /= total;
  p.label = argmax_label(p.scores);
  return p;
}

RandomForestModel train_rfc(std::span<const SparseVector> X, std::span<const Label> y,
                            const RandomForestConfig& config) {
  check_training_input(X, y);
  if (config.n_trees == 0) throw Error(Errc::BadConfig, "n_trees must be positive");
  const std::size_t dim = X.front().dim;
  const std::size_t k = config.features_per_split.value_or(
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim)))));
  const auto weights = class_weights(y, config.tree.class_weighting);

  RandomForestModel model;
  model.dim = dim;
  model.config = config;
  model.trees.resize(config.n_trees);

  auto grow_tree = [&](std::size_t t) {
    Rng rng(derive_seed(config.seed, t));
    std::vector<std::uint32_t> rows(X.size());
    if (config.bootstrap) {
      for (auto& r : rows) r = static_cast<std::uint32_t>(uniform_index(rng, X.size()));
    } else {
      std::iota(rows.begin(), rows.end(), 0u);
    }
    TreeGrower grower(X, y, config.tree, weights, std::max<std::size_t>(k, 1), &rng);
    model.trees[t] = grower.grow(std::move(rows));
  };

  unsigned threads = config.n_threads != 0 ? config.n_threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.n_trees));
  if (threads <= 1) {
    for (std::size_t t = 0; t < config.n_trees; ++t) grow_tree(t);
    return model;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < config.n_trees && !failed; t = next++) {
          try {
            grow_tree(t);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
  return model;
}

Prediction predict(const RandomForestModel& model, const SparseVector& x) {
  check_predict_input(model.dim, x);
  Prediction p;
  for (const auto& tree : model.trees) p.scores[static_cast<std::size_t>(ordinal(predict(tree, x).label))] += 1.0;
  if (!model.trees.empty())
    for (auto& s : p.scores) s /= static_cast<double>(model.trees.size());
  p.label = argmax_label(p.scores);
  return p;
}

// ---------------------------------------------------------------------------
// Linear SVC

namespace {

double sparse_dot(const Eigen::VectorXd& w, const SparseVector& x, double bias) {
  double s = w[static_cast<Eigen::Index>(x.dim)] * bias;
  for (const auto& [i, v] : x.entries) s += w[static_cast<Eigen::Index>(i)] * v;
  return s;
}

void sparse_axpy(Eigen::VectorXd& w, double a, const SparseVector& x, double bias) {
  for (const auto& [i, v] : x.entries) w[static_cast<Eigen::Index>(i)] += a * v;
  w[static_cast<Eigen::Index>(x.dim)] += a * bias;
}

BinarySvc solve_binary(std::span<const SparseVector> X, const std::vector<double>& sign,
                       const std::vector<double>& cost, const LinearSvcConfig& config, std::uint64_t seed) {
  const std::size_t n = X.size();
  const std::size_t dim = X.front().dim;
  BinarySvc out;
  out.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim + 1));
  std::vector<double> alpha(n, 0.0), diag(n), qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = 0.5 / cost[i];
    qd[i] = X[i].squared_norm() + config.bias * config.bias + diag[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t iter = 0; iter < config.max_iter; ++iter) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    double max_violation = 0.0;
    for (auto i : order) {
      const double g = sign[i] * sparse_dot(out.weights, X[i], config.bias) - 1.0 + diag[i] * alpha[i];
      const double pg = alpha[i] == 0.0 ? std::min(g, 0.0) : g;
      max_violation = std::max(max_violation, std::abs(pg));
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::max(old - g / qd[i], 0.0);
      sparse_axpy(out.weights, (alpha[i] - old) * sign[i], X[i], config.bias);
    }
    out.iterations = iter + 1;
    if (max_violation < config.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

bool LinearSvcModel::converged() const {
  return std::all_of(per_class.begin(), per_class.end(), [](const auto& c) { return !c || c->converged; });
}

PerLabel<double> LinearSvcModel::decision_function(const SparseVector& x) const {
  PerLabel<double> s{};
  for (std::size_t k = 0; k < kNumLabels; ++k)
    s[k] = per_class[k] ? sparse_dot(per_class[k]->weights, x, config.bias) : -std::numeric_limits<double>::infinity();
  return s;
}

LinearSvcModel train_svc(std::span<const SparseVector> X, std::span<const Label> y, const LinearSvcConfig& config) {
  check_training_input(X, y);
  if (!(config.C > 0.0) || !(config.tol > 0.0)) throw Error(Errc::BadConfig, "C and tol must be positive");
  PerLabel<std::size_t> n{};
  for (auto l : y) ++n[static_cast<std::size_t>(ordinal(l))];
  if (std::count_if(n.begin(), n.end(), [](auto c) { return c > 0; }) < 2)
    throw Error(Errc::SingleClass, "SVC needs at least two classes");

  const auto weights = class_weights(y, config.class_weighting);
  std::vector<double> cost(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) cost[i] = config.C * weights[static_cast<std::size_t>(ordinal(y[i]))];

  LinearSvcModel model;
  model.dim = X.front().dim;
  model.config = config;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    if (n[k] == 0) continue;
    std::vector<double> sign(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) sign[i] = static_cast<std::size_t>(ordinal(y[i])) == k ? 1.0 : -1.0;
    model.per_class[k] = solve_binary(X, sign, cost, config, derive_seed(config.seed, k));
  }
  return model;
}

Prediction predict(const LinearSvcModel& model, const SparseVector& x) {
  check_predict_input(model.dim, x);
  Prediction p;
  p.scores = model.decision_function(x);
  p.label = argmax_label(p.scores);
  return p;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::Dtc: return "dtc";
    case ModelKind::Rfc: return "rfc";
    case ModelKind::Svc: return "svc";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept {
  if (s == "dtc") return ModelKind::Dtc;
  if (s == "rfc") return ModelKind::Rfc;
  if (s == "svc") return ModelKind::Svc;
  return std::nullopt;
}

ModelKind kind_of(const Classifier& c) noexcept { return static_cast<ModelKind>(c.index()); }

std::size_t input_dim(const Classifier& c) noexcept {
  return std::visit([](const auto& m) { return m.dim; }, c);
}

Prediction predict(const Classifier& model, const SparseVector& x) {
  return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

namespace {

using detail::ByteReader;
using detail::ByteWriter;

void write_opt_size(ByteWriter& w, const std::optional<std::size_t>& v) {
  w.boolean(v.has_value());
  w.u64(v.value_or(0));
}

std::optional<std::size_t> read_opt_size(ByteReader& r) {
  bool has = r.boolean();
  auto v = r.u64();
  return has ? std::optional<std::size_t>(v) : std::nullopt;
}

ClassWeighting read_weighting(ByteReader& r) {
  auto v = r.u8();
  if (v > 1) throw Error(Errc::Corrupt, "bad class weighting");
  return static_cast<ClassWeighting>(v);
}

void write_tree_config(ByteWriter& w, const DecisionTreeConfig& c) {
  write_opt_size(w, c.max_depth);
  w.u64(c.min_samples_split);
  w.u8(static_cast<std::uint8_t>(c.class_weighting));
}

DecisionTreeConfig read_tree_config(ByteReader& r) {
  DecisionTreeConfig c;
  c.max_depth = read_opt_size(r);
  c.min_samples_split = r.u64();
  c.class_weighting = read_weighting(r);
  return c;
}

void write_tree(ByteWriter& w, const DecisionTreeModel& m) {
  w.u64(m.dim);
  write_tree_config(w, m.config);
  for (double cw : m.class_weights) w.f64(cw);
  w.u64(m.nodes.size());
  for (const auto& n : m.nodes) {
    w.i32(n.feature);
    w.f64(n.threshold);
    w.i32(n.left);
    w.i32(n.right);
    for (auto c : n.class_counts) w.u32(c);
  }
}

DecisionTreeModel read_tree(ByteReader& r) {
  DecisionTreeModel m;
  m.dim = r.u64();
  m.config = read_tree_config(r);
  for (auto& cw : m.class_weights) cw = r.f64();
  m.nodes.resize(r.count(32));
  if (m.nodes.empty()) throw Error(Errc::Corrupt, "tree without nodes");
  for (auto& n : m.nodes) {
    n.feature = r.i32();
    n.threshold = r.f64();
    n.left = r.i32();
    n.right = r.i32();
    for (auto& c : n.class_counts) c = r.u32();
  }
  const auto size = static_cast<std::int32_t>(m.nodes.size());
  for (std::int32_t i = 0; i < size; ++i) {
    const auto& n = m.nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf()) continue;
    // Children always come after their parent, which rules out cycles.
    if (n.left <= i || n.right <= i || n.left >= size || n.right >= size ||
        static_cast<std::size_t>(n.feature) >= m.dim)
      throw Error(Errc::Corrupt, "bad tree node");
  }
  return m;
}

}  // namespace

std::string serialize_classifier(const Classifier& c) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(c.index()));
  if (const auto* t = std::get_if<DecisionTreeModel>(&c)) {
    write_tree(w, *t);
  } else if (const auto* f = std::get_if<RandomForestModel>(&c)) {
    w.u64(f->dim);
    w.u64(f->config.n_trees);
    w.boolean(f->config.bootstrap);
    write_opt_size(w, f->config.features_per_split);
    w.u64(f->config.seed);
    write_tree_config(w, f->config.tree);
    w.u64(f->trees.size());
    for (const auto& t : f->trees) write_tree(w, t);
  } else {
    const auto& s = std::get<LinearSvcModel>(c);
    w.u64(s.dim);
    w.f64(s.config.C);
    w.f64(s.config.tol);
    w.u64(s.config.max_iter);
    w.u64(s.config.seed);
    w.f64(s.config.bias);
    w.u8(static_cast<std::uint8_t>(s.config.class_weighting));
    for (const auto& pc : s.per_class) {
      w.boolean(pc.has_value());
      if (!pc) continue;
      w.boolean(pc->converged);
      w.u64(pc->iterations);
      w.u64(static_cast<std::uint64_t>(pc->weights.size()));
      for (Eigen::Index i = 0; i < pc->weights.size(); ++i) w.f64(pc->weights[i]);
    }
  }
  return w.take();
}

Classifier deserialize_classifier(std::string_view bytes) {
  ByteReader r(bytes);
  Classifier out;
  switch (r.u8()) {
    case 0:
      out = read_tree(r);
      break;
    case 1: {
      RandomForestModel f;
      f.dim = r.u64();
      f.config.n_trees = r.u64();
      f.config.bootstrap = r.boolean();
      f.config.features_per_split = read_opt_size(r);
      f.config.seed = r.u64();
      f.config.tree = read_tree_config(r);
      f.trees.resize(r.count(16));
      for (auto& t : f.trees) {
        t = read_tree(r);
        if (t.dim != f.dim) throw Error(Errc::Corrupt, "tree dim differs from forest dim");
      }
      out = std::move(f);
      break;
    }
    case 2: {
      LinearSvcModel s;
      s.dim = r.u64();
      s.config.C = r.f64();
      s.config.tol = r.f64();
      s.config.max_iter = r.u64();
      s.config.seed = r.u64();
      s.config.bias = r.f64();
      s.config.class_weighting = read_weighting(r);
      for (auto& pc : s.per_class) {
        if (!r.boolean()) continue;
        BinarySvc b;
        b.converged = r.boolean();
        b.iterations = r.u64();
        const auto n = r.count(8);
        if (n != s.dim + 1) throw Error(Errc::Corrupt, "SVC weight size mismatch");
        b.weights.resize(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < b.weights.size(); ++i) b.weights[i] = r.f64();
        pc = std::move(b);
      }
      out = std::move(s);
      break;
    }
    default:
      throw Error(Errc::Corrupt, "unknown classifier tag");
  }
  if (!r.done()) throw Error(Errc::Corrupt, "trailing bytes after classifier");
  return out;
}

}  // namespace cqj
