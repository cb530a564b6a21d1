#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cqj/common.hpp"
#include "cqj/tfidf.hpp"

namespace cqj {

enum class ClassWeighting { None, InverseFrequency };

std::string_view to_string(ClassWeighting w) noexcept;

/// Per-class sample weights for `y`. InverseFrequency gives n / (k * n_c)
/// for the k classes present; absent classes get 0.
PerLabel<double> class_weights(std::span<const Label> y, ClassWeighting weighting);

struct Prediction {
  Label label = Label::Bad;
  PerLabel<double> scores{};
};

/// Argmax with ties going to the lower label ordinal.
Label argmax_label(const PerLabel<double>& scores);

// ---------------------------------------------------------------------------
// Decision tree

struct DecisionTreeConfig {
  std::optional<std::size_t> max_depth;  // unbounded when empty
  std::size_t min_samples_split = 2;
  ClassWeighting class_weighting = ClassWeighting::None;
};

/// Internal nodes route `x[feature] <= threshold` left. Every node keeps the
/// class counts of the training rows that reached it.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  PerLabel<std::uint32_t> class_counts{};

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTreeModel {
  std::size_t dim = 0;
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  DecisionTreeConfig config;
  PerLabel<double> class_weights{1.0, 1.0, 1.0};

  std::size_t depth() const;
};

/// CART with Gini impurity. Thresholds are midpoints between consecutive
/// distinct values (implicit zeros included). Best split = lowest weighted
/// Gini, then lowest feature index, then lowest threshold.
/// Throws EmptyTrainingSet or DimMismatch.
DecisionTreeModel train_dtc(std::span<const SparseVector> X, std::span<const Label> y,
                            const DecisionTreeConfig& config = {});

Prediction predict(const DecisionTreeModel& model, const SparseVector& x);

// ---------------------------------------------------------------------------
// Random forest

struct RandomForestConfig {
  std::size_t n_trees = 100;
  bool bootstrap = true;
  std::optional<std::size_t> features_per_split;  // ceil(sqrt(dim)) when empty
  std::uint64_t seed = 0;
  DecisionTreeConfig tree;
  unsigned n_threads = 0;  // 0: hardware concurrency. Never affects the result.
};

struct RandomForestModel {
  std::size_t dim = 0;
  std::vector<DecisionTreeModel> trees;
  RandomForestConfig config;
};

/// Tree i is grown from its own RNG stream derived from (seed, i), so
/// parallel and sequential training produce identical forests.
RandomForestModel train_rfc(std::span<const SparseVector> X, std::span<const Label> y,
                            const RandomForestConfig& config = {});

/// Majority vote; scores are vote fractions.
Prediction predict(const RandomForestModel& model, const SparseVector& x);

// ---------------------------------------------------------------------------
// Linear SVC

struct LinearSvcConfig {
  double C = 1.0;
  double tol = 0.1;
  std::size_t max_iter = 1000;
  std::uint64_t seed = 0;
  double bias = 1.0;  // value of the constant feature appended to every row
  ClassWeighting class_weighting = ClassWeighting::None;
};

struct BinarySvc {
  Eigen::VectorXd weights;  // dim + 1 entries; last one multiplies `bias`
  bool converged = false;
  std::size_t iterations = 0;
};

struct LinearSvcModel {
  std::size_t dim = 0;
  PerLabel<std::optional<BinarySvc>> per_class;  // empty for classes absent at training time
  LinearSvcConfig config;

  bool converged() const;
  PerLabel<double> decision_function(const SparseVector& x) const;
};

/// One-vs-rest L2-regularized squared-hinge SVMs, each solved by dual
/// coordinate descent until the largest projected-gradient violation drops
/// below `tol` or `max_iter` passes are done (then `converged` is false).
/// Throws EmptyTrainingSet, DimMismatch or SingleClass.
LinearSvcModel train_svc(std::span<const SparseVector> X, std::span<const Label> y,
                         const LinearSvcConfig& config = {});

Prediction predict(const LinearSvcModel& model, const SparseVector& x);

// ---------------------------------------------------------------------------

using Classifier = std::variant<DecisionTreeModel, RandomForestModel, LinearSvcModel>;

enum class ModelKind { Dtc, Rfc, Svc };

std::string_view to_string(ModelKind k) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept;
ModelKind kind_of(const Classifier& c) noexcept;
std::size_t input_dim(const Classifier& c) noexcept;

/// Throws DimMismatch when x.dim differs from the training dimension.
Prediction predict(const Classifier& model, const SparseVector& x);

std::string serialize_classifier(const Classifier& c);
/// Throws Corrupt on malformed input.
Classifier deserialize_classifier(std::string_view bytes);

}  // namespace cqj
