#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cqj/classifiers.hpp"
#include "cqj/corpus.hpp"
#include "cqj/features.hpp"
#include "cqj/tfidf.hpp"

namespace cqj {

enum class InputMode { Org, Enr };

std::string_view to_string(InputMode m) noexcept;
std::optional<InputMode> parse_input_mode(std::string_view s) noexcept;

// ---------------------------------------------------------------------------
// Train/test split

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
  bool stratified = true;
};

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// |train| == round(train_fraction * N). Stratified splits apportion each
/// class by largest remainder so it lands within one record of its share.
/// Throws TooFewRecords (N < 5) or BadConfig.
SplitIndices split_indices(std::span<const Label> labels, const SplitSpec& spec);

/// Throws MissingLabels if any record is unlabeled.
std::pair<std::vector<ClarificationRecord>, std::vector<ClarificationRecord>> split(
    const std::vector<ClarificationRecord>& records, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Model inputs

/// Scales question length by the longest question seen in training.
class FeatureScaler {
 public:
  static FeatureScaler fit(std::span<const FeatureVector> train);
  static FeatureScaler from_max(std::size_t max_question_len) {
    FeatureScaler s;
    s.max_question_len_ = max_question_len;
    return s;
  }

  bool fitted() const { return max_question_len_.has_value(); }
  std::optional<std::size_t> max_question_len() const { return max_question_len_; }
  /// len / train_max clamped to [0, 1]. Throws ScalerNotFitted.
  double scale_question_len(std::size_t len) const;

  friend bool operator==(const FeatureScaler&, const FeatureScaler&) = default;

 private:
  std::optional<std::size_t> max_question_len_;
};

inline constexpr std::size_t kEnrichedDims = 4;

/// [question_len_scaled, rouge_precision, (polarity + 1) / 2, subjectivity].
std::array<double, kEnrichedDims> enriched_values(const FeatureVector& f, const FeatureScaler& scaler);

/// org: TF-IDF of classification_text(record). enr: the same vector with the
/// four enriched values appended after the vocabulary dimensions.
SparseVector build_input(const ClarificationRecord& record, const FeatureVector& features, InputMode mode,
                         const TfidfModel& tfidf, const FeatureScaler& scaler);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  ModelKind kind = ModelKind::Rfc;
  InputMode mode = InputMode::Org;
  SplitSpec split;
  TfidfConfig tfidf;
  DecisionTreeConfig dtc;
  RandomForestConfig rfc;
  LinearSvcConfig svc;
};

/// Everything needed to predict on raw records.
struct ModelBundle {
  ModelKind kind = ModelKind::Rfc;
  InputMode mode = InputMode::Org;
  SplitSpec split;
  FeatureContext features;
  TfidfModel tfidf;
  FeatureScaler scaler;
  Classifier classifier;
  std::string config_json;  // snapshot of the training configuration
};

/// Flat JSON description of a TrainConfig (recorded in bundles and reports).
std::string config_snapshot_json(const TrainConfig& config);

/// Fits TF-IDF, scaler and classifier on `train` (all labeled).
ModelBundle train_bundle(const std::vector<ClarificationRecord>& train, const TrainConfig& config,
                         const FeatureContext& features);

Prediction predict(const ModelBundle& bundle, const ClarificationRecord& record);
Prediction predict(const ModelBundle& bundle, const ClarificationRecord& record, const FeatureVector& features);

/// Magic header of the bundle file.
inline constexpr std::string_view kBundleMagic = "CQJ1";
inline constexpr std::uint32_t kBundleVersion = 1;

std::string save_model(const ModelBundle& bundle);
/// Throws BadMagic, VersionUnsupported or Corrupt.
ModelBundle load_model(std::string_view bytes);

// ---------------------------------------------------------------------------
// Evaluation

using ConfusionMatrix = std::array<std::array<std::size_t, kNumLabels>, kNumLabels>;  // [truth][predicted]

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct AveragedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Improvement {
  std::string baseline_id;
  double percent = 0.0;
};

struct EvalReport {
  std::string model;  // dtc / rfc / svc, or a checkpoint name from the neural harness
  InputMode mode = InputMode::Org;
  std::uint64_t seed = 0;
  PerLabel<ClassMetrics> per_class{};
  AveragedMetrics macro;
  AveragedMetrics weighted;
  double micro_f1 = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix confusion{};
  std::string config_json = "{}";
  std::optional<Improvement> improvement;

  bool enriched() const { return mode == InputMode::Enr; }
  std::size_t test_size() const;
};

/// Metrics from a confusion matrix; 0/0 is 0. Throws EmptyTestSet.
EvalReport metrics_from_confusion(const ConfusionMatrix& confusion);
ConfusionMatrix confusion_matrix(std::span<const Label> truth, std::span<const Label> predicted);

/// Throws EmptyTestSet or MissingLabels.
EvalReport evaluate(const ModelBundle& bundle, const std::vector<ClarificationRecord>& test);

/// 100 * (f1_enr - f1_org) / f1_org. Throws ZeroBaseline.
double improvement(double f1_org, double f1_enr);
double improvement(const EvalReport& org, const EvalReport& enr);
/// Rounded to one decimal place.
double round1(double percent);

/// Metrics JSON: {model, mode, seed, per_class, macro, weighted, micro_f1,
/// accuracy, confusion, improvement_pct, baseline, config}.
std::string report_json(const EvalReport& report);
EvalReport report_from_json(std::string_view text);
/// Rows shaped like the usual org./enr. comparison table with an impr. column.
std::string comparison_markdown(const std::vector<EvalReport>& reports);

// ---------------------------------------------------------------------------
// Neural export

/// `org text [FEAT] length=<int> rougep=<4dp> sentiment=<4dp> subjectivity=<4dp>`.
std::string enriched_text(const ClarificationRecord& record, const FeatureVector& features);

/// One JSON object per labeled record: {id, text, enriched_text (enr only),
/// label, split (when split_tags is non-empty)}.
std::string export_for_neural(const std::vector<ClarificationRecord>& records,
                              const std::vector<FeatureVector>& features, InputMode mode,
                              std::span<const std::string> split_tags = {});

}  // namespace cqj
