#include "cqj/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "binio.hpp"
#include "rng.hpp"
#include "text_util.hpp"

namespace cqj {

using json = nlohmann::ordered_json;
using detail::fixed4;

std::string_view to_string(InputMode m) noexcept { return m == InputMode::Enr ? "enr" : "org"; }

std::optional<InputMode> parse_input_mode(std::string_view s) noexcept {
  if (s == "org") return InputMode::Org;
  if (s == "enr") return InputMode::Enr;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Split

SplitIndices split_indices(std::span<const Label> labels, const SplitSpec& spec) {
  const std::size_t n = labels.size();
  if (n < 5) throw Error(Errc::TooFewRecords, fmt::format("need at least 5 labeled records, got {}", n));
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw Error(Errc::BadConfig, "train_fraction must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));

  detail::Rng rng(detail::derive_seed(spec.seed, 0));
  auto shuffle = [&](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[detail::uniform_index(rng, i)]);
  };

  std::vector<bool> in_train(n, false);
  if (!spec.stratified) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    shuffle(perm);
    for (std::size_t i = 0; i < n_train; ++i) in_train[perm[i]] = true;
  } else {
    PerLabel<std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(ordinal(labels[i]))].push_back(i);
    PerLabel<std::size_t> quota{};
    PerLabel<double> remainder{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      const double exact = spec.train_fraction * static_cast<double>(by_class[k].size());
      quota[k] = static_cast<std::size_t>(std::floor(exact));
      remainder[k] = exact - std::floor(exact);
      assigned += quota[k];
    }
    std::array<std::size_t, kNumLabels> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
    for (std::size_t idx = 0; assigned < n_train; idx = (idx + 1) % kNumLabels) {
      const auto k = order[idx];
      if (quota[k] < by_class[k].size()) {
        ++quota[k];
        ++assigned;
      }
    }
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      shuffle(by_class[k]);
      for (std::size_t i = 0; i < quota[k]; ++i) in_train[by_class[k][i]] = true;
    }
  }
  SplitIndices out;
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? out.train : out.test).push_back(i);
  return out;
}

namespace {

std::vector<Label> labels_of(const std::vector<ClarificationRecord>& records) {
  std::vector<Label> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!r.label) throw Error(Errc::MissingLabels, "record '" + r.id + "' has no label");
    out.push_back(*r.label);
  }
  return out;
}

}  // namespace

std::pair<std::vector<ClarificationRecord>, std::vector<ClarificationRecord>> split(
    const std::vector<ClarificationRecord>& records, const SplitSpec& spec) {
  const auto labels = labels_of(records);
  const auto idx = split_indices(labels, spec);
  std::pair<std::vector<ClarificationRecord>, std::vector<ClarificationRecord>> out;
  for (auto i : idx.train) out.first.push_back(records[i]);
  for (auto i : idx.test) out.second.push_back(records[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Inputs

FeatureScaler FeatureScaler::fit(std::span<const FeatureVector> train) {
  std::size_t max_len = 0;
  for (const auto& f : train) max_len = std::max(max_len, f.question_len_words);
  return from_max(max_len);
}

double FeatureScaler::scale_question_len(std::size_t len) const {
  if (!max_question_len_) throw Error(Errc::ScalerNotFitted, "scaler has not been fitted");
  if (*max_question_len_ == 0) return 0.0;
  return std::clamp(static_cast<double>(len) / static_cast<double>(*max_question_len_), 0.0, 1.0);
}

std::array<double, kEnrichedDims> enriched_values(const FeatureVector& f, const FeatureScaler& scaler) {
  return {scaler.scale_question_len(f.question_len_words), f.rouge_precision, (f.polarity + 1.0) / 2.0,
          f.subjectivity};
}

SparseVector build_input(const ClarificationRecord& record, const FeatureVector& features, InputMode mode,
                         const TfidfModel& tfidf, const FeatureScaler& scaler) {
  SparseVector v = tfidf.transform(classification_text(record));
  if (mode == InputMode::Org) return v;
  const auto extra = enriched_values(features, scaler);
  const std::size_t base = v.dim;
  v.dim = base + kEnrichedDims;
  for (std::size_t k = 0; k < kEnrichedDims; ++k)
    if (extra[k] != 0.0) v.entries.emplace_back(static_cast<std::uint32_t>(base + k), extra[k]);
  return v;
}

// ---------------------------------------------------------------------------
// Training

std::string config_snapshot_json(const TrainConfig& c) {
  auto opt = [](const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["model"] = to_string(c.kind);
  j["mode"] = to_string(c.mode);
  j["split"] = {{"train_fraction", c.split.train_fraction}, {"seed", c.split.seed}, {"stratified", c.split.stratified}};
  j["tfidf"] = {{"min_df", c.tfidf.min_df}, {"sublinear_tf", c.tfidf.sublinear_tf}, {"l2_normalize", c.tfidf.l2_normalize}};
  auto tree = [&](const DecisionTreeConfig& t) {
    return json{{"max_depth", opt(t.max_depth)},
                {"min_samples_split", t.min_samples_split},
                {"criterion", "gini"},
                {"class_weighting", to_string(t.class_weighting)}};
  };
  switch (c.kind) {
    case ModelKind::Dtc:
      j["dtc"] = tree(c.dtc);
      break;
    case ModelKind::Rfc:
      j["rfc"] = {{"n_trees", c.rfc.n_trees},
                  {"bootstrap", c.rfc.bootstrap},
                  {"features_per_split", opt(c.rfc.features_per_split)},
                  {"seed", c.rfc.seed},
                  {"tree", tree(c.rfc.tree)}};
      break;
    case ModelKind::Svc:
      j["svc"] = {{"C", c.svc.C},
                  {"tol", c.svc.tol},
                  {"max_iter", c.svc.max_iter},
                  {"seed", c.svc.seed},
                  {"loss", "squared_hinge"},
                  {"class_weighting", to_string(c.svc.class_weighting)}};
      break;
  }
  return j.dump();
}

ModelBundle train_bundle(const std::vector<ClarificationRecord>& train, const TrainConfig& config,
                         const FeatureContext& features) {
  if (train.empty()) throw Error(Errc::EmptyTrainingSet, "no training records");
  const auto y = labels_of(train);
  const auto feats = extract_features(train, features);
  std::vector<std::string> texts;
  texts.reserve(train.size());
  for (const auto& r : train) texts.push_back(classification_text(r));

  ModelBundle b;
  b.kind = config.kind;
  b.mode = config.mode;
  b.split = config.split;
  b.features = features;
  b.tfidf = TfidfModel::fit(texts, config.tfidf);
  b.scaler = FeatureScaler::fit(feats);
  b.config_json = config_snapshot_json(config);

  std::vector<SparseVector> X;
  X.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) X.push_back(build_input(train[i], feats[i], config.mode, b.tfidf, b.scaler));

  switch (config.kind) {
    case ModelKind::Dtc: b.classifier = train_dtc(X, y, config.dtc); break;
    case ModelKind::Rfc: b.classifier = train_rfc(X, y, config.rfc); break;
    case ModelKind::Svc: b.classifier = train_svc(X, y, config.svc); break;
  }
  return b;
}

Prediction predict(const ModelBundle& bundle, const ClarificationRecord& record, const FeatureVector& features) {
  return predict(bundle.classifier, build_input(record, features, bundle.mode, bundle.tfidf, bundle.scaler));
}

Prediction predict(const ModelBundle& bundle, const ClarificationRecord& record) {
  return predict(bundle, record, extract_features(record, bundle.features));
}

// ---------------------------------------------------------------------------
// Bundle format

namespace {

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string save_model(const ModelBundle& b) {
  detail::ByteWriter p;
  p.u8(static_cast<std::uint8_t>(b.kind));
  p.u8(static_cast<std::uint8_t>(b.mode));
  p.f64(b.split.train_fraction);
  p.u64(b.split.seed);
  p.boolean(b.split.stratified);

  p.str(b.features.lexicon.serialize());
  p.str(serialize_templates(b.features.templates));
  p.boolean(b.features.rules.use_template_hints);
  p.f64(b.features.rules.facet_option_fraction);
  p.boolean(b.features.options.include_options_in_sentiment);

  const auto& tc = b.tfidf.config();
  p.u64(tc.min_df);
  p.boolean(tc.sublinear_tf);
  p.boolean(tc.l2_normalize);
  const auto terms = b.tfidf.terms();
  p.u64(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    p.str(terms[i]);
    p.f64(b.tfidf.idf()[i]);
  }

  p.boolean(b.scaler.fitted());
  p.u64(b.scaler.max_question_len().value_or(0));

  p.str(b.config_json);
  p.str(serialize_classifier(b.classifier));

  detail::ByteWriter out;
  out.raw(kBundleMagic);
  out.u32(kBundleVersion);
  out.u64(p.bytes().size());
  out.raw(p.bytes());
  out.u64(fnv1a(p.bytes()));
  return out.take();
}

ModelBundle load_model(std::string_view bytes) {
  if (bytes.size() < kBundleMagic.size()) {
    if (kBundleMagic.starts_with(bytes)) throw Error(Errc::Corrupt, "truncated bundle header");
    throw Error(Errc::BadMagic, "not a CQJ1 bundle");
  }
  if (bytes.substr(0, kBundleMagic.size()) != kBundleMagic) throw Error(Errc::BadMagic, "not a CQJ1 bundle");
  detail::ByteReader head(bytes.substr(kBundleMagic.size()));
  const auto version = head.u32();
  if (version != kBundleVersion) throw Error(Errc::VersionUnsupported, fmt::format("bundle version {}", version));
  const auto payload_size = head.u64();
  if (head.remaining() < 8 || payload_size != head.remaining() - 8) throw Error(Errc::Corrupt, "bundle size does not match its header");
  const std::string_view payload = bytes.substr(bytes.size() - 8 - payload_size, payload_size);
  detail::ByteReader tail(bytes.substr(bytes.size() - 8));
  if (tail.u64() != fnv1a(payload)) throw Error(Errc::Corrupt, "bundle checksum mismatch");

  try {
    detail::ByteReader p(payload);
    ModelBundle b;
    const auto kind = p.u8();
    const auto mode = p.u8();
    if (kind > 2 || mode > 1) throw Error(Errc::Corrupt, "bad model kind or mode");
    b.kind = static_cast<ModelKind>(kind);
    b.mode = static_cast<InputMode>(mode);
    b.split.train_fraction = p.f64();
    b.split.seed = p.u64();
    b.split.stratified = p.boolean();

    b.features.lexicon = SentimentLexicon::parse(p.str());
    b.features.templates = parse_templates(p.str());
    b.features.rules.use_template_hints = p.boolean();
    b.features.rules.facet_option_fraction = p.f64();
    b.features.options.include_options_in_sentiment = p.boolean();

    TfidfConfig tc;
    tc.min_df = p.u64();
    tc.sublinear_tf = p.boolean();
    tc.l2_normalize = p.boolean();
    const auto v = p.count(16);
    std::vector<std::string> terms(v);
    std::vector<double> idf(v);
    for (std::size_t i = 0; i < v; ++i) {
      terms[i] = p.str();
      idf[i] = p.f64();
    }
    b.tfidf = TfidfModel::from_parts(std::move(terms), std::move(idf), tc);

    const bool fitted = p.boolean();
    const auto max_len = p.u64();
    if (fitted) b.scaler = FeatureScaler::from_max(max_len);

    b.config_json = p.str();
    b.classifier = deserialize_classifier(p.str());
    if (!p.done()) throw Error(Errc::Corrupt, "trailing bytes in bundle");
    if (kind_of(b.classifier) != b.kind) throw Error(Errc::Corrupt, "classifier kind mismatch");
    const std::size_t expected_dim = b.tfidf.dim() + (b.mode == InputMode::Enr ? kEnrichedDims : 0);
    if (input_dim(b.classifier) != expected_dim) throw Error(Errc::Corrupt, "classifier dim mismatch");
    return b;
  } catch (const Error& e) {
    if (e.code() == Errc::Corrupt) throw;
    throw Error(Errc::Corrupt, e.what());
  }
}

// ---------------------------------------------------------------------------
// Evaluation

std::size_t EvalReport::test_size() const {
  std::size_t n = 0;
  for (const auto& row : confusion)
    for (auto c : row) n += c;
  return n;
}

ConfusionMatrix confusion_matrix(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) throw Error(Errc::LengthMismatch, "truth and predictions differ in length");
  ConfusionMatrix m{};
  for (std::size_t i = 0; i < truth.size(); ++i)
    ++m[static_cast<std::size_t>(ordinal(truth[i]))][static_cast<std::size_t>(ordinal(predicted[i]))];
  return m;
}

EvalReport metrics_from_confusion(const ConfusionMatrix& c) {
  EvalReport r;
  r.confusion = c;
  const std::size_t total = r.test_size();
  if (total == 0) throw Error(Errc::EmptyTestSet, "no test records");
  auto ratio = [](double a, double b) { return b == 0.0 ? 0.0 : a / b; };
  std::size_t correct = 0;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    std::size_t predicted = 0, actual = 0;
    for (std::size_t j = 0; j < kNumLabels; ++j) {
      predicted += c[j][k];
      actual += c[k][j];
    }
    const auto tp = static_cast<double>(c[k][k]);
    correct += c[k][k];
    auto& m = r.per_class[k];
    m.precision = ratio(tp, static_cast<double>(predicted));
    m.recall = ratio(tp, static_cast<double>(actual));
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    m.support = actual;
    r.macro.precision += m.precision / static_cast<double>(kNumLabels);
    r.macro.recall += m.recall / static_cast<double>(kNumLabels);
    r.macro.f1 += m.f1 / static_cast<double>(kNumLabels);
    const double w = static_cast<double>(actual) / static_cast<double>(total);
    r.weighted.precision += w * m.precision;
    r.weighted.recall += w * m.recall;
    r.weighted.f1 += w * m.f1;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  // Micro P/R/F1 in single-label multiclass: TP = correct, FP = FN = errors.
  const double micro_p = ratio(static_cast<double>(correct), static_cast<double>(total));
  r.micro_f1 = ratio(2.0 * micro_p * micro_p, 2.0 * micro_p);
  return r;
}

EvalReport evaluate(const ModelBundle& bundle, const std::vector<ClarificationRecord>& test) {
  if (test.empty()) throw Error(Errc::EmptyTestSet, "no test records");
  const auto truth = labels_of(test);
  std::vector<Label> predicted;
  predicted.reserve(test.size());
  for (const auto& r : test) predicted.push_back(predict(bundle, r).label);
  EvalReport report = metrics_from_confusion(confusion_matrix(truth, predicted));
  report.model = std::string(to_string(bundle.kind));
  report.mode = bundle.mode;
  report.seed = bundle.split.seed;
  report.config_json = bundle.config_json;
  return report;
}

double improvement(double f1_org, double f1_enr) {
  if (f1_org == 0.0) throw Error(Errc::ZeroBaseline, "baseline F1 is zero");
  return 100.0 * (f1_enr - f1_org) / f1_org;
}

double improvement(const EvalReport& org, const EvalReport& enr) { return improvement(org.macro.f1, enr.macro.f1); }

double round1(double percent) { return std::round(percent * 10.0) / 10.0; }

namespace {

json prf_json(double p, double r, double f) { return json{{"precision", p}, {"recall", r}, {"f1", f}}; }

}  // namespace

std::string report_json(const EvalReport& r) {
  json j;
  j["model"] = r.model;
  j["mode"] = to_string(r.mode);
  j["seed"] = r.seed;
  j["enriched"] = r.enriched();
  json per = json::object();
  for (auto l : kAllLabels) {
    const auto& m = r.per_class[static_cast<std::size_t>(ordinal(l))];
    json cls = prf_json(m.precision, m.recall, m.f1);
    cls["support"] = m.support;
    per[std::string(to_string(l))] = cls;
  }
  j["per_class"] = per;
  j["macro"] = prf_json(r.macro.precision, r.macro.recall, r.macro.f1);
  j["weighted"] = prf_json(r.weighted.precision, r.weighted.recall, r.weighted.f1);
  j["micro_f1"] = r.micro_f1;
  j["accuracy"] = r.accuracy;
  j["confusion"] = r.confusion;
  j["improvement_pct"] = r.improvement ? json(round1(r.improvement->percent)) : json(nullptr);
  j["baseline"] = r.improvement ? json(r.improvement->baseline_id) : json(nullptr);
  j["config"] = json::parse(r.config_json.empty() ? "{}" : r.config_json);
  return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    EvalReport r;
    r.model = j.at("model").get<std::string>();
    auto mode = parse_input_mode(j.at("mode").get<std::string>());
    if (!mode) throw Error(Errc::BadConfig, "mode must be org or enr");
    r.mode = *mode;
    r.seed = j.at("seed").get<std::uint64_t>();
    for (auto l : kAllLabels) {
      const auto& cls = j.at("per_class").at(std::string(to_string(l)));
      auto& m = r.per_class[static_cast<std::size_t>(ordinal(l))];
      m.precision = cls.at("precision").get<double>();
      m.recall = cls.at("recall").get<double>();
      m.f1 = cls.at("f1").get<double>();
      m.support = cls.value("support", std::size_t{0});
    }
    const auto& macro = j.at("macro");
    r.macro = {macro.at("precision").get<double>(), macro.at("recall").get<double>(), macro.at("f1").get<double>()};
    if (j.contains("weighted")) {
      const auto& w = j["weighted"];
      r.weighted = {w.at("precision").get<double>(), w.at("recall").get<double>(), w.at("f1").get<double>()};
    }
    r.micro_f1 = j.value("micro_f1", 0.0);
    r.accuracy = j.value("accuracy", 0.0);
    r.confusion = j.at("confusion").get<ConfusionMatrix>();
    if (j.contains("improvement_pct") && !j["improvement_pct"].is_null())
      r.improvement = Improvement{j.value("baseline", json("")).is_string() ? j.value("baseline", std::string{}) : "",
                                  j["improvement_pct"].get<double>()};
    if (j.contains("config")) r.config_json = j["config"].dump();
    return r;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::BadConfig, fmt::format("metrics JSON: {}", e.what()));
  }
}

std::string comparison_markdown(const std::vector<EvalReport>& reports) {
  std::vector<std::string> models;
  for (const auto& r : reports)
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
  std::string out = "| Model | Type | Precision | Recall | F1 | impr. |\n|---|---|---|---|---|---|\n";
  for (const auto& m : models) {
    const EvalReport* org = nullptr;
    const EvalReport* enr = nullptr;
    for (const auto& r : reports) {
      if (r.model != m) continue;
      (r.mode == InputMode::Org ? org : enr) = &r;
    }
    std::string name = m;
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (const auto* r : {org, enr}) {
      if (r == nullptr) continue;
      std::string impr;
      if (r == enr && org != nullptr && org->macro.f1 != 0.0)
        impr = fmt::format("{:.1f}%", round1(improvement(*org, *enr)));
      else if (r == enr && r->improvement)
        impr = fmt::format("{:.1f}%", round1(r->improvement->percent));
      out += fmt::format("| {} | {}. | {} | {} | {} | {} |\n", name, to_string(r->mode), fixed4(r->macro.precision),
                         fixed4(r->macro.recall), fixed4(r->macro.f1), impr);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Neural export

std::string enriched_text(const ClarificationRecord& record, const FeatureVector& f) {
  return fmt::format("{} [FEAT] length={} rougep={} sentiment={} subjectivity={}", classification_text(record),
                     f.question_len_words, fixed4(f.rouge_precision), fixed4(f.polarity), fixed4(f.subjectivity));
}

std::string export_for_neural(const std::vector<ClarificationRecord>& records,
                              const std::vector<FeatureVector>& features, InputMode mode,
                              std::span<const std::string> split_tags) {
  if (records.size() != features.size()) throw Error(Errc::LengthMismatch, "records and features differ in length");
  if (!split_tags.empty() && split_tags.size() != records.size())
    throw Error(Errc::LengthMismatch, "records and split tags differ in length");
  std::string out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.label) throw Error(Errc::MissingLabels, "record '" + r.id + "' has no label");
    json j;
    j["id"] = r.id;
    j["text"] = classification_text(r);
    if (mode == InputMode::Enr) j["enriched_text"] = enriched_text(r, features[i]);
    j["label"] = to_string(*r.label);
    if (!split_tags.empty()) j["split"] = split_tags[i];
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace cqj
