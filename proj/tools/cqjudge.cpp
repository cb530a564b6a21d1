#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cqj/analysis.hpp"
#include "cqj/classifiers.hpp"
#include "cqj/corpus.hpp"
#include "cqj/features.hpp"
#include "cqj/llm.hpp"
#include "cqj/pipeline.hpp"
#include "cqj/textcore.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kRemote = 3 };

fs::path data_dir() {
  if (const char* d = std::getenv("CQJ_DATA_DIR")) return d;
  return CQJ_DEFAULT_DATA_DIR;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw cqj::Error(cqj::Errc::Io, fmt::format("cannot read {}", p.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Empty path means stdout.
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw cqj::Error(cqj::Errc::Io, fmt::format("cannot write {}", path));
  out << content;
  if (!out) throw cqj::Error(cqj::Errc::Io, fmt::format("write failed: {}", path));
}

void log_config(std::string_view verb, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string line = fmt::format("cqjudge {}:", verb);
  for (const auto& [k, v] : kv) line += fmt::format(" {}={}", k, v);
  std::cerr << line << '\n';
}

struct FeatureFlags {
  std::string lexicon;
  std::string templates;
  bool sentiment_on_options = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lexicon", lexicon, "Sentiment lexicon file (default: bundled data/lexicon.tsv)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--templates", templates, "Template registry TSV (default: built-in seven templates)")
        ->check(CLI::ExistingFile);
    cmd->add_flag("--sentiment-on-options", sentiment_on_options, "Score sentiment over question and options");
  }

  cqj::FeatureContext context() const {
    cqj::FeatureContext ctx;
    ctx.lexicon = cqj::SentimentLexicon::load(lexicon.empty() ? data_dir() / "lexicon.tsv" : fs::path(lexicon));
    if (!templates.empty()) ctx.templates = cqj::load_templates(templates);
    ctx.options.include_options_in_sentiment = sentiment_on_options;
    return ctx;
  }

  std::string lexicon_name() const { return lexicon.empty() ? "bundled" : lexicon; }
  std::string templates_name() const { return templates.empty() ? "built-in" : templates; }
};

json feature_json(const cqj::ClarificationRecord& r, const cqj::FeatureVector& f) {
  json j;
  j["id"] = r.id;
  j["question_len_words"] = f.question_len_words;
  j["query_len_words"] = f.query_len_words;
  j["n_options"] = f.n_options;
  j["polarity"] = f.polarity;
  j["subjectivity"] = f.subjectivity;
  j["rouge_precision"] = f.rouge_precision;
  j["rouge_recall"] = f.rouge_recall;
  j["template_id"] = f.template_id ? json(*f.template_id) : json(nullptr);
  j["query_type"] = std::string(cqj::to_string(f.query_type));
  return j;
}

std::string scores_field(const cqj::PerLabel<double>& s) {
  return fmt::format("{:.6f},{:.6f},{:.6f}", s[0], s[1], s[2]);
}

int exit_code_for(cqj::Errc c) {
  switch (c) {
    case cqj::Errc::Timeout:
    case cqj::Errc::HttpError:
    case cqj::Errc::AuthError:
    case cqj::Errc::Unparseable:
    case cqj::Errc::Io:
      return kRemote;
    default:
      return kData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cqjudge: usefulness classification of clarifying questions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key/value config file; flags given on the command line win");
  app.set_help_all_flag("--help-all", "Help for every sub-command");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse a raw TSV/CSV release into canonical JSONL");
  std::string in_input, in_schema, in_schemas_file, in_out, in_errors;
  ingest->add_option("--input", in_input, "Raw corpus file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--schema", in_schema, "Preset name, e.g. mimics-manual or mimics-duo")->required();
  ingest->add_option("--schemas-file", in_schemas_file, "Preset file (default: bundled data/schemas.conf)")
      ->check(CLI::ExistingFile);
  ingest->add_option("--out", in_out, "JSONL output (default: stdout)");
  ingest->add_option("--errors", in_errors, "Row error report (default: <input>.errors.tsv)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Usefulness rates and feature correlations");
  std::string an_what, an_corpus, an_out, an_format = "md";
  analyze->add_option("what", an_what, "templates | options | query-length | question-length | query-type | correlation")
      ->required()
      ->check(CLI::IsMember({"templates", "options", "query-length", "question-length", "query-type", "correlation"}));
  analyze->add_option("--corpus", an_corpus, "Canonical JSONL corpus")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", an_out, "Output file (default: stdout)");
  analyze->add_option("--format", an_format, "md | json | csv")->check(CLI::IsMember({"md", "json", "csv"}));
  FeatureFlags an_ff;
  an_ff.attach(analyze);

  // features
  auto* features = app.add_subcommand("features", "Per-record feature vectors as JSONL");
  std::string fe_corpus, fe_out;
  features->add_option("--corpus", fe_corpus, "Canonical JSONL corpus")->required()->check(CLI::ExistingFile);
  features->add_option("--out", fe_out, "Output file (default: stdout)");
  FeatureFlags fe_ff;
  fe_ff.attach(features);

  // train
  auto* train = app.add_subcommand("train", "Fit TF-IDF + classifier on the train portion of a corpus");
  std::string tr_model = "rfc", tr_corpus, tr_out, tr_weighting = "none";
  bool tr_enrich = false, tr_no_stratify = false, tr_no_bootstrap = false;
  std::uint64_t tr_seed = 42;
  double tr_fraction = 0.8, tr_c = 1.0, tr_tol = 0.1;
  std::size_t tr_trees = 100, tr_min_df = 1, tr_max_iter = 1000, tr_min_split = 2;
  std::optional<std::size_t> tr_max_depth, tr_mtry;
  unsigned tr_threads = 0;
  train->add_option("--model", tr_model, "dtc | rfc | svc")->check(CLI::IsMember({"dtc", "rfc", "svc"}));
  train->add_flag("--enrich", tr_enrich, "Append the four enrichment features to the TF-IDF input");
  train->add_option("--seed", tr_seed, "Seed for the split and the classifier");
  train->add_option("--corpus", tr_corpus, "Canonical JSONL corpus")->required()->check(CLI::ExistingFile);
  train->add_option("--out", tr_out, "Model bundle output")->required();
  train->add_option("--train-fraction", tr_fraction, "Share of records used for training")
      ->check(CLI::Range(0.0, 1.0));
  train->add_flag("--no-stratify", tr_no_stratify, "Plain shuffled split instead of a stratified one");
  train->add_option("--min-df", tr_min_df, "Minimum document frequency for the vocabulary");
  train->add_option("--class-weight", tr_weighting, "none | balanced")->check(CLI::IsMember({"none", "balanced"}));
  train->add_option("--max-depth", tr_max_depth, "Tree depth limit (dtc, rfc)");
  train->add_option("--min-samples-split", tr_min_split, "Smallest node that may be split (dtc, rfc)");
  train->add_option("--n-trees", tr_trees, "Forest size (rfc)");
  train->add_option("--features-per-split", tr_mtry, "Features tried per split (rfc; default ceil(sqrt(dim)))");
  train->add_flag("--no-bootstrap", tr_no_bootstrap, "Grow every tree on the full train set (rfc)");
  train->add_option("--threads", tr_threads, "Worker threads (rfc; results do not depend on it)");
  train->add_option("--C", tr_c, "Regularization (svc)")->check(CLI::PositiveNumber);
  train->add_option("--tol", tr_tol, "Stopping tolerance (svc)")->check(CLI::PositiveNumber);
  train->add_option("--max-iter", tr_max_iter, "Coordinate descent passes (svc)");
  FeatureFlags tr_ff;
  tr_ff.attach(train);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a model bundle on the held-out portion of a corpus");
  std::string ev_model, ev_corpus, ev_baseline, ev_out, ev_markdown;
  bool ev_all = false;
  evaluate->add_option("--model", ev_model, "Model bundle")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--corpus", ev_corpus, "Canonical JSONL corpus")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--baseline", ev_baseline, "Metrics JSON of the org. run to compare against")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--out", ev_out, "Metrics JSON output (default: stdout)");
  evaluate->add_option("--markdown", ev_markdown, "Also write a comparison table here");
  evaluate->add_flag("--all", ev_all, "Evaluate on every record instead of the bundle's test split");

  // predict
  auto* predict = app.add_subcommand("predict", "Label records with a model bundle");
  std::string pr_model, pr_corpus, pr_out;
  predict->add_option("--model", pr_model, "Model bundle")->required()->check(CLI::ExistingFile);
  predict->add_option("--corpus", pr_corpus, "Canonical JSONL corpus")->required()->check(CLI::ExistingFile);
  predict->add_option("--out", pr_out, "TSV output: id, label, scores (default: stdout)");

  // export
  auto* exportc = app.add_subcommand("export", "JSONL for the neural harness");
  std::string ex_corpus, ex_out, ex_mode = "org";
  std::uint64_t ex_seed = 42;
  double ex_fraction = 0.8;
  exportc->add_option("--corpus", ex_corpus, "Canonical JSONL corpus")->required()->check(CLI::ExistingFile);
  exportc->add_option("--out", ex_out, "Output file (default: stdout)");
  exportc->add_option("--mode", ex_mode, "org | enr")->check(CLI::IsMember({"org", "enr"}));
  exportc->add_option("--seed", ex_seed, "Split seed written into the split column");
  exportc->add_option("--train-fraction", ex_fraction, "Share of records tagged train")->check(CLI::Range(0.0, 1.0));
  FeatureFlags ex_ff;
  ex_ff.attach(exportc);

  // prompt
  auto* prompt = app.add_subcommand("prompt", "Render chat prompts as JSONL");
  std::string po_corpus, po_out, po_id;
  bool po_enrich = false;
  prompt->add_option("--corpus", po_corpus, "Canonical JSONL corpus")->required()->check(CLI::ExistingFile);
  prompt->add_option("--out", po_out, "Output file (default: stdout)");
  prompt->add_option("--id", po_id, "Only the record with this id");
  prompt->add_flag("--enrich", po_enrich, "Append the feature sentence");
  FeatureFlags po_ff;
  po_ff.attach(prompt);

  // llm-classify
  auto* llm = app.add_subcommand("llm-classify", "Label records through a chat-completion endpoint");
  std::string ll_corpus, ll_out, ll_endpoint, ll_key, ll_model_name;
  bool ll_enrich = false;
  int ll_retries = 3;
  long ll_timeout_ms = 30000, ll_backoff_ms = 500;
  std::size_t ll_in_flight = 4;
  llm->add_option("--corpus", ll_corpus, "Canonical JSONL corpus")->required()->check(CLI::ExistingFile);
  llm->add_option("--out", ll_out, "JSONL output: id, label, raw_response, error (default: stdout)");
  llm->add_option("--endpoint", ll_endpoint, "Chat-completion URL (env CQJ_LLM_ENDPOINT)");
  llm->add_option("--api-key", ll_key, "Bearer token (env CQJ_LLM_API_KEY)");
  llm->add_option("--model-name", ll_model_name, "Remote model name (env CQJ_LLM_MODEL)");
  llm->add_flag("--enrich", ll_enrich, "Append the feature sentence to each prompt");
  llm->add_option("--retries", ll_retries, "Retries for transient failures")->check(CLI::NonNegativeNumber);
  llm->add_option("--timeout-ms", ll_timeout_ms, "Per-request timeout")->check(CLI::PositiveNumber);
  llm->add_option("--backoff-ms", ll_backoff_ms, "First retry delay; doubles each retry")
      ->check(CLI::NonNegativeNumber);
  llm->add_option("--max-in-flight", ll_in_flight, "Concurrent requests")->check(CLI::PositiveNumber);
  FeatureFlags ll_ff;
  ll_ff.attach(llm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) {
      const fs::path presets_path = in_schemas_file.empty() ? data_dir() / "schemas.conf" : fs::path(in_schemas_file);
      const auto presets = cqj::load_schema_presets(presets_path);
      auto it = presets.find(in_schema);
      if (it == presets.end()) {
        std::cerr << fmt::format("error: unknown schema preset '{}' in {}\n", in_schema, presets_path.string());
        return kUsage;
      }
      const std::string errors_path = in_errors.empty() ? in_input + ".errors.tsv" : in_errors;
      log_config("ingest", {{"input", in_input}, {"schema", in_schema}, {"schemas_file", presets_path.string()},
                            {"out", in_out.empty() ? "-" : in_out}, {"errors", errors_path}});
      const auto result = cqj::parse_corpus(slurp(in_input), it->second);
      emit(in_out, cqj::write_jsonl(result.records));
      emit(errors_path, cqj::format_row_errors(result.errors));
      std::cerr << fmt::format("ingest: {} records, {} row errors\n", result.records.size(), result.errors.size());
      return kOk;
    }

    if (*analyze) {
      log_config("analyze", {{"what", an_what}, {"corpus", an_corpus}, {"format", an_format},
                             {"lexicon", an_ff.lexicon_name()}, {"templates", an_ff.templates_name()}});
      const auto ctx = an_ff.context();
      const auto records = cqj::load_jsonl(an_corpus);
      const auto feats = cqj::extract_features(records, ctx);
      std::string out;
      if (an_what == "templates") {
        const auto t = cqj::template_usefulness(records, feats, ctx.templates);
        out = an_format == "json" ? cqj::template_table_json(t)
              : an_format == "csv" ? cqj::template_table_csv(t)
                                   : cqj::template_table_markdown(t);
      } else if (an_what == "correlation") {
        std::vector<cqj::Label> labels;
        std::vector<cqj::FeatureVector> labeled;
        for (std::size_t i = 0; i < records.size(); ++i)
          if (records[i].label) {
            labels.push_back(*records[i].label);
            labeled.push_back(feats[i]);
          }
        const auto r = cqj::correlate(labeled, labels);
        out = an_format == "json" ? cqj::correlation_json(r)
              : an_format == "csv" ? cqj::correlation_csv(r)
                                   : cqj::correlation_markdown(r);
      } else {
        const std::map<std::string, cqj::GroupKey> keys{{"options", cqj::GroupKey::NOptions},
                                                        {"query-length", cqj::GroupKey::QueryLenBucket},
                                                        {"question-length", cqj::GroupKey::QuestionLenBucket},
                                                        {"query-type", cqj::GroupKey::QueryType}};
        const auto t = cqj::usefulness_rates(records, feats, keys.at(an_what));
        out = an_format == "json" ? cqj::rate_table_json(t)
              : an_format == "csv" ? cqj::rate_table_csv(t)
                                   : cqj::rate_table_markdown(t);
      }
      emit(an_out, out);
      return kOk;
    }

    if (*features) {
      log_config("features", {{"corpus", fe_corpus}, {"lexicon", fe_ff.lexicon_name()},
                              {"templates", fe_ff.templates_name()}});
      const auto ctx = fe_ff.context();
      const auto records = cqj::load_jsonl(fe_corpus);
      const auto feats = cqj::extract_features(records, ctx);
      std::string out;
      for (std::size_t i = 0; i < records.size(); ++i) out += feature_json(records[i], feats[i]).dump() + "\n";
      emit(fe_out, out);
      return kOk;
    }

    if (*train) {
      cqj::TrainConfig cfg;
      cfg.kind = *cqj::parse_model_kind(tr_model);
      cfg.mode = tr_enrich ? cqj::InputMode::Enr : cqj::InputMode::Org;
      cfg.split = {tr_fraction, tr_seed, !tr_no_stratify};
      cfg.tfidf.min_df = tr_min_df;
      const auto weighting =
          tr_weighting == "balanced" ? cqj::ClassWeighting::InverseFrequency : cqj::ClassWeighting::None;
      cfg.dtc.max_depth = tr_max_depth;
      cfg.dtc.min_samples_split = tr_min_split;
      cfg.dtc.class_weighting = weighting;
      cfg.rfc.n_trees = tr_trees;
      cfg.rfc.bootstrap = !tr_no_bootstrap;
      cfg.rfc.features_per_split = tr_mtry;
      cfg.rfc.seed = tr_seed;
      cfg.rfc.tree = cfg.dtc;
      cfg.rfc.n_threads = tr_threads;
      cfg.svc.C = tr_c;
      cfg.svc.tol = tr_tol;
      cfg.svc.max_iter = tr_max_iter;
      cfg.svc.seed = tr_seed;
      cfg.svc.class_weighting = weighting;
      log_config("train", {{"corpus", tr_corpus}, {"out", tr_out}, {"lexicon", tr_ff.lexicon_name()},
                           {"templates", tr_ff.templates_name()}, {"config", cqj::config_snapshot_json(cfg)}});

      const auto ctx = tr_ff.context();
      const auto records = cqj::load_jsonl(tr_corpus);
      const auto [train_set, test_set] = cqj::split(records, cfg.split);
      const auto bundle = cqj::train_bundle(train_set, cfg, ctx);
      emit(tr_out, cqj::save_model(bundle));
      std::cerr << fmt::format("train: {} train / {} held out, input dim {}\n", train_set.size(), test_set.size(),
                               cqj::input_dim(bundle.classifier));
      return kOk;
    }

    if (*evaluate) {
      log_config("evaluate", {{"model", ev_model}, {"corpus", ev_corpus},
                              {"baseline", ev_baseline.empty() ? "none" : ev_baseline},
                              {"split", ev_all ? "all" : "test"}});
      const auto bundle = cqj::load_model(slurp(ev_model));
      const auto records = cqj::load_jsonl(ev_corpus);
      auto test = ev_all ? records : cqj::split(records, bundle.split).second;
      auto report = cqj::evaluate(bundle, test);
      std::vector<cqj::EvalReport> table;
      if (!ev_baseline.empty()) {
        auto base = cqj::report_from_json(slurp(ev_baseline));
        report.improvement = cqj::Improvement{fs::path(ev_baseline).filename().string(), cqj::improvement(base, report)};
        table.push_back(std::move(base));
      }
      table.push_back(report);
      emit(ev_out, cqj::report_json(report));
      if (!ev_markdown.empty()) emit(ev_markdown, cqj::comparison_markdown(table));
      std::cerr << fmt::format("evaluate: macro F1 {:.4f} on {} records\n", report.macro.f1, report.test_size());
      return kOk;
    }

    if (*predict) {
      log_config("predict", {{"model", pr_model}, {"corpus", pr_corpus}});
      const auto bundle = cqj::load_model(slurp(pr_model));
      const auto records = cqj::load_jsonl(pr_corpus);
      const auto feats = cqj::extract_features(records, bundle.features);
      std::string out = "id\tlabel\tscores_bad_fair_good\n";
      for (std::size_t i = 0; i < records.size(); ++i) {
        const auto p = cqj::predict(bundle, records[i], feats[i]);
        out += fmt::format("{}\t{}\t{}\n", records[i].id, cqj::to_string(p.label), scores_field(p.scores));
      }
      emit(pr_out, out);
      return kOk;
    }

    if (*exportc) {
      log_config("export", {{"corpus", ex_corpus}, {"mode", ex_mode}, {"seed", std::to_string(ex_seed)},
                            {"train_fraction", fmt::format("{}", ex_fraction)}, {"lexicon", ex_ff.lexicon_name()}});
      const auto ctx = ex_ff.context();
      const auto records = cqj::load_jsonl(ex_corpus);
      const auto feats = cqj::extract_features(records, ctx);
      std::vector<cqj::Label> labels;
      for (const auto& r : records)
        if (r.label) labels.push_back(*r.label);
      std::vector<std::string> tags;
      if (labels.size() == records.size()) {
        const auto idx = cqj::split_indices(labels, {ex_fraction, ex_seed, true});
        tags.assign(records.size(), "test");
        for (auto i : idx.train) tags[i] = "train";
      }
      emit(ex_out, cqj::export_for_neural(records, feats, *cqj::parse_input_mode(ex_mode), tags));
      return kOk;
    }

    if (*prompt) {
      log_config("prompt", {{"corpus", po_corpus}, {"enrich", po_enrich ? "true" : "false"},
                            {"id", po_id.empty() ? "all" : po_id}});
      const auto ctx = po_ff.context();
      const auto records = cqj::load_jsonl(po_corpus);
      std::string out;
      bool found = false;
      for (const auto& r : records) {
        if (!po_id.empty() && r.id != po_id) continue;
        found = true;
        const auto p = cqj::build_prompt(r, po_enrich, cqj::extract_features(r, ctx));
        json j;
        j["id"] = r.id;
        j["system"] = p.system;
        j["user"] = p.user;
        out += j.dump() + "\n";
      }
      if (!found && !po_id.empty()) {
        std::cerr << fmt::format("error: no record with id '{}'\n", po_id);
        return kData;
      }
      emit(po_out, out);
      return kOk;
    }

    if (*llm) {
      auto ep = cqj::EndpointConfig::from_env();
      if (!ll_endpoint.empty()) ep.base_url = ll_endpoint;
      if (!ll_key.empty()) ep.api_key = ll_key;
      if (!ll_model_name.empty()) ep.model_name = ll_model_name;
      ep.max_retries = ll_retries;
      ep.timeout = std::chrono::milliseconds(ll_timeout_ms);
      ep.initial_backoff = std::chrono::milliseconds(ll_backoff_ms);
      if (ep.base_url.empty()) {
        std::cerr << "error: no endpoint; pass --endpoint or set CQJ_LLM_ENDPOINT\n";
        return kUsage;
      }
      log_config("llm-classify", {{"corpus", ll_corpus}, {"endpoint", ep.base_url}, {"model_name", ep.model_name},
                                  {"enrich", ll_enrich ? "true" : "false"}, {"retries", std::to_string(ep.max_retries)},
                                  {"max_in_flight", std::to_string(ll_in_flight)},
                                  {"api_key", ep.api_key.empty() ? "unset" : "set"}});
      const auto ctx = ll_ff.context();
      const auto records = cqj::load_jsonl(ll_corpus);
      const auto feats = cqj::extract_features(records, ctx);
      const auto outcomes = cqj::classify_remote_batch(records, feats, ll_enrich, ep, ll_in_flight);
      std::string out;
      std::size_t failed = 0;
      for (const auto& o : outcomes) {
        json j;
        j["id"] = o.id;
        j["label"] = o.label ? json(std::string(cqj::to_string(*o.label))) : json(nullptr);
        j["raw_response"] = o.raw_response;
        j["error"] = o.error.empty() ? json(nullptr) : json(o.error);
        out += j.dump() + "\n";
        if (!o.error.empty()) ++failed;
      }
      emit(ll_out, out);
      if (failed > 0) {
        std::cerr << fmt::format("llm-classify: {} of {} requests failed\n", failed, outcomes.size());
        return kRemote;
      }
      return kOk;
    }
  } catch (const cqj::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
