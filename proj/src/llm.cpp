#include "cqj/llm.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <regex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "text_util.hpp"

namespace cqj {

using json = nlohmann::ordered_json;

const std::string_view kSystemPrompt =
    "In a mixed-initiative conversational search system, a user's query might be ambiguous, and the system can "
    "ask a clarifying question to clarify the user's information need. In a real system, user satisfaction with "
    "the clarifying question is a very important task that should be considered. The prediction is a "
    "classification with three classes including: (1) Good, (2) Fair, and (3) Bad. In summary, this indicates "
    "that a Good clarifying question should accurately address and clarify different intents of the query. It "
    "should be fluent and grammatically correct. If a question fails in satisfying any of these factors but still "
    "is an acceptable clarifying question, it should be given a Fair label. Otherwise, a Bad label should be "
    "assigned to the question.";

const std::string_view kUserPromptTemplate =
    "Given the details about the satisfaction of a clarifying question, predict only the label for the following "
    "query, clarifying question, and the options for the clarification response: Query: '{}', clarifying "
    "question: '{}'.";

PromptPair build_prompt(const ClarificationRecord& record, bool enrich, const std::optional<FeatureVector>& features) {
  if (enrich && !features) throw Error(Errc::BadConfig, "enriched prompt needs a feature vector");
  PromptPair p;
  p.system = std::string(kSystemPrompt);

  // Positional fill so braces inside the query or question are left alone.
  const std::string_view frame = kUserPromptTemplate;
  const auto first = frame.find("{}");
  const auto second = frame.find("{}", first + 2);
  p.user.reserve(frame.size() + record.query.size() + record.question.size());
  p.user.append(frame.substr(0, first));
  p.user.append(record.query);
  p.user.append(frame.substr(first + 2, second - first - 2));
  p.user.append(record.question);
  p.user.append(frame.substr(second + 2));

  if (enrich) {
    const auto& f = *features;
    std::string options;
    for (const auto& o : record.options) options += (options.empty() ? "" : "; ") + o;
    p.user += fmt::format(" Additional features: question_length={}, rouge_precision={}, sentiment={}, "
                          "subjectivity={}, options: {}",
                          f.question_len_words, detail::fixed4(f.rouge_precision), detail::fixed4(f.polarity),
                          detail::fixed4(f.subjectivity), options.empty() ? "(none)" : options);
  }
  return p;
}

Label parse_label(std::string_view response) {
  static const std::regex word(R"(\b(good|fair|bad)\b)", std::regex::icase | std::regex::ECMAScript);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(response.begin(), response.end(), m, word))
    throw Error(Errc::Unparseable, fmt::format("no label word in response '{}'", response));
  const std::string found = detail::to_lower(m.str(1));
  if (found == "good") return Label::Good;
  if (found == "fair") return Label::Fair;
  return Label::Bad;
}

void EndpointConfig::validate() const {
  if (base_url.empty()) throw Error(Errc::BadConfig, "endpoint URL is empty");
  if (timeout.count() <= 0) throw Error(Errc::BadConfig, "timeout must be positive");
  if (max_retries < 0) throw Error(Errc::BadConfig, "max_retries must be >= 0");
}

EndpointConfig EndpointConfig::from_env() {
  EndpointConfig c;
  if (const char* v = std::getenv("CQJ_LLM_ENDPOINT")) c.base_url = v;
  if (const char* v = std::getenv("CQJ_LLM_API_KEY")) c.api_key = v;
  if (const char* v = std::getenv("CQJ_LLM_MODEL")) c.model_name = v;
  return c;
}

std::string chat_request_body(const PromptPair& prompt, const std::string& model_name) {
  json j;
  j["model"] = model_name;
  j["temperature"] = 0;
  j["messages"] = json::array({json{{"role", "system"}, {"content", prompt.system}},
                               json{{"role", "user"}, {"content", prompt.user}}});
  return j.dump();
}

std::string chat_response_text(std::string_view body) {
  try {
    const auto j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const std::exception& e) {
    throw Error(Errc::Unparseable, fmt::format("unexpected response shape: {}", e.what()));
  }
}

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(Errc::BadConfig, "endpoint URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  Url u;
  u.origin = url.substr(0, path_start);
  u.path = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);
  return u;
}

bool is_timeout(httplib::Error e) {
  return e == httplib::Error::Read || e == httplib::Error::Write || e == httplib::Error::ConnectionTimeout;
}

}  // namespace

RemoteResult classify_remote(const ClarificationRecord& record, bool enrich,
                             const std::optional<FeatureVector>& features, const EndpointConfig& config) {
  config.validate();
  const Url url = split_url(config.base_url);
  const std::string body = chat_request_body(build_prompt(record, enrich, features), config.model_name);

  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);

  std::optional<RemoteError> last;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config.initial_backoff * (1 << std::min(attempt - 1, 16)));
    auto res = client.Post(url.path, headers, body, "application/json");
    if (!res) {
      const auto err = res.error();
      last.emplace(is_timeout(err) ? Errc::Timeout : Errc::HttpError,
                   fmt::format("request failed: {}", httplib::to_string(err)), 0);
      continue;
    }
    if (res->status == 401 || res->status == 403)
      throw RemoteError(Errc::AuthError, fmt::format("endpoint rejected credentials ({})", res->status), res->status);
    if (res->status == 429 || res->status >= 500) {
      last.emplace(Errc::HttpError, fmt::format("HTTP {}", res->status), res->status);
      continue;
    }
    if (res->status != 200)
      throw RemoteError(Errc::HttpError, fmt::format("HTTP {}", res->status), res->status);

    std::string text;
    try {
      text = chat_response_text(res->body);
    } catch (const Error& e) {
      throw RemoteError(Errc::Unparseable, e.what(), res->status, res->body);
    }
    try {
      return {parse_label(text), text};
    } catch (const Error& e) {
      throw RemoteError(Errc::Unparseable, e.what(), res->status, text);
    }
  }
  throw *last;
}

std::vector<BatchOutcome> classify_remote_batch(const std::vector<ClarificationRecord>& records,
                                                const std::vector<FeatureVector>& features, bool enrich,
                                                const EndpointConfig& config, std::size_t max_in_flight) {
  if (records.size() != features.size()) throw Error(Errc::LengthMismatch, "records and features differ in length");
  config.validate();
  std::vector<BatchOutcome> out(records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      auto& o = out[i];
      o.id = records[i].id;
      try {
        auto r = classify_remote(records[i], enrich, features[i], config);
        o.label = r.label;
        o.raw_response = std::move(r.raw_response);
      } catch (const RemoteError& e) {
        o.error = e.what();
        o.raw_response = e.raw_response();
      } catch (const std::exception& e) {
        o.error = e.what();
      }
    }
  };
  const std::size_t n_workers = std::clamp<std::size_t>(max_in_flight, 1, std::max<std::size_t>(records.size(), 1));
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  pool.clear();
  return out;
}

}  // namespace cqj
