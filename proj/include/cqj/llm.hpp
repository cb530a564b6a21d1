#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqj/common.hpp"
#include "cqj/corpus.hpp"
#include "cqj/features.hpp"

namespace cqj {

struct PromptPair {
  std::string system;
  std::string user;
};

/// System message sent verbatim with every classification request.
extern const std::string_view kSystemPrompt;
/// User message frame; the two `{}` slots take the query and the question.
extern const std::string_view kUserPromptTemplate;

/// Fills the user frame with query and question. When `enrich` is set, a
/// sentence listing the four enrichment features and the options is
/// appended. Throws BadConfig when `enrich` is set without features.
PromptPair build_prompt(const ClarificationRecord& record, bool enrich,
                        const std::optional<FeatureVector>& features = std::nullopt);

/// First whole-word, case-insensitive occurrence of good/fair/bad.
/// Throws Error(Unparseable).
Label parse_label(std::string_view response);

struct EndpointConfig {
  /// Full URL of the chat-completion endpoint, e.g.
  /// `https://api.example.com/v1/chat/completions`. A bare host gets
  /// `/v1/chat/completions` appended.
  std::string base_url;
  std::string api_key;
  std::string model_name = "gpt-4";
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};

  /// Throws BadConfig.
  void validate() const;
  /// CQJ_LLM_ENDPOINT, CQJ_LLM_API_KEY, CQJ_LLM_MODEL (missing ones keep defaults).
  static EndpointConfig from_env();
};

/// Failure of a remote call. `status` is the last HTTP status (0 when the
/// connection failed); `raw_response` keeps unparseable model output.
class RemoteError : public Error {
 public:
  RemoteError(Errc code, const std::string& message, int status = 0, std::string raw_response = {})
      : Error(code, message), status_(status), raw_response_(std::move(raw_response)) {}

  int status() const { return status_; }
  const std::string& raw_response() const { return raw_response_; }

 private:
  int status_;
  std::string raw_response_;
};

/// `{"model": ..., "temperature": 0, "messages": [{role, content}, ...]}`.
std::string chat_request_body(const PromptPair& prompt, const std::string& model_name);
/// `choices[0].message.content` of a chat-completion response.
/// Throws Error(Unparseable) when the shape does not match.
std::string chat_response_text(std::string_view body);

struct RemoteResult {
  Label label = Label::Bad;
  std::string raw_response;
};

/// POSTs the prompt, retrying transient failures (connection errors,
/// timeouts, 429, 5xx) with exponential backoff. 401/403 fail immediately.
/// Throws RemoteError (Timeout, HttpError, AuthError, Unparseable).
RemoteResult classify_remote(const ClarificationRecord& record, bool enrich,
                             const std::optional<FeatureVector>& features, const EndpointConfig& config);

struct BatchOutcome {
  std::string id;
  std::optional<Label> label;
  std::string raw_response;
  std::string error;  // empty on success
};

/// Classifies every record with at most `max_in_flight` concurrent requests.
/// Outcomes come back in input order; per-record failures are captured.
std::vector<BatchOutcome> classify_remote_batch(const std::vector<ClarificationRecord>& records,
                                                const std::vector<FeatureVector>& features, bool enrich,
                                                const EndpointConfig& config, std::size_t max_in_flight);

}  // namespace cqj
