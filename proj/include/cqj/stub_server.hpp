#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cqj {

struct StubReply {
  int status = 200;
  std::string content;  // assistant message text for status 200
  std::chrono::milliseconds delay{0};
};

/// Local chat-completion endpoint for tests and offline runs. Listens on
/// 127.0.0.1 (an ephemeral port unless one is given) until destroyed.
class StubChatServer {
 public:
  using Handler = std::function<StubReply(const nlohmann::json& request)>;

  explicit StubChatServer(Handler handler, int port = 0);
  ~StubChatServer();
  StubChatServer(const StubChatServer&) = delete;
  StubChatServer& operator=(const StubChatServer&) = delete;

  int port() const { return port_; }
  /// URL of the completion route.
  std::string url() const;
  std::vector<nlohmann::json> requests() const;
  /// Blocks until the server stops (for the standalone stub binary).
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace cqj
