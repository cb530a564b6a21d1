#include "cqj/stub_server.hpp"

#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "cqj/common.hpp"

namespace cqj {

struct StubChatServer::Impl {
  httplib::Server server;
  std::thread thread;
  Handler handler;
  mutable std::mutex mutex;
  std::vector<nlohmann::json> requests;
};

StubChatServer::StubChatServer(Handler handler, int port) : impl_(std::make_unique<Impl>()) {
  impl_->handler = std::move(handler);
  auto* impl = impl_.get();
  impl_->server.Post("/v1/chat/completions", [impl](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    {
      std::lock_guard lock(impl->mutex);
      impl->requests.push_back(body);
    }
    StubReply reply = impl->handler(body);
    if (reply.delay.count() > 0) std::this_thread::sleep_for(reply.delay);
    res.status = reply.status;
    if (reply.status == 200) {
      nlohmann::json out;
      out["object"] = "chat.completion";
      out["choices"] = nlohmann::json::array(
          {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", reply.content}}}, {"finish_reason", "stop"}}});
      res.set_content(out.dump(), "application/json");
    } else {
      res.set_content(R"({"error":{"message":"stub failure"}})", "application/json");
    }
  });
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
  } else if (impl_->server.bind_to_port("127.0.0.1", port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) throw Error(Errc::Io, "stub server could not bind");
  impl_->thread = std::thread([impl] { impl->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

StubChatServer::~StubChatServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string StubChatServer::url() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
}

std::vector<nlohmann::json> StubChatServer::requests() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->requests;
}

void StubChatServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace cqj
