#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cqj/stub_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Local chat-completion stand-in that answers every request with a fixed reply"};
  int port = 0;
  int status = 200;
  std::string reply = "Good";
  app.add_option("--port", port, "Port on 127.0.0.1 (0 picks a free one)");
  app.add_option("--reply", reply, "Assistant message content");
  app.add_option("--status", status, "HTTP status to answer with");
  CLI11_PARSE(app, argc, argv);

  try {
    cqj::StubChatServer server([&](const nlohmann::json&) { return cqj::StubReply{status, reply, {}}; }, port);
    std::cout << server.url() << std::endl;
    server.wait();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
