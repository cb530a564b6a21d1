#include <doctest.h>

#include <atomic>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cqj/llm.hpp"
#include "cqj/stub_server.hpp"
#include "support.hpp"

using namespace cqj;

namespace {

std::string golden(const std::string& name) {
  std::ifstream in(std::string(CQJ_GOLDEN_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

ClarificationRecord headache() {
  return test::make_record("h", "headache", "What do you want to know about headache?", {"symptom", "treatment"},
                           Label::Good);
}

EndpointConfig fast(const StubChatServer& s) {
  EndpointConfig c;
  c.base_url = s.url();
  c.api_key = "test-key";
  c.timeout = std::chrono::milliseconds(2000);
  c.initial_backoff = std::chrono::milliseconds(1);
  c.max_retries = 2;
  return c;
}

}  // namespace

TEST_SUITE("llm") {

TEST_CASE("prompt matches the golden files") {
  const auto r = headache();
  const auto plain = build_prompt(r, false);
  CHECK(plain.system == golden("system.txt"));
  CHECK(plain.user == golden("user_headache.txt"));
  CHECK(plain.user.find("Additional features") == std::string::npos);

  const auto f = extract_features(r, SentimentLexicon{}, default_templates());
  const auto rich = build_prompt(r, true, f);
  CHECK(rich.user == golden("user_headache_enriched.txt"));
  CHECK(rich.user.starts_with(plain.user));
  CHECK_THROWS_AS(build_prompt(r, true), Error);
}

TEST_CASE("braces in the inputs are left alone") {
  const auto r = test::make_record("b", "{}", "What is {}?", {}, Label::Good);
  const auto p = build_prompt(r, false);
  CHECK(p.user.find("Query: '{}', clarifying question: 'What is {}?'.") != std::string::npos);
}

TEST_CASE("label parsing") {
  CHECK(parse_label("Good") == Label::Good);
  CHECK(parse_label("The label is: fair.") == Label::Fair);
  CHECK(parse_label("BAD") == Label::Bad);
  CHECK(parse_label("Fair, not Good") == Label::Fair);
  CHECK_THROWS_AS(parse_label("I cannot decide."), Error);
  CHECK_THROWS_AS(parse_label("goodness"), Error);
  for (Label l : kAllLabels) CHECK(parse_label(to_string(l)) == l);
}

TEST_CASE("request body shape") {
  const auto body = nlohmann::json::parse(chat_request_body(build_prompt(headache(), false), "gpt-4"));
  CHECK(body["model"] == "gpt-4");
  CHECK(body["temperature"] == 0);
  REQUIRE(body["messages"].size() == 2);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][1]["role"] == "user");
  CHECK(chat_response_text(R"({"choices":[{"message":{"role":"assistant","content":"Fair"}}]})") == "Fair");
  CHECK_THROWS_AS(chat_response_text(R"({"choices":[]})"), Error);
}

TEST_CASE("endpoint config") {
  EndpointConfig c;
  CHECK_THROWS_AS(c.validate(), Error);
  c.base_url = "http://localhost:1";
  c.validate();
  c.max_retries = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("remote: good reply") {
  StubChatServer s([](const nlohmann::json&) { return StubReply{200, "good", {}}; });
  const auto r = classify_remote(headache(), false, std::nullopt, fast(s));
  CHECK(r.label == Label::Good);
  CHECK(r.raw_response == "good");
  const auto reqs = s.requests();
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0]["messages"][1]["content"].get<std::string>().find("headache") != std::string::npos);
}

TEST_CASE("remote: retries exhaust on 500") {
  StubChatServer s([](const nlohmann::json&) { return StubReply{500, "", {}}; });
  try {
    classify_remote(headache(), false, std::nullopt, fast(s));
    FAIL("expected HttpError");
  } catch (const RemoteError& e) {
    CHECK(e.code() == Errc::HttpError);
    CHECK(e.status() == 500);
  }
  CHECK(s.requests().size() == 3);
}

TEST_CASE("remote: transient failure then success") {
  std::atomic<int> calls{0};
  StubChatServer s([&](const nlohmann::json&) {
    return ++calls < 2 ? StubReply{429, "", {}} : StubReply{200, "Fair", {}};
  });
  CHECK(classify_remote(headache(), false, std::nullopt, fast(s)).label == Label::Fair);
  CHECK(calls == 2);
}

TEST_CASE("remote: unparseable reply keeps the raw text") {
  StubChatServer s([](const nlohmann::json&) { return StubReply{200, "It depends.", {}}; });
  try {
    classify_remote(headache(), false, std::nullopt, fast(s));
    FAIL("expected Unparseable");
  } catch (const RemoteError& e) {
    CHECK(e.code() == Errc::Unparseable);
    CHECK(e.raw_response() == "It depends.");
  }
  CHECK(s.requests().size() == 1);
}

TEST_CASE("remote: auth failures are not retried") {
  StubChatServer s([](const nlohmann::json&) { return StubReply{401, "", {}}; });
  try {
    classify_remote(headache(), false, std::nullopt, fast(s));
    FAIL("expected AuthError");
  } catch (const RemoteError& e) {
    CHECK(e.code() == Errc::AuthError);
  }
  CHECK(s.requests().size() == 1);
}

TEST_CASE("remote: slow endpoint times out") {
  StubChatServer s([](const nlohmann::json&) { return StubReply{200, "Good", std::chrono::milliseconds(600)}; });
  auto c = fast(s);
  c.timeout = std::chrono::milliseconds(150);
  c.max_retries = 0;
  try {
    classify_remote(headache(), false, std::nullopt, c);
    FAIL("expected Timeout");
  } catch (const RemoteError& e) {
    CHECK(e.code() == Errc::Timeout);
  }
}

TEST_CASE("remote batch keeps input order and captures failures") {
  StubChatServer s([](const nlohmann::json& req) {
    const auto user = req["messages"][1]["content"].get<std::string>();
    if (user.find("'q3'") != std::string::npos) return StubReply{200, "no idea", {}};
    return StubReply{200, user.find("'q1'") != std::string::npos ? "Bad" : "Good", {}};
  });
  std::vector<ClarificationRecord> recs;
  for (int i = 0; i < 6; ++i)
    recs.push_back(test::make_record("id" + std::to_string(i), "q" + std::to_string(i), "Which one?", {}, Label::Good));
  const std::vector<FeatureVector> fs(recs.size());
  const auto out = classify_remote_batch(recs, fs, false, fast(s), 3);
  REQUIRE(out.size() == 6);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].id == recs[i].id);
  CHECK(out[1].label == Label::Bad);
  CHECK(out[0].label == Label::Good);
  CHECK_FALSE(out[3].label.has_value());
  CHECK(out[3].raw_response == "no idea");
  CHECK_FALSE(out[3].error.empty());
}

}
