#include <cstdlib>
#include <thread>

#include <catch2/catch_amalgamated.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "expo/backend.hpp"
#include "expo/batch.hpp"
#include "expo/http_backend.hpp"
#include "expo/prompts.hpp"

using namespace expo;

namespace {

// Serves the wire protocol locally, answering with the mock backend's text
// so the full HTTP path can be exercised offline.
struct LocalServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> requests{0};
  std::atomic<int> fail_next{0};
  nlohmann::json last_body;
  std::string last_auth;
  std::mutex mu;

  LocalServer() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                               httplib::Response& res) {
      ++requests;
      {
        std::lock_guard<std::mutex> lock(mu);
        last_body = nlohmann::json::parse(req.body, nullptr, false);
        last_auth = req.get_header_value("Authorization");
      }
      if (fail_next.fetch_sub(1) > 0) {
        res.status = 500;
        res.set_content("{\"error\":\"boom\"}", "application/json");
        return;
      }
      auto body = nlohmann::json::parse(req.body);
      std::string prompt = body["messages"][0]["content"].get<std::string>();
      std::string template_id =
          prompt.find("classify work tasks") != std::string::npos
              ? std::string(kStage2TemplateId)
              : std::string(kStage1TemplateId);
      MockBackend mock;
      auto inner = mock.generate({template_id, prompt, body["model"], 0.0});
      nlohmann::json reply = {
          {"choices", {{{"message", {{"role", "assistant"}, {"content", inner.text}}}}}},
          {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~LocalServer() {
    server.stop();
    thread.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  }
};

PostingInput tiny_input(const std::string& id) {
  PostingInput in;
  in.posting_id = id;
  in.title = "Dispatcher";
  in.body = "Assign drivers to routes. Monitor traffic alerts. Update delivery windows.";
  in.common_skills = {"Communication"};
  return in;
}

}  // namespace

TEST_CASE("http backend speaks the chat-completions wire shape") {
  LocalServer server;
  setenv("AI_EXPOSURE_API_KEY", "test-key-123", 1);
  HttpBackend backend(server.endpoint());

  auto input = tiny_input("http-1");
  GenerationRequest req{std::string(kStage1TemplateId), render_stage1_prompt(input),
                        "test-model", 0.0};
  auto resp = backend.generate(req);
  CHECK(!resp.text.empty());
  CHECK(resp.prompt_tokens == 11);
  CHECK(resp.completion_tokens == 7);

  {
    std::lock_guard<std::mutex> lock(server.mu);
    REQUIRE(server.last_body.is_object());
    CHECK(server.last_body["model"] == "test-model");
    CHECK(server.last_body["temperature"] == 0.0);
    REQUIRE(server.last_body["messages"].is_array());
    CHECK(server.last_body["messages"][0]["role"] == "user");
    CHECK(server.last_auth == "Bearer test-key-123");
  }
  unsetenv("AI_EXPOSURE_API_KEY");
}

TEST_CASE("http 500 raises a transport error and the batch retries it") {
  LocalServer server;
  unsetenv("AI_EXPOSURE_API_KEY");
  HttpBackend backend(server.endpoint());
  server.fail_next = 1;

  std::vector<PostingInput> inputs{tiny_input("http-retry")};
  BatchPolicy policy;
  policy.max_attempts = 3;
  policy.max_in_flight = 1;
  auto results = annotate_batch(inputs, backend, policy);
  REQUIRE(results.size() == 1);
  CHECK(results[0].ok());
  CHECK(results[0].stage1_attempts == 2);
}

TEST_CASE("http batch annotates end to end") {
  LocalServer server;
  unsetenv("AI_EXPOSURE_API_KEY");
  HttpBackend backend(server.endpoint());
  std::vector<PostingInput> inputs;
  for (int i = 0; i < 6; ++i) inputs.push_back(tiny_input("http-batch-" + std::to_string(i)));
  BatchPolicy policy;
  policy.max_in_flight = 3;
  auto results = annotate_batch(inputs, backend, policy);
  for (const auto& r : results) {
    CHECK(r.ok());
    CHECK(r.tasks.size() >= 3);
  }
  CHECK(server.requests.load() == 12);  // two stages per posting
}

TEST_CASE("unreachable endpoint exhausts retries") {
  HttpBackend backend("http://127.0.0.1:1/v1/chat/completions", /*timeout_seconds=*/1);
  std::vector<PostingInput> inputs{tiny_input("http-down")};
  BatchPolicy policy;
  policy.max_attempts = 2;
  policy.max_in_flight = 1;
  auto results = annotate_batch(inputs, backend, policy);
  REQUIRE(results.size() == 1);
  REQUIRE(results[0].failure.has_value());
  CHECK(results[0].failure->error == Err::BackendUnavailable);
  CHECK(results[0].failure->attempts == 2);
}
