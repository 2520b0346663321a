#pragma once

#include <chrono>
#include <cstdlib>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "expo/backend.hpp"
#include "expo/errors.hpp"

namespace expo {

/// Chat-completions style adapter: one POST per request carrying
/// {model, messages, temperature}; the reply text is the first choice's
/// message content. The bearer token, when present, comes from the
/// AI_EXPOSURE_API_KEY environment variable.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(std::string endpoint, int timeout_seconds = 120)
      : timeout_seconds_(timeout_seconds) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
      throw Error(Err::ConfigError, "backend endpoint must include a scheme: " + endpoint);
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      base_ = endpoint;
      path_ = "/";
    } else {
      base_ = endpoint.substr(0, path_start);
      path_ = endpoint.substr(path_start);
    }
    if (const char* key = std::getenv("AI_EXPOSURE_API_KEY")) api_key_ = key;
  }

  GenerationResponse generate(const GenerationRequest& request) override {
    nlohmann::ordered_json body;
    body["model"] = request.model;
    body["messages"] = nlohmann::ordered_json::array(
        {nlohmann::ordered_json{{"role", "user"}, {"content", request.prompt}}});
    body["temperature"] = request.temperature;

    // A client per call keeps generate() safe from concurrent workers.
    httplib::Client client(base_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    auto elapsed = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    if (!res)
      throw TransportError("no response from " + base_ + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw TransportError("backend returned HTTP " + std::to_string(res->status));

    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("choices") || j["choices"].empty())
      throw Error(Err::ParseFailure, "backend reply carries no choices");
    const auto& choice = j["choices"][0];
    GenerationResponse out;
    if (choice.contains("message") && choice["message"].contains("content"))
      out.text = choice["message"]["content"].get<std::string>();
    else if (choice.contains("text"))
      out.text = choice["text"].get<std::string>();
    else
      throw Error(Err::ParseFailure, "backend reply carries no text choice");
    if (j.contains("usage")) {
      out.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      out.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
    out.latency_ms = elapsed;
    return out;
  }

 private:
  std::string base_, path_, api_key_;
  int timeout_seconds_;
};

}  // namespace expo
