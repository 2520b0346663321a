#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "expo/annotate_types.hpp"
#include "expo/core.hpp"
#include "expo/errors.hpp"
#include "expo/numeric.hpp"
#include "expo/prompts.hpp"

namespace expo {

struct GenerationRequest {
  std::string prompt_template_id;
  std::string prompt;
  std::string model;
  double temperature = 0.0;
};

struct GenerationResponse {
  std::string text;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  double latency_ms = 0.0;
};

/// Raised when the generation service cannot be reached or answers with a
/// transport-level failure; the batch driver retries these.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& msg) : Error(Err::BackendUnavailable, msg) {}
};

/// Text-generation service handle. Implementations must tolerate concurrent
/// generate() calls from multiple worker threads.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual GenerationResponse generate(const GenerationRequest& request) = 0;
};

/// Deterministic offline backend. Stage 1 extracts sentences from BODY as
/// tasks (clamped to 3-10, padded when short) and assigns skill groups
/// round-robin with specialized groups first. Stage 2 labels each task from
/// a stable hash of (posting_id, task text), targeting 50% E0 / 30% E1 /
/// 20% E2.
class MockBackend : public Backend {
 public:
  GenerationResponse generate(const GenerationRequest& request) override {
    auto payload = extract_prompt_input(request.prompt);
    auto input = nlohmann::json::parse(payload, nullptr, false);
    if (input.is_discarded() || !input.is_object())
      throw Error(Err::ParseFailure, "mock backend: prompt carries no structured input");

    GenerationResponse resp;
    if (request.prompt_template_id == kStage1TemplateId)
      resp.text = stage1(input);
    else if (request.prompt_template_id == kStage2TemplateId)
      resp.text = stage2(input);
    else
      throw Error(Err::ConfigError,
                  "mock backend: unknown template '" + request.prompt_template_id + "'");
    resp.prompt_tokens = static_cast<long>(request.prompt.size() / 4);
    resp.completion_tokens = static_cast<long>(resp.text.size() / 4);
    return resp;
  }

  /// Label for one task under the mock scheme; exposed so tests can check
  /// the target proportions directly.
  static ExposureLabel label_for(std::string_view posting_id, std::string_view task_text) {
    uint64_t h = mix_hash(stable_hash64(posting_id), stable_hash64(task_text));
    uint64_t bucket = h % 100;
    if (bucket < 50) return ExposureLabel::E0;
    if (bucket < 80) return ExposureLabel::E1;
    return ExposureLabel::E2;
  }

  static std::vector<std::string> split_sentences(const std::string& body) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
      size_t b = cur.find_first_not_of(" \t\r\n");
      if (b != std::string::npos) {
        size_t e = cur.find_last_not_of(" \t\r\n");
        out.push_back(cur.substr(b, e - b + 1));
      }
      cur.clear();
    };
    for (char c : body) {
      if (c == '.' || c == '!' || c == '?' || c == ';' || c == '\n')
        flush();
      else
        cur += c;
    }
    flush();
    return out;
  }

 private:
  static std::string stage1(const nlohmann::json& input) {
    std::string id = input.value("ID", "");
    std::string title = input.value("TITLE_NAME", "");
    std::string body = input.value("BODY", "");
    std::vector<std::string> spec, common;
    if (input.contains("SPECIALIZED_SKILLS_NAME"))
      spec = input["SPECIALIZED_SKILLS_NAME"].get<std::vector<std::string>>();
    if (input.contains("COMMON_SKILLS_NAME"))
      common = input["COMMON_SKILLS_NAME"].get<std::vector<std::string>>();

    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    std::vector<std::string> group_ids;
    auto chunk = [&](const std::vector<std::string>& skills, char prefix) {
      for (size_t i = 0; i < skills.size(); i += 5) {
        std::string gid = std::string(1, prefix) + std::to_string(i / 5 + 1);
        std::vector<std::string> members(skills.begin() + i,
                                         skills.begin() + std::min(i + 5, skills.size()));
        groups.push_back({{"group_id", gid}, {"group_skills", members}});
        group_ids.push_back(gid);
      }
    };
    chunk(spec, 'S');
    chunk(common, 'C');
    if (group_ids.empty()) {
      groups.push_back({{"group_id", "NS0"}, {"group_skills", nlohmann::json::array()}});
      group_ids.push_back("NS0");
    }

    auto sentences = split_sentences(body);
    if (sentences.empty())
      sentences.push_back(title.empty() ? "carry out the duties described in this posting"
                                        : title);
    if (sentences.size() > 10) sentences.resize(10);
    size_t base = sentences.size();
    for (size_t k = 2; sentences.size() < 3; ++k)
      sentences.push_back(sentences[(sentences.size() - base) % base] + " (part " +
                          std::to_string(k) + ")");

    nlohmann::ordered_json tasks = nlohmann::ordered_json::array();
    for (size_t i = 0; i < sentences.size(); ++i)
      tasks.push_back({{"task_id", "t" + std::to_string(i + 1)},
                       {"task", sentences[i]},
                       {"skill_group_id", group_ids[i % group_ids.size()]}});

    nlohmann::ordered_json out;
    out["posting_id"] = id;
    out["posting_title"] = title;
    out["skills_groups"] = std::move(groups);
    out["tasks"] = std::move(tasks);
    return out.dump();
  }

  static std::string stage2(const nlohmann::json& input) {
    std::string id = input.value("posting_id", "");
    nlohmann::ordered_json exposures = nlohmann::ordered_json::array();
    if (input.contains("tasks") && input["tasks"].is_array()) {
      for (const auto& t : input["tasks"]) {
        std::string task_id = t.value("task_id", "");
        std::string text = t.value("task", "");
        exposures.push_back(
            {{"task_id", task_id}, {"exposure_label", label_name(label_for(id, text))}});
      }
    }
    nlohmann::ordered_json out;
    out["posting_id"] = id;
    out["task_exposures"] = std::move(exposures);
    return out.dump();
  }
};

}  // namespace expo
