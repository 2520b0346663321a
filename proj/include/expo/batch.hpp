#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "expo/annotate.hpp"
#include "expo/backend.hpp"
#include "expo/prompts.hpp"

namespace expo {

/// Retry and parallelism policy for batch annotation. max_attempts bounds
/// generate() calls per stage; transport failures are retried, validation
/// failures are not (temperature 0 would reproduce them).
struct BatchPolicy {
  int max_attempts = 3;
  int max_in_flight = 4;
  std::string model = "default";
  double temperature = 0.0;
};

struct StageFailure {
  int stage = 0;  // 1 = extraction, 2 = classification
  Err error = Err::BackendUnavailable;
  std::string message;
  int attempts = 0;
};

struct PostingResult {
  std::string posting_id;
  std::vector<TaskAnnotation> tasks;
  std::vector<std::string> warnings;
  std::optional<StageFailure> failure;
  int stage1_attempts = 0;
  int stage2_attempts = 0;

  bool ok() const { return !failure.has_value(); }
};

namespace detail {

inline GenerationResponse generate_with_retry(Backend& backend, const GenerationRequest& req,
                                              int max_attempts, int& attempts) {
  attempts = 0;
  for (;;) {
    ++attempts;
    try {
      return backend.generate(req);
    } catch (const TransportError&) {
      if (attempts >= max_attempts) throw;
    }
  }
}

inline PostingResult annotate_one(const PostingInput& input, Backend& backend,
                                  const BatchPolicy& policy) {
  PostingResult result;
  result.posting_id = input.posting_id;

  GenerationRequest req1{std::string(kStage1TemplateId), render_stage1_prompt(input),
                         policy.model, policy.temperature};
  Stage1Output stage1;
  try {
    auto resp = generate_with_retry(backend, req1, policy.max_attempts, result.stage1_attempts);
    stage1 = validate_stage1(resp.text, input);
  } catch (const Error& e) {
    result.failure = StageFailure{1, e.code(), e.what(), result.stage1_attempts};
    return result;
  }
  result.warnings = stage1.warnings;

  GenerationRequest req2{std::string(kStage2TemplateId),
                         render_stage2_prompt(stage1, input.title), policy.model,
                         policy.temperature};
  try {
    auto resp = generate_with_retry(backend, req2, policy.max_attempts, result.stage2_attempts);
    auto stage2 = validate_stage2(resp.text, stage1);
    result.tasks = join_annotations(stage1, stage2);
  } catch (const Error& e) {
    result.failure = StageFailure{2, e.code(), e.what(), result.stage2_attempts};
  }
  return result;
}

}  // namespace detail

/// Runs the two-stage pipeline over a batch. Every input yields exactly one
/// result, in input order; per-posting failures never abort the batch.
/// Requests run on up to max_in_flight worker threads.
inline std::vector<PostingResult> annotate_batch(const std::vector<PostingInput>& inputs,
                                                 Backend& backend,
                                                 const BatchPolicy& policy = {}) {
  std::vector<PostingResult> results(inputs.size());
  if (inputs.empty()) return results;

  int workers = std::max(1, std::min<int>(policy.max_in_flight,
                                          static_cast<int>(inputs.size())));
  std::atomic<size_t> next{0};
  auto run = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= inputs.size()) return;
      try {
        results[i] = detail::annotate_one(inputs[i], backend, policy);
      } catch (const std::exception& e) {
        results[i].posting_id = inputs[i].posting_id;
        results[i].failure = StageFailure{0, Err::IoError, e.what(), 0};
      }
    }
  };

  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  return results;
}

}  // namespace expo
