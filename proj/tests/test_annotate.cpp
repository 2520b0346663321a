#include <atomic>
#include <random>
#include <set>

#include <catch2/catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include "expo/annotate.hpp"
#include "expo/backend.hpp"
#include "expo/batch.hpp"
#include "expo/prompts.hpp"
#include "malformed_corpus.hpp"

using namespace expo;

namespace {

PostingInput make_input(const std::string& id) {
  PostingInput in;
  in.posting_id = id;
  in.title = "Operations Coordinator";
  in.body = "Coordinate daily shipping schedules with carriers and update the routing system. "
            "Prepare weekly throughput reports for the site manager. "
            "Investigate delayed shipments and document root causes. "
            "Train new associates on the scanning workflow.";
  in.specialized_skills = {"Logistics", "Routing Software", "Inventory Control"};
  in.common_skills = {"Communication", "Teamwork"};
  return in;
}

// Deterministic flaky wrapper: the first `failures` calls raise a transport
// error, later calls delegate.
class FlakyBackend : public Backend {
 public:
  FlakyBackend(Backend& inner, int failures) : inner_(inner), remaining_(failures) {}

  GenerationResponse generate(const GenerationRequest& request) override {
    if (remaining_.fetch_sub(1) > 0) throw TransportError("synthetic transport failure");
    return inner_.generate(request);
  }

 private:
  Backend& inner_;
  std::atomic<int> remaining_;
};

// Returns garbage for selected postings at the chosen stage.
class CorruptingBackend : public Backend {
 public:
  CorruptingBackend(Backend& inner, std::set<std::string> victims, std::string stage_id)
      : inner_(inner), victims_(std::move(victims)), stage_id_(std::move(stage_id)) {}

  GenerationResponse generate(const GenerationRequest& request) override {
    auto resp = inner_.generate(request);
    if (request.prompt_template_id != stage_id_) return resp;
    auto payload = nlohmann::json::parse(extract_prompt_input(request.prompt));
    std::string id = payload.contains("ID") ? payload["ID"].get<std::string>()
                                            : payload.value("posting_id", "");
    if (victims_.count(id)) resp.text = "<<corrupted output>>";
    return resp;
  }

 private:
  Backend& inner_;
  std::set<std::string> victims_;
  std::string stage_id_;
};

}  // namespace

TEST_CASE("stage-1 prompt rendering") {
  auto input = make_input("p-1");
  auto prompt = render_stage1_prompt(input);
  CHECK(prompt.find("Tasks must be grounded in the BODY text") != std::string::npos);
  CHECK(prompt.find("create exactly one group") != std::string::npos);
  CHECK(prompt.find("\"ID\": \"p-1\"") != std::string::npos);
  CHECK(prompt == render_stage1_prompt(input));  // byte-stable

  PostingInput bare;
  bare.posting_id = "p-2";
  auto p2 = render_stage1_prompt(bare);
  CHECK(p2.find("NS0") != std::string::npos);
}

TEST_CASE("stage-2 prompt rendering") {
  auto stage1 = corpus::fixture_stage1();
  auto prompt = render_stage2_prompt(stage1, stage1.title);
  CHECK(prompt.find("E1 (Direct exposure)") != std::string::npos);
  CHECK(prompt.find("Return ONE JSON object") != std::string::npos);

  auto payload = nlohmann::json::parse(extract_prompt_input(prompt));
  REQUIRE(payload["tasks"].is_array());
  CHECK(payload["tasks"].size() == 3);
  CHECK(payload["posting_id"] == "p-42");
}

TEST_CASE("malformed response corpus raises the tagged error class") {
  auto input = corpus::fixture_input();
  auto stage1 = corpus::fixture_stage1();
  for (const auto& c : corpus::cases()) {
    INFO(c.name);
    try {
      if (c.stage == 1)
        validate_stage1(c.raw, input);
      else
        validate_stage2(c.raw, stage1);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(e.has(c.expected));
    }
  }
}

TEST_CASE("a collectable response reports every violated rule at once") {
  // two tasks AND a dangling reference AND a wrong posting id
  std::string raw = R"({"posting_id":"p-7","posting_title":"Data Analyst",
      "skills_groups":[{"group_id":"S1","group_skills":["SQL"]}],
      "tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses each week","skill_group_id":"S1"},
               {"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"S9"}]})";
  try {
    validate_stage1(raw, corpus::fixture_input());
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(e.has(Err::PostingIdMismatch));
    CHECK(e.has(Err::TaskCountOutOfRange));
    CHECK(e.has(Err::DanglingGroupReference));
    CHECK(e.violations().size() >= 3);
  }
}

TEST_CASE("task length is a warning, not a rejection") {
  std::string raw = R"({"posting_id":"p-42","posting_title":"Data Analyst",
      "skills_groups":[{"group_id":"S1","group_skills":["SQL","Python"]},{"group_id":"C1","group_skills":["Communication"]}],
      "tasks":[{"task_id":"t1","task":"analyze data","skill_group_id":"S1"},
               {"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"S1"},
               {"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"C1"}]})";
  auto out = validate_stage1(raw, corpus::fixture_input());
  REQUIRE(out.tasks.size() == 3);
  bool warned = false;
  for (const auto& w : out.warnings)
    if (w.find("t1") != std::string::npos) warned = true;
  CHECK(warned);
}

TEST_CASE("mock backend round trip validates and joins") {
  MockBackend mock;
  auto input = make_input("p-77");
  GenerationRequest req1{std::string(kStage1TemplateId), render_stage1_prompt(input), "m", 0.0};
  auto resp1 = mock.generate(req1);
  auto stage1 = validate_stage1(resp1.text, input);
  CHECK(stage1.tasks.size() >= 3);
  CHECK(stage1.tasks.size() <= 10);

  GenerationRequest req2{std::string(kStage2TemplateId), render_stage2_prompt(stage1, input.title),
                         "m", 0.0};
  auto resp2 = mock.generate(req2);
  auto stage2 = validate_stage2(resp2.text, stage1);
  auto tasks = join_annotations(stage1, stage2);
  REQUIRE(tasks.size() == stage1.tasks.size());
  for (const auto& t : tasks) {
    CHECK(t.raw_weight == (t.skill.kind == SkillKind::Specialized ? 2 : 1));
  }

  // determinism
  CHECK(mock.generate(req1).text == resp1.text);
  CHECK(mock.generate(req2).text == resp2.text);
}

TEST_CASE("mock pipeline is total over random inputs") {
  MockBackend mock;
  std::mt19937_64 rng(2024);
  const char* bodies[] = {
      "One short sentence",
      "Install units. Check wiring. Test circuits. File reports; call the office! Done?",
      "",
      "Review applications and schedule interviews with hiring managers across four regions. "
      "Maintain the applicant tracking system. Draft offer letters.",
  };
  for (int rep = 0; rep < 40; ++rep) {
    PostingInput in;
    in.posting_id = "r-" + std::to_string(rep);
    in.title = rep % 3 ? "Specialist" : "";
    in.body = bodies[rng() % 4];
    for (uint64_t i = 0; i < rng() % 4; ++i)
      in.specialized_skills.push_back("Skill" + std::to_string(i));
    for (uint64_t i = 0; i < rng() % 3; ++i)
      in.common_skills.push_back("Soft" + std::to_string(i));

    auto r1 = mock.generate({std::string(kStage1TemplateId), render_stage1_prompt(in), "m", 0.0});
    auto s1 = validate_stage1(r1.text, in);
    auto r2 = mock.generate(
        {std::string(kStage2TemplateId), render_stage2_prompt(s1, in.title), "m", 0.0});
    auto s2 = validate_stage2(r2.text, s1);
    CHECK(s2.task_exposures.size() == s1.tasks.size());
  }
}

TEST_CASE("mock one-sentence body pads to three tasks") {
  MockBackend mock;
  PostingInput in;
  in.posting_id = "p-pad";
  in.title = "Clerk";
  in.body = "File incoming paperwork in the records room";
  auto r1 = mock.generate({std::string(kStage1TemplateId), render_stage1_prompt(in), "m", 0.0});
  auto s1 = validate_stage1(r1.text, in);
  CHECK(s1.tasks.size() == 3);
}

TEST_CASE("mock label frequencies match the target proportions") {
  long counts[3] = {0, 0, 0};
  const long n = 10000;
  for (long i = 0; i < n; ++i) {
    auto label = MockBackend::label_for("posting-" + std::to_string(i % 700),
                                        "task text number " + std::to_string(i));
    ++counts[static_cast<int>(label)];
  }
  CHECK(std::abs(counts[0] / double(n) - 0.5) < 0.02);
  CHECK(std::abs(counts[1] / double(n) - 0.3) < 0.02);
  CHECK(std::abs(counts[2] / double(n) - 0.2) < 0.02);
}

TEST_CASE("annotate_batch succeeds deterministically over the mock") {
  std::vector<PostingInput> inputs;
  for (int i = 0; i < 100; ++i) inputs.push_back(make_input("batch-" + std::to_string(i)));
  MockBackend mock;
  BatchPolicy policy;
  policy.max_in_flight = 8;
  auto a = annotate_batch(inputs, mock, policy);
  auto b = annotate_batch(inputs, mock, policy);
  REQUIRE(a.size() == 100);
  REQUIRE(b.size() == 100);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ok());
    CHECK(a[i].posting_id == inputs[i].posting_id);  // order preserved
    REQUIRE(b[i].ok());
    REQUIRE(a[i].tasks.size() == b[i].tasks.size());
    for (size_t j = 0; j < a[i].tasks.size(); ++j) {
      CHECK(a[i].tasks[j].label == b[i].tasks[j].label);
      CHECK(a[i].tasks[j].text == b[i].tasks[j].text);
    }
  }
}

TEST_CASE("a malformed posting fails alone") {
  std::vector<PostingInput> inputs;
  for (int i = 0; i < 10; ++i) inputs.push_back(make_input("iso-" + std::to_string(i)));
  MockBackend mock;
  CorruptingBackend corrupting(mock, {"iso-4"}, std::string(kStage1TemplateId));
  auto results = annotate_batch(inputs, corrupting, {});
  int ok = 0;
  for (const auto& r : results) {
    if (r.ok()) ++ok;
    else {
      CHECK(r.posting_id == "iso-4");
      REQUIRE(r.failure.has_value());
      CHECK(r.failure->stage == 1);
      CHECK(r.failure->error == Err::ParseFailure);
    }
  }
  CHECK(ok == 9);
}

TEST_CASE("transient transport failure retries and records attempts") {
  std::vector<PostingInput> inputs{make_input("retry-1")};
  MockBackend mock;
  FlakyBackend flaky(mock, 1);
  BatchPolicy policy;
  policy.max_attempts = 2;
  policy.max_in_flight = 1;
  auto results = annotate_batch(inputs, flaky, policy);
  REQUIRE(results.size() == 1);
  CHECK(results[0].ok());
  CHECK(results[0].stage1_attempts == 2);
  CHECK(results[0].stage2_attempts == 1);
}

TEST_CASE("exhausted retries yield a BackendUnavailable failure") {
  std::vector<PostingInput> inputs{make_input("down-1")};
  MockBackend mock;
  FlakyBackend flaky(mock, 100);
  BatchPolicy policy;
  policy.max_attempts = 3;
  policy.max_in_flight = 1;
  auto results = annotate_batch(inputs, flaky, policy);
  REQUIRE(results.size() == 1);
  REQUIRE(results[0].failure.has_value());
  CHECK(results[0].failure->error == Err::BackendUnavailable);
  CHECK(results[0].failure->attempts == 3);
}
