#pragma once

// Hand-written malformed Stage-1/Stage-2 responses, each tagged with the
// error class the validator must raise. Shared by the unit suite and the
// acceptance suite.

#include <string>
#include <vector>

#include "expo/annotate_types.hpp"
#include "expo/errors.hpp"

namespace corpus {

struct MalformedCase {
  const char* name;
  int stage;  // 1 or 2
  const char* raw;
  expo::Err expected;
};

// Fixture the Stage-1 cases are validated against.
inline expo::PostingInput fixture_input() {
  expo::PostingInput in;
  in.posting_id = "p-42";
  in.title = "Data Analyst";
  in.body = "Analyze sales data. Build dashboards. Write summary reports.";
  in.specialized_skills = {"SQL", "Python"};
  in.common_skills = {"Communication"};
  return in;
}

// Fixture the Stage-2 cases are validated against.
inline expo::Stage1Output fixture_stage1() {
  expo::Stage1Output s;
  s.posting_id = "p-42";
  s.title = "Data Analyst";
  s.groups = {{"S1", {"SQL", "Python"}, expo::SkillKind::Specialized},
              {"C1", {"Communication"}, expo::SkillKind::Common}};
  s.tasks = {{"t1", "analyze weekly sales data in SQL warehouses for three regions", "S1"},
             {"t2", "build interactive dashboards that track revenue and churn metrics", "S1"},
             {"t3", "write summary reports and communicate findings to account managers", "C1"}};
  return s;
}

inline const std::vector<MalformedCase>& cases() {
  static const std::vector<MalformedCase> kCases = {
      // ---- Stage 1 ----
      {"s1-not-json", 1, "the model refused to answer", expo::Err::ParseFailure},
      {"s1-array", 1, "[1,2,3]", expo::Err::ParseFailure},
      {"s1-truncated", 1, R"({"posting_id": "p-42", "skills_groups": [)", expo::Err::ParseFailure},
      {"s1-missing-groups", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every week","skill_group_id":"S1"},{"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"S1"},{"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"S1"}]})",
       expo::Err::ParseFailure},
      {"s1-missing-tasks", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Python"]}]})",
       expo::Err::ParseFailure},
      {"s1-wrong-posting-id", 1,
       R"({"posting_id":"p-999","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Python"]},{"group_id":"C1","group_skills":["Communication"]}],"tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every single week","skill_group_id":"S1"},{"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"S1"},{"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"C1"}]})",
       expo::Err::PostingIdMismatch},
      {"s1-two-tasks", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Python"]},{"group_id":"C1","group_skills":["Communication"]}],"tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every single week","skill_group_id":"S1"},{"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"S1"}]})",
       expo::Err::TaskCountOutOfRange},
      {"s1-eleven-tasks", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Python"]},{"group_id":"C1","group_skills":["Communication"]}],"tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every single week","skill_group_id":"S1"},{"task_id":"t2","task":"build dashboards for revenue tracking across all product lines","skill_group_id":"S1"},{"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"C1"},{"task_id":"t4","task":"reconcile data quality issues between warehouse and reporting layers","skill_group_id":"S1"},{"task_id":"t5","task":"maintain the metrics catalog and its documentation for analysts","skill_group_id":"S1"},{"task_id":"t6","task":"schedule recurring extracts for downstream partner teams each morning","skill_group_id":"S1"},{"task_id":"t7","task":"present quarterly findings to the commercial leadership review board","skill_group_id":"C1"},{"task_id":"t8","task":"tune slow queries that feed the executive daily dashboard","skill_group_id":"S1"},{"task_id":"t9","task":"document table lineage for audited financial reporting pipelines","skill_group_id":"S1"},{"task_id":"t10","task":"train new analysts on the internal reporting toolchain basics","skill_group_id":"C1"},{"task_id":"t11","task":"archive stale dashboards and retire unused extracts each quarter","skill_group_id":"S1"}]})",
       expo::Err::TaskCountOutOfRange},
      {"s1-zero-tasks", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Python"]},{"group_id":"C1","group_skills":["Communication"]}],"tasks":[]})",
       expo::Err::TaskCountOutOfRange},
      {"s1-dangling-group", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Python"]},{"group_id":"C1","group_skills":["Communication"]}],"tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every single week","skill_group_id":"S9"},{"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"S1"},{"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"C1"}]})",
       expo::Err::DanglingGroupReference},
      {"s1-common-in-s-group", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Communication"]},{"group_id":"C1","group_skills":[]}],"tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every single week","skill_group_id":"S1"},{"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"S1"},{"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"C1"}]})",
       expo::Err::MixedSkillGroup},
      {"s1-specialized-in-c-group", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["Python"]},{"group_id":"C1","group_skills":["SQL"]}],"tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every single week","skill_group_id":"S1"},{"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"S1"},{"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"C1"}]})",
       expo::Err::MixedSkillGroup},
      {"s1-mixed-group", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Python","Communication"]}],"tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every single week","skill_group_id":"S1"},{"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"S1"},{"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"S1"}]})",
       expo::Err::MixedSkillGroup},
      {"s1-bad-group-prefix", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"X1","group_skills":["SQL"]},{"group_id":"C1","group_skills":["Communication"]}],"tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every single week","skill_group_id":"X1"},{"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"X1"},{"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"C1"}]})",
       expo::Err::SchemaViolation},
      {"s1-oversized-group", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Python","Spark","Airflow","dbt","Snowflake"]},{"group_id":"C1","group_skills":["Communication"]}],"tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every single week","skill_group_id":"S1"},{"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"S1"},{"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"C1"}]})",
       expo::Err::SchemaViolation},
      {"s1-ns0-despite-skills", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Python"]},{"group_id":"NS0","group_skills":[]}],"tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every single week","skill_group_id":"S1"},{"task_id":"t2","task":"build dashboards that track revenue and churn for managers","skill_group_id":"NS0"},{"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"S1"}]})",
       expo::Err::SchemaViolation},
      {"s1-duplicate-task-ids", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Python"]},{"group_id":"C1","group_skills":["Communication"]}],"tasks":[{"task_id":"t1","task":"analyze sales data across regional warehouses every single week","skill_group_id":"S1"},{"task_id":"t1","task":"build dashboards that track revenue and churn for managers","skill_group_id":"S1"},{"task_id":"t3","task":"write summary reports for account managers and field teams","skill_group_id":"C1"}]})",
       expo::Err::SchemaViolation},
      {"s1-task-not-object", 1,
       R"({"posting_id":"p-42","posting_title":"Data Analyst","skills_groups":[{"group_id":"S1","group_skills":["SQL","Python"]},{"group_id":"C1","group_skills":["Communication"]}],"tasks":["analyze sales data","build dashboards","write reports"]})",
       expo::Err::ParseFailure},

      // ---- Stage 2 ----
      {"s2-not-json", 2, "E1 E1 E0", expo::Err::ParseFailure},
      {"s2-array", 2, R"([{"task_id":"t1","exposure_label":"E1"}])", expo::Err::ParseFailure},
      {"s2-missing-exposures", 2, R"({"posting_id":"p-42"})", expo::Err::ParseFailure},
      {"s2-omits-t3", 2,
       R"({"posting_id":"p-42","task_exposures":[{"task_id":"t1","exposure_label":"E1"},{"task_id":"t2","exposure_label":"E0"}]})",
       expo::Err::MissingTaskId},
      {"s2-duplicate-t2", 2,
       R"({"posting_id":"p-42","task_exposures":[{"task_id":"t1","exposure_label":"E1"},{"task_id":"t2","exposure_label":"E0"},{"task_id":"t2","exposure_label":"E1"},{"task_id":"t3","exposure_label":"E2"}]})",
       expo::Err::DuplicateTaskId},
      {"s2-label-e3", 2,
       R"({"posting_id":"p-42","task_exposures":[{"task_id":"t1","exposure_label":"E3"},{"task_id":"t2","exposure_label":"E0"},{"task_id":"t3","exposure_label":"E1"}]})",
       expo::Err::UnknownLabel},
      {"s2-label-lowercase", 2,
       R"({"posting_id":"p-42","task_exposures":[{"task_id":"t1","exposure_label":"e1"},{"task_id":"t2","exposure_label":"E0"},{"task_id":"t3","exposure_label":"E1"}]})",
       expo::Err::UnknownLabel},
      {"s2-extra-task", 2,
       R"({"posting_id":"p-42","task_exposures":[{"task_id":"t1","exposure_label":"E1"},{"task_id":"t2","exposure_label":"E0"},{"task_id":"t3","exposure_label":"E1"},{"task_id":"t9","exposure_label":"E1"}]})",
       expo::Err::UnknownTaskId},
      {"s2-wrong-posting-id", 2,
       R"({"posting_id":"p-7","task_exposures":[{"task_id":"t1","exposure_label":"E1"},{"task_id":"t2","exposure_label":"E0"},{"task_id":"t3","exposure_label":"E1"}]})",
       expo::Err::PostingIdMismatch},
      {"s2-entry-missing-label", 2,
       R"({"posting_id":"p-42","task_exposures":[{"task_id":"t1"},{"task_id":"t2","exposure_label":"E0"},{"task_id":"t3","exposure_label":"E1"}]})",
       expo::Err::ParseFailure},
      {"s2-numeric-labels", 2,
       R"({"posting_id":"p-42","task_exposures":[{"task_id":"t1","exposure_label":1},{"task_id":"t2","exposure_label":0},{"task_id":"t3","exposure_label":2}]})",
       expo::Err::ParseFailure},
      {"s2-empty-exposures", 2, R"({"posting_id":"p-42","task_exposures":[]})",
       expo::Err::MissingTaskId},
  };
  return kCases;
}

}  // namespace corpus
