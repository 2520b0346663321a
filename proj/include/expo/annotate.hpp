#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "expo/annotate_types.hpp"
#include "expo/core.hpp"
#include "expo/errors.hpp"

namespace expo {

inline int word_count(std::string_view s) {
  int n = 0;
  bool in = false;
  for (char c : s) {
    bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (!space && !in) ++n;
    in = !space;
  }
  return n;
}

namespace detail {

inline nlohmann::json parse_response_object(const std::string& raw, std::vector<Violation>& out) {
  auto j = nlohmann::json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    out.push_back({Err::ParseFailure, "response must be valid JSON", {}});
    return nlohmann::json();
  }
  if (!j.is_object()) {
    out.push_back({Err::ParseFailure, "response must be a single JSON object", {}});
    return nlohmann::json();
  }
  return j;
}

inline bool require_string(const nlohmann::json& j, const char* field, std::vector<Violation>& out) {
  if (!j.contains(field) || !j[field].is_string()) {
    out.push_back({Err::ParseFailure, std::string("missing or non-string field '") + field + "'", {}});
    return false;
  }
  return true;
}

inline bool require_array(const nlohmann::json& j, const char* field, std::vector<Violation>& out) {
  if (!j.contains(field) || !j[field].is_array()) {
    out.push_back({Err::ParseFailure, std::string("missing or non-array field '") + field + "'", {}});
    return false;
  }
  return true;
}

}  // namespace detail

/// Validates a raw Stage-1 response against the extraction schema and the
/// posting it was generated for. Collects every violated rule before
/// rejecting; soft style rules (task length 8-50 words) become warnings.
inline Stage1Output validate_stage1(const std::string& raw, const PostingInput& input) {
  std::vector<Violation> bad;
  auto j = detail::parse_response_object(raw, bad);
  if (!bad.empty()) throw ValidationError(std::move(bad));

  bool have_id = detail::require_string(j, "posting_id", bad);
  bool have_groups = detail::require_array(j, "skills_groups", bad);
  bool have_tasks = detail::require_array(j, "tasks", bad);

  Stage1Output out;
  out.title = input.title;
  if (have_id) {
    out.posting_id = j["posting_id"].get<std::string>();
    if (out.posting_id != input.posting_id)
      bad.push_back({Err::PostingIdMismatch, "posting_id must echo the input ID",
                     "got '" + out.posting_id + "', want '" + input.posting_id + "'"});
  }

  std::unordered_set<std::string> specialized(input.specialized_skills.begin(),
                                              input.specialized_skills.end());
  std::unordered_set<std::string> common(input.common_skills.begin(), input.common_skills.end());
  bool no_input_skills = specialized.empty() && common.empty();

  std::unordered_set<std::string> group_ids;
  if (have_groups) {
    for (const auto& g : j["skills_groups"]) {
      if (!g.is_object() || !g.contains("group_id") || !g["group_id"].is_string() ||
          !g.contains("group_skills") || !g["group_skills"].is_array()) {
        bad.push_back({Err::ParseFailure, "each skill group needs group_id and group_skills", {}});
        continue;
      }
      SkillGroup group;
      group.group_id = g["group_id"].get<std::string>();
      if (!group_ids.insert(group.group_id).second)
        bad.push_back({Err::SchemaViolation, "duplicate group_id", group.group_id});
      if (!try_kind_from_group_id(group.group_id, group.kind)) {
        bad.push_back({Err::SchemaViolation, "group_id must start with S, C, or be NS0",
                       group.group_id});
        continue;
      }
      int n_spec = 0, n_common = 0;
      for (const auto& s : g["group_skills"]) {
        if (!s.is_string()) {
          bad.push_back({Err::ParseFailure, "group_skills entries must be strings", group.group_id});
          continue;
        }
        auto skill = s.get<std::string>();
        if (specialized.count(skill)) ++n_spec;
        else if (common.count(skill)) ++n_common;
        else
          out.warnings.push_back("group " + group.group_id + " lists skill '" + skill +
                                 "' not present in the posting input");
        group.skills.push_back(skill);
      }
      if (group.skills.size() > 5)
        bad.push_back({Err::SchemaViolation, "a group may hold at most 5 skills", group.group_id});
      if (n_spec > 0 && n_common > 0)
        bad.push_back({Err::MixedSkillGroup, "group mixes specialized and common skills",
                       group.group_id});
      else if (group.kind == SkillKind::Specialized && n_common > 0)
        bad.push_back({Err::MixedSkillGroup, "S-group holds common skills", group.group_id});
      else if (group.kind == SkillKind::Common && n_spec > 0)
        bad.push_back({Err::MixedSkillGroup, "C-group holds specialized skills", group.group_id});
      if (group.kind == SkillKind::NoSkills && !group.skills.empty())
        bad.push_back({Err::SchemaViolation, "NS0 must have no member skills", {}});
      out.groups.push_back(std::move(group));
    }
    if (no_input_skills) {
      bool lone_ns0 = out.groups.size() == 1 && out.groups[0].kind == SkillKind::NoSkills;
      if (!lone_ns0)
        bad.push_back({Err::SchemaViolation,
                       "posting without skills must yield exactly one NS0 group", {}});
    } else {
      for (const auto& g : out.groups)
        if (g.kind == SkillKind::NoSkills)
          bad.push_back({Err::SchemaViolation, "NS0 group only allowed when no skills exist", {}});
    }
  }

  if (have_tasks) {
    const auto& tasks = j["tasks"];
    if (tasks.size() < 3 || tasks.size() > 10)
      bad.push_back({Err::TaskCountOutOfRange, "need 3-10 tasks",
                     "got " + std::to_string(tasks.size())});
    std::unordered_set<std::string> task_ids;
    for (const auto& t : tasks) {
      if (!t.is_object() || !t.contains("task_id") || !t["task_id"].is_string() ||
          !t.contains("task") || !t["task"].is_string() || !t.contains("skill_group_id") ||
          !t["skill_group_id"].is_string()) {
        bad.push_back({Err::ParseFailure, "each task needs task_id, task, skill_group_id", {}});
        continue;
      }
      Stage1Task task;
      task.task_id = t["task_id"].get<std::string>();
      task.text = t["task"].get<std::string>();
      task.skill_group_id = t["skill_group_id"].get<std::string>();
      if (!task_ids.insert(task.task_id).second)
        bad.push_back({Err::SchemaViolation, "duplicate task_id", task.task_id});
      if (!group_ids.count(task.skill_group_id))
        bad.push_back({Err::DanglingGroupReference, "task references unknown skill group",
                       task.task_id + " -> " + task.skill_group_id});
      int words = word_count(task.text);
      if (words < 8 || words > 50)
        out.warnings.push_back("task " + task.task_id + " has " + std::to_string(words) +
                               " words, outside the 8-50 guideline");
      out.tasks.push_back(std::move(task));
    }
  }

  if (!bad.empty()) throw ValidationError(std::move(bad));
  return out;
}

/// Validates a raw Stage-2 response: every Stage-1 task labeled exactly once
/// with a known label and nothing else. Output follows Stage-1 task order.
inline Stage2Output validate_stage2(const std::string& raw, const Stage1Output& stage1) {
  std::vector<Violation> bad;
  auto j = detail::parse_response_object(raw, bad);
  if (!bad.empty()) throw ValidationError(std::move(bad));

  if (detail::require_string(j, "posting_id", bad)) {
    auto id = j["posting_id"].get<std::string>();
    if (id != stage1.posting_id)
      bad.push_back({Err::PostingIdMismatch, "posting_id must echo the Stage-1 posting",
                     "got '" + id + "', want '" + stage1.posting_id + "'"});
  }

  std::unordered_map<std::string, ExposureLabel> labels;
  if (detail::require_array(j, "task_exposures", bad)) {
    for (const auto& t : j["task_exposures"]) {
      if (!t.is_object() || !t.contains("task_id") || !t["task_id"].is_string() ||
          !t.contains("exposure_label") || !t["exposure_label"].is_string()) {
        bad.push_back({Err::ParseFailure, "each entry needs task_id and exposure_label", {}});
        continue;
      }
      auto id = t["task_id"].get<std::string>();
      auto raw_label = t["exposure_label"].get<std::string>();
      bool known = std::any_of(stage1.tasks.begin(), stage1.tasks.end(),
                               [&](const Stage1Task& s) { return s.task_id == id; });
      if (!known) {
        bad.push_back({Err::UnknownTaskId, "label refers to a task not extracted in Stage 1", id});
        continue;
      }
      if (labels.count(id)) {
        bad.push_back({Err::DuplicateTaskId, "task labeled more than once", id});
        continue;
      }
      ExposureLabel label;
      if (!try_parse_label(raw_label, label)) {
        bad.push_back({Err::UnknownLabel, "exposure_label must be E0, E1, or E2",
                       id + " -> '" + raw_label + "'"});
        continue;
      }
      labels.emplace(std::move(id), label);
    }
  }

  for (const auto& t : stage1.tasks)
    if (!labels.count(t.task_id))
      bad.push_back({Err::MissingTaskId, "task missing from the response", t.task_id});

  if (!bad.empty()) throw ValidationError(std::move(bad));

  Stage2Output out;
  out.posting_id = stage1.posting_id;
  out.task_exposures.reserve(stage1.tasks.size());
  for (const auto& t : stage1.tasks)
    out.task_exposures.emplace_back(t.task_id, labels.at(t.task_id));
  return out;
}

/// Joins Stage-2 labels onto Stage-1 tasks, assigning the kind implied by
/// each task's skill group and the corresponding raw weight.
inline std::vector<TaskAnnotation> join_annotations(const Stage1Output& stage1,
                                                    const Stage2Output& stage2) {
  std::unordered_map<std::string, SkillKind> kinds;
  for (const auto& g : stage1.groups) kinds.emplace(g.group_id, g.kind);

  std::unordered_map<std::string, ExposureLabel> labels;
  for (const auto& [id, label] : stage2.task_exposures) labels.emplace(id, label);

  std::vector<TaskAnnotation> out;
  out.reserve(stage1.tasks.size());
  for (const auto& t : stage1.tasks) {
    TaskAnnotation a;
    a.task_id = t.task_id;
    a.text = t.text;
    a.skill.group_id = t.skill_group_id;
    a.skill.kind = kinds.at(t.skill_group_id);
    a.raw_weight = raw_weight_for(a.skill.kind);
    a.label = labels.at(t.task_id);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace expo
