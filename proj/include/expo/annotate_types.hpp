#pragma once

#include <string>
#include <vector>

#include "expo/core.hpp"

namespace expo {

/// Raw pipeline input for one posting.
struct PostingInput {
  std::string posting_id;
  std::string title;
  std::string body;
  std::vector<std::string> specialized_skills;
  std::vector<std::string> common_skills;
};

struct SkillGroup {
  std::string group_id;
  std::vector<std::string> skills;
  SkillKind kind = SkillKind::Common;
};

struct Stage1Task {
  std::string task_id;
  std::string text;
  std::string skill_group_id;
};

/// Validated output of the task-extraction stage.
struct Stage1Output {
  std::string posting_id;
  std::string title;
  std::vector<SkillGroup> groups;
  std::vector<Stage1Task> tasks;
  std::vector<std::string> warnings;  // soft-rule notes, e.g. task length
};

/// Validated output of the exposure-classification stage, ordered like the
/// Stage-1 task list.
struct Stage2Output {
  std::string posting_id;
  std::vector<std::pair<std::string, ExposureLabel>> task_exposures;
};

}  // namespace expo
