#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "expo/errors.hpp"
#include "expo/numeric.hpp"

namespace expo {

/// Task-level exposure tier: E0 no exposure, E1 direct exposure via an
/// off-the-shelf generative tool, E2 exposure via a thin software layer.
enum class ExposureLabel { E0, E1, E2 };

inline const char* label_name(ExposureLabel l) {
  switch (l) {
    case ExposureLabel::E0: return "E0";
    case ExposureLabel::E1: return "E1";
    case ExposureLabel::E2: return "E2";
  }
  return "?";
}

inline bool try_parse_label(std::string_view s, ExposureLabel& out) {
  if (s == "E0") { out = ExposureLabel::E0; return true; }
  if (s == "E1") { out = ExposureLabel::E1; return true; }
  if (s == "E2") { out = ExposureLabel::E2; return true; }
  return false;
}

enum class SkillKind { Specialized, Common, NoSkills };

inline const char* skill_kind_name(SkillKind k) {
  switch (k) {
    case SkillKind::Specialized: return "Specialized";
    case SkillKind::Common: return "Common";
    case SkillKind::NoSkills: return "NoSkills";
  }
  return "?";
}

// Group-id prefix determines the kind: S* specialized, C* common, NS0 none.
inline bool try_kind_from_group_id(std::string_view id, SkillKind& out) {
  if (id == "NS0") { out = SkillKind::NoSkills; return true; }
  if (!id.empty() && id[0] == 'S') { out = SkillKind::Specialized; return true; }
  if (!id.empty() && id[0] == 'C') { out = SkillKind::Common; return true; }
  return false;
}

inline SkillKind kind_from_group_id(std::string_view id) {
  SkillKind k;
  if (!try_kind_from_group_id(id, k))
    throw Error(Err::SchemaViolation, "bad skill group id '" + std::string(id) + "'");
  return k;
}

inline bool try_parse_skill_kind(std::string_view s, SkillKind& out) {
  if (s == "Specialized") { out = SkillKind::Specialized; return true; }
  if (s == "Common") { out = SkillKind::Common; return true; }
  if (s == "NoSkills") { out = SkillKind::NoSkills; return true; }
  return false;
}

/// Specialized-skill tasks carry twice the raw weight of common-skill ones;
/// tasks with no matched skills are weighted like common tasks.
inline int raw_weight_for(SkillKind k) { return k == SkillKind::Specialized ? 2 : 1; }

struct SkillMatch {
  std::string group_id;
  SkillKind kind = SkillKind::Common;
};

/// One extracted task, its skill-group match, raw weight, and exposure label.
struct TaskAnnotation {
  std::string task_id;
  std::string text;
  SkillMatch skill;
  int raw_weight = 1;
  ExposureLabel label = ExposureLabel::E0;
};

/// Posting-level weighted exposure shares and the three summary indices.
/// Invariants: shares sum to 1, alpha <= beta <= gamma, beta = (alpha+gamma)/2.
struct PostingExposure {
  std::string posting_id;
  std::array<double, 3> shares{1.0, 0.0, 0.0};  // E0, E1, E2
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  int n_tasks = 0;

  double share_e0() const { return shares[0]; }
  double share_e1() const { return shares[1]; }
  double share_e2() const { return shares[2]; }
};

/// Normalizes raw task weights to sum to one, preserving order.
inline std::vector<double> normalize_weights(const std::vector<TaskAnnotation>& tasks) {
  if (tasks.empty())
    throw Error(Err::EmptyTaskList, "posting has no usable tasks");
  long total = 0;
  for (const auto& t : tasks) {
    if (t.raw_weight <= 0)
      throw Error(Err::SchemaViolation, "raw weight must be positive");
    total += t.raw_weight;
  }
  std::vector<double> w;
  w.reserve(tasks.size());
  for (const auto& t : tasks)
    w.push_back(static_cast<double>(t.raw_weight) / static_cast<double>(total));
  return w;
}

/// Aggregates task labels into weighted E0/E1/E2 shares and the three
/// indices: alpha counts E1 only, gamma counts E1+E2, beta weights E2 by 0.5.
inline PostingExposure compute_exposure(const std::string& posting_id,
                                        const std::vector<TaskAnnotation>& tasks) {
  auto weights = normalize_weights(tasks);
  KahanSum share[3];
  for (size_t j = 0; j < tasks.size(); ++j)
    share[static_cast<int>(tasks[j].label)].add(weights[j]);

  PostingExposure e;
  e.posting_id = posting_id;
  e.shares = {share[0].value(), share[1].value(), share[2].value()};
  e.n_tasks = static_cast<int>(tasks.size());
  e.alpha = e.shares[1];
  e.gamma = e.shares[1] + e.shares[2];
  e.beta = 0.5 * (e.alpha + e.gamma);
  return e;
}

/// Generalized index share_E1 + e2_weight * share_E2; reproduces alpha at 0,
/// beta at 0.5, gamma at 1.
inline double custom_index(const PostingExposure& e, double e2_weight) {
  if (!(e2_weight >= 0.0 && e2_weight <= 1.0))
    throw Error(Err::OutOfRangeWeight, "e2 weight must lie in [0,1]");
  return e.shares[1] + e2_weight * e.shares[2];
}

}  // namespace expo
