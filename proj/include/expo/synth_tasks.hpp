#pragma once

#include <functional>
#include <string>
#include <vector>

#include "expo/core.hpp"
#include "expo/synth.hpp"

namespace expo {

namespace detail {

inline const char* kTaskVerbs[] = {"review",  "prepare", "coordinate", "draft",
                                   "analyze", "update",  "process",    "organize"};
inline const char* kTaskObjects[] = {"client records",   "inventory reports", "project plans",
                                     "support tickets",  "billing documents", "onboarding files",
                                     "quality checks",   "team schedules"};

inline std::string synth_task_text(uint64_t h, int j) {
  std::string out = kTaskVerbs[h % 8];
  out += " the ";
  out += kTaskObjects[(h >> 3) % 8];
  out += " for workflow step ";
  out += std::to_string(j + 1);
  return out;  // eight words, inside the style guideline
}

}  // namespace detail

/// Task-level variant of the generator: each posting carries an annotation
/// list whose labels are drawn so the expected weighted index equals the
/// cell's ground-truth exposure. Feeds the exposure command end to end.
inline CellPanel generate_task_stream(
    const ScenarioSpec& spec,
    const std::function<void(const PostingRecord&, const std::vector<TaskAnnotation>&)>& sink) {
  std::mt19937_64 label_rng(mix_hash(spec.seed, 0x7a5c5u));
  std::vector<TaskAnnotation> tasks;
  return generate_stream(spec, [&](const PostingRecord& r) {
    double target = r.beta;
    double q2 = 0.8 * std::min(target, 1.0 - target);
    double q1 = target - 0.5 * q2;

    tasks.clear();
    uint64_t h = stable_hash64(r.posting_id, spec.seed);
    int n = 3 + static_cast<int>(h % 8);
    for (int j = 0; j < n; ++j) {
      TaskAnnotation t;
      t.task_id = "t" + std::to_string(j + 1);
      uint64_t hj = mix_hash(h, static_cast<uint64_t>(j) + 1);
      t.text = detail::synth_task_text(hj, j);
      bool specialized = (hj >> 32) & 1;
      t.skill.kind = specialized ? SkillKind::Specialized : SkillKind::Common;
      t.skill.group_id = specialized ? "S1" : "C1";
      t.raw_weight = raw_weight_for(t.skill.kind);
      double u = hash_to_unit(label_rng());
      t.label = u < q1 ? ExposureLabel::E1
                       : (u < q1 + q2 ? ExposureLabel::E2 : ExposureLabel::E0);
      tasks.push_back(std::move(t));
    }
    PostingRecord meta = r;
    // The exposure command recomputes these from the tasks.
    meta.n_tasks = n;
    meta.share_e0 = 1.0;
    meta.share_e1 = meta.share_e2 = 0.0;
    meta.alpha = meta.beta = meta.gamma = 0.0;
    sink(meta, tasks);
  });
}

}  // namespace expo
