#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "expo/decompose.hpp"
#include "expo/io.hpp"
#include "expo/oaxaca.hpp"
#include "expo/panel.hpp"
#include "expo/records.hpp"

namespace expo {

using io::Table;
using io::TableCell;

inline Table decomposition_table(const std::vector<DecompResult>& results) {
  Table t;
  t.header = {"period", "total",  "composition", "within", "interaction",
              "m_cur",  "m_base", "gap",         "residual"};
  for (const auto& r : results)
    t.add_row({TableCell::str(period_label(r.period)), TableCell::val(r.total),
               TableCell::val(r.composition), TableCell::val(r.within),
               TableCell::val(r.interaction), TableCell::val(r.diagnostics.m_cur),
               TableCell::val(r.diagnostics.m_base), TableCell::val(r.diagnostics.gap),
               TableCell::val(r.diagnostics.residual)});
  return t;
}

inline Table twofold_table(const std::vector<TwofoldResult>& results) {
  Table t;
  t.header = {"period", "total", "composition", "within"};
  for (const auto& r : results)
    t.add_row({TableCell::str(period_label(r.period)), TableCell::val(r.total),
               TableCell::val(r.composition), TableCell::val(r.within)});
  return t;
}

inline Table sign_pattern_table(const std::vector<SignPatternBreakdown>& rows) {
  Table t;
  t.header = {"period",   "share_down_exposure_up", "share_up_exposure_down",
              "share_up_exposure_up", "share_down_exposure_down", "zero_change",
              "interaction"};
  for (const auto& r : rows)
    t.add_row({TableCell::str(period_label(r.period)), TableCell::val(r.neg_pos),
               TableCell::val(r.pos_neg), TableCell::val(r.pos_pos), TableCell::val(r.neg_neg),
               TableCell::val(r.zero_change_mass), TableCell::val(r.sum())});
  return t;
}

inline Table counterfactual_table(const std::vector<CounterfactualPath>& paths) {
  Table t;
  t.header = {"period", "observed", "composition_only", "within_only", "baseline_level"};
  for (const auto& p : paths)
    t.add_row({TableCell::str(period_label(p.period)), TableCell::val(p.observed),
               TableCell::val(p.composition_only), TableCell::val(p.within_only),
               TableCell::val(p.baseline_level)});
  return t;
}

inline Table contributions_table(
    const std::vector<std::pair<std::string, RelativeContributions>>& rows) {
  Table t;
  t.header = {"group", "composition_pct", "within_pct", "interaction_pct"};
  for (const auto& [label, c] : rows)
    t.add_row({TableCell::str(label), TableCell::val(c.composition_pct),
               TableCell::val(c.within_pct), TableCell::val(c.interaction_pct)});
  return t;
}

inline Table ob_summary_table(const std::vector<std::pair<std::string, ObResult>>& rows) {
  Table t;
  t.header = {"group", "pre_mean", "post_mean", "difference", "explained", "unexplained"};
  for (const auto& [label, r] : rows)
    t.add_row({TableCell::str(label), TableCell::val(r.ybar_a), TableCell::val(r.ybar_b),
               TableCell::val(r.ybar_b - r.ybar_a), TableCell::val(r.explained),
               TableCell::val(r.unexplained)});
  return t;
}

/// Block contributions ordered by |contribution| descending.
inline Table ob_blocks_table(const ObResult& r) {
  std::vector<int> order(kObBlockCount);
  for (int i = 0; i < kObBlockCount; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double xa = std::abs(r.block_contributions[a]), xb = std::abs(r.block_contributions[b]);
    if (xa != xb) return xa > xb;
    return a < b;
  });
  Table t;
  t.header = {"block", "explained_contribution", "share_of_explained_pct"};
  for (int b : order) {
    double pct = r.explained != 0.0 ? 100.0 * r.block_contributions[b] / r.explained : 0.0;
    t.add_row({TableCell::str(kObBlockNames[b]), TableCell::val(r.block_contributions[b]),
               TableCell::val(pct)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Descriptive tables

namespace detail {

struct MeanSd {
  KahanSum sum, sumsq;
  double w = 0.0;

  void add(double v, double weight) {
    sum.add(weight * v);
    sumsq.add(weight * v * v);
    w += weight;
  }
  double mean() const { return w > 0 ? sum.value() / w : 0.0; }
  double sd() const {
    if (w <= 0) return 0.0;
    double m = mean();
    double var = sumsq.value() / w - m * m;
    return var > 0 ? std::sqrt(var) : 0.0;
  }
};

}  // namespace detail

/// Posting-level summary statistics (mean and SD of shares and indices) for
/// the full sample and each seniority rung.
inline Table summary_stats_table(const std::vector<PostingRecord>& records) {
  constexpr int kAll = 3;
  std::array<std::array<detail::MeanSd, 6>, 4> stats;  // group x statistic
  std::array<long, 4> counts{};
  auto values = [](const PostingRecord& r) {
    return std::array<double, 6>{r.share_e0, r.share_e1, r.share_e2, r.alpha, r.beta, r.gamma};
  };
  for (const auto& r : records) {
    int g = static_cast<int>(r.seniority);
    auto vs = values(r);
    for (int i = 0; i < 6; ++i) {
      stats[g][i].add(vs[i], r.weight);
      stats[kAll][i].add(vs[i], r.weight);
    }
    ++counts[g];
    ++counts[kAll];
  }

  static const char* kStatNames[6] = {"share_e0", "share_e1", "share_e2",
                                      "alpha",    "beta",     "gamma"};
  Table t;
  t.header = {"statistic",  "all_mean",    "all_sd",       "junior_mean",
              "junior_sd",  "intermediate_mean", "intermediate_sd", "senior_mean",
              "senior_sd"};
  for (int i = 0; i < 6; ++i)
    t.add_row({TableCell::str(kStatNames[i]),
               TableCell::val(stats[kAll][i].mean()), TableCell::val(stats[kAll][i].sd()),
               TableCell::val(stats[0][i].mean()), TableCell::val(stats[0][i].sd()),
               TableCell::val(stats[1][i].mean()), TableCell::val(stats[1][i].sd()),
               TableCell::val(stats[2][i].mean()), TableCell::val(stats[2][i].sd())});
  t.add_row({TableCell::str("n_postings"), TableCell::count(counts[kAll]), TableCell::str(""),
             TableCell::count(counts[0]), TableCell::str(""), TableCell::count(counts[1]),
             TableCell::str(""), TableCell::count(counts[2]), TableCell::str("")});
  return t;
}

/// Mean exposure per period, overall and by seniority.
inline Table seniority_trend_table(const std::vector<PostingRecord>& records, PeriodKind kind,
                                   IndexChoice index = {}) {
  std::map<PeriodId, std::array<detail::MeanSd, 4>> by_period;
  for (const auto& r : records) {
    auto& row = by_period[period_of(r.date, kind)];
    double v = index_value(r, index);
    row[static_cast<int>(r.seniority)].add(v, r.weight);
    row[3].add(v, r.weight);
  }
  Table t;
  t.header = {"period", "all", "junior", "intermediate", "senior"};
  for (const auto& [p, row] : by_period)
    t.add_row({TableCell::str(period_label(p)), TableCell::val(row[3].mean()),
               TableCell::val(row[0].mean()), TableCell::val(row[1].mean()),
               TableCell::val(row[2].mean())});
  return t;
}

/// Sector-level average exposure, sorted descending.
inline Table sector_means_table(const std::vector<PostingRecord>& records,
                                IndexChoice index = {}) {
  std::map<std::string, detail::MeanSd> sectors;
  std::map<std::string, long> counts;
  for (const auto& r : records) {
    sectors[r.industry].add(index_value(r, index), r.weight);
    ++counts[r.industry];
  }
  std::vector<std::pair<std::string, double>> order;
  for (const auto& [sector, s] : sectors) order.emplace_back(sector, s.mean());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Table t;
  t.header = {"industry", "mean_exposure", "n_postings"};
  for (const auto& [sector, mean] : order)
    t.add_row({TableCell::str(sector), TableCell::val(mean), TableCell::count(counts[sector])});
  return t;
}

/// Tercile assignment table (occupation -> group, full-sample mean).
inline Table tercile_assignment_table(const std::vector<PostingRecord>& records,
                                      IndexChoice index = {}) {
  auto terciles = occupation_terciles(records, index);
  std::map<std::string, detail::MeanSd> means;
  for (const auto& r : records) means[r.occupation].add(index_value(r, index), r.weight);
  Table t;
  t.header = {"occupation", "tercile", "mean_exposure"};
  for (const auto& [occ, tercile] : terciles)
    t.add_row({TableCell::str(occ), TableCell::str(tercile_name(tercile)),
               TableCell::val(means[occ].mean())});
  return t;
}

/// Per-period mean exposure of the three occupation groups, with the change
/// relative to the first period of the series.
inline Table tercile_series_table(const std::vector<PostingRecord>& records, PeriodKind kind,
                                  IndexChoice index = {}) {
  auto terciles = occupation_terciles(records, index);
  std::map<PeriodId, std::array<detail::MeanSd, 3>> series;
  for (const auto& r : records) {
    auto it = terciles.find(r.occupation);
    if (it == terciles.end()) continue;
    series[period_of(r.date, kind)][static_cast<int>(it->second)].add(index_value(r, index),
                                                                      r.weight);
  }
  Table t;
  t.header = {"period",     "low",        "middle",     "high",
              "low_change", "middle_change", "high_change"};
  std::array<double, 3> first{};
  bool have_first = false;
  for (const auto& [p, row] : series) {
    std::array<double, 3> m{row[0].mean(), row[1].mean(), row[2].mean()};
    if (!have_first) {
      first = m;
      have_first = true;
    }
    t.add_row({TableCell::str(period_label(p)), TableCell::val(m[0]), TableCell::val(m[1]),
               TableCell::val(m[2]), TableCell::val(m[0] - first[0]),
               TableCell::val(m[1] - first[1]), TableCell::val(m[2] - first[2])});
  }
  return t;
}

/// Occupations with the highest and lowest full-sample mean exposure.
inline Table top_bottom_table(const std::vector<PostingRecord>& records, int k = 10,
                              IndexChoice index = {}) {
  std::map<std::string, detail::MeanSd> means;
  std::map<std::string, long> counts;
  for (const auto& r : records) {
    means[r.occupation].add(index_value(r, index), r.weight);
    ++counts[r.occupation];
  }
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& [occ, s] : means) ranked.emplace_back(s.mean(), occ);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });

  Table t;
  t.header = {"group", "rank", "occupation", "mean_exposure", "n_postings"};
  int nb = std::min<int>(k, static_cast<int>(ranked.size()));
  for (int i = 0; i < nb; ++i)
    t.add_row({TableCell::str("Bottom"), TableCell::count(i + 1),
               TableCell::str(ranked[i].second), TableCell::val(ranked[i].first),
               TableCell::count(counts[ranked[i].second])});
  for (int i = 0; i < nb; ++i) {
    const auto& r = ranked[ranked.size() - 1 - i];
    t.add_row({TableCell::str("Top"), TableCell::count(i + 1), TableCell::str(r.second),
               TableCell::val(r.first), TableCell::count(counts[r.second])});
  }
  return t;
}

}  // namespace expo
