#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "expo/errors.hpp"
#include "expo/numeric.hpp"
#include "expo/panel.hpp"

namespace expo {

/// Three-fold decomposition of the aggregate exposure change between the
/// baseline and one period: composition (hiring reallocation), within-cell
/// (job redesign), and interaction. composition + within + interaction
/// reconstructs total; reconstruction_gap records the numerical difference.
struct DecompResult {
  PeriodId period;
  double total = 0.0;
  double composition = 0.0;
  double within = 0.0;
  double interaction = 0.0;
  double reconstruction_gap = 0.0;
  SupportDiagnostics diagnostics;
  int excluded_cells = 0;  // raw mode: union cells outside the support
};

namespace detail {

inline DecompResult decompose_rows(const CommonSupport& s, bool renormalized) {
  KahanSum comp, within, inter, total;
  for (const auto& row : s.rows) {
    double w0 = renormalized ? row.w_base : row.w_base_raw;
    double wt = renormalized ? row.w_cur : row.w_cur_raw;
    double dw = wt - w0;
    double de = row.e_cur - row.e_base;
    comp.add(dw * row.e_base);
    within.add(w0 * de);
    inter.add(dw * de);
    total.add(wt * row.e_cur - w0 * row.e_base);
  }
  DecompResult r;
  r.period = s.period;
  r.total = total.value();
  r.composition = comp.value();
  r.within = within.value();
  r.interaction = inter.value();
  r.reconstruction_gap = r.total - (r.composition + r.within + r.interaction);
  r.diagnostics = s.diag;
  return r;
}

inline int count_excluded(const CellPanel& panel, const PeriodId& baseline, const PeriodId& t,
                          size_t support_size) {
  std::set<CellKey> cells;
  for (const auto& [c, agg] : panel.at(baseline).cells)
    if (agg.weight > 0) cells.insert(c);
  for (const auto& [c, agg] : panel.at(t).cells)
    if (agg.weight > 0) cells.insert(c);
  return static_cast<int>(cells.size() - support_size);
}

}  // namespace detail

/// With use_common_support (the default configuration), shares are
/// renormalized within the period-specific support before decomposing. In
/// raw mode, shares stay un-renormalized and cells observed in only one
/// period are excluded (their exposure is undefined); excluded_cells counts
/// them as a warning.
inline DecompResult threefold(const CellPanel& panel, const PeriodId& baseline, const PeriodId& t,
                              bool use_common_support = true) {
  auto s = common_support(panel, baseline, t);
  auto r = detail::decompose_rows(s, use_common_support);
  if (!use_common_support)
    r.excluded_cells = detail::count_excluded(panel, baseline, t, s.rows.size());
  return r;
}

struct TwofoldResult {
  PeriodId period;
  double composition = 0.0;
  double within = 0.0;
  double total = 0.0;
};

/// Symmetric two-fold variant: the interaction term is absorbed evenly into
/// both components, cell by cell.
inline TwofoldResult twofold_symmetric(const CellPanel& panel, const PeriodId& baseline,
                                       const PeriodId& t, bool use_common_support = true) {
  auto s = common_support(panel, baseline, t);
  KahanSum comp, within, total;
  for (const auto& row : s.rows) {
    double w0 = use_common_support ? row.w_base : row.w_base_raw;
    double wt = use_common_support ? row.w_cur : row.w_cur_raw;
    comp.add((wt - w0) * 0.5 * (row.e_cur + row.e_base));
    within.add((row.e_cur - row.e_base) * 0.5 * (wt + w0));
    total.add(wt * row.e_cur - w0 * row.e_base);
  }
  return {t, comp.value(), within.value(), total.value()};
}

/// Decomposition over the balanced-cell sample: only cells observed in the
/// baseline and every listed period, with shares renormalized inside that
/// intersection per period.
inline std::vector<DecompResult> balanced(const CellPanel& panel, const PeriodId& baseline,
                                          const std::vector<PeriodId>& periods) {
  std::map<CellKey, int> presence;
  auto tally = [&](const PeriodId& p) {
    for (const auto& [cell, agg] : panel.at(p).cells)
      if (agg.weight > 0) ++presence[cell];
  };
  tally(baseline);
  for (const auto& p : periods) tally(p);

  int needed = 1 + static_cast<int>(periods.size());
  std::set<CellKey> keep;
  for (const auto& [cell, n] : presence)
    if (n == needed) keep.insert(cell);
  if (keep.empty())
    throw Error(Err::EmptyBalancedSet, "no cell is present in every period");

  CellPanel sub;
  sub.index = panel.index;
  auto restrict = [&](const PeriodId& p) {
    const auto& data = panel.at(p);
    PeriodData kept;
    KahanSum total;
    for (const auto& [cell, agg] : data.cells)
      if (keep.count(cell)) {
        kept.cells.emplace(cell, agg);
        kept.total_count += agg.count;
        total.add(agg.weight);
      }
    kept.total_weight = total.value();
    for (auto& [_, agg] : kept.cells) agg.share = agg.weight / kept.total_weight;
    sub.periods.emplace(p, std::move(kept));
  };
  restrict(baseline);
  for (const auto& p : periods)
    if (!(p == baseline)) restrict(p);

  std::vector<DecompResult> out;
  out.reserve(periods.size());
  for (const auto& p : periods) out.push_back(threefold(sub, baseline, p, true));
  return out;
}

struct WithinSectorResult {
  DecompResult aggregate;
  std::vector<std::pair<std::string, DecompResult>> sectors;
  std::vector<std::string> sectors_missing_in_period;  // zero contribution
};

/// Runs the decomposition independently inside each 2-digit sector (shares
/// renormalized within sector-period) and aggregates every component across
/// sectors with baseline-period sector shares held fixed.
inline WithinSectorResult within_sector(const CellPanel& panel, const PeriodId& baseline,
                                        const PeriodId& t) {
  const auto& base = panel.at(baseline);
  const auto& cur = panel.at(t);

  std::map<std::string, double> sector_mass;
  for (const auto& [cell, agg] : base.cells)
    if (agg.weight > 0) sector_mass[cell.industry] += agg.weight;
  for (const auto& [cell, agg] : cur.cells)
    if (agg.weight > 0 && !sector_mass.count(cell.industry))
      throw Error(Err::SectorMissingInBaseline,
                  "sector " + cell.industry + " absent from the baseline period");

  WithinSectorResult out;
  out.aggregate.period = t;
  out.aggregate.diagnostics.period = t;
  KahanSum comp, within, inter, total, m_cur, m_base, gap, raw_tot, renorm_tot;
  for (const auto& [sector, mass] : sector_mass) {
    double s_k = mass / base.total_weight;  // fixed baseline sector weight
    auto sub = filter_industry(panel, sector);
    if (!sub.has(t)) {
      out.sectors_missing_in_period.push_back(sector);
      continue;
    }
    auto r = threefold(sub, baseline, t, true);
    comp.add(s_k * r.composition);
    within.add(s_k * r.within);
    inter.add(s_k * r.interaction);
    total.add(s_k * r.total);
    m_cur.add(s_k * r.diagnostics.m_cur);
    m_base.add(s_k * r.diagnostics.m_base);
    gap.add(s_k * r.diagnostics.gap);
    raw_tot.add(s_k * r.diagnostics.raw_total_change);
    renorm_tot.add(s_k * r.diagnostics.renorm_total_change);
    out.sectors.emplace_back(sector, std::move(r));
  }
  out.aggregate.composition = comp.value();
  out.aggregate.within = within.value();
  out.aggregate.interaction = inter.value();
  out.aggregate.total = total.value();
  out.aggregate.reconstruction_gap =
      out.aggregate.total -
      (out.aggregate.composition + out.aggregate.within + out.aggregate.interaction);
  out.aggregate.diagnostics.m_cur = m_cur.value();
  out.aggregate.diagnostics.m_base = m_base.value();
  out.aggregate.diagnostics.gap = gap.value();
  out.aggregate.diagnostics.raw_total_change = raw_tot.value();
  out.aggregate.diagnostics.renorm_total_change = renorm_tot.value();
  out.aggregate.diagnostics.residual =
      out.aggregate.diagnostics.raw_total_change - out.aggregate.diagnostics.renorm_total_change;
  return out;
}

/// Interaction term partitioned by the sign of the share change and the
/// sign of the exposure change. Cells where either change is zero carry a
/// zero product, so zero_change_mass is identically zero.
struct SignPatternBreakdown {
  PeriodId period;
  double neg_pos = 0.0;  // share down, exposure up
  double pos_neg = 0.0;  // share up, exposure down
  double pos_pos = 0.0;
  double neg_neg = 0.0;
  double zero_change_mass = 0.0;

  double sum() const { return neg_pos + pos_neg + pos_pos + neg_neg + zero_change_mass; }
};

inline SignPatternBreakdown sign_patterns(const CellPanel& panel, const PeriodId& baseline,
                                          const PeriodId& t, bool use_common_support = true) {
  auto s = common_support(panel, baseline, t);
  KahanSum np, pn, pp, nn;
  for (const auto& row : s.rows) {
    double w0 = use_common_support ? row.w_base : row.w_base_raw;
    double wt = use_common_support ? row.w_cur : row.w_cur_raw;
    double dw = wt - w0;
    double de = row.e_cur - row.e_base;
    double x = dw * de;
    int sw = sign_of(dw), se = sign_of(de);
    if (sw < 0 && se > 0) np.add(x);
    else if (sw > 0 && se < 0) pn.add(x);
    else if (sw > 0 && se > 0) pp.add(x);
    else if (sw < 0 && se < 0) nn.add(x);
    // dw == 0 or de == 0 contributes exactly 0
  }
  return {t, np.value(), pn.value(), pp.value(), nn.value(), 0.0};
}

struct RelativeContributions {
  double composition_pct = 0.0;
  double within_pct = 0.0;
  double interaction_pct = 0.0;
};

/// Aggregate absolute contributions over periods at or after from_period:
/// sum_t |X_t| / sum_t (|C_t| + |W_t| + |I_t|) * 100 for each component.
inline RelativeContributions relative_contributions(const std::vector<DecompResult>& results,
                                                    const PeriodId& from_period) {
  KahanSum sc, sw, si;
  for (const auto& r : results) {
    if (r.period < from_period) continue;
    sc.add(std::abs(r.composition));
    sw.add(std::abs(r.within));
    si.add(std::abs(r.interaction));
  }
  double denom = sc.value() + sw.value() + si.value();
  if (denom <= 0.0)
    throw Error(Err::AllZeroComponents, "every component is zero over the requested periods");
  return {100.0 * sc.value() / denom, 100.0 * sw.value() / denom, 100.0 * si.value() / denom};
}

/// Counterfactual exposure levels per period over the renormalized common
/// support: observed, shares-vary-only, and exposures-vary-only, plus the
/// renormalized baseline level the totals are measured against.
struct CounterfactualPath {
  PeriodId period;
  double observed = 0.0;          // sum w_t E_t
  double composition_only = 0.0;  // sum w_t E_0
  double within_only = 0.0;       // sum w_0 E_t
  double baseline_level = 0.0;    // sum w_0 E_0
};

inline std::vector<CounterfactualPath> counterfactual_paths(const CellPanel& panel,
                                                            const PeriodId& baseline,
                                                            const std::vector<PeriodId>& periods) {
  std::vector<CounterfactualPath> out;
  out.reserve(periods.size());
  for (const auto& p : periods) {
    if (p == baseline) {
      double m = panel.period_mean(baseline);
      out.push_back({p, m, m, m, m});
      continue;
    }
    auto s = common_support(panel, baseline, p);
    KahanSum obs, comp_only, within_only, base_level;
    for (const auto& row : s.rows) {
      obs.add(row.w_cur * row.e_cur);
      comp_only.add(row.w_cur * row.e_base);
      within_only.add(row.w_base * row.e_cur);
      base_level.add(row.w_base * row.e_base);
    }
    out.push_back({p, obs.value(), comp_only.value(), within_only.value(), base_level.value()});
  }
  return out;
}

/// Panel periods that start after the baseline ends, in chronological order.
inline std::vector<PeriodId> periods_after(const CellPanel& panel, const PeriodId& baseline) {
  std::vector<PeriodId> out;
  for (const auto& p : panel.period_ids())
    if (period_after(baseline, p)) out.push_back(p);
  return out;
}

}  // namespace expo
