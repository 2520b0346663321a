#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "expo/cells.hpp"
#include "expo/errors.hpp"
#include "expo/numeric.hpp"
#include "expo/period.hpp"
#include "expo/records.hpp"

namespace expo {

/// Per-cell aggregate inside one period.
struct CellAgg {
  long count = 0;
  double weight = 0.0;   // sum of posting weights (count when unweighted)
  double sum_wv = 0.0;   // weighted sum of the chosen index
  double share = 0.0;    // weight / period total
  double mean = 0.0;     // sum_wv / weight
};

struct PeriodData {
  long total_count = 0;
  double total_weight = 0.0;
  std::map<CellKey, CellAgg> cells;
};

/// Posting shares and mean exposure over occupation x seniority x industry
/// cells, one entry per period. Periods of different granularities may
/// coexist (e.g. quarters plus a pooled baseline year).
class CellPanel {
 public:
  std::map<PeriodId, PeriodData> periods;
  IndexChoice index;

  bool has(const PeriodId& p) const { return periods.count(p) > 0; }

  const PeriodData& at(const PeriodId& p) const {
    auto it = periods.find(p);
    if (it == periods.end())
      throw Error(Err::MissingBaseline, "period " + period_label(p) + " not in panel");
    return it->second;
  }

  std::vector<PeriodId> period_ids() const {
    std::vector<PeriodId> out;
    out.reserve(periods.size());
    for (const auto& [p, _] : periods) out.push_back(p);
    return out;
  }

  /// Aggregate mean for one period, reconstructed from per-cell weighted
  /// sums so it matches the direct posting-level mean to ~1e-15.
  double period_mean(const PeriodId& p) const {
    const auto& data = at(p);
    KahanSum num, den;
    for (const auto& [_, agg] : data.cells) {
      num.add(agg.sum_wv);
      den.add(agg.weight);
    }
    double d = den.value();
    if (d <= 0.0) throw Error(Err::EmptyPeriod, "period " + period_label(p) + " has no mass");
    return num.value() / d;
  }

  /// Absorbs periods from another panel; period sets must be disjoint.
  void merge(CellPanel&& other) {
    for (auto& [p, data] : other.periods) {
      if (periods.count(p))
        throw Error(Err::ConfigError, "merge: period " + period_label(p) + " already present");
      periods.emplace(p, std::move(data));
    }
  }
};

/// Streaming group-by-reduce over posting records.
class PanelBuilder {
 public:
  PanelBuilder(PeriodKind kind, IndexChoice index) : kind_(kind), index_(index) {}

  void add(const PostingRecord& r) {
    if (r.occupation.empty() || r.industry.empty())
      throw Error(Err::SchemaViolation,
                  "posting '" + r.posting_id + "' lacks cell coordinates");
    if (!(r.weight > 0.0))
      throw Error(Err::SchemaViolation,
                  "posting '" + r.posting_id + "' has non-positive weight");
    auto& data = periods_[period_of(r.date, kind_)];
    auto& agg = data.cells[r.cell()];
    agg.count += 1;
    agg.weight += r.weight;
    agg.sum_wv += r.weight * index_value(r, index_);
    data.total_count += 1;
  }

  CellPanel finish() {
    CellPanel panel;
    panel.index = index_;
    for (auto& [p, data] : periods_) {
      KahanSum total;
      for (const auto& [_, agg] : data.cells) total.add(agg.weight);
      data.total_weight = total.value();
      if (data.total_weight <= 0.0) continue;
      for (auto& [_, agg] : data.cells) {
        agg.share = agg.weight / data.total_weight;
        agg.mean = agg.weight > 0.0 ? agg.sum_wv / agg.weight : 0.0;
      }
      panel.periods.emplace(p, std::move(data));
    }
    return panel;
  }

 private:
  PeriodKind kind_;
  IndexChoice index_;
  std::map<PeriodId, PeriodData> periods_;
};

inline CellPanel build_panel(const std::vector<PostingRecord>& records, PeriodKind kind,
                             IndexChoice index = {}) {
  PanelBuilder b(kind, index);
  for (const auto& r : records) b.add(r);
  return b.finish();
}

/// Single-period panel pooling every record that falls inside `target`
/// (typically the full baseline year).
inline CellPanel build_pooled(const std::vector<PostingRecord>& records, const PeriodId& target,
                              IndexChoice index = {}) {
  PanelBuilder b(target.kind, index);
  long n = 0;
  for (const auto& r : records)
    if (period_contains(target, r.date)) {
      b.add(r);
      ++n;
    }
  if (n == 0)
    throw Error(Err::EmptyPeriod, "no postings fall in period " + period_label(target));
  return b.finish();
}

/// Panel restricted to one seniority stratum; shares renormalize within the
/// stratum because period totals are recomputed from the kept cells.
inline CellPanel filter_seniority(const CellPanel& panel, Seniority s) {
  CellPanel out;
  out.index = panel.index;
  for (const auto& [p, data] : panel.periods) {
    PeriodData kept;
    KahanSum total;
    for (const auto& [cell, agg] : data.cells)
      if (cell.seniority == s) {
        kept.cells.emplace(cell, agg);
        kept.total_count += agg.count;
        total.add(agg.weight);
      }
    kept.total_weight = total.value();
    if (kept.total_weight <= 0.0) continue;
    for (auto& [_, agg] : kept.cells) agg.share = agg.weight / kept.total_weight;
    out.periods.emplace(p, std::move(kept));
  }
  return out;
}

/// Panel restricted to one 2-digit sector, shares renormalized within the
/// sector-period.
inline CellPanel filter_industry(const CellPanel& panel, const std::string& industry) {
  CellPanel out;
  out.index = panel.index;
  for (const auto& [p, data] : panel.periods) {
    PeriodData kept;
    KahanSum total;
    for (const auto& [cell, agg] : data.cells)
      if (cell.industry == industry) {
        kept.cells.emplace(cell, agg);
        kept.total_count += agg.count;
        total.add(agg.weight);
      }
    kept.total_weight = total.value();
    if (kept.total_weight <= 0.0) continue;
    for (auto& [_, agg] : kept.cells) agg.share = agg.weight / kept.total_weight;
    out.periods.emplace(p, std::move(kept));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Common support

/// Overlap diagnostics between the baseline and one comparison period.
struct SupportDiagnostics {
  PeriodId period;
  double m_cur = 0.0;              // current-period mass on the common support
  double m_base = 0.0;             // baseline mass on the common support
  double gap = 0.0;                // raw period mean - renormalized support mean
  double raw_total_change = 0.0;   // all-cell mean change vs baseline
  double renorm_total_change = 0.0;
  double residual = 0.0;           // raw_total_change - renorm_total_change
};

struct SupportRow {
  CellKey cell;
  double w_base_raw = 0.0, w_cur_raw = 0.0;  // shares before renormalization
  double w_base = 0.0, w_cur = 0.0;          // renormalized within the support
  double e_base = 0.0, e_cur = 0.0;
};

struct CommonSupport {
  PeriodId baseline, period;
  std::vector<SupportRow> rows;  // ordered by cell key
  SupportDiagnostics diag;
};

/// Cells observed in both periods, with shares renormalized inside the
/// support so they sum to one per period.
inline CommonSupport common_support(const CellPanel& panel, const PeriodId& baseline,
                                    const PeriodId& t) {
  const auto& base = panel.at(baseline);
  const auto& cur = panel.at(t);

  CommonSupport s;
  s.baseline = baseline;
  s.period = t;

  KahanSum mass_base, mass_cur;
  for (const auto& [cell, agg0] : base.cells) {
    if (agg0.weight <= 0.0) continue;
    auto it = cur.cells.find(cell);
    if (it == cur.cells.end() || it->second.weight <= 0.0) continue;
    SupportRow row;
    row.cell = cell;
    row.w_base_raw = agg0.share;
    row.w_cur_raw = it->second.share;
    row.e_base = agg0.mean;
    row.e_cur = it->second.mean;
    mass_base.add(row.w_base_raw);
    mass_cur.add(row.w_cur_raw);
    s.rows.push_back(std::move(row));
  }
  if (s.rows.empty())
    throw Error(Err::EmptySupport, "no cells overlap between " + period_label(baseline) +
                                       " and " + period_label(t));

  double mb = mass_base.value(), mc = mass_cur.value();
  KahanSum renorm_base, renorm_cur;
  for (auto& row : s.rows) {
    row.w_base = row.w_base_raw / mb;
    row.w_cur = row.w_cur_raw / mc;
    renorm_base.add(row.w_base * row.e_base);
    renorm_cur.add(row.w_cur * row.e_cur);
  }

  double mean_base = panel.period_mean(baseline);
  double mean_cur = panel.period_mean(t);
  s.diag.period = t;
  s.diag.m_base = std::clamp(mb, 0.0, 1.0);
  s.diag.m_cur = std::clamp(mc, 0.0, 1.0);
  s.diag.raw_total_change = mean_cur - mean_base;
  s.diag.renorm_total_change = renorm_cur.value() - renorm_base.value();
  s.diag.residual = s.diag.raw_total_change - s.diag.renorm_total_change;
  s.diag.gap = mean_cur - renorm_cur.value();
  return s;
}

// ---------------------------------------------------------------------------
// Sampling

struct SampleStats {
  long total_in = 0;
  long kept = 0;
  long dropped_cell_postings = 0;  // mass removed by the min-cell-size rule
  long cells_seen = 0;
  long cells_dropped = 0;

  double dropped_mass() const {
    return total_in > 0 ? static_cast<double>(dropped_cell_postings) / total_in : 0.0;
  }
};

/// Two-pass cell-period sampler: within each (cell, half-year) group, groups
/// below min_cell_size are dropped entirely, survivors are Bernoulli-sampled
/// at `rate` keyed on (seed, cell, period, posting_id). Bit-reproducible for
/// a given seed.
class Sampler {
 public:
  Sampler(double rate, long min_cell_size, uint64_t seed)
      : rate_(rate), min_cell_(min_cell_size), seed_(seed) {
    if (!(rate > 0.0 && rate <= 1.0))
      throw Error(Err::ConfigError, "sample rate must lie in (0,1]");
    if (min_cell_size < 0) throw Error(Err::ConfigError, "min cell size must be >= 0");
  }

  void count(const PostingRecord& r) { ++counts_[group_key(r)]; }

  bool keep(const PostingRecord& r) const {
    auto it = counts_.find(group_key(r));
    if (it == counts_.end() || it->second < min_cell_) return false;
    if (rate_ >= 1.0) return true;
    uint64_t h = stable_hash64(group_key(r) + "|" + r.posting_id, seed_);
    return hash_to_unit(h) < rate_;
  }

  SampleStats stats() const {
    SampleStats s;
    s.cells_seen = static_cast<long>(counts_.size());
    for (const auto& [_, n] : counts_) {
      s.total_in += n;
      if (n < min_cell_) {
        ++s.cells_dropped;
        s.dropped_cell_postings += n;
      }
    }
    return s;
  }

 private:
  std::string group_key(const PostingRecord& r) const {
    return cell_label(r.cell()) + "|" +
           period_label(period_of(r.date, PeriodKind::HalfYear));
  }

  double rate_;
  long min_cell_;
  uint64_t seed_;
  std::unordered_map<std::string, long> counts_;
};

inline std::pair<std::vector<PostingRecord>, SampleStats> sample_postings(
    const std::vector<PostingRecord>& records, double rate, long min_cell_size, uint64_t seed) {
  Sampler s(rate, min_cell_size, seed);
  for (const auto& r : records) s.count(r);
  std::vector<PostingRecord> kept;
  for (const auto& r : records)
    if (s.keep(r)) kept.push_back(r);
  auto stats = s.stats();
  stats.kept = static_cast<long>(kept.size());
  return {std::move(kept), stats};
}

// ---------------------------------------------------------------------------
// Occupation terciles

enum class Tercile { Low, Middle, High };

inline const char* tercile_name(Tercile t) {
  switch (t) {
    case Tercile::Low: return "Low";
    case Tercile::Middle: return "Middle";
    case Tercile::High: return "High";
  }
  return "?";
}

/// Ranks occupations by full-sample mean of the chosen index and splits the
/// ranking into three equal-count groups (remainder goes to the top group);
/// ties break by occupation code ascending.
inline std::map<std::string, Tercile> occupation_terciles(
    const std::vector<PostingRecord>& records, IndexChoice index = {}) {
  std::map<std::string, std::pair<KahanSum, double>> sums;  // occ -> (sum wv, sum w)
  for (const auto& r : records) {
    auto& [sv, sw] = sums[r.occupation];
    sv.add(r.weight * index_value(r, index));
    sw += r.weight;
  }
  std::vector<std::pair<double, std::string>> ranked;
  ranked.reserve(sums.size());
  for (const auto& [occ, s] : sums)
    ranked.emplace_back(s.second > 0 ? s.first.value() / s.second : 0.0, occ);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });

  std::map<std::string, Tercile> out;
  size_t n = ranked.size();
  size_t cut1 = n / 3, cut2 = 2 * n / 3;
  for (size_t i = 0; i < n; ++i) {
    Tercile t = i < cut1 ? Tercile::Low : (i < cut2 ? Tercile::Middle : Tercile::High);
    out.emplace(ranked[i].second, t);
  }
  return out;
}

}  // namespace expo
