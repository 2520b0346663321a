#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "expo/decompose.hpp"
#include "expo/errors.hpp"
#include "expo/numeric.hpp"
#include "expo/oaxaca.hpp"
#include "expo/panel.hpp"
#include "expo/records.hpp"

namespace expo {

/// Drift regime of a synthetic labor market.
enum class Dynamics {
  None,             // shares and exposures frozen
  LinearDrift,      // both drift linearly
  StepAt,           // both jump at one period
  PureCrossSector,  // only sector totals move; within-sector mix and exposures frozen
  PureRedesign,     // shares frozen, exposures drift
  PureReallocation  // exposures frozen, shares drift
};

inline Dynamics parse_dynamics(std::string_view s) {
  if (s == "none") return Dynamics::None;
  if (s == "linear_drift") return Dynamics::LinearDrift;
  if (s == "step_at") return Dynamics::StepAt;
  if (s == "pure_cross_sector") return Dynamics::PureCrossSector;
  if (s == "pure_redesign") return Dynamics::PureRedesign;
  if (s == "pure_reallocation") return Dynamics::PureReallocation;
  throw Error(Err::ConfigError, "unknown dynamics '" + std::string(s) + "'");
}

inline const char* dynamics_name(Dynamics d) {
  switch (d) {
    case Dynamics::None: return "none";
    case Dynamics::LinearDrift: return "linear_drift";
    case Dynamics::StepAt: return "step_at";
    case Dynamics::PureCrossSector: return "pure_cross_sector";
    case Dynamics::PureRedesign: return "pure_redesign";
    case Dynamics::PureReallocation: return "pure_reallocation";
  }
  return "?";
}

struct ScenarioSpec {
  uint64_t seed = 1;
  int sectors = 4;
  int occupations_per_sector = 4;
  int seniorities = 2;  // 1..3 ladder levels per occupation
  PeriodKind period_kind = PeriodKind::Quarter;
  int first_year = 2021;
  int n_periods = 8;
  long postings_per_period = 5000;
  Dynamics dynamics = Dynamics::LinearDrift;
  int step_at = 4;            // 0-based period index for StepAt
  double drift_scale = 0.3;   // relative share drift
  double exposure_drift = 0.08;
  double noise_scale = 0.05;  // half-width of per-posting uniform index noise

  void validate() const {
    if (sectors <= 0 || occupations_per_sector <= 0 || seniorities <= 0 || seniorities > 3)
      throw Error(Err::InfeasibleSpec, "cell grid dimensions must be positive (<=3 seniorities)");
    if (n_periods <= 0 || postings_per_period <= 0)
      throw Error(Err::InfeasibleSpec, "period grid and posting counts must be positive");
    if (!(noise_scale >= 0.0 && noise_scale < 0.5))
      throw Error(Err::InfeasibleSpec, "noise scale must lie in [0, 0.5)");
    if (!(drift_scale >= 0.0 && drift_scale < 1.0))
      throw Error(Err::InfeasibleSpec, "drift scale must lie in [0, 1)");
    if (!(exposure_drift >= 0.0 && exposure_drift <= 0.3))
      throw Error(Err::InfeasibleSpec, "exposure drift must lie in [0, 0.3]");
    if (dynamics == Dynamics::StepAt && (step_at < 0 || step_at >= n_periods))
      throw Error(Err::InfeasibleSpec, "step period outside the grid");
  }
};

/// Materialized ground truth: exact shares and exposures per cell-period.
struct Scenario {
  ScenarioSpec spec;
  std::vector<PeriodId> periods;
  std::vector<CellKey> cells;
  std::vector<int> sector_of;                // cell -> sector index
  std::vector<std::vector<double>> w, e;     // [period][cell]

  /// Ground-truth panel over the period grid plus a pooled entry for the
  /// first year, weighted by expected posting counts.
  CellPanel truth_panel() const {
    CellPanel panel;
    panel.index = {};
    PeriodData year;
    double n = static_cast<double>(spec.postings_per_period);
    for (size_t t = 0; t < periods.size(); ++t) {
      PeriodData data;
      for (size_t c = 0; c < cells.size(); ++c) {
        if (!(w[t][c] > 0.0)) continue;
        CellAgg agg;
        agg.weight = n * w[t][c];
        agg.count = std::lround(agg.weight);
        agg.sum_wv = agg.weight * e[t][c];
        agg.share = w[t][c];
        agg.mean = e[t][c];
        data.cells.emplace(cells[c], agg);
        data.total_count += agg.count;
        if (periods[t].year == spec.first_year) {
          auto& pooled = year.cells[cells[c]];
          pooled.weight += agg.weight;
          pooled.count += agg.count;
          pooled.sum_wv += agg.sum_wv;
        }
      }
      data.total_weight = n;
      panel.periods.emplace(periods[t], std::move(data));
    }
    if (!year.cells.empty()) {
      KahanSum total;
      for (const auto& [_, agg] : year.cells) {
        total.add(agg.weight);
        year.total_count += agg.count;
      }
      year.total_weight = total.value();
      for (auto& [_, agg] : year.cells) {
        agg.share = agg.weight / year.total_weight;
        agg.mean = agg.sum_wv / agg.weight;
      }
      panel.periods.emplace(PeriodId{PeriodKind::Year, spec.first_year, 1}, std::move(year));
    }
    return panel;
  }
};

namespace detail {

inline const char* kSectorCodes[] = {"52", "54", "51", "61", "62", "44", "23", "31",
                                     "48", "72", "42", "53", "55", "56", "71", "81"};

inline double cell_unit(uint64_t seed, size_t cell, const char* tag) {
  return hash_to_unit(mix_hash(stable_hash64(tag, seed), cell + 1));
}

}  // namespace detail

/// Materializes the deterministic ground-truth market for a scenario.
inline Scenario make_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Scenario s;
  s.spec = spec;

  int per_year = spec.period_kind == PeriodKind::Quarter ? 4
               : spec.period_kind == PeriodKind::HalfYear ? 2 : 1;
  for (int t = 0; t < spec.n_periods; ++t)
    s.periods.push_back({spec.period_kind, spec.first_year + t / per_year, t % per_year + 1});

  static const Seniority ladder[] = {Seniority::Junior, Seniority::Intermediate,
                                     Seniority::Senior};
  for (int k = 0; k < spec.sectors; ++k) {
    std::string industry = detail::kSectorCodes[k % 16];
    if (k >= 16) industry += std::to_string(k / 16);
    for (int o = 0; o < spec.occupations_per_sector; ++o) {
      char occ[32];
      std::snprintf(occ, sizeof(occ), "%02d-%03d0.%02d", 11 + (k % 40), 100 + o, k);
      for (int l = 0; l < spec.seniorities; ++l) {
        s.cells.push_back({occ, ladder[l], industry});
        s.sector_of.push_back(k);
      }
    }
  }

  size_t n_cells = s.cells.size();
  std::vector<double> w0(n_cells), e0(n_cells);
  double lo = spec.noise_scale + 0.01, hi = 1.0 - spec.noise_scale - 0.01;
  for (size_t c = 0; c < n_cells; ++c) {
    w0[c] = 0.4 + detail::cell_unit(spec.seed, c, "share");
    double sector_mu = 0.25 + 0.5 * (s.sector_of[c] % 4) / 3.0;
    double offset = 0.2 * detail::cell_unit(spec.seed, c, "exposure") - 0.1;
    e0[c] = std::clamp(sector_mu + offset, lo, hi);
  }
  {
    KahanSum total;
    for (double v : w0) total.add(v);
    for (auto& v : w0) v /= total.value();
  }

  s.w.assign(spec.n_periods, w0);
  s.e.assign(spec.n_periods, e0);
  double denom = spec.n_periods > 1 ? spec.n_periods - 1.0 : 1.0;
  for (int t = 0; t < spec.n_periods; ++t) {
    double progress = t / denom;
    bool move_shares = false, move_exposures = false, sector_only = false;
    switch (spec.dynamics) {
      case Dynamics::None: break;
      case Dynamics::LinearDrift: move_shares = move_exposures = true; break;
      case Dynamics::StepAt:
        progress = t >= spec.step_at ? 1.0 : 0.0;
        move_shares = move_exposures = true;
        break;
      case Dynamics::PureCrossSector: sector_only = true; break;
      case Dynamics::PureRedesign: move_exposures = true; break;
      case Dynamics::PureReallocation: move_shares = true; break;
    }
    if (progress == 0.0 || (!move_shares && !move_exposures && !sector_only)) continue;

    auto& wt = s.w[t];
    auto& et = s.e[t];
    if (move_shares || sector_only) {
      KahanSum total;
      for (size_t c = 0; c < n_cells; ++c) {
        double dir = sector_only
                         ? 2.0 * detail::cell_unit(spec.seed, s.sector_of[c], "sector-dir") - 1.0
                         : 2.0 * detail::cell_unit(spec.seed, c, "share-dir") - 1.0;
        wt[c] = w0[c] * (1.0 + spec.drift_scale * dir * progress);
        total.add(wt[c]);
      }
      for (auto& v : wt) v /= total.value();
    }
    if (move_exposures) {
      for (size_t c = 0; c < n_cells; ++c) {
        double dir = 2.0 * detail::cell_unit(spec.seed, c, "exposure-dir") - 1.0;
        et[c] = std::clamp(e0[c] + spec.exposure_drift * dir * progress, lo, hi);
      }
    }
  }
  return s;
}

namespace detail {

// Splits a target index value into consistent E0/E1/E2 shares.
inline void fill_exposure(PostingRecord& r, double beta, uint64_t h) {
  double e2 = 0.8 * std::min(beta, 1.0 - beta);
  double e1 = beta - 0.5 * e2;
  r.share_e1 = e1;
  r.share_e2 = e2;
  r.share_e0 = 1.0 - e1 - e2;
  r.alpha = e1;
  r.beta = beta;
  r.gamma = e1 + e2;
  r.n_tasks = 3 + static_cast<int>(h % 8);
}

inline const char* kStates[] = {"CA", "NY", "TX", "WA", "IL", "MA", "FL", "GA"};

}  // namespace detail

/// Streams synthetic postings drawn from the scenario (cells iid per period
/// from the ground-truth shares; per-posting index = cell exposure plus
/// bounded uniform noise) and returns the ground-truth panel. Deterministic
/// per seed.
inline CellPanel generate_stream(const ScenarioSpec& spec,
                                 const std::function<void(const PostingRecord&)>& sink) {
  auto s = make_scenario(spec);
  size_t n_cells = s.cells.size();

  for (size_t t = 0; t < s.periods.size(); ++t) {
    std::vector<double> cdf(n_cells);
    double acc = 0.0;
    for (size_t c = 0; c < n_cells; ++c) {
      acc += s.w[t][c];
      cdf[c] = acc;
    }
    cdf[n_cells - 1] = 1.0;

    std::mt19937_64 rng(mix_hash(spec.seed, 0x9e37u + t));
    Date start = period_start(s.periods[t]);
    Date end = period_end(s.periods[t]);
    int months = end.month - start.month + 1;

    char id[48];
    for (long i = 0; i < spec.postings_per_period; ++i) {
      double u = hash_to_unit(rng());
      size_t c = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      if (c >= n_cells) c = n_cells - 1;

      PostingRecord r;
      std::snprintf(id, sizeof(id), "syn-%s-%06ld", period_label(s.periods[t]).c_str(), i);
      r.posting_id = id;
      uint64_t h = rng();
      r.date = {s.periods[t].year, start.month + static_cast<int>(h % months),
                1 + static_cast<int>((h >> 8) % 28)};
      r.occupation = s.cells[c].occupation;
      r.seniority = s.cells[c].seniority;
      r.industry = s.cells[c].industry;
      r.state = detail::kStates[h % 8];
      r.remote = (h >> 16) % 10 < 2 ? "Remote" : ((h >> 16) % 10 < 3 ? "Hybrid" : "NotRemote");
      r.internship = (h >> 24) % 10 < 1 ? "Intern" : "NonIntern";
      r.employment = (h >> 32) % 10 < 8 ? "FullTime" : ((h >> 32) % 10 < 9 ? "PartTime" : "PartFull");
      double beta = s.e[t][c];
      if (spec.noise_scale > 0.0)
        beta += spec.noise_scale * (2.0 * hash_to_unit(rng()) - 1.0);
      detail::fill_exposure(r, beta, h);
      sink(r);
    }
  }
  return s.truth_panel();
}

struct Generated {
  std::vector<PostingRecord> postings;
  CellPanel truth;
};

inline Generated generate(const ScenarioSpec& spec) {
  Generated g;
  g.postings.reserve(static_cast<size_t>(spec.postings_per_period) * spec.n_periods);
  g.truth = generate_stream(spec, [&](const PostingRecord& r) { g.postings.push_back(r); });
  return g;
}

// ---------------------------------------------------------------------------
// Independent oracles (deliberately naive: plain maps, naive summation)

/// Reference decomposition computed by direct enumeration over postings.
/// Intended for small instances; validates the panel + decomposition engine.
inline DecompResult oracle_decompose(const std::vector<PostingRecord>& postings,
                                     const PeriodId& baseline, const PeriodId& t,
                                     IndexChoice index = {}, bool renormalize = true) {
  std::map<CellKey, std::pair<double, double>> base, cur;  // cell -> (sum w, sum w*v)
  double base_total = 0.0, cur_total = 0.0;
  for (const auto& r : postings) {
    std::map<CellKey, std::pair<double, double>>* side = nullptr;
    double* total = nullptr;
    if (period_contains(baseline, r.date)) { side = &base; total = &base_total; }
    else if (period_contains(t, r.date)) { side = &cur; total = &cur_total; }
    else continue;
    auto& [sw, swv] = (*side)[r.cell()];
    sw += r.weight;
    swv += r.weight * index_value(r, index);
    *total += r.weight;
  }

  double mass_base = 0.0, mass_cur = 0.0;
  std::vector<std::array<double, 4>> rows;  // w0, wt, e0, et (raw shares)
  for (const auto& [cell, b] : base) {
    auto it = cur.find(cell);
    if (it == cur.end()) continue;
    double w0 = b.first / base_total;
    double wt = it->second.first / cur_total;
    rows.push_back({w0, wt, b.second / b.first, it->second.second / it->second.first});
    mass_base += w0;
    mass_cur += wt;
  }

  DecompResult r;
  r.period = t;
  for (auto& row : rows) {
    double w0 = renormalize ? row[0] / mass_base : row[0];
    double wt = renormalize ? row[1] / mass_cur : row[1];
    r.composition += (wt - w0) * row[2];
    r.within += w0 * (row[3] - row[2]);
    r.interaction += (wt - w0) * (row[3] - row[2]);
    r.total += wt * row[3] - w0 * row[2];
  }
  return r;
}

/// Reference two-fold regression decomposition via a dense normal-equations
/// solve (Gaussian elimination with partial pivoting) and the explicit
/// explained/unexplained arithmetic. Full-rank small instances only.
inline ObResult oracle_ob(const std::vector<ObCell>& cells, const CovariateBlocks& blocks,
                          ObGroup reference_group = ObGroup::PreGpt) {
  // Dense dummy encoding, intercept first.
  std::vector<std::pair<int, std::string>> cols;  // (block, category)
  for (int b = 0; b < kObBlockCount; ++b) {
    const auto& block = blocks.blocks[b];
    for (int k = 0; k < static_cast<int>(block.categories.size()); ++k)
      if (k != block.reference) cols.emplace_back(b, block.categories[k]);
  }
  int n = static_cast<int>(cols.size()) + 1;

  auto encode = [&](const ObCell& c) {
    std::vector<double> x(n, 0.0);
    x[0] = 1.0;
    for (int j = 1; j < n; ++j)
      if (c.cats[cols[j - 1].first] == cols[j - 1].second) x[j] = 1.0;
    return x;
  };

  auto fit_group = [&](ObGroup g, std::vector<double>& xbar, double& ybar) {
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> rhs(n, 0.0);
    xbar.assign(n, 0.0);
    double wsum = 0.0, ysum = 0.0;
    for (const auto& c : cells) {
      if (c.group != g) continue;
      auto x = encode(c);
      for (int i = 0; i < n; ++i) {
        rhs[i] += c.weight * x[i] * c.outcome;
        for (int j = 0; j < n; ++j) a[i][j] += c.weight * x[i] * x[j];
        xbar[i] += c.weight * x[i];
      }
      wsum += c.weight;
      ysum += c.weight * c.outcome;
    }
    for (auto& v : xbar) v /= wsum;
    ybar = ysum / wsum;
    // Gaussian elimination with partial pivoting.
    for (int k = 0; k < n; ++k) {
      int p = k;
      for (int i = k + 1; i < n; ++i)
        if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
      std::swap(a[k], a[p]);
      std::swap(rhs[k], rhs[p]);
      for (int i = k + 1; i < n; ++i) {
        double f = a[i][k] / a[k][k];
        for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
        rhs[i] -= f * rhs[k];
      }
    }
    std::vector<double> beta(n, 0.0);
    for (int k = n - 1; k >= 0; --k) {
      double ssum = rhs[k];
      for (int j = k + 1; j < n; ++j) ssum -= a[k][j] * beta[j];
      beta[k] = ssum / a[k][k];
    }
    return beta;
  };

  std::vector<double> xbar_a, xbar_b;
  ObResult r;
  auto beta_a = fit_group(ObGroup::PreGpt, xbar_a, r.ybar_a);
  auto beta_b = fit_group(ObGroup::PostGpt, xbar_b, r.ybar_b);
  const auto& beta_ref = reference_group == ObGroup::PreGpt ? beta_a : beta_b;
  const auto& xbar_other = reference_group == ObGroup::PreGpt ? xbar_b : xbar_a;

  for (int j = 1; j < n; ++j) {
    double contrib = (xbar_b[j] - xbar_a[j]) * beta_ref[j];
    r.explained += contrib;
    r.block_contributions[cols[j - 1].first] += contrib;
  }
  r.unexplained = (beta_b[0] - beta_a[0]);
  for (int j = 1; j < n; ++j) r.unexplained += xbar_other[j] * (beta_b[j] - beta_a[j]);
  return r;
}

inline ObResult oracle_ob(const std::vector<ObCell>& cells,
                          ObGroup reference_group = ObGroup::PreGpt) {
  return oracle_ob(cells, infer_blocks(cells), reference_group);
}

// ---------------------------------------------------------------------------
// Randomized panels for identity fuzzing

/// Random cell panel with optional churn (cells absent from some periods).
/// Period 0 of the grid doubles as the baseline.
inline CellPanel make_random_panel(uint64_t seed, int n_cells, int n_periods,
                                   double churn = 0.15) {
  std::mt19937_64 rng(seed);
  auto unit = [&] { return hash_to_unit(rng()); };

  CellPanel panel;
  panel.index = {};
  for (int t = 0; t < n_periods; ++t) {
    PeriodId p{PeriodKind::Quarter, 2021 + t / 4, t % 4 + 1};
    PeriodData data;
    for (int c = 0; c < n_cells; ++c) {
      if (n_cells > 1 && unit() < churn) continue;  // cell absent this period
      char occ[24];
      std::snprintf(occ, sizeof(occ), "occ-%04d", c);
      CellAgg agg;
      agg.count = 1 + static_cast<long>(unit() * 500.0);
      agg.weight = static_cast<double>(agg.count);
      agg.mean = unit();
      agg.sum_wv = agg.weight * agg.mean;
      data.cells.emplace(CellKey{occ, Seniority::Intermediate, "52"}, agg);
    }
    if (data.cells.empty()) {
      char occ[24];
      std::snprintf(occ, sizeof(occ), "occ-%04d", 0);
      CellAgg agg;
      agg.count = 1;
      agg.weight = 1.0;
      agg.mean = unit();
      agg.sum_wv = agg.mean;
      data.cells.emplace(CellKey{occ, Seniority::Intermediate, "52"}, agg);
    }
    KahanSum total;
    for (const auto& [_, agg] : data.cells) {
      total.add(agg.weight);
      data.total_count += agg.count;
    }
    data.total_weight = total.value();
    for (auto& [_, agg] : data.cells) agg.share = agg.weight / data.total_weight;
    panel.periods.emplace(p, std::move(data));
  }
  return panel;
}

}  // namespace expo
