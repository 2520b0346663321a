#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "expo/errors.hpp"
#include "expo/numeric.hpp"

namespace expo {

enum class ObGroup { PreGpt, PostGpt };

/// Covariate block order used throughout the regression decomposition.
inline constexpr int kObBlockCount = 7;
inline constexpr std::array<const char*, kObBlockCount> kObBlockNames = {
    "occupation", "industry", "seniority", "state", "remote", "internship", "employment_type"};

/// One cell of the regression decomposition: a unique combination of the
/// seven block categories, its group, posting-count weight, and mean outcome.
struct ObCell {
  std::array<std::string, kObBlockCount> cats;
  ObGroup group = ObGroup::PreGpt;
  double weight = 1.0;
  double outcome = 0.0;
};

struct Block {
  std::string name;
  std::vector<std::string> categories;  // sorted, unique
  int reference = 0;                    // omitted category index
};

struct CovariateBlocks {
  std::array<Block, kObBlockCount> blocks;
};

/// Categories observed in the cells, one block per covariate; the reference
/// category is the one with the largest PreGpt weight (ties break toward the
/// lexicographically smaller category).
inline CovariateBlocks infer_blocks(const std::vector<ObCell>& cells) {
  CovariateBlocks out;
  for (int b = 0; b < kObBlockCount; ++b) {
    auto& block = out.blocks[b];
    block.name = kObBlockNames[b];
    std::map<std::string, double> pre_weight;
    for (const auto& c : cells) {
      auto& w = pre_weight[c.cats[b]];
      if (c.group == ObGroup::PreGpt) w += c.weight;
    }
    block.categories.reserve(pre_weight.size());
    double best = -1.0;
    for (const auto& [cat, w] : pre_weight) {
      if (w > best) {
        best = w;
        block.reference = static_cast<int>(block.categories.size());
      }
      block.categories.push_back(cat);
    }
  }
  return out;
}

/// Dummy design: one column per non-reference category plus an implicit
/// intercept, with weighted column means per group.
struct Design {
  int n_cols = 0;
  std::vector<int> col_block;               // column -> block index
  std::vector<std::string> col_category;
  std::vector<std::vector<int>> rows_a, rows_b;  // active columns per cell
  std::vector<double> y_a, y_b, w_a, w_b;
  std::vector<double> xbar_a, xbar_b;  // weighted category shares
  double ybar_a = 0.0, ybar_b = 0.0;
  double wsum_a = 0.0, wsum_b = 0.0;
};

inline Design build_design(const std::vector<ObCell>& cells, const CovariateBlocks& blocks) {
  Design d;
  std::array<std::map<std::string, int>, kObBlockCount> col_of;  // category -> column or -1
  for (int b = 0; b < kObBlockCount; ++b) {
    const auto& block = blocks.blocks[b];
    for (int k = 0; k < static_cast<int>(block.categories.size()); ++k) {
      if (k == block.reference) {
        col_of[b][block.categories[k]] = -1;
        continue;
      }
      col_of[b][block.categories[k]] = d.n_cols;
      d.col_block.push_back(b);
      d.col_category.push_back(block.categories[k]);
      ++d.n_cols;
    }
  }

  KahanSum ysum_a, ysum_b;
  std::vector<KahanSum> xsum_a(d.n_cols), xsum_b(d.n_cols);
  for (const auto& c : cells) {
    if (!(c.weight > 0.0)) throw Error(Err::SchemaViolation, "cell weights must be positive");
    std::vector<int> active;
    active.reserve(kObBlockCount);
    for (int b = 0; b < kObBlockCount; ++b) {
      auto it = col_of[b].find(c.cats[b]);
      if (it == col_of[b].end())
        throw Error(Err::UnknownCategory,
                    std::string(kObBlockNames[b]) + " category '" + c.cats[b] + "'");
      if (it->second >= 0) active.push_back(it->second);
    }
    bool a = c.group == ObGroup::PreGpt;
    auto& rows = a ? d.rows_a : d.rows_b;
    auto& y = a ? d.y_a : d.y_b;
    auto& w = a ? d.w_a : d.w_b;
    auto& xs = a ? xsum_a : xsum_b;
    auto& ys = a ? ysum_a : ysum_b;
    auto& ws = a ? d.wsum_a : d.wsum_b;
    rows.push_back(std::move(active));
    y.push_back(c.outcome);
    w.push_back(c.weight);
    for (int col : rows.back()) xs[col].add(c.weight);
    ys.add(c.weight * c.outcome);
    ws += c.weight;
  }
  if (d.rows_a.empty()) throw Error(Err::EmptyGroup, "no PreGpt cells");
  if (d.rows_b.empty()) throw Error(Err::EmptyGroup, "no PostGpt cells");

  d.xbar_a.resize(d.n_cols);
  d.xbar_b.resize(d.n_cols);
  for (int j = 0; j < d.n_cols; ++j) {
    d.xbar_a[j] = xsum_a[j].value() / d.wsum_a;
    d.xbar_b[j] = xsum_b[j].value() / d.wsum_b;
  }
  d.ybar_a = ysum_a.value() / d.wsum_a;
  d.ybar_b = ysum_b.value() / d.wsum_b;
  return d;
}

struct WlsFit {
  double intercept = 0.0;
  std::vector<double> coef;      // 0 for dropped columns
  std::vector<int> dropped;      // rank-deficient columns
  double max_diag = 0.0;         // condition diagnostics
  double min_retained_pivot = 0.0;
};

/// Weighted least squares on a 0/1 design given as active-column lists, with
/// an implicit intercept. The weighted normal equations are factored by
/// symmetric elimination in natural order; pivots at or below
/// 1e-10 * max diagonal mark rank-deficient columns, which are dropped with
/// coefficient zero.
inline WlsFit wls_fit(const std::vector<std::vector<int>>& rows, const std::vector<double>& y,
                      const std::vector<double>& w, int n_cols) {
  if (rows.size() != y.size() || rows.size() != w.size())
    throw Error(Err::SchemaViolation, "rows, outcomes, and weights must align");
  if (rows.empty()) throw Error(Err::DegenerateSystem, "no observations");

  const int n = n_cols + 1;  // column 0 is the intercept
  std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
  std::vector<double> b(n, 0.0);
  auto at = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };

  for (size_t i = 0; i < rows.size(); ++i) {
    double wi = w[i];
    if (!(wi > 0.0)) throw Error(Err::SchemaViolation, "weights must be positive");
    at(0, 0) += wi;
    b[0] += wi * y[i];
    for (int c : rows[i]) {
      at(0, c + 1) += wi;
      b[c + 1] += wi * y[i];
      for (int c2 : rows[i])
        if (c2 >= c) at(c + 1, c2 + 1) += wi;
    }
  }

  WlsFit fit;
  for (int k = 0; k < n; ++k) fit.max_diag = std::max(fit.max_diag, at(k, k));
  if (!(fit.max_diag > 0.0)) throw Error(Err::DegenerateSystem, "zero normal-equation diagonal");
  const double tol = 1e-10 * fit.max_diag;

  // In-place LDL^T on the upper triangle; retained[k] marks usable pivots.
  std::vector<char> retained(n, 0);
  std::vector<double> pivot(n, 0.0);
  fit.min_retained_pivot = fit.max_diag;
  for (int k = 0; k < n; ++k) {
    double d = at(k, k);
    if (d <= tol) {
      if (k > 0) fit.dropped.push_back(k - 1);
      continue;
    }
    retained[k] = 1;
    pivot[k] = d;
    fit.min_retained_pivot = std::min(fit.min_retained_pivot, d);
    for (int i = k + 1; i < n; ++i) {
      double f = at(k, i) / d;
      if (f == 0.0) continue;
      double* row_i = &at(i, i);
      const double* row_k = &at(k, i);
      for (int j = 0; j <= n - 1 - i; ++j) row_i[j] -= f * row_k[j];
    }
  }
  if (n_cols > 0 && static_cast<int>(fit.dropped.size()) == n_cols)
    throw Error(Err::DegenerateSystem, "every design column was dropped");

  // Forward substitution with unit L (L[i][k] = A[k][i]/pivot[k]).
  std::vector<double> z = b;
  for (int k = 0; k < n; ++k) {
    if (!retained[k]) { z[k] = 0.0; continue; }
    double zk = z[k] / pivot[k];
    for (int i = k + 1; i < n; ++i) z[i] -= at(k, i) * zk;
    z[k] = zk;  // D^-1 L^-1 b
  }
  // Back substitution with L^T.
  std::vector<double> x(n, 0.0);
  for (int k = n - 1; k >= 0; --k) {
    if (!retained[k]) continue;
    double s = z[k];
    for (int j = k + 1; j < n; ++j)
      if (retained[j]) s -= (at(k, j) / pivot[k]) * x[j];
    x[k] = s;
  }

  fit.intercept = x[0];
  fit.coef.assign(n_cols, 0.0);
  for (int j = 0; j < n_cols; ++j)
    if (retained[j + 1]) fit.coef[j] = x[j + 1];
  return fit;
}

/// Result of the two-fold explained/unexplained split. block_contributions
/// holds the explained component summed over each block's columns, in block
/// order; the sum across blocks equals explained.
struct ObResult {
  double ybar_a = 0.0, ybar_b = 0.0;
  double explained = 0.0;
  double unexplained = 0.0;
  std::array<double, kObBlockCount> block_contributions{};
  WlsFit fit_a, fit_b;
};

inline std::array<double, kObBlockCount> block_contributions(const Design& d,
                                                             const WlsFit& reference_fit) {
  std::array<double, kObBlockCount> out{};
  std::array<KahanSum, kObBlockCount> sums;
  for (int j = 0; j < d.n_cols; ++j)
    sums[d.col_block[j]].add((d.xbar_b[j] - d.xbar_a[j]) * reference_fit.coef[j]);
  for (int b = 0; b < kObBlockCount; ++b) out[b] = sums[b].value();
  return out;
}

/// Two-fold decomposition of the PostGpt - PreGpt mean gap. With the PreGpt
/// reference structure: explained = (Xbar_B - Xbar_A)' beta_A and
/// unexplained = (a_B - a_A) + Xbar_B' (beta_B - beta_A); both are computed
/// explicitly so the adding-up identity is a real check, not a remainder.
inline ObResult ob_twofold(const std::vector<ObCell>& cells, const CovariateBlocks& blocks,
                           ObGroup reference_group = ObGroup::PreGpt) {
  auto d = build_design(cells, blocks);
  ObResult r;
  r.fit_a = wls_fit(d.rows_a, d.y_a, d.w_a, d.n_cols);
  r.fit_b = wls_fit(d.rows_b, d.y_b, d.w_b, d.n_cols);
  r.ybar_a = d.ybar_a;
  r.ybar_b = d.ybar_b;

  const WlsFit& ref = reference_group == ObGroup::PreGpt ? r.fit_a : r.fit_b;
  const std::vector<double>& xbar_other =
      reference_group == ObGroup::PreGpt ? d.xbar_b : d.xbar_a;

  KahanSum explained, coeff_part;
  for (int j = 0; j < d.n_cols; ++j) {
    explained.add((d.xbar_b[j] - d.xbar_a[j]) * ref.coef[j]);
    coeff_part.add(xbar_other[j] * (r.fit_b.coef[j] - r.fit_a.coef[j]));
  }
  r.explained = explained.value();
  r.unexplained = (r.fit_b.intercept - r.fit_a.intercept) + coeff_part.value();
  r.block_contributions = block_contributions(d, ref);
  return r;
}

inline ObResult ob_twofold(const std::vector<ObCell>& cells,
                           ObGroup reference_group = ObGroup::PreGpt) {
  return ob_twofold(cells, infer_blocks(cells), reference_group);
}

}  // namespace expo
