// expo: posting-level generative-AI exposure measurement and decomposition
// toolkit. Subcommands cover the full pipeline: annotate, exposure, panel,
// decompose, ob, describe, synth.

#include <cstdio>
#include <filesystem>
#include <memory>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>

#include "expo/batch.hpp"
#include "expo/config.hpp"
#include "expo/decompose.hpp"
#include "expo/http_backend.hpp"
#include "expo/io.hpp"
#include "expo/report.hpp"
#include "expo/svg.hpp"
#include "expo/synth.hpp"
#include "expo/synth_tasks.hpp"

namespace {

using namespace expo;

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_svg(const std::string& path, const std::string& body) {
  auto f = io::open_out(path);
  f << body;
}

std::unique_ptr<Backend> make_backend(const RunConfig& cfg) {
  if (cfg.backend_endpoint.empty() || cfg.backend_endpoint == "mock")
    return std::make_unique<MockBackend>();
  return std::make_unique<HttpBackend>(cfg.backend_endpoint);
}

// ---------------------------------------------------------------------------

int cmd_annotate(const RunConfig& cfg) {
  if (cfg.postings_file.empty())
    throw Error(Err::ConfigError, "annotate needs postings_file");
  auto postings = io::read_postings_jsonl(cfg.postings_file);

  std::string ann_path = cfg.annotations_file.empty() ? out_path(cfg, "annotations.jsonl")
                                                      : cfg.annotations_file;
  std::string failure_path = ann_path + ".failures.jsonl";

  // Rerun mode: when both the annotations file and the failure sidecar
  // exist, only the postings named in the sidecar are reattempted.
  std::unordered_map<std::string, std::vector<TaskAnnotation>> done;
  std::unordered_set<std::string> retry_only;
  bool rerun = std::filesystem::exists(ann_path) && std::filesystem::exists(failure_path);
  if (rerun) {
    for (auto& rec : io::read_annotations(ann_path))
      done.emplace(rec.posting_id, std::move(rec.tasks));
    for (const auto& fail : io::read_failures(failure_path)) retry_only.insert(fail.posting_id);
    std::fprintf(stderr, "rerun: %zu postings from the failure sidecar\n", retry_only.size());
  }

  std::vector<PostingInput> todo;
  for (const auto& p : postings) {
    if (rerun && !retry_only.count(p.input.posting_id)) continue;
    todo.push_back(p.input);
  }

  auto backend = make_backend(cfg);
  BatchPolicy policy;
  policy.max_attempts = cfg.max_attempts;
  policy.max_in_flight = cfg.max_in_flight;
  policy.model = cfg.backend_model;
  policy.temperature = cfg.temperature;
  auto results = annotate_batch(todo, *backend, policy);

  for (auto& r : results)
    if (r.ok()) done[r.posting_id] = r.tasks;

  io::AnnotationWriter writer(ann_path);
  long ok = 0;
  std::vector<io::FailureLine> failures;
  std::unordered_map<std::string, const PostingResult*> by_id;
  for (const auto& r : results) by_id.emplace(r.posting_id, &r);
  for (const auto& p : postings) {
    auto it = done.find(p.input.posting_id);
    if (it != done.end()) {
      writer.write(p.input.posting_id, it->second);
      ++ok;
      continue;
    }
    auto rit = by_id.find(p.input.posting_id);
    if (rit != by_id.end() && rit->second->failure) {
      const auto& f = *rit->second->failure;
      failures.push_back({p.input.posting_id, f.stage, err_name(f.error), f.message, f.attempts});
    } else {
      failures.push_back({p.input.posting_id, 0, err_name(Err::BackendUnavailable),
                          "not attempted", 0});
    }
  }

  if (!failures.empty()) {
    io::write_failures(failure_path, failures);
  } else {
    std::error_code ec;
    std::filesystem::remove(failure_path, ec);
  }

  std::fprintf(stderr, "annotate: %ld ok, %zu failed -> %s\n", ok, failures.size(),
               ann_path.c_str());
  return failures.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_exposure(const RunConfig& cfg) {
  if (cfg.annotations_file.empty())
    throw Error(Err::ConfigError, "exposure needs annotations_file");
  if (!std::filesystem::exists(cfg.annotations_file))
    throw Error(Err::IoError, "annotations file '" + cfg.annotations_file + "' does not exist");

  // Metadata join: posting CSV or postings JSONL keyed by posting_id.
  std::unordered_map<std::string, PostingRecord> meta;
  if (!cfg.postings_file.empty()) {
    if (cfg.postings_file.size() > 6 &&
        cfg.postings_file.substr(cfg.postings_file.size() - 6) == ".jsonl") {
      for (auto& p : io::read_postings_jsonl(cfg.postings_file))
        meta.emplace(p.input.posting_id, p.record);
    } else {
      io::for_each_posting_record(cfg.postings_file, [&](const PostingRecord& r) {
        meta.emplace(r.posting_id, r);
      });
    }
  }

  std::string out = cfg.exposure_file.empty() ? out_path(cfg, "exposure.csv") : cfg.exposure_file;
  io::PostingRecordWriter writer(out);
  long n = 0, missing_meta = 0;
  io::for_each_annotation(cfg.annotations_file, [&](io::AnnotationRecord&& rec) {
    auto exposure = compute_exposure(rec.posting_id, rec.tasks);
    PostingRecord r;
    auto it = meta.find(rec.posting_id);
    if (it != meta.end()) r = it->second;
    else ++missing_meta;
    r.posting_id = rec.posting_id;
    apply_exposure(r, exposure);
    writer.write(r);
    ++n;
  });
  std::fprintf(stderr, "exposure: %ld postings -> %s", n, out.c_str());
  if (missing_meta > 0) std::fprintf(stderr, " (%ld without metadata)", missing_meta);
  std::fprintf(stderr, "\n");
  return 0;
}

// ---------------------------------------------------------------------------

CellPanel panel_from_config(const RunConfig& cfg, bool allow_sampling) {
  if (!cfg.panel_file.empty()) return io::import_panel(cfg.panel_file);
  if (cfg.exposure_file.empty())
    throw Error(Err::ConfigError, "need exposure_file or panel_file");

  auto kind = cfg.kind();
  auto index = cfg.index_choice();
  PeriodId baseline = cfg.baseline_period();
  bool pool_baseline = baseline.kind != kind;

  bool sampling = allow_sampling && (cfg.sample_rate < 1.0 || cfg.min_cell_size > 0);
  Sampler sampler(sampling ? cfg.sample_rate : 1.0, sampling ? cfg.min_cell_size : 0, cfg.seed);
  if (sampling)
    io::for_each_posting_record(cfg.exposure_file,
                                [&](const PostingRecord& r) { sampler.count(r); });

  PanelBuilder main_builder(kind, index);
  PanelBuilder baseline_builder(baseline.kind, index);
  io::for_each_posting_record(cfg.exposure_file, [&](const PostingRecord& r) {
    if (sampling && !sampler.keep(r)) return;
    main_builder.add(r);
    if (pool_baseline && period_contains(baseline, r.date)) baseline_builder.add(r);
  });

  auto panel = main_builder.finish();
  if (panel.periods.empty()) throw Error(Err::EmptyPeriod, "no postings in any period");
  if (pool_baseline) {
    auto pooled = baseline_builder.finish();
    if (!pooled.has(baseline))
      throw Error(Err::EmptyPeriod, "no postings fall in baseline " + period_label(baseline));
    CellPanel keep;
    keep.index = index;
    keep.periods.emplace(baseline, std::move(pooled.periods.at(baseline)));
    panel.merge(std::move(keep));
  }
  if (sampling) {
    auto stats = sampler.stats();
    std::fprintf(stderr,
                 "sampling: rate %.4f, min cell %ld: %ld cells seen, %ld dropped "
                 "(%.4f%% of postings)\n",
                 cfg.sample_rate, cfg.min_cell_size, stats.cells_seen, stats.cells_dropped,
                 100.0 * stats.dropped_mass());
  }
  return panel;
}

int cmd_panel(const RunConfig& cfg) {
  auto panel = panel_from_config(cfg, /*allow_sampling=*/true);
  auto path = out_path(cfg, "panel.csv");
  io::export_panel(path, panel);
  long cells = 0;
  for (const auto& [_, data] : panel.periods) cells += static_cast<long>(data.cells.size());
  std::fprintf(stderr, "panel: %zu periods, %ld cell-period rows -> %s\n", panel.periods.size(),
               cells, path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------

void write_threefold_outputs(const RunConfig& cfg, const CellPanel& panel,
                             const PeriodId& baseline, const std::vector<PeriodId>& periods,
                             bool use_common_support, const std::string& stem,
                             const std::string& title,
                             std::vector<std::pair<std::string, RelativeContributions>>& contribs,
                             const std::string& contrib_label) {
  std::vector<DecompResult> three;
  std::vector<SignPatternBreakdown> signs;
  for (const auto& p : periods) {
    three.push_back(threefold(panel, baseline, p, use_common_support));
    signs.push_back(sign_patterns(panel, baseline, p, use_common_support));
  }
  io::write_table(out_path(cfg, stem + ".csv"), decomposition_table(three));
  io::write_table(out_path(cfg, stem + "_sign_patterns.csv"), sign_pattern_table(signs));
  io::write_table(out_path(cfg, stem + "_counterfactual.csv"),
                  counterfactual_table(counterfactual_paths(panel, baseline, periods)));
  write_svg(out_path(cfg, stem + ".svg"), svg::decomposition_chart(three, title));
  try {
    contribs.emplace_back(contrib_label, relative_contributions(three, cfg.contributions_from()));
  } catch (const Error& e) {
    if (e.code() != Err::AllZeroComponents) throw;
    std::fprintf(stderr, "%s: all components zero from %s; contribution row skipped\n",
                 contrib_label.c_str(), cfg.from_period.c_str());
  }
}

int cmd_decompose(const RunConfig& cfg, const std::string& variant, bool raw_support) {
  bool all = variant == "all";
  auto panel = panel_from_config(cfg, /*allow_sampling=*/false);
  PeriodId baseline = cfg.baseline_period();
  if (!panel.has(baseline))
    throw Error(Err::MissingBaseline, "baseline " + period_label(baseline) + " not in panel");
  auto periods = periods_after(panel, baseline);
  if (periods.empty())
    throw Error(Err::EmptyPeriod, "no periods after baseline " + period_label(baseline));
  bool cs = !raw_support;

  std::vector<std::pair<std::string, RelativeContributions>> contribs;

  if (all || variant == "threefold" || variant == "twofold" || variant == "by_seniority") {
    write_threefold_outputs(cfg, panel, baseline, periods, cs, "decomposition",
                            "Decomposition of aggregate exposure change", contribs, "Overall");
  }

  if (all || variant == "twofold") {
    std::vector<TwofoldResult> rows;
    for (const auto& p : periods) rows.push_back(twofold_symmetric(panel, baseline, p, cs));
    io::write_table(out_path(cfg, "twofold.csv"), twofold_table(rows));
  }
  if (all || variant == "balanced") {
    auto rows = balanced(panel, baseline, periods);
    io::write_table(out_path(cfg, "balanced.csv"), decomposition_table(rows));
    write_svg(out_path(cfg, "balanced.svg"),
              svg::decomposition_chart(rows, "Balanced-cell decomposition"));
    std::vector<SignPatternBreakdown> signs;
    for (const auto& p : periods) signs.push_back(sign_patterns(panel, baseline, p, cs));
    io::write_table(out_path(cfg, "balanced_sign_patterns.csv"), sign_pattern_table(signs));
    io::write_table(out_path(cfg, "balanced_counterfactual.csv"),
                    counterfactual_table(counterfactual_paths(panel, baseline, periods)));
    try {
      contribs.emplace_back("Balanced", relative_contributions(rows, cfg.contributions_from()));
    } catch (const Error& e) {
      if (e.code() != Err::AllZeroComponents) throw;
    }
  }
  if (all || variant == "within_sector") {
    std::vector<DecompResult> agg;
    Table per_sector;
    per_sector.header = {"period", "sector", "total", "composition", "within", "interaction"};
    for (const auto& p : periods) {
      auto r = within_sector(panel, baseline, p);
      agg.push_back(r.aggregate);
      for (const auto& [sector, d] : r.sectors)
        per_sector.add_row({TableCell::str(period_label(p)), TableCell::str(sector),
                            TableCell::val(d.total), TableCell::val(d.composition),
                            TableCell::val(d.within), TableCell::val(d.interaction)});
    }
    io::write_table(out_path(cfg, "within_sector.csv"), decomposition_table(agg));
    io::write_table(out_path(cfg, "within_sector_by_sector.csv"), per_sector);
    write_svg(out_path(cfg, "within_sector.svg"),
              svg::decomposition_chart(agg, "Within-sector decomposition (fixed sector weights)"));
    io::write_table(out_path(cfg, "within_sector_counterfactual.csv"),
                    counterfactual_table(counterfactual_paths(panel, baseline, periods)));
    std::vector<SignPatternBreakdown> signs;
    for (const auto& p : periods) signs.push_back(sign_patterns(panel, baseline, p, cs));
    io::write_table(out_path(cfg, "within_sector_sign_patterns.csv"), sign_pattern_table(signs));
    try {
      contribs.emplace_back("WithinSector", relative_contributions(agg, cfg.contributions_from()));
    } catch (const Error& e) {
      if (e.code() != Err::AllZeroComponents) throw;
    }
  }
  if (all || variant == "by_seniority") {
    for (Seniority s : {Seniority::Junior, Seniority::Intermediate, Seniority::Senior}) {
      auto sub = filter_seniority(panel, s);
      if (!sub.has(baseline)) continue;
      auto sub_periods = periods_after(sub, baseline);
      if (sub_periods.empty()) continue;
      std::string name = seniority_name(s);
      std::string lower = name;
      for (auto& c : lower) c = static_cast<char>(std::tolower(c));
      write_threefold_outputs(cfg, sub, baseline, sub_periods, cs, "decomposition_" + lower,
                              "Decomposition of exposure change: " + name + " postings",
                              contribs, name);
    }
  }
  if (!all && variant != "threefold" && variant != "twofold" && variant != "balanced" &&
      variant != "within_sector" && variant != "by_seniority") {
    throw Error(Err::ConfigError, "unknown variant '" + variant + "'");
  }

  if (!contribs.empty())
    io::write_table(out_path(cfg, "contributions.csv"), contributions_table(contribs));
  std::fprintf(stderr, "decompose: %zu periods, variant %s -> %s\n", periods.size(),
               variant.c_str(), cfg.out_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------

std::vector<ObCell> ob_cells_from_records(const RunConfig& cfg) {
  Date cut = parse_date(cfg.ob_cut_date);
  std::map<std::array<std::string, kObBlockCount>,
           std::array<std::pair<double, KahanSum>, 2>>
      agg;  // key -> per-group (weight, weighted outcome)
  auto index = cfg.index_choice();
  io::for_each_posting_record(cfg.exposure_file, [&](const PostingRecord& r) {
    std::array<std::string, kObBlockCount> key{
        r.occupation, r.industry, seniority_name(r.seniority), r.state,
        r.remote,     r.internship, r.employment};
    int g = r.date < cut ? 0 : 1;
    auto& slot = agg[key][g];
    slot.first += r.weight;
    slot.second.add(r.weight * index_value(r, index));
  });

  std::vector<ObCell> cells;
  for (const auto& [key, groups] : agg)
    for (int g = 0; g < 2; ++g) {
      if (!(groups[g].first > 0.0)) continue;
      ObCell c;
      c.cats = key;
      c.group = g == 0 ? ObGroup::PreGpt : ObGroup::PostGpt;
      c.weight = groups[g].first;
      c.outcome = groups[g].second.value() / groups[g].first;
      cells.push_back(std::move(c));
    }
  return cells;
}

std::vector<ObCell> ob_cells_from_table(const std::string& path) {
  auto f = io::open_in(io::resolve_precise(path));
  std::string line;
  if (!std::getline(f, line)) throw Error(Err::IoError, "empty cell table '" + path + "'");
  auto header = io::split_csv_line(line);
  std::unordered_map<std::string, int> col;
  for (size_t i = 0; i < header.size(); ++i) col[header[i]] = static_cast<int>(i);
  for (const char* need :
       {"occupation", "industry", "seniority", "state", "remote", "internship",
        "employment_type", "group", "weight", "outcome"})
    if (!col.count(need))
      throw Error(Err::IoError, std::string("cell table misses column '") + need + "'");

  std::vector<ObCell> cells;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto row = io::split_csv_line(line);
    auto get = [&](const char* name) { return row[static_cast<size_t>(col[name])]; };
    ObCell c;
    for (int b = 0; b < kObBlockCount; ++b) c.cats[b] = get(kObBlockNames[b]);
    auto group = get("group");
    if (group == "PreGpt") c.group = ObGroup::PreGpt;
    else if (group == "PostGpt") c.group = ObGroup::PostGpt;
    else throw Error(Err::IoError, "group must be PreGpt or PostGpt, got '" + group + "'");
    c.weight = io::parse_double(get("weight"), "weight");
    c.outcome = io::parse_double(get("outcome"), "outcome");
    cells.push_back(std::move(c));
  }
  return cells;
}

int cmd_ob(const RunConfig& cfg) {
  std::vector<ObCell> cells;
  if (!cfg.cells_file.empty()) cells = ob_cells_from_table(cfg.cells_file);
  else if (!cfg.exposure_file.empty()) cells = ob_cells_from_records(cfg);
  else throw Error(Err::ConfigError, "ob needs cells_file or exposure_file");

  auto overall = ob_twofold(cells);
  std::vector<std::pair<std::string, ObResult>> summary{{"Overall", overall}};
  for (const char* s : {"Junior", "Intermediate", "Senior"}) {
    std::vector<ObCell> sub;
    for (const auto& c : cells)
      if (c.cats[2] == s) sub.push_back(c);
    bool has_a = false, has_b = false;
    for (const auto& c : sub) (c.group == ObGroup::PreGpt ? has_a : has_b) = true;
    if (!has_a || !has_b) continue;
    summary.emplace_back(s, ob_twofold(sub));
  }

  io::write_table(out_path(cfg, "ob_summary.csv"), ob_summary_table(summary));
  io::write_table(out_path(cfg, "ob_blocks.csv"), ob_blocks_table(overall));
  write_svg(out_path(cfg, "ob_blocks.svg"),
            svg::ob_blocks_chart(overall, "Explained component by job-characteristic block"));

  if (!overall.fit_a.dropped.empty() || !overall.fit_b.dropped.empty())
    std::fprintf(stderr, "ob: dropped %zu collinear columns (pre), %zu (post)\n",
                 overall.fit_a.dropped.size(), overall.fit_b.dropped.size());
  std::fprintf(stderr,
               "ob: %zu cells, pre %.4f -> post %.4f, explained %.4f, unexplained %.4f\n",
               cells.size(), overall.ybar_a, overall.ybar_b, overall.explained,
               overall.unexplained);
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_describe(const RunConfig& cfg) {
  if (cfg.exposure_file.empty()) throw Error(Err::ConfigError, "describe needs exposure_file");
  auto records = io::read_posting_records(cfg.exposure_file);
  if (records.empty()) throw Error(Err::EmptyPeriod, "exposure file has no postings");
  auto kind = cfg.kind();
  auto index = cfg.index_choice();

  io::write_table(out_path(cfg, "summary_stats.csv"), summary_stats_table(records));
  io::write_table(out_path(cfg, "seniority_trends.csv"),
                  seniority_trend_table(records, kind, index));
  io::write_table(out_path(cfg, "sector_means.csv"), sector_means_table(records, index));
  io::write_table(out_path(cfg, "occupation_terciles.csv"),
                  tercile_series_table(records, kind, index));
  io::write_table(out_path(cfg, "tercile_assignment.csv"),
                  tercile_assignment_table(records, index));
  io::write_table(out_path(cfg, "top_bottom_occupations.csv"), top_bottom_table(records, 10, index));
  std::fprintf(stderr, "describe: %zu postings -> %s\n", records.size(), cfg.out_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------

ScenarioSpec scenario_from_config(const RunConfig& cfg) {
  ScenarioSpec spec;
  spec.seed = cfg.seed;
  spec.sectors = cfg.synth_sectors;
  spec.occupations_per_sector = cfg.synth_occupations;
  spec.seniorities = cfg.synth_seniorities;
  spec.period_kind = cfg.kind();
  spec.first_year = cfg.synth_first_year;
  spec.n_periods = cfg.synth_periods;
  spec.postings_per_period = cfg.synth_postings_per_period;
  spec.dynamics = parse_dynamics(cfg.synth_dynamics);
  spec.noise_scale = cfg.synth_noise;
  spec.drift_scale = cfg.synth_drift;
  spec.exposure_drift = cfg.synth_exposure_drift;
  return spec;
}

int cmd_synth(const RunConfig& cfg, const std::string& emit) {
  auto spec = scenario_from_config(cfg);
  if (emit == "records") {
    auto path = out_path(cfg, "synthetic.csv");
    io::PostingRecordWriter writer(path);
    auto truth = generate_stream(spec, [&](const PostingRecord& r) { writer.write(r); });
    io::export_panel(out_path(cfg, "truth_panel.csv"), truth);
    std::fprintf(stderr, "synth: %ld postings x %d periods -> %s\n", spec.postings_per_period,
                 spec.n_periods, path.c_str());
  } else if (emit == "tasks") {
    auto ann_path = out_path(cfg, "synthetic_annotations.jsonl");
    auto meta_path = out_path(cfg, "synthetic_postings.csv");
    io::AnnotationWriter ann(ann_path);
    io::PostingRecordWriter meta(meta_path);
    auto truth = generate_task_stream(
        spec, [&](const PostingRecord& r, const std::vector<TaskAnnotation>& tasks) {
          ann.write(r.posting_id, tasks);
          meta.write(r);
        });
    io::export_panel(out_path(cfg, "truth_panel.csv"), truth);
    std::fprintf(stderr, "synth: task-level annotations -> %s (+ %s)\n", ann_path.c_str(),
                 meta_path.c_str());
  } else {
    throw Error(Err::ConfigError, "synth --emit must be records or tasks");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posting-level generative-AI exposure toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, variant = "threefold", emit = "records";
  bool raw_support = false;
  RunConfig cfg;

  // Global options; values given on the command line override the config file.
  app.add_option("--config", config_path, "flat key = value config file");
  auto* seed_opt = app.add_option("--seed", cfg.seed, "random seed");
  auto* out_opt = app.add_option("--out", cfg.out_dir, "output directory");

  struct Flag {
    CLI::Option* opt;
    std::function<void(RunConfig&)> apply;
  };
  std::vector<Flag> flags;
  auto bind = [&](CLI::App* cmd, const char* name, auto RunConfig::* member, const char* help) {
    auto holder = std::make_shared<std::remove_reference_t<decltype(cfg.*member)>>();
    auto* opt = cmd->add_option(name, *holder, help);
    flags.push_back({opt, [holder, member](RunConfig& c) { c.*member = *holder; }});
  };

  auto* annotate = app.add_subcommand("annotate", "run the two-stage annotation pipeline");
  bind(annotate, "--postings", &RunConfig::postings_file, "postings JSONL");
  bind(annotate, "--annotations", &RunConfig::annotations_file, "annotations output path");
  bind(annotate, "--endpoint", &RunConfig::backend_endpoint, "backend URL (empty = mock)");
  bind(annotate, "--model", &RunConfig::backend_model, "model identifier");
  bind(annotate, "--max-attempts", &RunConfig::max_attempts, "attempts per stage");
  bind(annotate, "--max-in-flight", &RunConfig::max_in_flight, "concurrent requests");

  auto* exposure = app.add_subcommand("exposure", "compute posting-level exposure records");
  bind(exposure, "--annotations", &RunConfig::annotations_file, "annotations JSONL");
  bind(exposure, "--postings", &RunConfig::postings_file, "posting metadata (JSONL or CSV)");
  bind(exposure, "--exposure", &RunConfig::exposure_file, "output CSV path");

  auto* panel = app.add_subcommand("panel", "build and export the cell-period panel");
  bind(panel, "--exposure", &RunConfig::exposure_file, "posting exposure CSV");
  bind(panel, "--panel", &RunConfig::panel_file, "prebuilt panel CSV (reexport)");
  bind(panel, "--period-kind", &RunConfig::period_kind, "quarter|halfyear|year");
  bind(panel, "--index", &RunConfig::index, "alpha|beta|gamma|custom");
  bind(panel, "--e2-weight", &RunConfig::e2_weight, "custom index E2 weight");
  bind(panel, "--baseline", &RunConfig::baseline, "baseline period (pooled)");
  bind(panel, "--rate", &RunConfig::sample_rate, "cell-period sampling rate");
  bind(panel, "--min-cell-size", &RunConfig::min_cell_size, "drop smaller cell-halfyears");

  auto* decompose = app.add_subcommand("decompose", "decompose aggregate exposure change");
  decompose->add_option("--variant", variant,
                        "threefold|twofold|balanced|within_sector|by_seniority|all");
  decompose->add_flag("--raw-support", raw_support, "skip common-support renormalization");
  bind(decompose, "--exposure", &RunConfig::exposure_file, "posting exposure CSV");
  bind(decompose, "--panel", &RunConfig::panel_file, "prebuilt panel CSV");
  bind(decompose, "--period-kind", &RunConfig::period_kind, "quarter|halfyear|year");
  bind(decompose, "--index", &RunConfig::index, "alpha|beta|gamma|custom");
  bind(decompose, "--e2-weight", &RunConfig::e2_weight, "custom index E2 weight");
  bind(decompose, "--baseline", &RunConfig::baseline, "baseline period");
  bind(decompose, "--from-period", &RunConfig::from_period, "contribution table start");

  auto* ob = app.add_subcommand("ob", "pre/post regression decomposition");
  bind(ob, "--exposure", &RunConfig::exposure_file, "posting exposure CSV");
  bind(ob, "--cells", &RunConfig::cells_file, "prebuilt cell table CSV");
  bind(ob, "--cut-date", &RunConfig::ob_cut_date, "first PostGpt day (YYYY-MM-DD)");
  bind(ob, "--index", &RunConfig::index, "alpha|beta|gamma|custom");

  auto* describe = app.add_subcommand("describe", "descriptive tables");
  bind(describe, "--exposure", &RunConfig::exposure_file, "posting exposure CSV");
  bind(describe, "--period-kind", &RunConfig::period_kind, "quarter|halfyear|year");
  bind(describe, "--index", &RunConfig::index, "alpha|beta|gamma|custom");

  auto* synth = app.add_subcommand("synth", "generate a synthetic labor market");
  synth->add_option("--emit", emit, "records|tasks");
  bind(synth, "--dynamics", &RunConfig::synth_dynamics,
       "none|linear_drift|step_at|pure_cross_sector|pure_redesign|pure_reallocation");
  bind(synth, "--sectors", &RunConfig::synth_sectors, "sector count");
  bind(synth, "--occupations", &RunConfig::synth_occupations, "occupations per sector");
  bind(synth, "--seniorities", &RunConfig::synth_seniorities, "ladder levels (1-3)");
  bind(synth, "--periods", &RunConfig::synth_periods, "period count");
  bind(synth, "--postings-per-period", &RunConfig::synth_postings_per_period, "postings/period");
  bind(synth, "--noise", &RunConfig::synth_noise, "per-posting index noise");
  bind(synth, "--drift", &RunConfig::synth_drift, "share drift scale");
  bind(synth, "--period-kind", &RunConfig::period_kind, "quarter|halfyear|year");
  bind(synth, "--first-year", &RunConfig::synth_first_year, "first year of the grid");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      uint64_t seed = cfg.seed;
      std::string out_dir = cfg.out_dir;
      cfg = load_config(config_path);
      if (seed_opt->count()) cfg.seed = seed;
      if (out_opt->count()) cfg.out_dir = out_dir;
    }
    for (const auto& f : flags)
      if (f.opt->count()) f.apply(cfg);

    if (app.got_subcommand(annotate)) return cmd_annotate(cfg);
    if (app.got_subcommand(exposure)) return cmd_exposure(cfg);
    if (app.got_subcommand(panel)) return cmd_panel(cfg);
    if (app.got_subcommand(decompose)) return cmd_decompose(cfg, variant, raw_support);
    if (app.got_subcommand(ob)) return cmd_ob(cfg);
    if (app.got_subcommand(describe)) return cmd_describe(cfg);
    if (app.got_subcommand(synth)) return cmd_synth(cfg, emit);
    std::fprintf(stderr, "no subcommand\n");
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return (e.code() == Err::ConfigError || e.code() == Err::IoError) ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
