#pragma once

#include <fstream>
#include <string>

#include "expo/errors.hpp"
#include "expo/period.hpp"
#include "expo/records.hpp"

namespace expo {

/// Runtime configuration shared by the CLI commands. Loaded from a flat
/// key = value file; command-line flags override file values. The API key is
/// never stored here; it comes from the AI_EXPOSURE_API_KEY environment
/// variable.
struct RunConfig {
  // inputs / outputs
  std::string postings_file;
  std::string annotations_file;
  std::string exposure_file;
  std::string panel_file;
  std::string cells_file;  // optional prebuilt cell table for the ob command
  std::string out_dir = "out";

  // analysis
  std::string period_kind = "quarter";
  std::string index = "beta";
  double e2_weight = 0.5;
  std::string baseline = "2021";
  std::string from_period = "2023Q3";

  // sampling (identity by default; the production design is 0.05 / 20)
  double sample_rate = 1.0;
  long min_cell_size = 0;
  uint64_t seed = 12345;

  // regression decomposition
  std::string ob_cut_date = "2022-12-01";  // first PostGpt day

  // annotation backend
  std::string backend_endpoint;  // empty selects the offline mock
  std::string backend_model = "default";
  double temperature = 0.0;
  int max_attempts = 3;
  int max_in_flight = 4;

  // synthetic scenario knobs (synth command)
  std::string synth_dynamics = "linear_drift";
  int synth_sectors = 4;
  int synth_occupations = 4;
  int synth_seniorities = 2;
  int synth_periods = 8;
  long synth_postings_per_period = 5000;
  double synth_noise = 0.05;
  double synth_drift = 0.3;
  double synth_exposure_drift = 0.08;
  int synth_first_year = 2021;

  PeriodKind kind() const { return parse_period_kind(period_kind); }
  IndexChoice index_choice() const { return IndexChoice::parse(index, e2_weight); }
  PeriodId baseline_period() const { return parse_period(baseline); }
  PeriodId contributions_from() const { return parse_period(from_period); }
};

inline void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "postings_file") c.postings_file = value;
  else if (key == "annotations_file") c.annotations_file = value;
  else if (key == "exposure_file") c.exposure_file = value;
  else if (key == "panel_file") c.panel_file = value;
  else if (key == "cells_file") c.cells_file = value;
  else if (key == "out_dir") c.out_dir = value;
  else if (key == "period_kind") c.period_kind = value;
  else if (key == "index") c.index = value;
  else if (key == "e2_weight") c.e2_weight = std::stod(value);
  else if (key == "baseline") c.baseline = value;
  else if (key == "from_period") c.from_period = value;
  else if (key == "sample_rate") c.sample_rate = std::stod(value);
  else if (key == "min_cell_size") c.min_cell_size = std::stol(value);
  else if (key == "seed") c.seed = std::stoull(value);
  else if (key == "ob_cut_date") c.ob_cut_date = value;
  else if (key == "backend_endpoint") c.backend_endpoint = value;
  else if (key == "backend_model") c.backend_model = value;
  else if (key == "temperature") c.temperature = std::stod(value);
  else if (key == "max_attempts") c.max_attempts = std::stoi(value);
  else if (key == "max_in_flight") c.max_in_flight = std::stoi(value);
  else if (key == "synth_dynamics") c.synth_dynamics = value;
  else if (key == "synth_sectors") c.synth_sectors = std::stoi(value);
  else if (key == "synth_occupations") c.synth_occupations = std::stoi(value);
  else if (key == "synth_seniorities") c.synth_seniorities = std::stoi(value);
  else if (key == "synth_periods") c.synth_periods = std::stoi(value);
  else if (key == "synth_postings_per_period") c.synth_postings_per_period = std::stol(value);
  else if (key == "synth_noise") c.synth_noise = std::stod(value);
  else if (key == "synth_drift") c.synth_drift = std::stod(value);
  else if (key == "synth_exposure_drift") c.synth_exposure_drift = std::stod(value);
  else if (key == "synth_first_year") c.synth_first_year = std::stoi(value);
  else
    throw Error(Err::ConfigError, "unknown config key '" + key + "'");
}

/// Flat key = value file; '#' starts a comment.
inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Err::ConfigError, "cannot open config file '" + path + "'");
  RunConfig c;
  std::string line;
  long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      size_t e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    auto eq = line.find('=');
    std::string body = trim(line);
    if (body.empty()) continue;
    if (eq == std::string::npos)
      throw Error(Err::ConfigError,
                  path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      apply_config_entry(c, key, value);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(Err::ConfigError,
                  path + ":" + std::to_string(lineno) + ": bad value for '" + key + "': " + e.what());
    }
  }
  return c;
}

}  // namespace expo
