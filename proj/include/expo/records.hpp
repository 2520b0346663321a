#pragma once

#include <string>
#include <string_view>

#include "expo/cells.hpp"
#include "expo/core.hpp"
#include "expo/errors.hpp"
#include "expo/period.hpp"

namespace expo {

/// One posting in the analysis stream: cell coordinates, covariates for the
/// regression decomposition, and the computed exposure values.
struct PostingRecord {
  std::string posting_id;
  Date date;
  std::string occupation;
  Seniority seniority = Seniority::Intermediate;
  std::string industry;
  std::string state;
  std::string remote = "NotRemote";        // Remote / Hybrid / NotRemote
  std::string internship = "NonIntern";    // Intern / NonIntern
  std::string employment = "FullTime";     // FullTime / PartTime / PartFull
  double weight = 1.0;
  int n_tasks = 0;
  double share_e0 = 1.0, share_e1 = 0.0, share_e2 = 0.0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;

  CellKey cell() const { return {occupation, seniority, industry}; }
};

/// Which posting-level index feeds the panel: alpha, beta, gamma, or the
/// generalized index with a custom E2 weight.
struct IndexChoice {
  enum Kind { Alpha, Beta, Gamma, Custom };
  Kind kind = Beta;
  double e2_weight = 0.5;

  static IndexChoice parse(std::string_view s, double custom_weight = 0.5) {
    if (s == "alpha") return {Alpha, 0.0};
    if (s == "beta") return {Beta, 0.5};
    if (s == "gamma") return {Gamma, 1.0};
    if (s == "custom") {
      if (!(custom_weight >= 0.0 && custom_weight <= 1.0))
        throw Error(Err::OutOfRangeWeight, "custom e2 weight must lie in [0,1]");
      return {Custom, custom_weight};
    }
    throw Error(Err::ConfigError, "unknown index '" + std::string(s) + "'");
  }

  std::string name() const {
    switch (kind) {
      case Alpha: return "alpha";
      case Beta: return "beta";
      case Gamma: return "gamma";
      case Custom: return "custom";
    }
    return "?";
  }
};

inline double index_value(const PostingRecord& r, const IndexChoice& ix) {
  switch (ix.kind) {
    case IndexChoice::Alpha: return r.alpha;
    case IndexChoice::Beta: return r.beta;
    case IndexChoice::Gamma: return r.gamma;
    case IndexChoice::Custom: return r.share_e1 + ix.e2_weight * r.share_e2;
  }
  return r.beta;
}

inline void apply_exposure(PostingRecord& r, const PostingExposure& e) {
  r.n_tasks = e.n_tasks;
  r.share_e0 = e.shares[0];
  r.share_e1 = e.shares[1];
  r.share_e2 = e.shares[2];
  r.alpha = e.alpha;
  r.beta = e.beta;
  r.gamma = e.gamma;
}

}  // namespace expo
