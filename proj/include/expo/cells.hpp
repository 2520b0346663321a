#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "expo/errors.hpp"

namespace expo {

/// Seniority ladder. Postings without explicit seniority language default to
/// Intermediate.
enum class Seniority { Junior, Intermediate, Senior };

inline const char* seniority_name(Seniority s) {
  switch (s) {
    case Seniority::Junior: return "Junior";
    case Seniority::Intermediate: return "Intermediate";
    case Seniority::Senior: return "Senior";
  }
  return "?";
}

inline Seniority parse_seniority(std::string_view s) {
  if (s.empty() || s == "Intermediate" || s == "intermediate") return Seniority::Intermediate;
  if (s == "Junior" || s == "junior") return Seniority::Junior;
  if (s == "Senior" || s == "senior") return Seniority::Senior;
  throw Error(Err::IoError, "unknown seniority '" + std::string(s) + "'");
}

/// Accounting unit of the decompositions: occupation x seniority x industry.
struct CellKey {
  std::string occupation;  // O*NET-SOC code
  Seniority seniority = Seniority::Intermediate;
  std::string industry;    // 2-digit NAICS

  auto operator<=>(const CellKey&) const = default;
};

inline std::string cell_label(const CellKey& c) {
  return c.occupation + "|" + seniority_name(c.seniority) + "|" + c.industry;
}

}  // namespace expo
