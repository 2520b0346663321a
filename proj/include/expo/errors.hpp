#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace expo {

// Every failure mode the library reports carries one of these codes so
// callers (and tests) can branch on the class without string matching.
enum class Err {
  // posting exposure
  EmptyTaskList,
  OutOfRangeWeight,
  // annotation pipeline
  ParseFailure,
  SchemaViolation,
  TaskCountOutOfRange,
  DanglingGroupReference,
  MixedSkillGroup,
  PostingIdMismatch,
  MissingTaskId,
  DuplicateTaskId,
  UnknownTaskId,
  UnknownLabel,
  BackendUnavailable,
  // panel
  EmptyPeriod,
  EmptySupport,
  MissingBaseline,
  EmptyBalancedSet,
  SectorMissingInBaseline,
  // regression decomposition
  UnknownCategory,
  EmptyGroup,
  DegenerateSystem,
  AllZeroComponents,
  // synthetic scenarios
  InfeasibleSpec,
  // plumbing
  IoError,
  ConfigError,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::EmptyTaskList: return "EmptyTaskList";
    case Err::OutOfRangeWeight: return "OutOfRangeWeight";
    case Err::ParseFailure: return "ParseFailure";
    case Err::SchemaViolation: return "SchemaViolation";
    case Err::TaskCountOutOfRange: return "TaskCountOutOfRange";
    case Err::DanglingGroupReference: return "DanglingGroupReference";
    case Err::MixedSkillGroup: return "MixedSkillGroup";
    case Err::PostingIdMismatch: return "PostingIdMismatch";
    case Err::MissingTaskId: return "MissingTaskId";
    case Err::DuplicateTaskId: return "DuplicateTaskId";
    case Err::UnknownTaskId: return "UnknownTaskId";
    case Err::UnknownLabel: return "UnknownLabel";
    case Err::BackendUnavailable: return "BackendUnavailable";
    case Err::EmptyPeriod: return "EmptyPeriod";
    case Err::EmptySupport: return "EmptySupport";
    case Err::MissingBaseline: return "MissingBaseline";
    case Err::EmptyBalancedSet: return "EmptyBalancedSet";
    case Err::SectorMissingInBaseline: return "SectorMissingInBaseline";
    case Err::UnknownCategory: return "UnknownCategory";
    case Err::EmptyGroup: return "EmptyGroup";
    case Err::DegenerateSystem: return "DegenerateSystem";
    case Err::AllZeroComponents: return "AllZeroComponents";
    case Err::InfeasibleSpec: return "InfeasibleSpec";
    case Err::IoError: return "IoError";
    case Err::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}

  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

// One violated rule inside a structured response.
struct Violation {
  Err code;
  std::string rule;
  std::string detail;
};

// Validators collect every violated rule before rejecting, so a single
// exception names all of them. code() is the first violation's class.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error(violations.empty() ? Err::ParseFailure : violations.front().code,
              describe(violations)),
        violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

  bool has(Err e) const noexcept {
    for (const auto& v : violations_)
      if (v.code == e) return true;
    return false;
  }

 private:
  static std::string describe(const std::vector<Violation>& vs) {
    std::string out;
    for (size_t i = 0; i < vs.size(); ++i) {
      if (i) out += "; ";
      out += vs[i].rule;
      if (!vs[i].detail.empty()) {
        out += " (";
        out += vs[i].detail;
        out += ")";
      }
    }
    return out.empty() ? std::string("no violations recorded") : out;
  }

  std::vector<Violation> violations_;
};

}  // namespace expo
