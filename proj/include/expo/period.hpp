#pragma once

#include <charconv>
#include <compare>
#include <string>
#include <string_view>
#include <tuple>

#include "expo/errors.hpp"

namespace expo {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;
};

inline bool is_valid_date(const Date& d) {
  static const int days[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return d.year >= 1900 && d.year <= 2200 && d.month >= 1 && d.month <= 12 &&
         d.day >= 1 && d.day <= days[d.month - 1];
}

// Parses "YYYY-MM-DD".
inline Date parse_date(std::string_view s) {
  Date d;
  auto piece = [&](size_t pos, size_t len, int& out) {
    auto* b = s.data() + pos;
    auto res = std::from_chars(b, b + len, out);
    return res.ec == std::errc() && res.ptr == b + len;
  };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !piece(0, 4, d.year) ||
      !piece(5, 2, d.month) || !piece(8, 2, d.day) || !is_valid_date(d))
    throw Error(Err::IoError, "bad date '" + std::string(s) + "' (want YYYY-MM-DD)");
  return d;
}

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

enum class PeriodKind { Quarter, HalfYear, Year };

inline const char* period_kind_name(PeriodKind k) {
  switch (k) {
    case PeriodKind::Quarter: return "quarter";
    case PeriodKind::HalfYear: return "halfyear";
    case PeriodKind::Year: return "year";
  }
  return "?";
}

inline PeriodKind parse_period_kind(std::string_view s) {
  if (s == "quarter") return PeriodKind::Quarter;
  if (s == "halfyear" || s == "half") return PeriodKind::HalfYear;
  if (s == "year") return PeriodKind::Year;
  throw Error(Err::ConfigError, "unknown period kind '" + std::string(s) + "'");
}

// One calendar bucket: 2023Q3, 2021H1, or the pooled year 2021.
struct PeriodId {
  PeriodKind kind = PeriodKind::Quarter;
  int year = 0;
  int index = 1;  // Quarter 1..4, HalfYear 1..2, Year always 1

  bool operator==(const PeriodId&) const = default;
};

inline int period_start_month(const PeriodId& p) {
  switch (p.kind) {
    case PeriodKind::Quarter: return (p.index - 1) * 3 + 1;
    case PeriodKind::HalfYear: return (p.index - 1) * 6 + 1;
    case PeriodKind::Year: return 1;
  }
  return 1;
}

inline int period_end_month(const PeriodId& p) {
  switch (p.kind) {
    case PeriodKind::Quarter: return p.index * 3;
    case PeriodKind::HalfYear: return p.index * 6;
    case PeriodKind::Year: return 12;
  }
  return 12;
}

// Total order: by start date, longer spans first on ties so a pooled
// baseline year sorts ahead of its own quarters.
inline bool operator<(const PeriodId& a, const PeriodId& b) {
  int ka = a.kind == PeriodKind::Year ? 0 : (a.kind == PeriodKind::HalfYear ? 1 : 2);
  int kb = b.kind == PeriodKind::Year ? 0 : (b.kind == PeriodKind::HalfYear ? 1 : 2);
  return std::tuple(a.year, period_start_month(a), ka) <
         std::tuple(b.year, period_start_month(b), kb);
}

inline PeriodId period_of(const Date& d, PeriodKind kind) {
  switch (kind) {
    case PeriodKind::Quarter: return {kind, d.year, (d.month - 1) / 3 + 1};
    case PeriodKind::HalfYear: return {kind, d.year, (d.month - 1) / 6 + 1};
    case PeriodKind::Year: return {kind, d.year, 1};
  }
  return {kind, d.year, 1};
}

inline bool period_contains(const PeriodId& p, const Date& d) {
  return d.year == p.year && d.month >= period_start_month(p) &&
         d.month <= period_end_month(p);
}

inline Date period_start(const PeriodId& p) { return {p.year, period_start_month(p), 1}; }

inline Date period_end(const PeriodId& p) {
  int m = period_end_month(p);
  static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return {p.year, m, days[m - 1]};
}

// True when b starts strictly after a ends.
inline bool period_after(const PeriodId& a, const PeriodId& b) {
  return std::tuple(b.year, period_start_month(b)) >
         std::tuple(a.year, period_end_month(a));
}

inline std::string period_label(const PeriodId& p) {
  switch (p.kind) {
    case PeriodKind::Quarter: return std::to_string(p.year) + "Q" + std::to_string(p.index);
    case PeriodKind::HalfYear: return std::to_string(p.year) + "H" + std::to_string(p.index);
    case PeriodKind::Year: return std::to_string(p.year);
  }
  return "?";
}

// Accepts "2023Q3", "2021H2", "2021".
inline PeriodId parse_period(std::string_view s) {
  auto bad = [&] {
    return Error(Err::ConfigError, "bad period '" + std::string(s) + "'");
  };
  int year = 0;
  if (s.size() < 4) throw bad();
  auto res = std::from_chars(s.data(), s.data() + 4, year);
  if (res.ec != std::errc() || year < 1900 || year > 2200) throw bad();
  if (s.size() == 4) return {PeriodKind::Year, year, 1};
  if (s.size() != 6) throw bad();
  int idx = s[5] - '0';
  if (s[4] == 'Q' || s[4] == 'q') {
    if (idx < 1 || idx > 4) throw bad();
    return {PeriodKind::Quarter, year, idx};
  }
  if (s[4] == 'H' || s[4] == 'h') {
    if (idx < 1 || idx > 2) throw bad();
    return {PeriodKind::HalfYear, year, idx};
  }
  throw bad();
}

}  // namespace expo
