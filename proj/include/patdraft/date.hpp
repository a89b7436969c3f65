#pragma once

#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "patdraft/errors.hpp"

namespace patdraft {

/// Calendar date (proleptic Gregorian). Ordering is lexicographic on
/// (year, month, day), which matches chronological order.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;
};

inline bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

inline int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) return 0;
  if (month == 2 && is_leap_year(year)) return 29;
  return kDays[month - 1];
}

inline bool is_valid(const Date& d) {
  return d.year >= 1 && d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

/// Parses "YYYY-MM-DD". Throws SchemaError on malformed or invalid dates.
inline Date parse_date(std::string_view text) {
  Date d;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw SchemaError("invalid date: '" + std::string(text) + "'");
  for (size_t i = 0; i < text.size(); ++i) {
    if (i == 4 || i == 7) continue;
    if (text[i] < '0' || text[i] > '9')
      throw SchemaError("invalid date: '" + std::string(text) + "'");
  }
  d.year = (text[0] - '0') * 1000 + (text[1] - '0') * 100 + (text[2] - '0') * 10 + (text[3] - '0');
  d.month = (text[5] - '0') * 10 + (text[6] - '0');
  d.day = (text[8] - '0') * 10 + (text[9] - '0');
  if (!is_valid(d)) throw SchemaError("invalid date: '" + std::string(text) + "'");
  return d;
}

inline std::string to_string(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

/// Shifts a date by whole years. Feb 29 clamps to Feb 28 in non-leap targets.
inline Date add_years(Date d, int years) {
  d.year += years;
  int dim = days_in_month(d.year, d.month);
  if (d.day > dim) d.day = dim;
  return d;
}

}  // namespace patdraft
