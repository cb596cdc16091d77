#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace muni {

// Civil calendar date (no time zone). Backed by std::chrono::sys_days.
class Date {
public:
  Date() = default;
  Date(int year, unsigned month, unsigned day);
  explicit Date(std::chrono::sys_days days) : days_(days) {}

  /// Parses ISO-8601 `YYYY-MM-DD`; throws Error(Parse) otherwise.
  static Date parse(std::string_view text);

  int year() const;
  unsigned month() const;
  unsigned day() const;
  std::string iso() const;

  Date add_days(int n) const { return Date(days_ + std::chrono::days(n)); }
  Date add_months(int n) const;
  Date end_of_month() const;

  std::chrono::sys_days sys_days() const { return days_; }
  auto operator<=>(const Date&) const = default;

private:
  std::chrono::sys_days days_{};
};

/// Signed number of calendar days from `from` to `to`.
inline int days_between(const Date& from, const Date& to) {
  return static_cast<int>((to.sys_days() - from.sys_days()).count());
}

/// ACT/365.25 year fraction.
inline double year_fraction(const Date& from, const Date& to) {
  return days_between(from, to) / 365.25;
}

struct YearMonth {
  int year = 0;
  unsigned month = 1;

  static YearMonth of(const Date& d) { return {d.year(), d.month()}; }
  /// Parses `YYYY-MM`.
  static YearMonth parse(std::string_view text);

  int index() const { return year * 12 + static_cast<int>(month) - 1; }
  static YearMonth from_index(int idx);
  YearMonth operator+(int months) const { return from_index(index() + months); }
  friend int operator-(const YearMonth& a, const YearMonth& b) { return a.index() - b.index(); }

  Date first_day() const { return Date(year, month, 1); }
  Date last_day() const { return first_day().end_of_month(); }
  std::string str() const;

  auto operator<=>(const YearMonth&) const = default;
};

struct DateRange {
  Date first;
  Date last;  // inclusive
  bool contains(const Date& d) const { return first <= d && d <= last; }
};

}  // namespace muni
