#include "muni/date.hpp"

#include "muni/errors.hpp"

#include <charconv>
#include <fmt/format.h>

namespace muni {

using namespace std::chrono;

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorKind::Parse, fmt::format("bad date '{}'", whole));
  return value;
}

}  // namespace

Date::Date(int y, unsigned m, unsigned d) {
  year_month_day ymd{std::chrono::year(y), std::chrono::month(m), std::chrono::day(d)};
  if (!ymd.ok())
    throw Error(ErrorKind::Parse, fmt::format("invalid date {}-{}-{}", y, m, d));
  days_ = std::chrono::sys_days(ymd);
}

Date Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw Error(ErrorKind::Parse, fmt::format("bad date '{}', expected YYYY-MM-DD", text));
  return Date(parse_int(text.substr(0, 4), text), static_cast<unsigned>(parse_int(text.substr(5, 2), text)),
              static_cast<unsigned>(parse_int(text.substr(8, 2), text)));
}

int Date::year() const { return static_cast<int>(year_month_day(days_).year()); }
unsigned Date::month() const { return static_cast<unsigned>(year_month_day(days_).month()); }
unsigned Date::day() const { return static_cast<unsigned>(year_month_day(days_).day()); }

std::string Date::iso() const { return fmt::format("{:04d}-{:02d}-{:02d}", year(), month(), day()); }

Date Date::add_months(int n) const {
  year_month_day ymd(days_);
  auto ym = year_month(ymd.year(), ymd.month()) + months(n);
  auto last = year_month_day_last(ym.year(), month_day_last(ym.month()));
  auto d = ymd.day() > last.day() ? last.day() : ymd.day();
  return Date(std::chrono::sys_days(year_month_day(ym.year(), ym.month(), d)));
}

Date Date::end_of_month() const {
  year_month_day ymd(days_);
  return Date(std::chrono::sys_days(year_month_day_last(ymd.year(), month_day_last(ymd.month()))));
}

YearMonth YearMonth::parse(std::string_view text) {
  if (text.size() != 7 || text[4] != '-')
    throw Error(ErrorKind::Parse, fmt::format("bad year-month '{}', expected YYYY-MM", text));
  int y = parse_int(text.substr(0, 4), text);
  int m = parse_int(text.substr(5, 2), text);
  if (m < 1 || m > 12) throw Error(ErrorKind::Parse, fmt::format("bad month in '{}'", text));
  return {y, static_cast<unsigned>(m)};
}

YearMonth YearMonth::from_index(int idx) {
  int y = idx >= 0 ? idx / 12 : -((-idx + 11) / 12);
  int m = idx - y * 12;
  return {y, static_cast<unsigned>(m + 1)};
}

std::string YearMonth::str() const { return fmt::format("{:04d}-{:02d}", year, month); }

}  // namespace muni
