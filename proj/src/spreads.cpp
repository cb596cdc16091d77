#include "muni/spreads.hpp"

#include "builtin_data.hpp"
#include "muni/csv.hpp"
#include "muni/errors.hpp"

#include <cmath>
#include <fmt/format.h>

namespace muni::spreads {

namespace {

void check_rate(double rate, std::string_view what) {
  if (!(rate >= 0.0 && rate < 0.9))
    throw Error(ErrorKind::Validation, fmt::format("{} rate {} outside [0, 0.9)", what, rate));
}

void check_retention(double retention) {
  if (!(retention > 0.0 && retention <= 1.0))
    throw Error(ErrorKind::Validation, fmt::format("retention {} outside (0, 1]", retention));
}

void load_federal_table(TaxRegime& regime, const CsvTable& t) {
  t.require_columns({"year", "top_rate"});
  for (std::size_t r = 0; r < t.rows(); ++r)
    regime.set_federal(static_cast<int>(t.integer(r, "year")), t.number(r, "top_rate"));
}

}  // namespace

TaxRegime TaxRegime::builtin_federal() {
  TaxRegime regime;
  load_federal_table(regime, CsvTable::parse(builtin::kFederalTaxCsv, "<builtin federal tax>"));
  return regime;
}

void TaxRegime::set_federal(int year, double rate) {
  check_rate(rate, "federal");
  federal_[year] = rate;
}

void TaxRegime::set_state(const std::string& state, int year, double rate) {
  check_rate(rate, "state");
  state_[{state, year}] = rate;
}

void TaxRegime::set_local(const std::string& fips, int year, double rate) {
  check_rate(rate, "local");
  local_[{fips, year}] = rate;
}

double TaxRegime::federal_rate(int year) const {
  auto it = federal_.find(year);
  if (it == federal_.end())
    throw Error(ErrorKind::MissingFederalRate, fmt::format("no federal tax rate for {}", year));
  return it->second;
}

std::optional<double> TaxRegime::state_rate(const std::string& state, int year) const {
  if (auto it = state_.find({state, year}); it != state_.end()) return it->second;
  return std::nullopt;
}

std::optional<double> TaxRegime::local_rate(const std::string& fips, int year) const {
  if (auto it = local_.find({fips, year}); it != local_.end()) return it->second;
  return std::nullopt;
}

void TaxRegime::load_federal_csv(const std::filesystem::path& path) {
  federal_.clear();
  load_federal_table(*this, CsvTable::read_file(path));
}

void TaxRegime::load_state_csv(const std::filesystem::path& path) {
  auto t = CsvTable::read_file(path);
  t.require_columns({"state", "year", "top_rate"});
  for (std::size_t r = 0; r < t.rows(); ++r)
    set_state(std::string(t.cell(r, "state")), static_cast<int>(t.integer(r, "year")), t.number(r, "top_rate"));
}

void TaxRegime::load_local_csv(const std::filesystem::path& path) {
  auto t = CsvTable::read_file(path);
  t.require_columns({"fips", "year", "local_rate"});
  for (std::size_t r = 0; r < t.rows(); ++r)
    set_local(std::string(t.cell(r, "fips")), static_cast<int>(t.integer(r, "year")), t.number(r, "local_rate"));
  local_enabled_ = true;
}

double combined_retention(const TaxRegime& regime, const std::string& state, const std::optional<std::string>& fips,
                          int year, TaxWarnings* warnings) {
  double retention = 1.0 - regime.federal_rate(year);
  if (auto s = regime.state_rate(state, year)) {
    retention *= 1.0 - *s;
  } else if (warnings) {
    ++warnings->missing_state;
  }
  if (regime.local_enabled() && fips) {
    if (auto l = regime.local_rate(*fips, year)) {
      retention *= 1.0 - *l;
    } else if (warnings) {
      ++warnings->missing_local;
    }
  }
  return retention;
}

double after_tax_yield(double y, double retention) {
  check_retention(retention);
  return y / retention;
}

SpreadResult compute_spreads(double y, double r, double retention) {
  check_retention(retention);
  SpreadResult s;
  s.yield = y;
  s.riskfree_yield = r;
  s.spread = y - r;
  s.after_tax_yield = y / retention;
  s.after_tax_spread = s.after_tax_yield - r;
  return s;
}

}  // namespace muni::spreads
