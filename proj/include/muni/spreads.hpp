#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace muni::spreads {

/// Top marginal income tax rates by year (federal), state-year and,
/// optionally, county-year. Immutable once built.
class TaxRegime {
public:
  TaxRegime() = default;

  /// Federal schedule shipped with the library: 35% for 2005-2012,
  /// 39.6% for 2013-2017 and 37% for 2018-2019.
  static TaxRegime builtin_federal();

  void set_federal(int year, double rate);
  void set_state(const std::string& state, int year, double rate);
  void set_local(const std::string& fips, int year, double rate);
  /// Local rates are ignored unless enabled.
  void enable_local(bool on) { local_enabled_ = on; }
  bool local_enabled() const { return local_enabled_; }

  /// Throws Error(MissingFederalRate).
  double federal_rate(int year) const;
  std::optional<double> state_rate(const std::string& state, int year) const;
  std::optional<double> local_rate(const std::string& fips, int year) const;

  /// Replaces the federal schedule with `year,top_rate` rows.
  void load_federal_csv(const std::filesystem::path& path);
  /// Adds `state,year,top_rate` rows.
  void load_state_csv(const std::filesystem::path& path);
  /// Adds `fips,year,local_rate` rows and enables the local layer.
  void load_local_csv(const std::filesystem::path& path);

private:
  std::map<int, double> federal_;
  std::map<std::pair<std::string, int>, double> state_;
  std::map<std::pair<std::string, int>, double> local_;
  bool local_enabled_ = false;
};

/// Counts rates that fell back to zero.
struct TaxWarnings {
  std::size_t missing_state = 0;
  std::size_t missing_local = 0;
};

/// (1 - fed)(1 - state)(1 - local if enabled). Missing state or local rates
/// count as zero and are tallied in `warnings`.
double combined_retention(const TaxRegime& regime, const std::string& state, const std::optional<std::string>& fips,
                          int year, TaxWarnings* warnings = nullptr);

double after_tax_yield(double y, double retention);

struct SpreadResult {
  double yield = 0;
  double riskfree_yield = 0;
  double spread = 0;
  double after_tax_yield = 0;
  double after_tax_spread = 0;
};

SpreadResult compute_spreads(double y, double r, double retention);

}  // namespace muni::spreads
