#pragma once

#include "muni/date.hpp"
#include "muni/fiscal.hpp"
#include "muni/trades.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace muni::matching {

struct FeatureRow {
  std::string fips;
  std::vector<double> values;
};

struct MatchOptions {
  std::size_t k = 1;
  /// z-score each feature over pool plus treated before measuring distance.
  bool standardize = true;
  /// Maximum distance (in SD units when standardized); controls beyond it are dropped.
  std::optional<double> caliper;
  bool same_region = false;
  std::set<std::string> excluded;
};

struct Control {
  std::string fips;
  double distance;
};

struct MatchResult {
  std::string event_id;
  std::string treated_fips;
  std::vector<Control> controls;  // distance ascending, ties by fips
  std::vector<double> means;      // standardization diagnostics
  std::vector<double> sds;
};

/// Census region (1 Northeast, 2 Midwest, 3 South, 4 West) from the state
/// part of a county FIPS code; 0 when unknown.
int census_region(const std::string& county_fips);

/// Nearest neighbours of `treated` in Euclidean distance. Throws
/// Error(EmptyPool) when no candidate survives the exclusions and
/// Error(Validation) when k exceeds the remaining pool.
MatchResult match(const FeatureRow& treated, const std::vector<FeatureRow>& pool, const MatchOptions& options = {});

struct BalanceRow {
  std::string feature;
  double treated_mean;
  double control_mean;
  double difference;
  std::optional<double> t_stat;  // Welch; empty when undefined
};

struct MatchedFeatures {
  std::vector<double> treated;
  std::vector<std::vector<double>> controls;
};

std::vector<BalanceRow> match_report(const std::vector<std::string>& feature_names,
                                     const std::vector<MatchedFeatures>& matched);

struct Event {
  std::string event_id;
  std::string treated_fips;
  Date event_date;
};

std::vector<Event> read_events(const std::filesystem::path& path);

/// Per-county features as of one event.
struct FeatureTable {
  std::vector<std::string> names;
  std::map<std::string, std::vector<double>> rows;  // fips -> values
};

/// Unemployment rate, its change, log labor force and its percent change,
/// all from the two years before the event year; plus the average
/// volume-weighted yield of the county's bonds over the 12 months before the
/// event month when `yields` is given, plus any static `extra` features.
/// Counties missing an input are left out.
FeatureTable county_features(const fiscal::CountyPanel& panel, int event_year, const YearMonth& event_month,
                             const std::vector<trades::BondMonthObs>* yields, const bonds::BondTable* bonds,
                             const FeatureTable* extra);

/// Reads `fips,<feature>...`.
FeatureTable read_feature_table(const std::filesystem::path& path);

struct EventMatchOptions {
  MatchOptions match;
  /// Drop candidate controls with their own event within this many months.
  std::optional<int> exclude_event_months;
};

struct EventMatches {
  std::vector<MatchResult> results;
  std::vector<MatchedFeatures> features;
  std::vector<std::string> feature_names;
  std::vector<std::string> skipped;  // event ids without treated features
};

/// Matches each event independently; the work is spread across threads but
/// the output order follows `events`.
EventMatches match_events(const std::vector<Event>& events, const fiscal::CountyPanel& panel,
                          const std::vector<trades::BondMonthObs>* yields, const bonds::BondTable* bonds,
                          const FeatureTable* extra, const EventMatchOptions& options);

void write_matches(const std::filesystem::path& path, const std::vector<MatchResult>& results);
void write_balance(const std::filesystem::path& path, const std::vector<BalanceRow>& rows);

}  // namespace muni::matching
