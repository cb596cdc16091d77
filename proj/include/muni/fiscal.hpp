#pragma once

#include "muni/bonds.hpp"
#include "muni/date.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace muni::fiscal {

/// County labor-market and government-finance row. Currency fields are
/// optional because census finance files have gaps.
struct CountyYear {
  std::string fips;
  int year = 0;
  double labor_force = 0;
  double unemployment_rate = 0;
  std::optional<double> total_revenue;
  std::optional<double> state_igr;
  std::optional<double> total_expenditure;
  std::optional<double> interest_general;
  std::optional<double> interest_total;
  std::optional<double> total_lt_debt;
  std::optional<double> debt_retired;
  std::optional<double> property_tax;
  std::optional<double> population;
};

struct RevenueMeasures {
  double revenue1;  // (TR - IGR) - (TE - interest on total debt)
  double revenue2;  // (TR - IGR) - (TE - interest on general debt)
  double revenue3;  // (TR - IGR) + interest on general debt
};

/// Throws Error(MissingField) naming the absent field.
RevenueMeasures revenue_measures(const CountyYear& cy);

/// Debt-capacity ratios: interest from the year before the event divided by
/// the fiscal metric two years before. A ratio with a zero denominator is
/// left empty and listed in `excluded`.
struct InterestRatios {
  std::optional<double> interest_to_revenue1;
  std::optional<double> interest_to_revenue2;
  std::optional<double> interest_to_revenue3;
  std::optional<double> interest_to_debt;
  double net_debt = 0;
  std::vector<std::string> excluded;
  std::vector<std::string> negative_denominator;
};

InterestRatios interest_ratios(const CountyYear& prior_year, const CountyYear& base_year);

/// Sector -> weight (upstream and downstream value-added shares already
/// summed) and sector -> county share.
struct MultiplierInputs {
  std::map<std::string, double> weights;
  std::map<std::string, double> county_shares;
};

/// sum over sectors of weight * share; sectors without a share count as 0.
double jobs_multiplier(const MultiplierInputs& inputs);

/// Value-added linkages of every industry, read from
/// `industry,sector,weight_up,weight_down`.
struct IndustryLinkages {
  std::map<std::string, std::map<std::string, double>> combined_weights;  // industry -> sector -> up + down
};
IndustryLinkages read_linkages(const std::filesystem::path& path);

struct CountyShares {
  std::map<std::string, std::map<std::string, double>> wage;  // fips -> sector -> share
  std::map<std::string, std::map<std::string, double>> emp;
};
CountyShares read_county_shares(const std::filesystem::path& path);

struct CountyExposure {
  double wage_based;
  double employment_based;
};
CountyExposure county_exposure(const IndustryLinkages& links, const CountyShares& shares, const std::string& industry,
                               const std::string& fips);

/// Arithmetic mean of encoded ratings; throws Error(NoRatedBonds) if empty.
double county_rating(std::span<const int> ratings);
/// Mean rating of the county's bonds dated 12 to 24 months before the deal month.
double county_rating(const bonds::BondTable& bonds, const std::string& fips, const YearMonth& deal_month);

struct Issue {
  Date dated_date;
  double par;
};

struct IssuanceRatio {
  int half;  // -2, -1 before the event; 1, 2, ... after
  double ratio;
};

/// Par issued per half-year relative to par issued in months -18..-13
/// (inclusive) around the event month. Returns halves -2, -1 and
/// 1..horizon_halves. Throws Error(ZeroBase) when the base is not positive.
std::vector<IssuanceRatio> issuance_growth(std::span<const Issue> issues, const Date& event_date, int horizon_halves);

using CountyPanel = std::map<std::pair<std::string, int>, CountyYear>;
CountyPanel read_county_panel(const std::filesystem::path& path);

}  // namespace muni::fiscal
