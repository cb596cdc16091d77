#include "muni/fiscal.hpp"

#include "muni/csv.hpp"
#include "muni/errors.hpp"

#include <cmath>
#include <fmt/format.h>

namespace muni::fiscal {

namespace {

double need(const std::optional<double>& v, const CountyYear& cy, std::string_view field) {
  if (!v) throw Error(ErrorKind::MissingField, fmt::format("county {} year {}: {}", cy.fips, cy.year, field));
  return *v;
}

void ratio(std::optional<double>& out, double num, double den, std::string_view name, InterestRatios& r) {
  if (den == 0.0) {
    r.excluded.emplace_back(name);
    return;
  }
  if (den < 0.0) r.negative_denominator.emplace_back(name);
  out = num / den;
}

}  // namespace

RevenueMeasures revenue_measures(const CountyYear& cy) {
  const double tr = need(cy.total_revenue, cy, "total_revenue");
  const double igr = need(cy.state_igr, cy, "state_igr");
  const double te = need(cy.total_expenditure, cy, "total_expenditure");
  const double int_total = need(cy.interest_total, cy, "interest_total");
  const double int_general = need(cy.interest_general, cy, "interest_general");
  const double own = tr - igr;
  return {own - (te - int_total), own - (te - int_general), own + int_general};
}

InterestRatios interest_ratios(const CountyYear& prior, const CountyYear& base) {
  InterestRatios r;
  const auto rev = revenue_measures(base);
  const double int_general = need(prior.interest_general, prior, "interest_general");
  const double int_total = need(prior.interest_total, prior, "interest_total");
  ratio(r.interest_to_revenue1, int_general, rev.revenue1, "interest_to_revenue1", r);
  ratio(r.interest_to_revenue2, int_general, rev.revenue2, "interest_to_revenue2", r);
  ratio(r.interest_to_revenue3, int_total, rev.revenue3, "interest_to_revenue3", r);
  ratio(r.interest_to_debt, int_general, need(base.total_lt_debt, base, "total_lt_debt"), "interest_to_debt", r);
  r.net_debt = need(prior.total_lt_debt, prior, "total_lt_debt") - need(prior.debt_retired, prior, "debt_retired");
  return r;
}

double jobs_multiplier(const MultiplierInputs& in) {
  double e = 0;
  for (const auto& [sector, w] : in.weights) {
    if (w < 0.0) throw Error(ErrorKind::Validation, fmt::format("sector {}: negative weight", sector));
    auto it = in.county_shares.find(sector);
    if (it == in.county_shares.end()) continue;
    if (it->second < 0.0 || it->second > 1.0)
      throw Error(ErrorKind::Validation, fmt::format("sector {}: share {} outside [0, 1]", sector, it->second));
    e += w * it->second;
  }
  return e;
}

IndustryLinkages read_linkages(const std::filesystem::path& path) {
  auto t = CsvTable::read_file(path);
  t.require_columns({"industry", "sector", "weight_up", "weight_down"});
  IndustryLinkages links;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    double w = t.optional_number(r, "weight_up").value_or(0.0) + t.optional_number(r, "weight_down").value_or(0.0);
    links.combined_weights[std::string(t.cell(r, "industry"))][std::string(t.cell(r, "sector"))] += w;
  }
  return links;
}

CountyShares read_county_shares(const std::filesystem::path& path) {
  auto t = CsvTable::read_file(path);
  t.require_columns({"fips", "sector", "wage_share", "emp_share"});
  CountyShares s;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    std::string fips(t.cell(r, "fips")), sector(t.cell(r, "sector"));
    s.wage[fips][sector] = t.optional_number(r, "wage_share").value_or(0.0);
    s.emp[fips][sector] = t.optional_number(r, "emp_share").value_or(0.0);
  }
  return s;
}

CountyExposure county_exposure(const IndustryLinkages& links, const CountyShares& shares, const std::string& industry,
                               const std::string& fips) {
  auto li = links.combined_weights.find(industry);
  if (li == links.combined_weights.end())
    throw Error(ErrorKind::MissingField, fmt::format("no linkages for industry {}", industry));
  auto pick = [&](const auto& table) {
    auto it = table.find(fips);
    return it == table.end() ? std::map<std::string, double>{} : it->second;
  };
  return {jobs_multiplier({li->second, pick(shares.wage)}), jobs_multiplier({li->second, pick(shares.emp)})};
}

double county_rating(std::span<const int> ratings) {
  if (ratings.empty()) throw Error(ErrorKind::NoRatedBonds, "no rated bonds in window");
  double s = 0;
  for (int r : ratings) s += r;
  return s / static_cast<double>(ratings.size());
}

double county_rating(const bonds::BondTable& bonds, const std::string& fips, const YearMonth& deal_month) {
  std::vector<int> ratings;
  for (const auto& [cusip, b] : bonds) {
    if (b.county_fips != fips || !b.rating) continue;
    int lag = deal_month - YearMonth::of(b.dated_date);
    if (lag >= 12 && lag <= 24) ratings.push_back(*b.rating);
  }
  if (ratings.empty())
    throw Error(ErrorKind::NoRatedBonds, fmt::format("county {}: no rated bonds 12-24 months before {}", fips,
                                                     deal_month.str()));
  return county_rating(ratings);
}

std::vector<IssuanceRatio> issuance_growth(std::span<const Issue> issues, const Date& event_date, int horizon_halves) {
  if (horizon_halves < 0) throw Error(ErrorKind::Validation, "horizon_halves must be non-negative");
  const auto event_month = YearMonth::of(event_date);
  auto par_between = [&](int first, int last) {
    double s = 0;
    for (const auto& is : issues) {
      int rel = YearMonth::of(is.dated_date) - event_month;
      if (rel >= first && rel <= last) s += is.par;
    }
    return s;
  };
  const double base = par_between(-18, -13);
  if (!(base > 0.0)) throw Error(ErrorKind::ZeroBase, "no par issued in months -18..-13");
  std::vector<IssuanceRatio> out;
  out.push_back({-2, par_between(-12, -7) / base});
  out.push_back({-1, par_between(-6, -1) / base});
  for (int h = 1; h <= horizon_halves; ++h) out.push_back({h, par_between(6 * (h - 1), 6 * h - 1) / base});
  return out;
}

CountyPanel read_county_panel(const std::filesystem::path& path) {
  auto t = CsvTable::read_file(path);
  t.require_columns({"fips", "year", "labor_force", "unemployment_rate", "total_revenue", "state_igr",
                     "total_expenditure", "interest_general", "interest_total", "total_lt_debt", "debt_retired",
                     "property_tax", "population"});
  CountyPanel panel;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    CountyYear cy;
    cy.fips = std::string(t.cell(r, "fips"));
    cy.year = static_cast<int>(t.integer(r, "year"));
    cy.labor_force = t.number(r, "labor_force");
    cy.unemployment_rate = t.number(r, "unemployment_rate");
    if (!(cy.labor_force > 0.0))
      throw Error(ErrorKind::Validation, fmt::format("{}: labor_force must be positive", t.where(r)));
    if (!(cy.unemployment_rate >= 0.0 && cy.unemployment_rate <= 1.0))
      throw Error(ErrorKind::Validation, fmt::format("{}: unemployment_rate outside [0, 1]", t.where(r)));
    cy.total_revenue = t.optional_number(r, "total_revenue");
    cy.state_igr = t.optional_number(r, "state_igr");
    cy.total_expenditure = t.optional_number(r, "total_expenditure");
    cy.interest_general = t.optional_number(r, "interest_general");
    cy.interest_total = t.optional_number(r, "interest_total");
    cy.total_lt_debt = t.optional_number(r, "total_lt_debt");
    cy.debt_retired = t.optional_number(r, "debt_retired");
    cy.property_tax = t.optional_number(r, "property_tax");
    cy.population = t.optional_number(r, "population");
    auto key = std::make_pair(cy.fips, cy.year);
    if (!panel.emplace(key, std::move(cy)).second)
      throw Error(ErrorKind::Validation, fmt::format("{}: duplicate county-year", t.where(r)));
  }
  return panel;
}

}  // namespace muni::fiscal
