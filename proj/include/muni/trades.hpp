#pragma once

#include "muni/bonds.hpp"
#include "muni/curve.hpp"
#include "muni/date.hpp"
#include "muni/spreads.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace muni::trades {

enum class Side { CustomerBuy, CustomerSell, Interdealer };

/// P / S / D as in the trades CSV.
char side_code(Side side);
Side parse_side(std::string_view code);

struct TradeRecord {
  std::string cusip;
  Date trade_date;
  double price = 0;  // per 100 face
  double yield = 0;  // decimal
  double par_volume = 0;
  Side side = Side::CustomerBuy;
};

/// Cleaning rules in pipeline order.
enum class Rule {
  UnmatchedCusip,
  MaturityRange,
  MissingCouponOrMaturity,
  PriceRange,
  PrimaryMarket,
  NearIssuance,
  ShortMaturity,
  YieldRange,
  MinTrades,
};
inline constexpr std::size_t kRuleCount = 9;
std::string_view describe(Rule rule);

struct RuleStep {
  Rule rule;
  std::size_t dropped = 0;
  std::size_t cusips_after = 0;
  std::size_t trades_after = 0;
};

struct CleanReport {
  std::size_t input_trades = 0;
  std::size_t input_cusips = 0;
  std::array<RuleStep, kRuleCount> steps{};
  std::size_t surviving_trades = 0;
  std::size_t surviving_cusips = 0;

  std::size_t dropped(Rule rule) const { return steps[static_cast<std::size_t>(rule)].dropped; }
  std::size_t total_dropped() const;
};

struct CleanOptions {
  int max_maturity_days = 36500;
  double min_price = 50.0;
  double max_price = 150.0;
  int issuance_quiet_days = 15;
  double min_years_to_maturity = 1.0;
  double min_yield = 0.0;
  double max_yield = 0.50;
  std::size_t min_trades = 10;
};

struct CleanResult {
  std::vector<TradeRecord> trades;  // input order preserved
  CleanReport report;
};

/// Applies the nine cleaning rules in order. Rule 9 counts the trades of each
/// cusip that survive rules 1-8 and fall inside `window`.
CleanResult clean(const std::vector<TradeRecord>& trades, const bonds::BondTable& bonds, const DateRange& window,
                  const CleanOptions& options = {});

struct BondMonthObs {
  std::string cusip;
  YearMonth year_month;
  double vw_yield = 0;
  double vw_price = 0;
  double total_volume = 0;
  std::size_t n_trades = 0;
  double remaining_maturity_years = 0;  // at month end
  std::optional<double> retention;
  std::optional<spreads::SpreadResult> spreads;
};

/// Volume-weighted CUSIP-month rows sorted by (cusip, month).
std::vector<BondMonthObs> aggregate_monthly(const std::vector<TradeRecord>& trades, const bonds::BondTable& bonds,
                                            const std::set<Side>& sides = {Side::CustomerBuy});

struct AttachReport {
  std::vector<YearMonth> missing_curve_months;  // sorted, unique
  std::size_t rows_without_curve = 0;
  spreads::TaxWarnings tax_warnings;
};

/// Fills riskfree yield and spreads. Rows whose month has no curve within 31
/// days of month end keep empty spreads and are listed in the report.
AttachReport attach_spreads(std::vector<BondMonthObs>& obs, const curve::CurveSet& curves,
                            const spreads::TaxRegime& regime, const bonds::BondTable& bonds);

std::vector<TradeRecord> read_trades(const std::filesystem::path& path);
void write_trades(const std::filesystem::path& path, const std::vector<TradeRecord>& trades);
void write_clean_report(const std::filesystem::path& path, const CleanReport& report);
std::vector<BondMonthObs> read_bond_months(const std::filesystem::path& path);
void write_bond_months(const std::filesystem::path& path, const std::vector<BondMonthObs>& obs);

}  // namespace muni::trades
