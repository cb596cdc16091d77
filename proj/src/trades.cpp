#include "muni/trades.hpp"

#include "muni/csv.hpp"
#include "muni/errors.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace muni::trades {

char side_code(Side side) {
  switch (side) {
    case Side::CustomerBuy: return 'P';
    case Side::CustomerSell: return 'S';
    case Side::Interdealer: return 'D';
  }
  return '?';
}

Side parse_side(std::string_view code) {
  if (code == "P") return Side::CustomerBuy;
  if (code == "S") return Side::CustomerSell;
  if (code == "D") return Side::Interdealer;
  throw Error(ErrorKind::Parse, fmt::format("trade side '{}' is not one of P, S, D", code));
}

std::string_view describe(Rule rule) {
  switch (rule) {
    case Rule::UnmatchedCusip: return "Drop trades with cusip missing from bond reference data";
    case Rule::MaturityRange: return "Drop if maturity (days) > 36,500 or < 0 or missing";
    case Rule::MissingCouponOrMaturity: return "Drop if missing coupon or maturity";
    case Rule::PriceRange: return "Drop if USD price < 50 or > 150";
    case Rule::PrimaryMarket: return "Drop primary market trades";
    case Rule::NearIssuance: return "Drop trades within 15 days after issuance";
    case Rule::ShortMaturity: return "Drop trades with less than 1 year to maturity";
    case Rule::YieldRange: return "Drop if yield < 0 or > 50%";
    case Rule::MinTrades: return "Drop if < 10 transactions";
  }
  return "";
}

std::size_t CleanReport::total_dropped() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.dropped;
  return n;
}

namespace {

std::size_t distinct_cusips(const std::vector<TradeRecord>& trades, const std::vector<std::size_t>& idx) {
  std::unordered_set<std::string_view> seen;
  for (auto i : idx) seen.insert(trades[i].cusip);
  return seen.size();
}

}  // namespace

CleanResult clean(const std::vector<TradeRecord>& trades, const bonds::BondTable& bonds, const DateRange& window,
                  const CleanOptions& opt) {
  CleanResult result;
  auto& report = result.report;
  report.input_trades = trades.size();

  std::vector<std::size_t> alive(trades.size());
  for (std::size_t i = 0; i < trades.size(); ++i) alive[i] = i;
  report.input_cusips = distinct_cusips(trades, alive);

  std::vector<const bonds::Bond*> bond_of(trades.size(), nullptr);
  for (std::size_t i = 0; i < trades.size(); ++i) {
    auto it = bonds.find(trades[i].cusip);
    if (it != bonds.end()) bond_of[i] = &it->second;
  }

  auto apply = [&](Rule rule, auto&& drop) {
    std::vector<std::size_t> kept;
    kept.reserve(alive.size());
    for (auto i : alive)
      if (!drop(i)) kept.push_back(i);
    auto& step = report.steps[static_cast<std::size_t>(rule)];
    step.rule = rule;
    step.dropped = alive.size() - kept.size();
    alive = std::move(kept);
    step.trades_after = alive.size();
    step.cusips_after = distinct_cusips(trades, alive);
  };

  apply(Rule::UnmatchedCusip, [&](std::size_t i) { return bond_of[i] == nullptr; });
  apply(Rule::MaturityRange, [&](std::size_t i) {
    const auto& b = *bond_of[i];
    if (!b.maturity_date) return true;
    int days = days_between(trades[i].trade_date, *b.maturity_date);
    return days > opt.max_maturity_days || days < 0;
  });
  apply(Rule::MissingCouponOrMaturity,
        [&](std::size_t i) { return !bond_of[i]->coupon_rate || !bond_of[i]->maturity_date; });
  apply(Rule::PriceRange, [&](std::size_t i) {
    double p = trades[i].price;
    return !std::isfinite(p) || p < opt.min_price || p > opt.max_price;
  });
  apply(Rule::PrimaryMarket, [&](std::size_t i) { return trades[i].trade_date <= bond_of[i]->dated_date; });
  apply(Rule::NearIssuance, [&](std::size_t i) {
    int days = days_between(bond_of[i]->dated_date, trades[i].trade_date);
    return days > 0 && days <= opt.issuance_quiet_days;
  });
  apply(Rule::ShortMaturity, [&](std::size_t i) {
    return year_fraction(trades[i].trade_date, *bond_of[i]->maturity_date) < opt.min_years_to_maturity;
  });
  apply(Rule::YieldRange, [&](std::size_t i) {
    double y = trades[i].yield;
    return !std::isfinite(y) || y < opt.min_yield || y > opt.max_yield;
  });

  std::unordered_map<std::string_view, std::size_t> in_window;
  for (auto i : alive)
    if (window.contains(trades[i].trade_date)) ++in_window[trades[i].cusip];
  apply(Rule::MinTrades, [&](std::size_t i) {
    auto it = in_window.find(trades[i].cusip);
    return it == in_window.end() || it->second < opt.min_trades;
  });

  result.trades.reserve(alive.size());
  for (auto i : alive) result.trades.push_back(trades[i]);
  report.surviving_trades = alive.size();
  report.surviving_cusips = distinct_cusips(trades, alive);
  return result;
}

std::vector<BondMonthObs> aggregate_monthly(const std::vector<TradeRecord>& trades, const bonds::BondTable& bonds,
                                            const std::set<Side>& sides) {
  struct Acc {
    double yv = 0, pv = 0, v = 0;
    std::size_t n = 0;
  };
  std::map<std::pair<std::string, int>, Acc> groups;
  for (const auto& t : trades) {
    if (!sides.contains(t.side)) continue;
    auto& a = groups[{t.cusip, YearMonth::of(t.trade_date).index()}];
    a.yv += t.yield * t.par_volume;
    a.pv += t.price * t.par_volume;
    a.v += t.par_volume;
    ++a.n;
  }
  std::vector<BondMonthObs> out;
  out.reserve(groups.size());
  for (const auto& [key, a] : groups) {
    if (a.n == 0 || !(a.v > 0.0)) continue;
    BondMonthObs o;
    o.cusip = key.first;
    o.year_month = YearMonth::from_index(key.second);
    o.vw_yield = a.yv / a.v;
    o.vw_price = a.pv / a.v;
    o.total_volume = a.v;
    o.n_trades = a.n;
    o.remaining_maturity_years = std::nan("");
    if (auto it = bonds.find(o.cusip); it != bonds.end() && it->second.maturity_date)
      o.remaining_maturity_years = year_fraction(o.year_month.last_day(), *it->second.maturity_date);
    out.push_back(std::move(o));
  }
  return out;
}

AttachReport attach_spreads(std::vector<BondMonthObs>& obs, const curve::CurveSet& curves,
                            const spreads::TaxRegime& regime, const bonds::BondTable& bonds) {
  AttachReport report;
  std::set<YearMonth> missing;
  for (auto& o : obs) {
    auto it = bonds.find(o.cusip);
    if (it == bonds.end())
      throw Error(ErrorKind::Validation, fmt::format("observation cusip {} has no bond record", o.cusip));
    const auto& bond = it->second;
    const Date month_end = o.year_month.last_day();
    const auto* zc = curves.as_of(month_end, 31);
    if (!zc) {
      missing.insert(o.year_month);
      ++report.rows_without_curve;
      o.spreads.reset();
      o.retention.reset();
      continue;
    }
    const auto cf = bonds::cashflows(bond, month_end);
    const double r = curve::coupon_equivalent_riskfree_yield(*zc, cf);
    double retention = 1.0;
    if (bond.tax_exempt_federal) {
      const int year = o.year_month.year;
      retention = bond.tax_exempt_state
                      ? spreads::combined_retention(regime, bond.state, bond.county_fips, year, &report.tax_warnings)
                      : 1.0 - regime.federal_rate(year);
    }
    o.retention = retention;
    o.spreads = spreads::compute_spreads(o.vw_yield, r, retention);
  }
  report.missing_curve_months.assign(missing.begin(), missing.end());
  return report;
}

std::vector<TradeRecord> read_trades(const std::filesystem::path& path) {
  auto t = CsvTable::read_file(path);
  t.require_columns({"cusip", "trade_date", "price", "yield", "par_volume", "side"});
  std::vector<TradeRecord> out;
  out.reserve(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    TradeRecord tr;
    try {
      tr.cusip = std::string(t.cell(r, "cusip"));
      tr.trade_date = Date::parse(t.cell(r, "trade_date"));
      tr.price = t.optional_number(r, "price").value_or(std::nan(""));
      tr.yield = t.optional_number(r, "yield").value_or(std::nan(""));
      tr.par_volume = t.number(r, "par_volume");
      tr.side = parse_side(t.cell(r, "side"));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{}: {}", t.where(r), e.what()));
    }
    if (!(tr.par_volume > 0.0))
      throw Error(ErrorKind::Validation, fmt::format("{}: par_volume must be positive", t.where(r)));
    out.push_back(std::move(tr));
  }
  return out;
}

void write_trades(const std::filesystem::path& path, const std::vector<TradeRecord>& trades) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", path.string()));
  CsvWriter w(out, {"cusip", "trade_date", "price", "yield", "par_volume", "side"});
  for (const auto& t : trades)
    w.row({t.cusip, t.trade_date.iso(), format_number(t.price), format_number(t.yield), format_number(t.par_volume),
           std::string(1, side_code(t.side))});
}

void write_clean_report(const std::filesystem::path& path, const CleanReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", path.string()));
  CsvWriter w(out, {"step", "description", "cusips", "transactions", "dropped"});
  w.row({"0", "Input trades", std::to_string(report.input_cusips), std::to_string(report.input_trades), "0"});
  for (std::size_t i = 0; i < kRuleCount; ++i) {
    const auto& s = report.steps[i];
    w.row({std::to_string(i + 1), std::string(describe(static_cast<Rule>(i))), std::to_string(s.cusips_after),
           std::to_string(s.trades_after), std::to_string(s.dropped)});
  }
}

namespace {

const std::vector<std::string> kMonthColumns = {
    "cusip",     "year_month",     "vw_yield",  "vw_price", "total_volume", "n_trades", "remaining_maturity_years",
    "retention", "riskfree_yield", "spread",    "after_tax_yield", "after_tax_spread"};

}  // namespace

void write_bond_months(const std::filesystem::path& path, const std::vector<BondMonthObs>& obs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", path.string()));
  CsvWriter w(out, kMonthColumns);
  for (const auto& o : obs) {
    std::vector<std::string> row = {o.cusip,
                                    o.year_month.str(),
                                    format_number(o.vw_yield),
                                    format_number(o.vw_price),
                                    format_number(o.total_volume),
                                    std::to_string(o.n_trades),
                                    format_number(o.remaining_maturity_years),
                                    o.retention ? format_number(*o.retention) : ""};
    if (o.spreads) {
      row.push_back(format_number(o.spreads->riskfree_yield));
      row.push_back(format_number(o.spreads->spread));
      row.push_back(format_number(o.spreads->after_tax_yield));
      row.push_back(format_number(o.spreads->after_tax_spread));
    } else {
      row.insert(row.end(), 4, "");
    }
    w.row(row);
  }
}

std::vector<BondMonthObs> read_bond_months(const std::filesystem::path& path) {
  auto t = CsvTable::read_file(path);
  t.require_columns({"cusip", "year_month", "vw_yield", "vw_price", "total_volume", "n_trades",
                     "remaining_maturity_years"});
  std::vector<BondMonthObs> out;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    BondMonthObs o;
    o.cusip = std::string(t.cell(r, "cusip"));
    o.year_month = YearMonth::parse(t.cell(r, "year_month"));
    o.vw_yield = t.number(r, "vw_yield");
    o.vw_price = t.number(r, "vw_price");
    o.total_volume = t.number(r, "total_volume");
    o.n_trades = static_cast<std::size_t>(t.integer(r, "n_trades"));
    o.remaining_maturity_years = t.optional_number(r, "remaining_maturity_years").value_or(std::nan(""));
    if (t.has_column("retention")) o.retention = t.optional_number(r, "retention");
    if (t.has_column("spread")) {
      auto rf = t.optional_number(r, "riskfree_yield");
      if (rf && o.retention) o.spreads = spreads::compute_spreads(o.vw_yield, *rf, *o.retention);
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace muni::trades
