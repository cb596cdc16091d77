#include "muni/liquidity.hpp"

#include "muni/csv.hpp"
#include "muni/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>

namespace muni::liquidity {

using trades::Side;

namespace {

struct VwMean {
  double weighted = 0;
  double volume = 0;
  std::size_t n = 0;
  double mean() const { return weighted / volume; }
};

VwMean vw_price(const IssuanceWindowTrades& w, Side side) {
  VwMean m;
  for (const auto& t : w.trades) {
    if (t.side != side) continue;
    m.weighted += t.volume * t.price;
    m.volume += t.volume;
    ++m.n;
  }
  return m;
}

void require_customer_buys(const IssuanceWindowTrades& w, const VwMean& m) {
  if (m.n == 0)
    throw Error(ErrorKind::NoCustomerTrades, fmt::format("{}: no customer purchases in issuance window", w.cusip));
}

}  // namespace

IssuanceWindowTrades build_window(const bonds::Bond& bond, const std::vector<trades::TradeRecord>& all, int days) {
  if (!bond.offering_price)
    throw Error(ErrorKind::MissingField, fmt::format("bond {}: offering_price", bond.cusip));
  IssuanceWindowTrades w;
  w.cusip = bond.cusip;
  w.offering_price = *bond.offering_price;
  for (const auto& t : all) {
    if (t.cusip != bond.cusip) continue;
    int age = days_between(bond.dated_date, t.trade_date);
    if (age >= 0 && age < days) w.trades.push_back({t.trade_date, t.price, t.par_volume, t.side});
  }
  std::stable_sort(w.trades.begin(), w.trades.end(),
                   [](const WindowTrade& a, const WindowTrade& b) { return a.date < b.date; });
  return w;
}

double markup_offering(const IssuanceWindowTrades& w) {
  const double o = w.offering_price;
  double premium = 0, volume = 0;
  std::size_t n = 0;
  for (const auto& t : w.trades) {
    if (t.side != Side::CustomerBuy) continue;
    premium += t.volume * (t.price - o);
    volume += t.volume;
    ++n;
  }
  if (n == 0)
    throw Error(ErrorKind::NoCustomerTrades, fmt::format("{}: no customer purchases in issuance window", w.cusip));
  return 1e4 * premium / (o * volume);
}

double markup_avg_po(const IssuanceWindowTrades& w) {
  auto p = vw_price(w, Side::CustomerBuy);
  require_customer_buys(w, p);
  return 1e4 * (p.mean() - w.offering_price) / w.offering_price;
}

double markup_interdealer(const IssuanceWindowTrades& w) {
  auto p = vw_price(w, Side::CustomerBuy);
  require_customer_buys(w, p);
  auto v = vw_price(w, Side::Interdealer);
  if (v.n == 0)
    throw Error(ErrorKind::NoInterdealerTrades, fmt::format("{}: no interdealer trades in issuance window", w.cusip));
  return 1e4 * (p.mean() - v.mean()) / v.mean();
}

double price_dispersion(const IssuanceWindowTrades& w) {
  std::map<Date, std::vector<const WindowTrade*>> by_day;
  for (const auto& t : w.trades) by_day[t.date].push_back(&t);
  double total = 0;
  std::size_t days = 0;
  for (const auto& [day, ts] : by_day) {
    if (ts.size() < 2) continue;
    // Centered on the day's first price.
    const double anchor = ts.front()->price;
    double dv = 0, v = 0;
    for (const auto* t : ts) {
      dv += t->volume * (t->price - anchor);
      v += t->volume;
    }
    const double shift = dv / v;
    double ss = 0;
    for (const auto* t : ts) {
      const double d = (t->price - anchor) - shift;
      ss += t->volume * d * d;
    }
    total += std::sqrt(ss / v);
    ++days;
  }
  if (days == 0)
    throw Error(ErrorKind::InsufficientTrades, fmt::format("{}: no day with two or more trades", w.cusip));
  return total / static_cast<double>(days);
}

double amihud(const IssuanceWindowTrades& w) {
  if (w.trades.size() < 2)
    throw Error(ErrorKind::InsufficientTrades, fmt::format("{}: amihud needs two trades", w.cusip));
  double total = 0;
  for (std::size_t k = 1; k < w.trades.size(); ++k)
    total += std::abs(std::log(w.trades[k].price / w.trades[k - 1].price)) / w.trades[k].volume;
  return 1e6 * total / static_cast<double>(w.trades.size() - 1);
}

std::vector<LiquidityRow> compute_liquidity(const bonds::BondTable& bonds,
                                            const std::vector<trades::TradeRecord>& trades) {
  std::map<std::string, std::vector<trades::TradeRecord>> by_cusip;
  for (const auto& t : trades) by_cusip[t.cusip].push_back(t);

  auto attempt = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  std::vector<LiquidityRow> rows;
  for (const auto& [cusip, bond] : bonds) {
    if (!bond.offering_price) continue;
    static const std::vector<trades::TradeRecord> kNone;
    auto it = by_cusip.find(cusip);
    auto w = build_window(bond, it == by_cusip.end() ? kNone : it->second);
    LiquidityRow row;
    row.cusip = cusip;
    row.n_trades_window = w.trades.size();
    row.markup_bps = attempt([&] { return markup_offering(w); });
    row.markup_po_bps = attempt([&] { return markup_avg_po(w); });
    row.markup_pv_bps = attempt([&] { return markup_interdealer(w); });
    row.price_dispersion = attempt([&] { return price_dispersion(w); });
    row.amihud = attempt([&] { return amihud(w); });
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_liquidity(const std::filesystem::path& path, const std::vector<LiquidityRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", path.string()));
  CsvWriter w(out, {"cusip", "markup_bps", "markup_po_bps", "markup_pv_bps", "price_dispersion", "amihud",
                    "n_trades_window"});
  auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& r : rows)
    w.row({r.cusip, cell(r.markup_bps), cell(r.markup_po_bps), cell(r.markup_pv_bps), cell(r.price_dispersion),
           cell(r.amihud), std::to_string(r.n_trades_window)});
}

}  // namespace muni::liquidity
