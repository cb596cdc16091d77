#pragma once

#include "muni/bonds.hpp"
#include "muni/trades.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace muni::liquidity {

struct WindowTrade {
  Date date;
  double price;
  double volume;
  trades::Side side;
};

/// Trades in the first month after issuance, in time order.
struct IssuanceWindowTrades {
  std::string cusip;
  double offering_price = 100.0;
  std::vector<WindowTrade> trades;
};

inline constexpr int kWindowDays = 30;

/// Selects trades dated in [dated_date, dated_date + days) and keeps them in
/// date order (stable for same-day trades). Requires an offering price.
IssuanceWindowTrades build_window(const bonds::Bond& bond, const std::vector<trades::TradeRecord>& trades,
                                  int days = kWindowDays);

/// Trade-weighted premium of customer purchases over the offering price, bps.
double markup_offering(const IssuanceWindowTrades& w);
/// Volume-weighted mean customer price against the offering price, bps.
double markup_avg_po(const IssuanceWindowTrades& w);
/// Volume-weighted mean customer price against the interdealer mean, bps.
double markup_interdealer(const IssuanceWindowTrades& w);
/// Mean over days with two or more trades of the volume-weighted RMS
/// deviation around that day's volume-weighted mean price.
double price_dispersion(const IssuanceWindowTrades& w);
/// Mean of |ln(P_k / P_{k-1})| / volume_k over consecutive trades, times 1e6.
double amihud(const IssuanceWindowTrades& w);

struct LiquidityRow {
  std::string cusip;
  std::optional<double> markup_bps;
  std::optional<double> markup_po_bps;
  std::optional<double> markup_pv_bps;
  std::optional<double> price_dispersion;
  std::optional<double> amihud;
  std::size_t n_trades_window = 0;
};

/// One row per bond with an offering price; measures that cannot be
/// computed are left empty.
std::vector<LiquidityRow> compute_liquidity(const bonds::BondTable& bonds,
                                            const std::vector<trades::TradeRecord>& trades);
void write_liquidity(const std::filesystem::path& path, const std::vector<LiquidityRow>& rows);

}  // namespace muni::liquidity
