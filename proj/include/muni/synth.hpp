#pragma once

#include "muni/bonds.hpp"
#include "muni/fiscal.hpp"
#include "muni/matching.hpp"
#include "muni/panel.hpp"
#include "muni/trades.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace muni::synth {

/// Counter-based generator: draw i is SplitMix64's finalizer applied to
/// seed-derived key + (i + 1) * golden gamma. Integer state only.
class Rng {
public:
  static constexpr std::string_view kName = "splitmix64-counter";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) from the top 53 bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n);
  int between(int lo, int hi);  // inclusive
  /// Standard normal by Box-Muller, one value per two uniforms.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Rounds to a fixed number of decimals so emitted CSVs carry no platform
/// noise in the last bits.
double round_to(double value, int decimals);

using Manifest = std::map<std::string, std::string>;
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// Two-way panel of units observed monthly. Units come in pairs (even unit
/// treated, odd unit control) sharing an event month; clusters group pairs.
struct PanelDgp {
  std::uint64_t seed = 1;
  int n_units = 60;
  int n_periods = 48;
  double beta0 = 15.25;
  double unit_fe_sd = 20.0;
  double time_fe_sd = 5.0;
  double pair_fe_sd = 5.0;
  double noise_sd = 10.0;
  double cluster_sd = 5.0;  // cluster x period shock
  int n_clusters = 30;
  /// Event month of every pair; with `staggered` each pair draws one
  /// uniformly in [event_lo, event_hi].
  int event_period = 24;
  bool staggered = false;
  int event_lo = 18;
  int event_hi = 30;
  double pre_trend = 0.0;  // treated slope per month before the event
  double gamma = 2.0;      // coefficient on the control x
};

struct PanelSample {
  panel::Frame frame;  // unit, pair, cluster, period, treat, post, event_time, x, y
  Manifest manifest;
};

/// y = unit FE + period FE + pair FE + beta0 * treat * post
///     + pre_trend * treat * min(event_time, 0) + gamma * x
///     + cluster shock + noise.
PanelSample gen_panel(const PanelDgp& dgp);

/// Planted violations, one count per cleaning rule. `thin_bonds` bonds get
/// fewer than ten clean trades; all of their trades fall to the last rule.
struct ViolationRecipe {
  std::size_t unmatched = 0;
  std::size_t maturity_range = 0;
  std::size_t missing_coupon = 0;
  std::size_t price_range = 0;
  std::size_t primary_market = 0;
  std::size_t near_issuance = 0;
  std::size_t short_maturity = 0;
  std::size_t yield_range = 0;
  std::size_t thin_bonds = 0;
};

struct TradeSample {
  bonds::BondTable bonds;
  std::vector<trades::TradeRecord> trades;
  DateRange window;
  trades::CleanReport expected;
  Manifest manifest;
};

/// `n_bonds` well-behaved bonds with 10 to 20 clean trades each, plus the
/// planted violations, shuffled. The expected report is derived from the
/// construction, not by running the cleaner.
TradeSample gen_trades(std::uint64_t seed, std::size_t n_bonds, const ViolationRecipe& recipe);

/// Monthly zero curves (month ends) between two months, inclusive.
std::vector<curve::ZeroCurve> gen_curves(std::uint64_t seed, const YearMonth& first, const YearMonth& last);
void write_curves(const std::filesystem::path& path, const std::vector<curve::ZeroCurve>& curves);

struct CountySample {
  fiscal::CountyPanel panel;
  std::vector<matching::Event> events;
};

/// County-year labor and finance rows for `fips` over [first_year, last_year]
/// and `n_events` events on distinct counties.
CountySample gen_counties(std::uint64_t seed, const std::vector<std::string>& fips, int first_year, int last_year,
                          std::size_t n_events);
void write_county_panel(const std::filesystem::path& path, const fiscal::CountyPanel& panel);
void write_events(const std::filesystem::path& path, const std::vector<matching::Event>& events);

}  // namespace muni::synth
