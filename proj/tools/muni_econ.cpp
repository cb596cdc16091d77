#include "muni/errors.hpp"
#include "muni/pipeline.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace {

using muni::pipeline::Config;
using muni::pipeline::RunSummary;

struct Command {
  const char* name;
  const char* help;
  std::vector<std::pair<const char*, const char*>> options;
  std::vector<std::pair<const char*, const char*>> flags;
  RunSummary (*run)(const Config&);
};

const std::vector<Command>& commands() {
  static const std::vector<Command> kCommands = {
      {"clean",
       "Apply the nine trade cleaning rules and write the per-rule report",
       {{"bonds", "Bond reference CSV"},
        {"trades", "Raw trades CSV"},
        {"out", "Output directory"},
        {"window-first", "First date counted by the minimum-trades rule (default 2005-01-01)"},
        {"window-last", "Last date counted by the minimum-trades rule (default 2019-12-31)"},
        {"min-trades", "Minimum trades per CUSIP inside the window (default 10)"},
        {"rating-scale", "Alternative grade,score table"}},
       {},
       muni::pipeline::cmd_clean},
      {"aggregate",
       "Volume-weighted CUSIP-month yields and prices",
       {{"bonds", "Bond reference CSV"},
        {"trades", "Cleaned trades CSV"},
        {"out", "Output directory"},
        {"sides", "Comma list of sides to keep: P, S, D (default P)"},
        {"rating-scale", "Alternative grade,score table"}},
       {},
       muni::pipeline::cmd_aggregate},
      {"spreads",
       "Attach risk-free yields and after-tax spreads to CUSIP-month rows",
       {{"bonds", "Bond reference CSV"},
        {"bond-months", "Output of aggregate"},
        {"curve", "Zero curves: as_of_date,tenor_years,zero_rate_cc"},
        {"out", "Output directory"},
        {"federal-tax-csv", "Replace the shipped federal schedule (year,top_rate)"},
        {"state-tax", "State top rates (state,year,top_rate)"},
        {"local-tax", "Local rates (fips,year,local_rate); enables the local layer"},
        {"rating-scale", "Alternative grade,score table"}},
       {},
       muni::pipeline::cmd_spreads},
      {"liquidity",
       "Issuance-window markups, price dispersion and Amihud illiquidity",
       {{"bonds", "Bond reference CSV"},
        {"trades", "Trades CSV (raw, so primary-market trades are kept)"},
        {"out", "Output directory"},
        {"rating-scale", "Alternative grade,score table"}},
       {},
       muni::pipeline::cmd_liquidity},
      {"match",
       "Nearest-neighbour control counties for each event",
       {{"county", "County-year panel CSV"},
        {"events", "Events CSV: event_id,treated_fips,event_date"},
        {"out", "Output directory"},
        {"k", "Controls per event (default 1)"},
        {"caliper", "Maximum match distance"},
        {"exclude-months", "Skip controls with their own event this close"},
        {"bonds", "Bond reference CSV (with --bond-months adds the yield feature)"},
        {"bond-months", "CUSIP-month yields"},
        {"features", "Extra static features: fips,<name>..."},
        {"rating-scale", "Alternative grade,score table"}},
       {{"raw-distance", "Use unstandardized Euclidean distance"},
        {"same-region", "Restrict controls to the treated county's census region"}},
       muni::pipeline::cmd_match},
      {"fit",
       "Fixed-effects regression with clustered inference",
       {{"data", "Panel CSV"},
        {"out", "Output directory"},
        {"spec", "Specification file (key=value)"},
        {"outcome", "Outcome column"},
        {"regressors", "Comma list of regressors"},
        {"fe", "Comma list of absorbed effects; a#b for interactions"},
        {"cluster", "One or two cluster columns"},
        {"weights", "Weight column"},
        {"treat", "Treatment indicator (adds treat x post)"},
        {"post", "Post indicator"},
        {"group", "Split treat x post by this column"},
        {"time", "Time column for the group#time effect"},
        {"diff", "Two coefficients to compare: a,b"},
        {"name", "Output file prefix (default fit)"},
        {"tol", "Demeaning tolerance"},
        {"max-iter", "Demeaning iteration cap"}},
       {{"lpm", "Require a 0/1 outcome"}},
       muni::pipeline::cmd_fit},
      {"event-study",
       "Dynamic treated/control event-time coefficients and pre-trend test",
       {{"data", "Panel CSV"},
        {"out", "Output directory"},
        {"spec", "Specification file (key=value)"},
        {"outcome", "Outcome column"},
        {"regressors", "Additional controls"},
        {"fe", "Comma list of absorbed effects"},
        {"cluster", "One or two cluster columns"},
        {"weights", "Weight column"},
        {"cohort", "0/1 treated cohort column (default treat)"},
        {"event-time", "Months relative to the event (default event_time)"},
        {"bucket", "quarter, half or year (default quarter)"},
        {"benchmark", "Omitted bucket (default -1)"},
        {"window", "Keep event months in [-window, window-1] plus the benchmark"},
        {"trend-unit", "Column whose levels get linear trends"},
        {"trend-time", "Numeric time index for the trends"},
        {"level", "Confidence level (default 0.95)"},
        {"tol", "Demeaning tolerance"},
        {"max-iter", "Demeaning iteration cap"}},
       {},
       muni::pipeline::cmd_event_study},
      {"impact",
       "Back-of-envelope wealth and interest-cost effects of a yield change",
       {{"outstanding", "Par outstanding, USD"},
        {"duration", "Macaulay duration, years"},
        {"yield", "Yield level, decimal"},
        {"dy", "Yield change, decimal"},
        {"principal", "Principal for the annual interest delta (default outstanding)"},
        {"out", "Optional output directory"}},
       {},
       muni::pipeline::cmd_impact},
      {"synth",
       "Generate a synthetic bond, trade, curve, county and panel fixture",
       {{"out", "Output directory"},
        {"seed", "Generator seed (default 1)"},
        {"n-bonds", "Clean bonds (default 40)"},
        {"n-counties", "Counties in the county panel (default 40)"},
        {"n-events", "Events (default 5)"},
        {"n-units", "Panel units (default 60)"},
        {"n-periods", "Panel months (default 48)"},
        {"n-clusters", "Panel clusters (default 30)"},
        {"beta0", "True treatment effect, bps (default 15.25)"},
        {"pre-trend", "Treated pre-event slope per month (default 0)"},
        {"staggered", "1 for pair-specific event months (default 1)"},
        {"plant-unmatched", "Trades with unknown CUSIPs"},
        {"plant-maturity-range", "Trades after maturity"},
        {"plant-missing-coupon", "Trades on a bond without coupon"},
        {"plant-price-range", "Trades priced outside [50, 150]"},
        {"plant-primary-market", "Trades on or before the dated date"},
        {"plant-near-issuance", "Trades 1-15 days after the dated date"},
        {"plant-short-maturity", "Trades within a year of maturity"},
        {"plant-yield-range", "Trades with yields outside [0, 50%]"},
        {"plant-thin-bonds", "Bonds with fewer than ten trades"}},
       {},
       muni::pipeline::cmd_synth},
  };
  return kCommands;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Municipal bond econometrics pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(muni::pipeline::tool_version()));

  struct Bound {
    const Command* command;
    CLI::App* app;
    std::string config;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
  };
  std::vector<Bound> bound(commands().size());
  for (std::size_t i = 0; i < commands().size(); ++i) {
    const auto& cmd = commands()[i];
    auto& b = bound[i];
    b.command = &cmd;
    b.app = app.add_subcommand(cmd.name, cmd.help);
    b.app->add_option("--config", b.config, "key=value file; flags given on the command line win");
    for (const auto& [key, help] : cmd.options) b.app->add_option(std::string("--") + key, b.values[key], help);
    for (const auto& [key, help] : cmd.flags) b.app->add_flag(std::string("--") + key, b.flags[key], help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (auto& b : bound) {
    if (!b.app->parsed()) continue;
    try {
      Config config;
      if (!b.config.empty()) config = muni::pipeline::load_config(b.config);
      for (const auto& [key, help] : b.command->options)
        if (b.app->get_option(std::string("--") + key)->count() > 0) config[key] = b.values[key];
      for (const auto& [key, help] : b.command->flags)
        if (b.flags[key]) config[key] = "1";

      const auto summary = b.command->run(config);
      if (std::string(b.command->name) == "impact") {
        for (const auto& [k, v] : summary.stats) fmt::print("{}={}\n", k, v);
      } else {
        for (const auto& [k, v] : summary.stats) fmt::print(stderr, "{}: {}\n", k, v);
        fmt::print(stderr, "manifest: {}\n", summary.manifest.string());
      }
      return 0;
    } catch (const muni::Error& e) {
      fmt::print(stderr, "error: {}\n", e.what());
      return muni::is_validation_error(e.kind()) ? 2 : 1;
    } catch (const std::exception& e) {
      fmt::print(stderr, "error: {}\n", e.what());
      return 1;
    }
  }
  return 2;
}
