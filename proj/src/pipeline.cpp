#include "muni/pipeline.hpp"

#include "muni/bonds.hpp"
#include "muni/csv.hpp"
#include "muni/errors.hpp"
#include "muni/liquidity.hpp"
#include "muni/matching.hpp"
#include "muni/panel.hpp"
#include "muni/spreads.hpp"
#include "muni/synth.hpp"
#include "muni/trades.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <optional>
#include <sstream>

#ifndef MUNI_ECON_VERSION
#define MUNI_ECON_VERSION "0.0.0"
#endif

namespace muni::pipeline {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> get(const Config& c, const std::string& key) {
  auto it = c.find(key);
  if (it == c.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

const std::string& need(const Config& c, const std::string& key) {
  auto it = c.find(key);
  if (it == c.end() || it->second.empty())
    throw Error(ErrorKind::Validation, fmt::format("missing required setting '{}'", key));
  return it->second;
}

double to_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Validation, fmt::format("setting '{}' = '{}' is not a number", key, text));
  }
}

double number_or(const Config& c, const std::string& key, double fallback) {
  auto v = get(c, key);
  return v ? to_number(key, *v) : fallback;
}

long long integer_or(const Config& c, const std::string& key, long long fallback) {
  auto v = get(c, key);
  if (!v) return fallback;
  double d = to_number(key, *v);
  if (d != std::floor(d)) throw Error(ErrorKind::Validation, fmt::format("setting '{}' must be an integer", key));
  return static_cast<long long>(d);
}

bool flag(const Config& c, const std::string& key) {
  auto v = get(c, key);
  if (!v) return false;
  if (*v == "1" || *v == "true" || *v == "yes") return true;
  if (*v == "0" || *v == "false" || *v == "no") return false;
  throw Error(ErrorKind::Validation, fmt::format("setting '{}' = '{}' is not a boolean", key, *v));
}

fs::path input(const Config& c, const std::string& key) {
  fs::path p = need(c, key);
  if (!fs::is_regular_file(p))
    throw Error(ErrorKind::Validation, fmt::format("input '{}' does not exist: {}", key, p.string()));
  return p;
}

std::optional<fs::path> optional_input(const Config& c, const std::string& key) {
  if (!get(c, key)) return std::nullopt;
  return input(c, key);
}

fs::path out_dir(const Config& c) {
  fs::path p = need(c, "out");
  fs::create_directories(p);
  return p;
}

class Manifest {
public:
  Manifest(std::string command, const Config& config) : command_(std::move(command)), config_(config) {}

  void input(const std::string& name, const fs::path& p) { inputs_[name] = p; }
  void output(const fs::path& p) { outputs_.push_back(p); }
  void stat(const std::string& k, std::string v) { stats_[k] = std::move(v); }

  RunSummary write(const fs::path& dir) {
    std::string canonical;
    for (const auto& [k, v] : config_) canonical += k + "=" + v + "\n";
    fs::path path = dir / (command_ + ".manifest");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", path.string()));
    out << "command=" << command_ << '\n'
        << "tool_version=" << tool_version() << '\n'
        << "config_sha256=" << sha256_hex(canonical) << '\n';
    for (const auto& [k, v] : config_) out << "config." << k << '=' << v << '\n';
    for (const auto& [k, p] : inputs_) out << "input." << k << '=' << p.string() << '\n'
                                           << "input." << k << ".sha256=" << file_sha256(p) << '\n';
    for (const auto& p : outputs_)
      out << "output." << p.filename().string() << ".sha256=" << file_sha256(p) << '\n';
    for (const auto& [k, v] : stats_) out << "stat." << k << '=' << v << '\n';
    return {path, outputs_, stats_};
  }

private:
  std::string command_;
  Config config_;
  std::map<std::string, fs::path> inputs_;
  std::vector<fs::path> outputs_;
  std::map<std::string, std::string> stats_;
};

const bonds::RatingScale& scale_for(const Config& c, std::optional<bonds::RatingScale>& storage) {
  if (auto p = optional_input(c, "rating-scale")) {
    storage = bonds::RatingScale::read(*p);
    return *storage;
  }
  return bonds::RatingScale::default_scale();
}

std::set<trades::Side> parse_sides(const std::string& text) {
  std::set<trades::Side> sides;
  for (const auto& s : split_list(text)) sides.insert(trades::parse_side(s));
  if (sides.empty()) throw Error(ErrorKind::Validation, "side filter is empty");
  return sides;
}

// Spec file keys first, then command-line keys on top.
Config with_spec(const Config& c) {
  Config merged;
  if (auto p = optional_input(c, "spec")) merged = load_config(*p);
  for (const auto& [k, v] : c) merged[k] = v;
  return merged;
}

panel::RegressionSpec regression_spec(const Config& c, bool need_regressors) {
  panel::RegressionSpec s;
  s.outcome = need(c, "outcome");
  if (auto r = get(c, "regressors")) s.regressors = split_list(*r);
  if (need_regressors && s.regressors.empty() && !get(c, "treat"))
    throw Error(ErrorKind::Validation, "no regressors given");
  if (auto f = get(c, "fe")) s.fe = split_list(*f);
  if (auto cl = get(c, "cluster")) s.cluster = split_list(*cl);
  s.weights = get(c, "weights");
  if (auto i = get(c, "intercept")) s.intercept = flag(c, "intercept");
  return s;
}

panel::FitOptions fit_options(const Config& c) {
  panel::FitOptions o;
  o.demean_tol = number_or(c, "tol", o.demean_tol);
  o.max_iter = static_cast<int>(integer_or(c, "max-iter", o.max_iter));
  o.drop_singletons = !get(c, "drop-singletons") || flag(c, "drop-singletons");
  return o;
}

}  // namespace

std::string_view tool_version() { return MUNI_ECON_VERSION; }

Config normalize(const Config& raw) {
  Config out;
  for (const auto& [k, v] : raw) {
    std::string key = k;
    std::replace(key.begin(), key.end(), '_', '-');
    out[key] = v;
  }
  return out;
}

Config load_config(const fs::path& path) {
  if (!fs::is_regular_file(path))
    throw Error(ErrorKind::Validation, fmt::format("config file does not exist: {}", path.string()));
  return normalize(read_key_values(path));
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Validation, "SHA-256 computation failed");
  std::string hex;
  for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Validation, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

RunSummary cmd_clean(const Config& raw) {
  const auto c = normalize(raw);
  Manifest m("clean", c);
  std::optional<bonds::RatingScale> scale_storage;
  const auto bonds_path = input(c, "bonds"), trades_path = input(c, "trades");
  m.input("bonds", bonds_path);
  m.input("trades", trades_path);
  const auto bonds = bonds::read_bonds(bonds_path, scale_for(c, scale_storage));
  const auto raw_trades = trades::read_trades(trades_path);
  const DateRange window{Date::parse(get(c, "window-first").value_or("2005-01-01")),
                         Date::parse(get(c, "window-last").value_or("2019-12-31"))};
  if (window.last < window.first) throw Error(ErrorKind::Validation, "window-last precedes window-first");
  trades::CleanOptions opt;
  const auto min_trades = integer_or(c, "min-trades", static_cast<long long>(opt.min_trades));
  if (min_trades < 0) throw Error(ErrorKind::Validation, "min-trades must be non-negative");
  opt.min_trades = static_cast<std::size_t>(min_trades);

  const auto result = trades::clean(raw_trades, bonds, window, opt);
  const auto dir = out_dir(c);
  trades::write_trades(dir / "trades_clean.csv", result.trades);
  trades::write_clean_report(dir / "clean_report.csv", result.report);
  m.output(dir / "trades_clean.csv");
  m.output(dir / "clean_report.csv");
  m.stat("input_trades", std::to_string(result.report.input_trades));
  m.stat("surviving_trades", std::to_string(result.report.surviving_trades));
  m.stat("surviving_cusips", std::to_string(result.report.surviving_cusips));
  return m.write(dir);
}

RunSummary cmd_aggregate(const Config& raw) {
  const auto c = normalize(raw);
  Manifest m("aggregate", c);
  std::optional<bonds::RatingScale> scale_storage;
  const auto bonds_path = input(c, "bonds"), trades_path = input(c, "trades");
  m.input("bonds", bonds_path);
  m.input("trades", trades_path);
  const auto bonds = bonds::read_bonds(bonds_path, scale_for(c, scale_storage));
  const auto obs = trades::aggregate_monthly(trades::read_trades(trades_path), bonds,
                                             parse_sides(get(c, "sides").value_or("P")));
  const auto dir = out_dir(c);
  trades::write_bond_months(dir / "bond_months.csv", obs);
  m.output(dir / "bond_months.csv");
  m.stat("rows", std::to_string(obs.size()));
  return m.write(dir);
}

RunSummary cmd_spreads(const Config& raw) {
  const auto c = normalize(raw);
  Manifest m("spreads", c);
  std::optional<bonds::RatingScale> scale_storage;
  const auto bonds_path = input(c, "bonds"), months_path = input(c, "bond-months"), curve_path = input(c, "curve");
  m.input("bonds", bonds_path);
  m.input("bond-months", months_path);
  m.input("curve", curve_path);
  auto regime = spreads::TaxRegime::builtin_federal();
  if (auto p = optional_input(c, "federal-tax-csv")) {
    regime.load_federal_csv(*p);
    m.input("federal-tax-csv", *p);
  }
  if (auto p = optional_input(c, "state-tax")) {
    regime.load_state_csv(*p);
    m.input("state-tax", *p);
  }
  if (auto p = optional_input(c, "local-tax")) {
    regime.load_local_csv(*p);
    m.input("local-tax", *p);
  }
  const auto bonds = bonds::read_bonds(bonds_path, scale_for(c, scale_storage));
  auto obs = trades::read_bond_months(months_path);
  const auto curves = curve::read_curves(curve_path);
  const auto report = trades::attach_spreads(obs, curves, regime, bonds);
  const auto dir = out_dir(c);
  trades::write_bond_months(dir / "bond_months_spreads.csv", obs);
  m.output(dir / "bond_months_spreads.csv");
  m.stat("rows", std::to_string(obs.size()));
  m.stat("rows_without_curve", std::to_string(report.rows_without_curve));
  std::string months;
  for (const auto& ym : report.missing_curve_months) months += (months.empty() ? "" : ",") + ym.str();
  m.stat("missing_curve_months", months);
  m.stat("missing_state_rates", std::to_string(report.tax_warnings.missing_state));
  m.stat("missing_local_rates", std::to_string(report.tax_warnings.missing_local));
  return m.write(dir);
}

RunSummary cmd_liquidity(const Config& raw) {
  const auto c = normalize(raw);
  Manifest m("liquidity", c);
  std::optional<bonds::RatingScale> scale_storage;
  const auto bonds_path = input(c, "bonds"), trades_path = input(c, "trades");
  m.input("bonds", bonds_path);
  m.input("trades", trades_path);
  const auto rows = liquidity::compute_liquidity(bonds::read_bonds(bonds_path, scale_for(c, scale_storage)),
                                                 trades::read_trades(trades_path));
  const auto dir = out_dir(c);
  liquidity::write_liquidity(dir / "liquidity.csv", rows);
  m.output(dir / "liquidity.csv");
  m.stat("rows", std::to_string(rows.size()));
  return m.write(dir);
}

RunSummary cmd_match(const Config& raw) {
  const auto c = normalize(raw);
  Manifest m("match", c);
  const auto county_path = input(c, "county"), events_path = input(c, "events");
  m.input("county", county_path);
  m.input("events", events_path);
  const auto panel = fiscal::read_county_panel(county_path);
  const auto events = matching::read_events(events_path);

  std::optional<bonds::BondTable> bonds;
  std::optional<std::vector<trades::BondMonthObs>> yields;
  if (get(c, "bond-months")) {
    std::optional<bonds::RatingScale> scale_storage;
    const auto bp = input(c, "bonds"), yp = input(c, "bond-months");
    m.input("bonds", bp);
    m.input("bond-months", yp);
    bonds = bonds::read_bonds(bp, scale_for(c, scale_storage));
    yields = trades::read_bond_months(yp);
  }
  std::optional<matching::FeatureTable> extra;
  if (auto p = optional_input(c, "features")) {
    m.input("features", *p);
    extra = matching::read_feature_table(*p);
  }

  matching::EventMatchOptions opt;
  const auto k = integer_or(c, "k", 1);
  if (k < 1) throw Error(ErrorKind::Validation, "k must be at least 1");
  opt.match.k = static_cast<std::size_t>(k);
  opt.match.standardize = !flag(c, "raw-distance");
  opt.match.same_region = flag(c, "same-region");
  if (get(c, "caliper")) {
    opt.match.caliper = number_or(c, "caliper", 0);
    if (!(*opt.match.caliper >= 0)) throw Error(ErrorKind::Validation, "caliper must be non-negative");
  }
  if (get(c, "exclude-months")) opt.exclude_event_months = static_cast<int>(integer_or(c, "exclude-months", 0));

  const auto res = matching::match_events(events, panel, yields ? &*yields : nullptr, bonds ? &*bonds : nullptr,
                                          extra ? &*extra : nullptr, opt);
  const auto dir = out_dir(c);
  matching::write_matches(dir / "matches.csv", res.results);
  m.output(dir / "matches.csv");
  if (!res.features.empty()) {
    matching::write_balance(dir / "balance.csv", matching::match_report(res.feature_names, res.features));
    m.output(dir / "balance.csv");
  }
  m.stat("events", std::to_string(events.size()));
  m.stat("matched", std::to_string(res.results.size()));
  std::string skipped;
  for (const auto& s : res.skipped) skipped += (skipped.empty() ? "" : ",") + s;
  m.stat("skipped", skipped);
  return m.write(dir);
}

RunSummary cmd_fit(const Config& raw) {
  const auto c = with_spec(normalize(raw));
  Manifest m("fit", c);
  const auto data_path = input(c, "data");
  m.input("data", data_path);
  if (auto p = get(c, "spec")) m.input("spec", *p);
  auto frame = panel::Frame::read_csv(data_path);
  auto spec = regression_spec(c, true);
  if (auto treat = get(c, "treat")) {
    auto did = panel::build_did(frame, *treat, need(c, "post"), get(c, "group"), get(c, "time"));
    spec.regressors.insert(spec.regressors.begin(), did.regressors.begin(), did.regressors.end());
    spec.fe.insert(spec.fe.end(), did.fe.begin(), did.fe.end());
  }
  const auto opt = fit_options(c);
  const auto f = flag(c, "lpm") ? panel::fit_lpm(frame, spec, opt) : panel::fit(frame, spec, opt);

  const auto dir = out_dir(c);
  const auto prefix = get(c, "name").value_or("fit");
  const auto results = dir / (prefix + "_results.csv"), diag = dir / (prefix + "_diagnostics.txt");
  panel::write_fit(results, diag, f);
  if (auto d = get(c, "diff")) {
    auto names = split_list(*d);
    if (names.size() != 2) throw Error(ErrorKind::Validation, "diff expects two coefficient names");
    auto t = panel::diff_test(f, names[0], names[1]);
    std::ofstream out(diag, std::ios::binary | std::ios::app);
    out << "diff_terms=" << names[0] << ',' << names[1] << '\n'
        << "diff_estimate=" << format_number(t.difference) << '\n'
        << "diff_se=" << format_number(t.se) << '\n'
        << "diff_p=" << format_number(t.p_value) << '\n';
  }
  m.output(results);
  m.output(diag);
  m.stat("n", std::to_string(f.n));
  m.stat("k", std::to_string(f.k()));
  return m.write(dir);
}

RunSummary cmd_event_study(const Config& raw) {
  const auto c = with_spec(normalize(raw));
  Manifest m("event-study", c);
  const auto data_path = input(c, "data");
  m.input("data", data_path);
  if (auto p = get(c, "spec")) m.input("spec", *p);
  auto frame = panel::Frame::read_csv(data_path);
  const auto event_time = get(c, "event-time").value_or("event_time");
  const auto bucket = panel::parse_bucket(get(c, "bucket").value_or("quarter"));
  const int benchmark = static_cast<int>(integer_or(c, "benchmark", -1));
  if (benchmark == 0) throw Error(ErrorKind::Validation, "bucket 0 does not exist; buckets run ..., -1, 1, ...");

  if (get(c, "window")) {
    const auto window = integer_or(c, "window", 0);
    if (window <= 0) throw Error(ErrorKind::Validation, "window must be positive");
    const auto& et = frame.numeric(event_time);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < et.size(); ++i) {
      if (std::isnan(et[i])) continue;
      const bool inside = et[i] >= -static_cast<double>(window) && et[i] <= static_cast<double>(window - 1);
      if (inside || panel::bucket_of(static_cast<int>(et[i]), bucket) == benchmark) keep.push_back(i);
    }
    frame = frame.select(keep);
  }

  std::optional<panel::TrendSpec> trend;
  if (auto u = get(c, "trend-unit")) trend = panel::TrendSpec{*u, need(c, "trend-time")};
  const auto layout =
      panel::build_event_study(frame, get(c, "cohort").value_or("treat"), event_time, bucket, benchmark, trend);
  auto spec = regression_spec(c, false);
  auto regs = layout.regressors();
  spec.regressors.insert(spec.regressors.begin(), regs.begin(), regs.end());
  const auto f = panel::fit(frame, spec, fit_options(c));
  const double level = number_or(c, "level", 0.95);
  const auto summary = panel::summarize_event_study(f, layout, level);

  const auto dir = out_dir(c);
  const auto table = dir / "event_study.csv";
  {
    std::ofstream out(table, std::ios::binary);
    if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", table.string()));
    CsvWriter w(out, {"bucket", "treated", "control", "difference", "se", "ci_low", "ci_high"});
    for (const auto& b : summary.contrasts)
      w.row({std::to_string(b.bucket), format_number(b.treated), format_number(b.control), format_number(b.difference),
             format_number(b.se), format_number(b.ci_low), format_number(b.ci_high)});
  }
  const auto results = dir / "event_fit_results.csv", diag = dir / "event_fit_diagnostics.txt";
  panel::write_fit(results, diag, f);
  {
    std::ofstream out(diag, std::ios::binary | std::ios::app);
    out << "benchmark=" << benchmark << '\n';
    if (summary.pretrend)
      out << "pretrend_q=" << summary.pretrend->q << '\n'
          << "pretrend_f=" << format_number(summary.pretrend->f_stat) << '\n'
          << "pretrend_p=" << format_number(summary.pretrend->p_value) << '\n';
  }
  m.output(table);
  m.output(results);
  m.output(diag);
  m.stat("buckets", std::to_string(summary.contrasts.size()));
  if (summary.pretrend) m.stat("pretrend_p", format_number(summary.pretrend->p_value));
  return m.write(dir);
}

RunSummary cmd_impact(const Config& raw) {
  const auto c = normalize(raw);
  const double outstanding = to_number("outstanding", need(c, "outstanding"));
  const double duration = to_number("duration", need(c, "duration"));
  const double y = to_number("yield", need(c, "yield"));
  const double dy = to_number("dy", need(c, "dy"));
  const double principal = number_or(c, "principal", outstanding);
  if (!(outstanding >= 0) || !(duration >= 0) || !(principal >= 0))
    throw Error(ErrorKind::Validation, "outstanding, duration and principal must be non-negative");
  const double wealth = bonds::wealth_impact(outstanding, duration, y, dy);
  const double interest = bonds::annual_interest_delta(principal, dy);
  RunSummary s;
  s.stats["wealth_impact"] = format_number(wealth);
  s.stats["annual_interest_delta"] = format_number(interest);
  if (get(c, "out")) {
    Manifest m("impact", c);
    const auto dir = out_dir(c);
    const auto path = dir / "impact.csv";
    {
      std::ofstream out(path, std::ios::binary);
      CsvWriter w(out, {"outstanding", "duration", "yield", "dy", "principal", "wealth_impact",
                        "annual_interest_delta"});
      w.row({format_number(outstanding), format_number(duration), format_number(y), format_number(dy),
             format_number(principal), format_number(wealth), format_number(interest)});
    }
    m.output(path);
    m.stat("wealth_impact", s.stats["wealth_impact"]);
    m.stat("annual_interest_delta", s.stats["annual_interest_delta"]);
    auto written = m.write(dir);
    written.stats = s.stats;
    return written;
  }
  return s;
}

RunSummary cmd_synth(const Config& raw) {
  const auto c = normalize(raw);
  Manifest m("synth", c);
  const auto seed = static_cast<std::uint64_t>(integer_or(c, "seed", 1));
  const auto dir = out_dir(c);
  auto count = [&](const std::string& key, long long fallback) {
    auto v = integer_or(c, key, fallback);
    if (v < 0) throw Error(ErrorKind::Validation, fmt::format("setting '{}' must be non-negative", key));
    return static_cast<std::size_t>(v);
  };

  synth::ViolationRecipe recipe;
  recipe.unmatched = count("plant-unmatched", 3);
  recipe.maturity_range = count("plant-maturity-range", 3);
  recipe.missing_coupon = count("plant-missing-coupon", 3);
  recipe.price_range = count("plant-price-range", 5);
  recipe.primary_market = count("plant-primary-market", 4);
  recipe.near_issuance = count("plant-near-issuance", 4);
  recipe.short_maturity = count("plant-short-maturity", 3);
  recipe.yield_range = count("plant-yield-range", 3);
  recipe.thin_bonds = count("plant-thin-bonds", 2);
  auto ts = synth::gen_trades(seed, count("n-bonds", 40), recipe);

  std::vector<std::string> fips;
  for (const auto& [cusip, b] : ts.bonds) fips.push_back(b.county_fips);
  std::sort(fips.begin(), fips.end());
  fips.erase(std::unique(fips.begin(), fips.end()), fips.end());
  static constexpr const char* kStates[] = {"06", "17", "36", "48", "12", "53", "39", "13"};
  const auto n_counties = count("n-counties", 40);
  for (std::size_t i = 0; fips.size() < n_counties; ++i)
    fips.push_back(fmt::format("{}{:03d}", kStates[i % std::size(kStates)], 101 + 2 * i));
  std::sort(fips.begin(), fips.end());
  auto counties = synth::gen_counties(seed, fips, 2005, 2019, count("n-events", 5));

  synth::PanelDgp dgp;
  dgp.seed = seed;
  dgp.n_units = static_cast<int>(count("n-units", 60));
  dgp.n_periods = static_cast<int>(count("n-periods", 48));
  dgp.beta0 = number_or(c, "beta0", dgp.beta0);
  dgp.pre_trend = number_or(c, "pre-trend", dgp.pre_trend);
  dgp.staggered = !get(c, "staggered") || flag(c, "staggered");
  dgp.n_clusters = static_cast<int>(count("n-clusters", 30));
  auto ps = synth::gen_panel(dgp);

  bonds::write_bonds(dir / "bonds.csv", ts.bonds);
  trades::write_trades(dir / "trades.csv", ts.trades);
  trades::write_clean_report(dir / "expected_clean_report.csv", ts.expected);
  synth::write_curves(dir / "curve.csv", synth::gen_curves(seed, {2009, 1}, {2020, 12}));
  synth::write_county_panel(dir / "county.csv", counties.panel);
  synth::write_events(dir / "events.csv", counties.events);
  ps.frame.write_csv(dir / "panel.csv");
  synth::Manifest truth;
  for (const auto& [k, v] : ts.manifest) truth["trades." + k] = v;
  for (const auto& [k, v] : ps.manifest) truth["panel." + k] = v;
  synth::write_manifest(dir / "synth_truth.txt", truth);
  for (const char* f : {"bonds.csv", "trades.csv", "expected_clean_report.csv", "curve.csv", "county.csv",
                        "events.csv", "panel.csv", "synth_truth.txt"})
    m.output(dir / f);
  m.stat("seed", std::to_string(seed));
  m.stat("generator", std::string(synth::Rng::kName));
  return m.write(dir);
}

}  // namespace muni::pipeline
