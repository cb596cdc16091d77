#include "muni/synth.hpp"

#include "muni/csv.hpp"
#include "muni/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numbers>

namespace muni::synth {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", path.string()));
  return out;
}

const std::vector<std::pair<std::string, std::string>>& county_pool() {
  static const std::vector<std::pair<std::string, std::string>> kPool = {
      {"CA", "06037"}, {"CA", "06059"}, {"NY", "36061"}, {"NY", "36047"},
      {"IL", "17031"}, {"TX", "48201"}, {"FL", "12086"}, {"WA", "53033"}};
  return kPool;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + kGamma))) {}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return mix(key_ + counter_ * kGamma);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::Validation, "Rng::below needs n > 0");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  while (true) {
    std::uint64_t x = next_u64();
    if (x < limit) return x % n;
  }
}

int Rng::between(int lo, int hi) {
  if (hi < lo) throw Error(ErrorKind::Validation, fmt::format("empty integer range [{}, {}]", lo, hi));
  return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  auto out = open_out(path);
  for (const auto& [k, v] : manifest) out << k << '=' << v << '\n';
}

PanelSample gen_panel(const PanelDgp& d) {
  if (d.n_units < 2 || d.n_periods < 2 || d.n_clusters < 1)
    throw Error(ErrorKind::Validation, "panel needs at least 2 units, 2 periods and 1 cluster");
  if (d.staggered && d.event_hi < d.event_lo) throw Error(ErrorKind::Validation, "event_hi below event_lo");
  const int pairs = (d.n_units + 1) / 2;

  Rng fe_rng(d.seed, 1), event_rng(d.seed, 2), shock_rng(d.seed, 3), row_rng(d.seed, 4);
  auto draw = [](Rng& r, double sd) { return round_to(sd * r.normal(), 6); };
  std::vector<double> unit_fe(d.n_units), pair_fe(pairs), time_fe(d.n_periods);
  for (auto& v : unit_fe) v = draw(fe_rng, d.unit_fe_sd);
  for (auto& v : pair_fe) v = draw(fe_rng, d.pair_fe_sd);
  for (auto& v : time_fe) v = draw(fe_rng, d.time_fe_sd);
  std::vector<int> event(pairs, d.event_period);
  if (d.staggered)
    for (auto& e : event) e = event_rng.between(d.event_lo, d.event_hi);
  std::vector<double> shock(static_cast<std::size_t>(d.n_clusters) * d.n_periods);
  for (auto& v : shock) v = draw(shock_rng, d.cluster_sd);

  const std::size_t n = static_cast<std::size_t>(d.n_units) * d.n_periods;
  std::vector<double> unit(n), pair(n), cluster(n), period(n), treat(n), post(n), event_time(n), x(n), y(n);
  std::size_t i = 0;
  for (int u = 0; u < d.n_units; ++u) {
    const int p = u / 2;
    const int c = p % d.n_clusters;
    const bool treated = u % 2 == 0;
    for (int t = 0; t < d.n_periods; ++t, ++i) {
      const int et = t - event[p];
      const double xi = round_to(row_rng.normal(), 6);
      const double eps = draw(row_rng, d.noise_sd);
      const double tp = treated && et >= 0 ? 1.0 : 0.0;
      const double trend = treated ? d.pre_trend * std::min(et, 0) : 0.0;
      unit[i] = u;
      pair[i] = p;
      cluster[i] = c;
      period[i] = t;
      treat[i] = treated ? 1.0 : 0.0;
      post[i] = et >= 0 ? 1.0 : 0.0;
      event_time[i] = et;
      x[i] = xi;
      y[i] = unit_fe[u] + time_fe[t] + pair_fe[p] + d.beta0 * tp + trend + d.gamma * xi +
             shock[static_cast<std::size_t>(c) * d.n_periods + t] + eps;
    }
  }

  PanelSample s;
  s.frame = panel::Frame(n);
  s.frame.add_numeric("unit", std::move(unit));
  s.frame.add_numeric("pair", std::move(pair));
  s.frame.add_numeric("cluster", std::move(cluster));
  s.frame.add_numeric("period", std::move(period));
  s.frame.add_numeric("treat", std::move(treat));
  s.frame.add_numeric("post", std::move(post));
  s.frame.add_numeric("event_time", std::move(event_time));
  s.frame.add_numeric("x", std::move(x));
  s.frame.add_numeric("y", std::move(y));

  auto num = [](double v) { return format_number(v); };
  s.manifest = {{"generator", std::string(Rng::kName)},
                {"seed", std::to_string(d.seed)},
                {"n_units", std::to_string(d.n_units)},
                {"n_periods", std::to_string(d.n_periods)},
                {"beta0", num(d.beta0)},
                {"unit_fe_sd", num(d.unit_fe_sd)},
                {"time_fe_sd", num(d.time_fe_sd)},
                {"pair_fe_sd", num(d.pair_fe_sd)},
                {"noise_sd", num(d.noise_sd)},
                {"cluster_sd", num(d.cluster_sd)},
                {"n_clusters", std::to_string(d.n_clusters)},
                {"event_period", std::to_string(d.event_period)},
                {"staggered", d.staggered ? "1" : "0"},
                {"event_lo", std::to_string(d.event_lo)},
                {"event_hi", std::to_string(d.event_hi)},
                {"pre_trend", num(d.pre_trend)},
                {"gamma", num(d.gamma)},
                {"treatment", "even units treated; units 2p and 2p+1 form pair p; cluster = pair mod n_clusters"}};
  return s;
}

TradeSample gen_trades(std::uint64_t seed, std::size_t n_bonds, const ViolationRecipe& rc) {
  const std::size_t attached = rc.maturity_range + rc.price_range + rc.primary_market + rc.near_issuance +
                               rc.short_maturity + rc.yield_range;
  if (n_bonds == 0 && attached > 0)
    throw Error(ErrorKind::Validation, "violations other than unmatched, missing coupon and thin bonds need n_bonds > 0");

  Rng rng(seed, 10);
  TradeSample s;
  s.window = {Date(2008, 1, 1), Date(2019, 12, 31)};
  const auto& counties = county_pool();

  auto make_bond = [&](std::string cusip) {
    bonds::Bond b;
    b.cusip = std::move(cusip);
    b.dated_date = Date(2010, 1, 1).add_days(rng.between(0, 1500));
    b.maturity_date = b.dated_date.add_months(12 * rng.between(8, 25));
    b.coupon_rate = round_to(rng.uniform(0.02, 0.05), 4);
    b.amount_issued = 1000.0 * rng.between(1000, 50000);
    b.offering_price = round_to(rng.uniform(98.0, 103.0), 3);
    b.offering_yield = round_to(rng.uniform(0.01, 0.045), 5);
    b.sale_method = rng.uniform() < 0.5 ? bonds::SaleMethod::Negotiated : bonds::SaleMethod::Competitive;
    b.callable = rng.uniform() < 0.4;
    b.insured = rng.uniform() < 0.2;
    b.general_obligation = rng.uniform() < 0.5;
    b.bank_qualified = rng.uniform() < 0.1;
    b.refunding = rng.uniform() < 0.3;
    b.credit_enhanced = rng.uniform() < 0.1;
    const auto& [state, fips] = counties[rng.below(counties.size())];
    b.state = state;
    b.county_fips = fips;
    b.rating = rng.between(16, 28);
    return b;
  };
  auto side = [&] {
    double u = rng.uniform();
    return u < 0.5 ? trades::Side::CustomerBuy : (u < 0.75 ? trades::Side::CustomerSell : trades::Side::Interdealer);
  };
  auto clean_trade = [&](const bonds::Bond& b, Date date) {
    trades::TradeRecord t;
    t.cusip = b.cusip;
    t.trade_date = date;
    t.price = round_to(std::clamp(100.0 + 5.0 * rng.normal(), 60.0, 140.0), 3);
    t.yield = round_to(rng.uniform(0.005, 0.06), 5);
    t.par_volume = 5000.0 * rng.between(1, 200);
    t.side = side();
    return t;
  };
  auto clean_date = [&](const bonds::Bond& b) { return b.dated_date.add_days(rng.between(30, 5 * 365)); };

  std::vector<std::string> good;
  for (std::size_t i = 0; i < n_bonds; ++i) {
    auto b = make_bond(fmt::format("G{:08d}", i));
    const int m = rng.between(10, 20);
    for (int k = 0; k < m; ++k)
      s.trades.push_back(clean_trade(b, k < 3 ? b.dated_date.add_days(rng.between(16, 29)) : clean_date(b)));
    good.push_back(b.cusip);
    s.bonds.emplace(b.cusip, std::move(b));
  }
  auto some_good = [&]() -> const bonds::Bond& { return s.bonds.at(good[rng.below(good.size())]); };

  for (std::size_t j = 0; j < rc.unmatched; ++j) {
    auto ghost = make_bond(fmt::format("U{:08d}", j));
    s.trades.push_back(clean_trade(ghost, clean_date(ghost)));
  }
  for (std::size_t j = 0; j < rc.maturity_range; ++j) {
    const auto& b = some_good();
    s.trades.push_back(clean_trade(b, b.maturity_date->add_days(rng.between(1, 200))));
  }
  if (rc.missing_coupon > 0) {
    auto b = make_bond("C00000000");
    b.coupon_rate.reset();
    for (std::size_t j = 0; j < rc.missing_coupon; ++j) s.trades.push_back(clean_trade(b, clean_date(b)));
    s.bonds.emplace(b.cusip, std::move(b));
  }
  for (std::size_t j = 0; j < rc.price_range; ++j) {
    const auto& b = some_good();
    auto t = clean_trade(b, clean_date(b));
    t.price = rng.uniform() < 0.5 ? round_to(rng.uniform(20.0, 49.9), 3) : round_to(rng.uniform(150.1, 250.0), 3);
    s.trades.push_back(t);
  }
  for (std::size_t j = 0; j < rc.primary_market; ++j) {
    const auto& b = some_good();
    s.trades.push_back(clean_trade(b, b.dated_date.add_days(-rng.between(0, 20))));
  }
  for (std::size_t j = 0; j < rc.near_issuance; ++j) {
    const auto& b = some_good();
    s.trades.push_back(clean_trade(b, b.dated_date.add_days(rng.between(1, 15))));
  }
  for (std::size_t j = 0; j < rc.short_maturity; ++j) {
    const auto& b = some_good();
    s.trades.push_back(clean_trade(b, b.maturity_date->add_days(-rng.between(1, 360))));
  }
  for (std::size_t j = 0; j < rc.yield_range; ++j) {
    const auto& b = some_good();
    auto t = clean_trade(b, clean_date(b));
    t.yield = rng.uniform() < 0.5 ? round_to(rng.uniform(-0.05, -0.0001), 5) : round_to(rng.uniform(0.5001, 0.9), 5);
    s.trades.push_back(t);
  }
  std::size_t thin_trades = 0;
  for (std::size_t j = 0; j < rc.thin_bonds; ++j) {
    auto b = make_bond(fmt::format("T{:08d}", j));
    const int m = rng.between(1, 9);
    for (int k = 0; k < m; ++k) s.trades.push_back(clean_trade(b, clean_date(b)));
    thin_trades += static_cast<std::size_t>(m);
    s.bonds.emplace(b.cusip, std::move(b));
  }
  shuffle(s.trades, rng);

  auto& e = s.expected;
  const std::size_t mc = rc.missing_coupon > 0 ? 1 : 0;
  e.input_trades = s.trades.size();
  e.input_cusips = n_bonds + rc.thin_bonds + mc + rc.unmatched;
  const std::array<std::size_t, trades::kRuleCount> drops = {
      rc.unmatched,      rc.maturity_range, rc.missing_coupon, rc.price_range, rc.primary_market,
      rc.near_issuance,  rc.short_maturity, rc.yield_range,    thin_trades};
  const std::array<std::size_t, trades::kRuleCount> cusips = {
      n_bonds + rc.thin_bonds + mc, n_bonds + rc.thin_bonds + mc, n_bonds + rc.thin_bonds, n_bonds + rc.thin_bonds,
      n_bonds + rc.thin_bonds,      n_bonds + rc.thin_bonds,      n_bonds + rc.thin_bonds, n_bonds + rc.thin_bonds,
      n_bonds};
  std::size_t remaining = e.input_trades;
  for (std::size_t r = 0; r < trades::kRuleCount; ++r) {
    remaining -= drops[r];
    e.steps[r] = {static_cast<trades::Rule>(r), drops[r], cusips[r], remaining};
  }
  e.surviving_trades = remaining;
  e.surviving_cusips = n_bonds;

  s.manifest = {{"generator", std::string(Rng::kName)},
                {"seed", std::to_string(seed)},
                {"n_bonds", std::to_string(n_bonds)},
                {"window_first", s.window.first.iso()},
                {"window_last", s.window.last.iso()},
                {"planted_unmatched", std::to_string(rc.unmatched)},
                {"planted_maturity_range", std::to_string(rc.maturity_range)},
                {"planted_missing_coupon", std::to_string(rc.missing_coupon)},
                {"planted_price_range", std::to_string(rc.price_range)},
                {"planted_primary_market", std::to_string(rc.primary_market)},
                {"planted_near_issuance", std::to_string(rc.near_issuance)},
                {"planted_short_maturity", std::to_string(rc.short_maturity)},
                {"planted_yield_range", std::to_string(rc.yield_range)},
                {"planted_thin_bonds", std::to_string(rc.thin_bonds)},
                {"planted_thin_trades", std::to_string(thin_trades)},
                {"expected_surviving_trades", std::to_string(e.surviving_trades)}};
  return s;
}

std::vector<curve::ZeroCurve> gen_curves(std::uint64_t seed, const YearMonth& first, const YearMonth& last) {
  static constexpr double kTenors[] = {0.25, 0.5, 1, 2, 3, 5, 7, 10, 20, 30};
  Rng rng(seed, 20);
  std::vector<curve::ZeroCurve> out;
  double level = 0.025, slope = 0.015;
  for (int m = first.index(); m <= last.index(); ++m) {
    level = std::clamp(level + 0.0015 * rng.normal(), 0.002, 0.06);
    slope = std::clamp(slope + 0.001 * rng.normal(), -0.005, 0.035);
    std::vector<curve::CurvePoint> pts;
    for (double t : kTenors) pts.push_back({t, round_to(level + slope * (1.0 - std::exp(-t / 4.0)), 6)});
    out.emplace_back(YearMonth::from_index(m).last_day(), std::move(pts));
  }
  return out;
}

void write_curves(const std::filesystem::path& path, const std::vector<curve::ZeroCurve>& curves) {
  auto out = open_out(path);
  CsvWriter w(out, {"as_of_date", "tenor_years", "zero_rate_cc"});
  for (const auto& c : curves)
    for (const auto& p : c.points()) w.row({c.as_of().iso(), format_number(p.tenor_years), format_number(p.zero_rate)});
}

CountySample gen_counties(std::uint64_t seed, const std::vector<std::string>& fips, int first_year, int last_year,
                          std::size_t n_events) {
  if (last_year < first_year + 2) throw Error(ErrorKind::Validation, "county panel needs at least three years");
  if (n_events > fips.size()) throw Error(ErrorKind::Validation, "more events than counties");
  Rng rng(seed, 30);
  CountySample s;
  for (const auto& f : fips) {
    double lf = std::round(std::exp(rng.uniform(std::log(2e4), std::log(2e6))));
    double ur = rng.uniform(0.03, 0.09);
    const double per_head = rng.uniform(1500.0, 3000.0);
    for (int y = first_year; y <= last_year; ++y) {
      fiscal::CountyYear cy;
      cy.fips = f;
      cy.year = y;
      lf = std::round(lf * (1.0 + 0.01 * rng.normal(1.0, 1.0)));
      ur = std::clamp(ur + 0.005 * rng.normal(), 0.02, 0.2);
      cy.labor_force = lf;
      cy.unemployment_rate = round_to(ur, 4);
      const double tr = round_to(lf * per_head * rng.uniform(0.95, 1.05), 0);
      cy.total_revenue = tr;
      cy.state_igr = round_to(0.3 * tr, 0);
      cy.total_expenditure = round_to(0.97 * tr, 0);
      cy.interest_general = round_to(0.03 * tr, 0);
      cy.interest_total = round_to(0.036 * tr, 0);
      cy.total_lt_debt = round_to(0.8 * tr, 0);
      cy.debt_retired = round_to(0.06 * tr, 0);
      cy.property_tax = round_to(0.25 * tr, 0);
      cy.population = std::round(lf * 1.9);
      s.panel.emplace(std::make_pair(f, y), std::move(cy));
    }
  }
  std::vector<std::string> order = fips;
  shuffle(order, rng);
  for (std::size_t e = 0; e < n_events; ++e)
    s.events.push_back({fmt::format("E{:03d}", e + 1), order[e],
                        Date(rng.between(first_year + 2, last_year), static_cast<unsigned>(rng.between(1, 12)), 15)});
  std::sort(s.events.begin(), s.events.end(),
            [](const matching::Event& a, const matching::Event& b) { return a.event_id < b.event_id; });
  return s;
}

void write_county_panel(const std::filesystem::path& path, const fiscal::CountyPanel& panel) {
  auto out = open_out(path);
  CsvWriter w(out, {"fips", "year", "labor_force", "unemployment_rate", "total_revenue", "state_igr",
                    "total_expenditure", "interest_general", "interest_total", "total_lt_debt", "debt_retired",
                    "property_tax", "population"});
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& [key, cy] : panel)
    w.row({cy.fips, std::to_string(cy.year), format_number(cy.labor_force), format_number(cy.unemployment_rate),
           opt(cy.total_revenue), opt(cy.state_igr), opt(cy.total_expenditure), opt(cy.interest_general),
           opt(cy.interest_total), opt(cy.total_lt_debt), opt(cy.debt_retired), opt(cy.property_tax),
           opt(cy.population)});
}

void write_events(const std::filesystem::path& path, const std::vector<matching::Event>& events) {
  auto out = open_out(path);
  CsvWriter w(out, {"event_id", "treated_fips", "event_date"});
  for (const auto& e : events) w.row({e.event_id, e.treated_fips, e.event_date.iso()});
}

}  // namespace muni::synth
