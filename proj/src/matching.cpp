#include "muni/matching.hpp"

#include "muni/csv.hpp"
#include "muni/errors.hpp"
#include "muni/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>

namespace muni::matching {

int census_region(const std::string& county_fips) {
  if (county_fips.size() < 2) return 0;
  int state = 0;
  for (char c : county_fips.substr(0, 2)) {
    if (c < '0' || c > '9') return 0;
    state = state * 10 + (c - '0');
  }
  static const std::map<int, int> kRegion = {
      {9, 1},  {23, 1}, {25, 1}, {33, 1}, {44, 1}, {50, 1}, {34, 1}, {36, 1}, {42, 1},
      {17, 2}, {18, 2}, {26, 2}, {39, 2}, {55, 2}, {19, 2}, {20, 2}, {27, 2}, {29, 2}, {31, 2}, {38, 2}, {46, 2},
      {10, 3}, {11, 3}, {12, 3}, {13, 3}, {24, 3}, {37, 3}, {45, 3}, {51, 3}, {54, 3}, {1, 3},  {21, 3}, {28, 3},
      {47, 3}, {5, 3},  {22, 3}, {40, 3}, {48, 3},
      {4, 4},  {8, 4},  {16, 4}, {30, 4}, {32, 4}, {35, 4}, {49, 4}, {56, 4}, {2, 4},  {6, 4},  {15, 4}, {41, 4},
      {53, 4}};
  auto it = kRegion.find(state);
  return it == kRegion.end() ? 0 : it->second;
}

MatchResult match(const FeatureRow& treated, const std::vector<FeatureRow>& pool_in, const MatchOptions& opt) {
  const std::size_t dims = treated.values.size();
  const int treated_region = census_region(treated.fips);

  std::vector<const FeatureRow*> pool;
  for (const auto& row : pool_in) {
    if (row.fips == treated.fips || opt.excluded.contains(row.fips)) continue;
    if (opt.same_region && census_region(row.fips) != treated_region) continue;
    if (row.values.size() != dims)
      throw Error(ErrorKind::Validation, fmt::format("county {}: feature count differs from treated", row.fips));
    pool.push_back(&row);
  }
  if (pool.empty()) throw Error(ErrorKind::EmptyPool, fmt::format("no candidate controls for {}", treated.fips));
  if (opt.k == 0 || opt.k > pool.size())
    throw Error(ErrorKind::Validation, fmt::format("k={} but pool has {} counties", opt.k, pool.size()));
  // Statistics are computed in fips order so they do not depend on input order.
  std::sort(pool.begin(), pool.end(), [](const FeatureRow* a, const FeatureRow* b) { return a->fips < b->fips; });

  for (double v : treated.values)
    if (!std::isfinite(v)) throw Error(ErrorKind::Validation, fmt::format("county {}: non-finite feature", treated.fips));
  for (const auto* row : pool)
    for (double v : row->values)
      if (!std::isfinite(v)) throw Error(ErrorKind::Validation, fmt::format("county {}: non-finite feature", row->fips));

  MatchResult result;
  result.treated_fips = treated.fips;
  result.means.assign(dims, 0.0);
  result.sds.assign(dims, 1.0);
  if (opt.standardize) {
    const double n = static_cast<double>(pool.size() + 1);
    std::vector<double> col(pool.size() + 1);
    for (std::size_t j = 0; j < dims; ++j) {
      col[0] = treated.values[j];
      for (std::size_t i = 0; i < pool.size(); ++i) col[i + 1] = pool[i]->values[j];
      const double mean = pairwise_sum(col) / n;
      for (auto& c : col) c = (c - mean) * (c - mean);
      result.means[j] = mean;
      result.sds[j] = std::sqrt(pairwise_sum(col) / (n - 1.0));
    }
  }

  std::vector<Control> scored;
  scored.reserve(pool.size());
  for (const auto* row : pool) {
    double ss = 0;
    for (std::size_t j = 0; j < dims; ++j) {
      if (result.sds[j] == 0.0) continue;
      double d = (row->values[j] - treated.values[j]) / result.sds[j];
      ss += d * d;
    }
    scored.push_back({row->fips, std::sqrt(ss)});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Control& a, const Control& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.fips < b.fips);
  });
  scored.resize(opt.k);
  if (opt.caliper)
    std::erase_if(scored, [&](const Control& c) { return c.distance > *opt.caliper; });
  result.controls = std::move(scored);
  return result;
}

std::vector<BalanceRow> match_report(const std::vector<std::string>& names, const std::vector<MatchedFeatures>& matched) {
  if (matched.empty()) throw Error(ErrorKind::Validation, "balance report needs at least one match");
  std::vector<BalanceRow> rows;
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::vector<double> t, c;
    for (const auto& m : matched) {
      t.push_back(m.treated.at(j));
      for (const auto& ctrl : m.controls) c.push_back(ctrl.at(j));
    }
    auto mean = [](const std::vector<double>& v) { return v.empty() ? std::nan("") : pairwise_sum(v) / v.size(); };
    auto var = [](const std::vector<double>& v, double m) {
      if (v.size() < 2) return std::nan("");
      std::vector<double> sq(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
      return pairwise_sum(sq) / (v.size() - 1.0);
    };
    BalanceRow row{names[j], mean(t), mean(c), 0.0, std::nullopt};
    row.difference = row.treated_mean - row.control_mean;
    const double se2 = var(t, row.treated_mean) / t.size() + var(c, row.control_mean) / c.size();
    if (std::isfinite(se2) && se2 > 0.0) row.t_stat = row.difference / std::sqrt(se2);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Event> read_events(const std::filesystem::path& path) {
  auto t = CsvTable::read_file(path);
  t.require_columns({"event_id", "treated_fips", "event_date"});
  std::vector<Event> events;
  for (std::size_t r = 0; r < t.rows(); ++r)
    events.push_back({std::string(t.cell(r, "event_id")), std::string(t.cell(r, "treated_fips")),
                      Date::parse(t.cell(r, "event_date"))});
  return events;
}

FeatureTable county_features(const fiscal::CountyPanel& panel, int event_year, const YearMonth& event_month,
                             const std::vector<trades::BondMonthObs>* yields, const bonds::BondTable* bonds,
                             const FeatureTable* extra) {
  FeatureTable ft;
  ft.names = {"unemployment_rate", "d_unemployment_rate", "log_labor_force", "d_labor_force"};
  std::map<std::string, std::pair<double, std::size_t>> yield_acc;
  const bool with_yield = yields && bonds;
  if (with_yield) {
    ft.names.push_back("avg_yield");
    for (const auto& o : *yields) {
      int lag = event_month - o.year_month;
      if (lag < 1 || lag > 12) continue;
      auto b = bonds->find(o.cusip);
      if (b == bonds->end()) continue;
      auto& acc = yield_acc[b->second.county_fips];
      acc.first += o.vw_yield;
      ++acc.second;
    }
  }
  if (extra) ft.names.insert(ft.names.end(), extra->names.begin(), extra->names.end());

  for (const auto& [key, prev] : panel) {
    if (key.second != event_year - 1) continue;
    const auto& fips = key.first;
    auto older = panel.find({fips, event_year - 2});
    if (older == panel.end()) continue;
    std::vector<double> v = {prev.unemployment_rate, prev.unemployment_rate - older->second.unemployment_rate,
                             std::log(prev.labor_force), prev.labor_force / older->second.labor_force - 1.0};
    if (with_yield) {
      auto y = yield_acc.find(fips);
      if (y == yield_acc.end()) continue;
      v.push_back(y->second.first / y->second.second);
    }
    if (extra) {
      auto e = extra->rows.find(fips);
      if (e == extra->rows.end()) continue;
      v.insert(v.end(), e->second.begin(), e->second.end());
    }
    ft.rows.emplace(fips, std::move(v));
  }
  return ft;
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
  auto t = CsvTable::read_file(path);
  (void)t.column("fips");
  FeatureTable ft;
  for (const auto& h : t.header())
    if (h != "fips") ft.names.push_back(h);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    std::vector<double> v;
    for (const auto& n : ft.names) v.push_back(t.number(r, n));
    ft.rows.emplace(std::string(t.cell(r, "fips")), std::move(v));
  }
  return ft;
}

EventMatches match_events(const std::vector<Event>& events, const fiscal::CountyPanel& panel,
                          const std::vector<trades::BondMonthObs>* yields, const bonds::BondTable* bonds,
                          const FeatureTable* extra, const EventMatchOptions& options) {
  struct Slot {
    std::optional<MatchResult> result;
    MatchedFeatures features;
    std::vector<std::string> names;
  };
  std::vector<Slot> slots(events.size());
  parallel_for(events.size(), [&](std::size_t i) {
    const auto& ev = events[i];
    auto ft = county_features(panel, ev.event_date.year(), YearMonth::of(ev.event_date), yields, bonds, extra);
    slots[i].names = ft.names;
    auto treated = ft.rows.find(ev.treated_fips);
    if (treated == ft.rows.end()) return;
    std::vector<FeatureRow> pool;
    for (const auto& [fips, v] : ft.rows) pool.push_back({fips, v});
    auto opt = options.match;
    if (options.exclude_event_months) {
      for (const auto& other : events) {
        if (other.treated_fips == ev.treated_fips) continue;
        int gap = std::abs(YearMonth::of(other.event_date) - YearMonth::of(ev.event_date));
        if (gap <= *options.exclude_event_months) opt.excluded.insert(other.treated_fips);
      }
    }
    auto res = match({ev.treated_fips, treated->second}, pool, opt);
    res.event_id = ev.event_id;
    slots[i].features.treated = treated->second;
    for (const auto& c : res.controls) slots[i].features.controls.push_back(ft.rows.at(c.fips));
    slots[i].result = std::move(res);
  });

  EventMatches out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (out.feature_names.empty()) out.feature_names = slots[i].names;
    if (!slots[i].result) {
      out.skipped.push_back(events[i].event_id);
      continue;
    }
    out.results.push_back(std::move(*slots[i].result));
    out.features.push_back(std::move(slots[i].features));
  }
  return out;
}

void write_matches(const std::filesystem::path& path, const std::vector<MatchResult>& results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", path.string()));
  CsvWriter w(out, {"event_id", "treated_fips", "control_fips", "rank", "distance"});
  for (const auto& r : results)
    for (std::size_t i = 0; i < r.controls.size(); ++i)
      w.row({r.event_id, r.treated_fips, r.controls[i].fips, std::to_string(i + 1),
             format_number(r.controls[i].distance)});
}

void write_balance(const std::filesystem::path& path, const std::vector<BalanceRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", path.string()));
  CsvWriter w(out, {"feature", "treated_mean", "control_mean", "difference", "t_stat"});
  for (const auto& r : rows)
    w.row({r.feature, format_number(r.treated_mean), format_number(r.control_mean), format_number(r.difference),
           r.t_stat ? format_number(*r.t_stat) : ""});
}

}  // namespace muni::matching
