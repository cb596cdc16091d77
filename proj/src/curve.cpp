#include "muni/curve.hpp"

#include "muni/csv.hpp"
#include "muni/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>

namespace muni::curve {

ZeroCurve::ZeroCurve(Date as_of, std::vector<CurvePoint> points) : as_of_(as_of), points_(std::move(points)) {
  if (points_.size() < 2)
    throw Error(ErrorKind::Validation, fmt::format("curve {} needs at least 2 points", as_of_.iso()));
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.tenor_years > 0.0) || !std::isfinite(p.tenor_years))
      throw Error(ErrorKind::Validation, fmt::format("curve {}: tenor must be positive", as_of_.iso()));
    if (!std::isfinite(p.zero_rate))
      throw Error(ErrorKind::Validation, fmt::format("curve {}: non-finite rate at tenor {}", as_of_.iso(), p.tenor_years));
    if (i > 0 && !(p.tenor_years > points_[i - 1].tenor_years))
      throw Error(ErrorKind::Validation, fmt::format("curve {}: tenors must be strictly increasing", as_of_.iso()));
  }
}

ZeroCurve ZeroCurve::flat(double rate, Date as_of) { return ZeroCurve(as_of, {{0.25, rate}, {30.0, rate}}); }

double ZeroCurve::zero_rate(double t) const {
  if (t <= points_.front().tenor_years) return points_.front().zero_rate;
  if (t >= points_.back().tenor_years) return points_.back().zero_rate;
  auto hi = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double x, const CurvePoint& p) { return x < p.tenor_years; });
  auto lo = hi - 1;
  double w = (t - lo->tenor_years) / (hi->tenor_years - lo->tenor_years);
  return lo->zero_rate + w * (hi->zero_rate - lo->zero_rate);
}

CashflowSchedule::CashflowSchedule(std::vector<Cashflow> flows) : flows_(std::move(flows)) {
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    if (!(flows_[i].time_years > 0.0))
      throw Error(ErrorKind::Validation, "cash flow times must be positive");
    if (!(flows_[i].amount > 0.0)) throw Error(ErrorKind::Validation, "cash flow amounts must be positive");
    if (i > 0 && !(flows_[i].time_years > flows_[i - 1].time_years))
      throw Error(ErrorKind::Validation, "cash flow times must be strictly increasing");
  }
}

double CashflowSchedule::nominal_total() const {
  double s = 0.0;
  for (const auto& f : flows_) s += f.amount;
  return s;
}

double discount_factor(const ZeroCurve& curve, double t) {
  if (t < 0.0) throw Error(ErrorKind::Validation, "discount horizon must be non-negative");
  if (t == 0.0) return 1.0;
  double z = curve.zero_rate(t);
  if (!std::isfinite(z)) throw Error(ErrorKind::NonFiniteRate, fmt::format("zero rate at t={} is not finite", t));
  return std::exp(-z * t);
}

double riskfree_price(const ZeroCurve& curve, const CashflowSchedule& cf) {
  if (cf.empty()) throw Error(ErrorKind::Validation, "empty cash flow schedule");
  double pv = 0.0;
  for (const auto& f : cf.flows()) pv += f.amount * discount_factor(curve, f.time_years);
  return pv;
}

double semiannual_price(const CashflowSchedule& cf, double y) {
  if (!(y > -2.0)) throw Error(ErrorKind::Validation, "yield must exceed -2 (1 + y/2 > 0)");
  const double base = 1.0 + y / 2.0;
  double pv = 0.0;
  for (const auto& f : cf.flows()) pv += f.amount * std::pow(base, -2.0 * f.time_years);
  return pv;
}

double semiannual_price_slope(const CashflowSchedule& cf, double y) {
  const double base = 1.0 + y / 2.0;
  double d = 0.0;
  for (const auto& f : cf.flows()) d -= f.amount * f.time_years * std::pow(base, -2.0 * f.time_years - 1.0);
  return d;
}

double solve_semiannual_yield(const CashflowSchedule& cf, double price) {
  if (cf.empty()) throw Error(ErrorKind::Validation, "empty cash flow schedule");
  double lo = kYieldBracketLow, hi = kYieldBracketHigh;
  const double p_lo = semiannual_price(cf, lo);
  const double p_hi = semiannual_price(cf, hi);
  if (!std::isfinite(price) || price > p_lo || price < p_hi)
    throw Error(ErrorKind::NoRoot,
                fmt::format("price {} outside [{}, {}] reachable on the yield bracket", price, p_hi, p_lo));
  if (price == p_lo) return lo;
  if (price == p_hi) return hi;

  // Pricing is strictly decreasing in y, so the sign of the gap tells which
  // side of the root we are on. Newton steps that leave the bracket fall
  // back to bisection.
  double y = 0.05;
  for (int iter = 0; iter < 500; ++iter) {
    double gap = semiannual_price(cf, y) - price;
    if (std::abs(gap) < kPriceTolerance) return y;
    if (gap > 0.0)
      lo = y;
    else
      hi = y;
    double slope = semiannual_price_slope(cf, y);
    double next = slope < 0.0 ? y - gap / slope : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == y || hi - lo <= 0.0) return y;
    y = next;
  }
  return y;
}

double coupon_equivalent_riskfree_yield(const ZeroCurve& curve, const CashflowSchedule& cf) {
  double p = riskfree_price(curve, cf);
  if (!(p > 0.0)) throw Error(ErrorKind::NoRoot, "risk-free price must be positive");
  return solve_semiannual_yield(cf, p);
}

void CurveSet::add(ZeroCurve curve) {
  auto pos = std::lower_bound(curves_.begin(), curves_.end(), curve.as_of(),
                              [](const ZeroCurve& c, const Date& d) { return c.as_of() < d; });
  if (pos != curves_.end() && pos->as_of() == curve.as_of())
    throw Error(ErrorKind::Validation, fmt::format("duplicate curve for {}", curve.as_of().iso()));
  curves_.insert(pos, std::move(curve));
}

const ZeroCurve* CurveSet::as_of(const Date& date, int max_age_days) const {
  auto pos = std::upper_bound(curves_.begin(), curves_.end(), date,
                              [](const Date& d, const ZeroCurve& c) { return d < c.as_of(); });
  if (pos == curves_.begin()) return nullptr;
  --pos;
  if (days_between(pos->as_of(), date) > max_age_days) return nullptr;
  return &*pos;
}

CurveSet read_curves(const std::filesystem::path& path) {
  auto table = CsvTable::read_file(path);
  table.require_columns({"as_of_date", "tenor_years", "zero_rate_cc"});
  std::map<Date, std::vector<CurvePoint>> by_date;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    auto d = Date::parse(table.cell(r, "as_of_date"));
    by_date[d].push_back({table.number(r, "tenor_years"), table.number(r, "zero_rate_cc")});
  }
  CurveSet set;
  for (auto& [d, pts] : by_date) {
    std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.tenor_years < b.tenor_years; });
    set.add(ZeroCurve(d, std::move(pts)));
  }
  return set;
}

}  // namespace muni::curve
