#pragma once

#include "muni/date.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace muni::curve {

struct CurvePoint {
  double tenor_years;
  double zero_rate;  // continuously compounded, decimal
};

/// Treasury zero-coupon term structure as of one date. Zero rates are
/// linearly interpolated in tenor and held flat beyond the end points.
class ZeroCurve {
public:
  /// Throws Error(Validation) unless tenors are positive and strictly
  /// increasing, rates are finite and there are at least two points.
  ZeroCurve(Date as_of, std::vector<CurvePoint> points);

  /// Convenience: the same rate at tenors 0.25 and 30.
  static ZeroCurve flat(double rate, Date as_of = Date(2000, 1, 1));

  const Date& as_of() const { return as_of_; }
  std::span<const CurvePoint> points() const { return points_; }

  double zero_rate(double t) const;

private:
  Date as_of_;
  std::vector<CurvePoint> points_;
};

struct Cashflow {
  double time_years;
  double amount;  // per 100 face
};

class CashflowSchedule {
public:
  /// Throws Error(Validation) unless times are positive and strictly
  /// increasing and all amounts are positive.
  explicit CashflowSchedule(std::vector<Cashflow> flows);

  std::span<const Cashflow> flows() const { return flows_; }
  bool empty() const { return flows_.empty(); }
  std::size_t size() const { return flows_.size(); }
  double nominal_total() const;

private:
  std::vector<Cashflow> flows_;
};

double discount_factor(const ZeroCurve& curve, double t);
double riskfree_price(const ZeroCurve& curve, const CashflowSchedule& cf);

/// Semiannual-compounded yield that reprices `cf` at its treasury present value.
double coupon_equivalent_riskfree_yield(const ZeroCurve& curve, const CashflowSchedule& cf);

// Semiannual yield math shared with the bond module.
inline constexpr double kYieldBracketLow = -0.5;
inline constexpr double kYieldBracketHigh = 2.0;
inline constexpr double kPriceTolerance = 1e-10;

/// sum amount_i * (1 + y/2)^(-2 t_i); requires y > -2.
double semiannual_price(const CashflowSchedule& cf, double y);
/// Derivative of semiannual_price with respect to y.
double semiannual_price_slope(const CashflowSchedule& cf, double y);
/// Bracketed Newton/bisection hybrid on [-0.5, 2.0]; throws Error(NoRoot).
double solve_semiannual_yield(const CashflowSchedule& cf, double price);

/// Dated collection of curves with an as-of lookup.
class CurveSet {
public:
  void add(ZeroCurve curve);
  bool empty() const { return curves_.empty(); }
  std::size_t size() const { return curves_.size(); }

  /// Latest curve dated on or before `date` and at most `max_age_days` older.
  const ZeroCurve* as_of(const Date& date, int max_age_days = 31) const;

private:
  std::vector<ZeroCurve> curves_;  // sorted by as_of
};

/// Reads `as_of_date,tenor_years,zero_rate_cc`.
CurveSet read_curves(const std::filesystem::path& path);

}  // namespace muni::curve
