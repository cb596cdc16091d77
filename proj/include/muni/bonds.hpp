#pragma once

#include "muni/curve.hpp"
#include "muni/date.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace muni::bonds {

enum class SaleMethod { Negotiated, Competitive };

/// Static reference record for one CUSIP. Coupon and maturity are optional
/// because raw reference files carry gaps that the trade cleaning pipeline
/// turns into drop counts.
struct Bond {
  std::string cusip;
  Date dated_date;
  std::optional<Date> maturity_date;
  std::optional<double> coupon_rate;  // annual, decimal
  double amount_issued = 0.0;
  std::optional<double> offering_price;
  std::optional<double> offering_yield;
  SaleMethod sale_method = SaleMethod::Competitive;
  bool callable = false;
  bool insured = false;
  bool general_obligation = false;
  bool bank_qualified = false;
  bool refunding = false;
  bool credit_enhanced = false;
  bool tax_exempt_federal = true;
  bool tax_exempt_state = true;
  std::string state;
  std::string county_fips;
  std::optional<int> rating;  // 1..28
};

/// Throws Error(Validation) describing the first broken invariant.
void validate(const Bond& bond);

/// Ordered letter-grade scale: index 0 holds the lowest grade (score 1).
class RatingScale {
public:
  static constexpr int kGrades = 28;

  /// grades[i] receives score i + 1. Must hold 28 distinct grades.
  explicit RatingScale(std::vector<std::string> grades_low_to_high);

  /// The shipped table (AAA = 28 ... D = 1).
  static const RatingScale& default_scale();
  /// Reads `grade,score` rows covering scores 1..28 exactly once.
  static RatingScale read(const std::filesystem::path& path);

  int encode(std::string_view grade) const;
  const std::string& decode(int score) const;
  int size() const { return static_cast<int>(grades_.size()); }

private:
  std::vector<std::string> grades_;
  std::map<std::string, int, std::less<>> index_;
};

int encode_rating(std::string_view grade, const RatingScale& scale = RatingScale::default_scale());

/// Semiannual coupons anchored at maturity plus face at maturity, in years
/// (ACT/365.25) from `as_of`. Throws Error(Matured) when as_of >= maturity.
curve::CashflowSchedule cashflows(const Bond& bond, const Date& as_of);
/// Same grid for an explicit remaining term in years.
curve::CashflowSchedule coupon_schedule(double coupon_rate, double years_to_maturity);

double price_from_yield(const curve::CashflowSchedule& cf, double y);
double ytm_from_price(const curve::CashflowSchedule& cf, double price);
double macaulay_duration(const curve::CashflowSchedule& cf, double y);

/// Modified-duration value change: outstanding * D_mac * dy / (1 + y/2).
double wealth_impact(double outstanding, double macaulay_years, double y, double dy);
double annual_interest_delta(double principal, double dy);

struct ControlVector {
  double coupon = 0;
  double log_amount = 0;
  double callable = 0;
  double insured = 0;
  double general_obligation = 0;
  double bank_qualified = 0;
  double refunding = 0;
  double credit_enhanced = 0;
  double rating = 0;  // NaN when unrated
  double remaining_maturity = 0;
  double inverse_maturity = 0;

  static constexpr std::size_t kSize = 11;
  static const std::array<std::string_view, kSize>& names();
  std::array<double, kSize> values() const;
};

ControlVector build_bond_controls(const Bond& bond, const Date& obs_date);

using BondTable = std::map<std::string, Bond, std::less<>>;

/// Reads the bonds CSV. Ratings are letter grades encoded with `scale`.
BondTable read_bonds(const std::filesystem::path& path, const RatingScale& scale = RatingScale::default_scale());
void write_bonds(const std::filesystem::path& path, const BondTable& bonds,
                 const RatingScale& scale = RatingScale::default_scale());

}  // namespace muni::bonds
