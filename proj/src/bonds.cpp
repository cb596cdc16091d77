#include "muni/bonds.hpp"

#include "builtin_data.hpp"
#include "muni/csv.hpp"
#include "muni/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>

namespace muni::bonds {

void validate(const Bond& b) {
  auto fail = [&](std::string_view what) {
    throw Error(ErrorKind::Validation, fmt::format("bond {}: {}", b.cusip, what));
  };
  if (b.cusip.size() != 9) fail("cusip must have 9 characters");
  if (b.maturity_date && !(*b.maturity_date > b.dated_date)) fail("maturity_date must follow dated_date");
  if (b.coupon_rate && !(*b.coupon_rate >= 0.0 && *b.coupon_rate <= 0.20)) fail("coupon_rate outside [0, 0.20]");
  if (b.offering_price && !(*b.offering_price >= 50.0 && *b.offering_price <= 150.0))
    fail("offering_price outside [50, 150]");
  if (b.rating && (*b.rating < 1 || *b.rating > RatingScale::kGrades)) fail("rating outside [1, 28]");
  if (!(b.amount_issued >= 0.0)) fail("amount_issued must be non-negative");
}

RatingScale::RatingScale(std::vector<std::string> grades) : grades_(std::move(grades)) {
  if (static_cast<int>(grades_.size()) != kGrades)
    throw Error(ErrorKind::Validation, fmt::format("rating scale needs {} grades, got {}", kGrades, grades_.size()));
  for (std::size_t i = 0; i < grades_.size(); ++i) {
    if (grades_[i].empty()) throw Error(ErrorKind::Validation, "empty rating grade");
    if (!index_.emplace(grades_[i], static_cast<int>(i) + 1).second)
      throw Error(ErrorKind::Validation, fmt::format("duplicate rating grade '{}'", grades_[i]));
  }
}

namespace {

RatingScale scale_from_table(const CsvTable& t) {
  t.require_columns({"grade", "score"});
  std::vector<std::string> grades(RatingScale::kGrades);
  std::set<long long> seen;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    auto score = t.integer(r, "score");
    if (score < 1 || score > RatingScale::kGrades || !seen.insert(score).second)
      throw Error(ErrorKind::Validation, fmt::format("{}: score {} duplicated or outside 1..28", t.where(r), score));
    grades[static_cast<std::size_t>(score - 1)] = std::string(t.cell(r, "grade"));
  }
  return RatingScale(std::move(grades));
}

}  // namespace

const RatingScale& RatingScale::default_scale() {
  static const RatingScale scale = scale_from_table(CsvTable::parse(builtin::kRatingsCsv, "<builtin ratings>"));
  return scale;
}

RatingScale RatingScale::read(const std::filesystem::path& path) { return scale_from_table(CsvTable::read_file(path)); }

int RatingScale::encode(std::string_view grade) const {
  auto it = index_.find(grade);
  if (it == index_.end()) throw Error(ErrorKind::UnknownGrade, fmt::format("unknown rating grade '{}'", grade));
  return it->second;
}

const std::string& RatingScale::decode(int score) const {
  if (score < 1 || score > size()) throw Error(ErrorKind::UnknownGrade, fmt::format("no grade for score {}", score));
  return grades_[static_cast<std::size_t>(score - 1)];
}

int encode_rating(std::string_view grade, const RatingScale& scale) { return scale.encode(grade); }

curve::CashflowSchedule cashflows(const Bond& bond, const Date& as_of) {
  if (!bond.maturity_date) throw Error(ErrorKind::MissingField, fmt::format("bond {}: maturity_date", bond.cusip));
  if (!bond.coupon_rate) throw Error(ErrorKind::MissingField, fmt::format("bond {}: coupon_rate", bond.cusip));
  if (as_of >= *bond.maturity_date)
    throw Error(ErrorKind::Matured, fmt::format("bond {} matured on {}", bond.cusip, bond.maturity_date->iso()));
  return coupon_schedule(*bond.coupon_rate, year_fraction(as_of, *bond.maturity_date));
}

// Coupon grid counted back from maturity in half-year steps.
curve::CashflowSchedule coupon_schedule(double coupon_rate, double years_to_maturity) {
  constexpr double kMinTime = 1e-9;
  const double coupon = coupon_rate / 2.0 * 100.0;
  std::vector<curve::Cashflow> flows;
  for (int k = 0;; ++k) {
    double t = years_to_maturity - 0.5 * k;
    if (t <= kMinTime) break;
    double amount = (k == 0 ? 100.0 : 0.0) + coupon;
    if (amount > 0.0) flows.push_back({t, amount});
  }
  std::reverse(flows.begin(), flows.end());
  return curve::CashflowSchedule(std::move(flows));
}

double price_from_yield(const curve::CashflowSchedule& cf, double y) { return curve::semiannual_price(cf, y); }

double ytm_from_price(const curve::CashflowSchedule& cf, double price) {
  return curve::solve_semiannual_yield(cf, price);
}

double macaulay_duration(const curve::CashflowSchedule& cf, double y) {
  if (!(y > -2.0)) throw Error(ErrorKind::Validation, "yield must exceed -2");
  if (cf.empty()) throw Error(ErrorKind::Validation, "empty cash flow schedule");
  if (cf.size() == 1) return cf.flows().front().time_years;
  const double base = 1.0 + y / 2.0;
  double weighted = 0.0, total = 0.0;
  for (const auto& f : cf.flows()) {
    double pv = f.amount * std::pow(base, -2.0 * f.time_years);
    weighted += f.time_years * pv;
    total += pv;
  }
  return weighted / total;
}

double wealth_impact(double outstanding, double macaulay_years, double y, double dy) {
  if (!(outstanding >= 0.0)) throw Error(ErrorKind::Validation, "outstanding must be non-negative");
  if (!std::isfinite(macaulay_years) || !std::isfinite(y) || !std::isfinite(dy) || !std::isfinite(outstanding))
    throw Error(ErrorKind::Validation, "wealth_impact inputs must be finite");
  return outstanding * macaulay_years * dy / (1.0 + y / 2.0);
}

double annual_interest_delta(double principal, double dy) {
  if (!std::isfinite(principal) || !std::isfinite(dy))
    throw Error(ErrorKind::Validation, "annual_interest_delta inputs must be finite");
  return principal * dy;
}

const std::array<std::string_view, ControlVector::kSize>& ControlVector::names() {
  static const std::array<std::string_view, kSize> n = {
      "coupon",    "log_amount", "callable",        "insured", "general_obligation", "bank_qualified",
      "refunding", "credit_enhanced", "rating", "remaining_maturity", "inverse_maturity"};
  return n;
}

std::array<double, ControlVector::kSize> ControlVector::values() const {
  return {coupon, log_amount, callable, insured, general_obligation, bank_qualified,
          refunding, credit_enhanced, rating, remaining_maturity, inverse_maturity};
}

ControlVector build_bond_controls(const Bond& bond, const Date& obs_date) {
  if (!bond.maturity_date) throw Error(ErrorKind::MissingField, fmt::format("bond {}: maturity_date", bond.cusip));
  if (!bond.coupon_rate) throw Error(ErrorKind::MissingField, fmt::format("bond {}: coupon_rate", bond.cusip));
  if (obs_date >= *bond.maturity_date)
    throw Error(ErrorKind::Matured, fmt::format("bond {} matured on {}", bond.cusip, bond.maturity_date->iso()));
  if (!(bond.amount_issued > 0.0))
    throw Error(ErrorKind::Validation, fmt::format("bond {}: amount_issued must be positive", bond.cusip));
  ControlVector c;
  c.coupon = *bond.coupon_rate;
  c.log_amount = std::log(bond.amount_issued);
  c.callable = bond.callable;
  c.insured = bond.insured;
  c.general_obligation = bond.general_obligation;
  c.bank_qualified = bond.bank_qualified;
  c.refunding = bond.refunding;
  c.credit_enhanced = bond.credit_enhanced;
  c.rating = bond.rating ? static_cast<double>(*bond.rating) : std::nan("");
  c.remaining_maturity = year_fraction(obs_date, *bond.maturity_date);
  c.inverse_maturity = 1.0 / c.remaining_maturity;
  return c;
}

namespace {

constexpr std::string_view kBondColumns[] = {
    "cusip",     "dated_date",     "maturity_date",   "coupon_rate",     "amount_issued", "offering_price",
    "offering_yield", "sale_method", "callable",      "insured",         "go",            "bank_qualified",
    "refunding", "credit_enhanced", "tax_exempt_fed", "tax_exempt_state", "state",        "county_fips",
    "rating"};

SaleMethod parse_sale_method(std::string_view s, const std::string& where) {
  if (s == "negotiated" || s == "N" || s == "1") return SaleMethod::Negotiated;
  if (s == "competitive" || s == "C" || s == "0") return SaleMethod::Competitive;
  throw Error(ErrorKind::Parse, fmt::format("{}: sale_method '{}' is not negotiated/competitive", where, s));
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

BondTable read_bonds(const std::filesystem::path& path, const RatingScale& scale) {
  auto t = CsvTable::read_file(path);
  for (auto c : kBondColumns) (void)t.column(c);
  BondTable table;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    Bond b;
    b.cusip = std::string(t.cell(r, "cusip"));
    try {
      b.dated_date = Date::parse(t.cell(r, "dated_date"));
      if (auto m = t.cell(r, "maturity_date"); !m.empty()) b.maturity_date = Date::parse(m);
      b.coupon_rate = t.optional_number(r, "coupon_rate");
      b.amount_issued = t.optional_number(r, "amount_issued").value_or(0.0);
      b.offering_price = t.optional_number(r, "offering_price");
      b.offering_yield = t.optional_number(r, "offering_yield");
      b.sale_method = parse_sale_method(t.cell(r, "sale_method"), t.where(r));
      b.callable = t.flag(r, "callable");
      b.insured = t.flag(r, "insured");
      b.general_obligation = t.flag(r, "go");
      b.bank_qualified = t.flag(r, "bank_qualified");
      b.refunding = t.flag(r, "refunding");
      b.credit_enhanced = t.flag(r, "credit_enhanced");
      b.tax_exempt_federal = t.flag(r, "tax_exempt_fed");
      b.tax_exempt_state = t.flag(r, "tax_exempt_state");
      b.state = std::string(t.cell(r, "state"));
      b.county_fips = std::string(t.cell(r, "county_fips"));
      if (auto g = t.cell(r, "rating"); !g.empty()) b.rating = scale.encode(g);
      validate(b);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{}: {}", t.where(r), e.what()));
    }
    if (table.contains(b.cusip))
      throw Error(ErrorKind::Validation, fmt::format("{}: duplicate cusip {}", t.where(r), b.cusip));
    table.emplace(b.cusip, std::move(b));
  }
  return table;
}

void write_bonds(const std::filesystem::path& path, const BondTable& bonds, const RatingScale& scale) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", path.string()));
  CsvWriter w(out, std::vector<std::string>(std::begin(kBondColumns), std::end(kBondColumns)));
  auto b01 = [](bool v) { return std::string(v ? "1" : "0"); };
  for (const auto& [cusip, b] : bonds) {
    w.row({b.cusip, b.dated_date.iso(), b.maturity_date ? b.maturity_date->iso() : "", opt_number(b.coupon_rate),
           format_number(b.amount_issued), opt_number(b.offering_price), opt_number(b.offering_yield),
           b.sale_method == SaleMethod::Negotiated ? "negotiated" : "competitive", b01(b.callable), b01(b.insured),
           b01(b.general_obligation), b01(b.bank_qualified), b01(b.refunding), b01(b.credit_enhanced),
           b01(b.tax_exempt_federal), b01(b.tax_exempt_state), b.state, b.county_fips,
           b.rating ? scale.decode(*b.rating) : ""});
  }
}

}  // namespace muni::bonds
