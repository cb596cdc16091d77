#include "muni/curve.hpp"
#include "muni/errors.hpp"
#include "muni/synth.hpp"
#include "support.hpp"

#include <cmath>

using namespace muni;
using namespace muni::curve;

namespace {

// Plain bisection on the semiannual price, no derivative information.
double bisect_yield(const CashflowSchedule& cf, double price) {
  double lo = -0.5, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double p = 0;
    for (const auto& f : cf.flows()) p += f.amount / std::pow(1.0 + mid / 2.0, 2.0 * f.time_years);
    (p > price ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

CashflowSchedule bullet(double coupon, int halves) {
  std::vector<Cashflow> flows;
  for (int k = 1; k <= halves; ++k) flows.push_back({0.5 * k, 100.0 * coupon / 2.0 + (k == halves ? 100.0 : 0.0)});
  return CashflowSchedule(flows);
}

}  // namespace

TEST_CASE("discount factor basics") {
  auto flat5 = ZeroCurve::flat(0.05);
  CHECK(discount_factor(flat5, 0.0) == 1.0);
  CHECK(discount_factor(ZeroCurve::flat(0.0), 7.0) == 1.0);
  CHECK(discount_factor(flat5, 2.0) == doctest::Approx(0.904837418035960).epsilon(1e-13));
}

TEST_CASE("zero rates interpolate linearly and extrapolate flat") {
  ZeroCurve c(Date(2015, 6, 30), {{1.0, 0.01}, {3.0, 0.03}, {10.0, 0.04}});
  CHECK(c.zero_rate(0.1) == 0.01);
  CHECK(c.zero_rate(2.0) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(c.zero_rate(6.5) == doctest::Approx(0.035).epsilon(1e-15));
  CHECK(c.zero_rate(40.0) == 0.04);
}

TEST_CASE("curve construction rejects malformed input") {
  CHECK_THROWS_KIND(ZeroCurve(Date(2015, 1, 1), {{1.0, 0.01}}), ErrorKind::Validation);
  CHECK_THROWS_KIND(ZeroCurve(Date(2015, 1, 1), {{2.0, 0.01}, {1.0, 0.02}}), ErrorKind::Validation);
  CHECK_THROWS_KIND(ZeroCurve(Date(2015, 1, 1), {{1.0, 0.01}, {2.0, std::nan("")}}), ErrorKind::Validation);
  CHECK_THROWS_KIND(CashflowSchedule({{1.0, 5.0}, {1.0, 105.0}}), ErrorKind::Validation);
  CHECK_THROWS_KIND(CashflowSchedule({{1.0, 0.0}}), ErrorKind::Validation);
}

TEST_CASE("overflowing interpolation surfaces as a non-finite rate") {
  ZeroCurve c(Date(2015, 1, 1), {{1.0, -1.5e308}, {2.0, 1.5e308}});
  CHECK_THROWS_KIND(discount_factor(c, 1.5), ErrorKind::NonFiniteRate);
}

TEST_CASE("risk-free price of simple schedules") {
  CashflowSchedule one({{1.0, 100.0}});
  CHECK(riskfree_price(ZeroCurve::flat(0.0), one) == 100.0);
  CHECK(riskfree_price(ZeroCurve::flat(0.05), one) == doctest::Approx(95.1229424500714).epsilon(1e-13));
  CHECK(riskfree_price(ZeroCurve::flat(0.0), CashflowSchedule({{0.5, 2.0}, {1.0, 102.0}})) == 104.0);
}

TEST_CASE("coupon-equivalent yield closed forms") {
  CHECK(coupon_equivalent_riskfree_yield(ZeroCurve::flat(0.0), bullet(0.04, 20)) == doctest::Approx(0.0).epsilon(1e-12));
  for (double r : {0.0, 0.01, 0.04, 0.08}) {
    for (double T : {0.5, 1.0, 5.0, 12.5}) {
      const double expected = 2.0 * (std::exp(r / 2.0) - 1.0);
      const double y = coupon_equivalent_riskfree_yield(ZeroCurve::flat(r), CashflowSchedule({{T, 100.0}}));
      CHECK(std::abs(y - expected) < 1e-10);
    }
  }
  // r = 0.04 gives 2(e^0.02 - 1) = 0.040402680053...
  const double y04 = coupon_equivalent_riskfree_yield(ZeroCurve::flat(0.04), CashflowSchedule({{3.0, 100.0}}));
  CHECK(std::abs(y04 - 0.0404026800535) < 1e-12);
}

TEST_CASE("coupon-equivalent yield agrees with brute-force bisection") {
  auto cf = bullet(0.04, 20);
  auto curve = ZeroCurve::flat(0.03);
  const double y = coupon_equivalent_riskfree_yield(curve, cf);
  CHECK(std::abs(y - bisect_yield(cf, riskfree_price(curve, cf))) < 1e-9);
}

TEST_CASE("solver reports prices beyond the bracket") {
  auto cf = bullet(0.04, 20);
  CHECK_THROWS_KIND(solve_semiannual_yield(cf, 1e6), ErrorKind::NoRoot);
  CHECK_THROWS_KIND(solve_semiannual_yield(cf, 1e-6), ErrorKind::NoRoot);
}

TEST_CASE("discount factors fall with horizon on rising non-negative curves") {
  synth::Rng rng(11);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<CurvePoint> pts;
    double t = 0, r = rng.uniform(0.0, 0.02);
    const int n = rng.between(2, 8);
    for (int i = 0; i < n; ++i) {
      t += rng.uniform(0.1, 6.0);
      r += rng.uniform(0.0, 0.01);
      pts.push_back({t, r});
    }
    ZeroCurve c(Date(2012, 1, 31), pts);
    double prev = 1.0;
    for (double h = 0.0; h <= 35.0; h += 0.37) {
      const double df = discount_factor(c, h);
      REQUIRE(df <= prev);
      prev = df;
    }
  }
}

TEST_CASE("splitting a flow leaves the coupon-equivalent yield unchanged") {
  ZeroCurve c(Date(2012, 1, 31), {{0.5, 0.01}, {5.0, 0.025}, {30.0, 0.035}});
  CashflowSchedule whole({{0.5, 2.0}, {1.0, 2.0}, {1.5, 102.0}});
  std::vector<Cashflow> split_flows = {{0.5, 1.0}, {0.5 + 1e-12, 1.0}, {1.0, 2.0}, {1.5, 102.0}};
  // Two equal flows at the same time are represented one picosecond apart,
  // since schedules require strictly increasing times.
  const double a = coupon_equivalent_riskfree_yield(c, whole);
  const double b = coupon_equivalent_riskfree_yield(c, CashflowSchedule(split_flows));
  CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("pricing at the solved yield reproduces the risk-free price") {
  synth::Rng rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    ZeroCurve c(Date(2012, 1, 31),
                {{0.25, rng.uniform(0.0, 0.03)}, {5.0, rng.uniform(0.01, 0.05)}, {30.0, rng.uniform(0.02, 0.06)}});
    auto cf = bullet(rng.uniform(0.0, 0.08), rng.between(1, 60));
    const double y = coupon_equivalent_riskfree_yield(c, cf);
    CHECK(std::abs(semiannual_price(cf, y) - riskfree_price(c, cf)) < 1e-8);
  }
}

TEST_CASE("curve set lookup uses the latest curve within 31 days") {
  CurveSet set;
  set.add(ZeroCurve::flat(0.01, Date(2015, 1, 31)));
  set.add(ZeroCurve::flat(0.02, Date(2015, 3, 31)));
  CHECK(set.as_of(Date(2015, 1, 30)) == nullptr);
  CHECK(set.as_of(Date(2015, 1, 31))->zero_rate(1) == 0.01);
  CHECK(set.as_of(Date(2015, 3, 3))->zero_rate(1) == 0.01);
  CHECK(set.as_of(Date(2015, 3, 4)) == nullptr);
  CHECK(set.as_of(Date(2015, 4, 30))->zero_rate(1) == 0.02);
  CHECK_THROWS_KIND(set.add(ZeroCurve::flat(0.03, Date(2015, 1, 31))), ErrorKind::Validation);
}

TEST_CASE("curves round-trip through CSV") {
  auto dir = test_support::scratch("curve_io");
  auto curves = synth::gen_curves(3, {2012, 1}, {2012, 3});
  synth::write_curves(dir / "curve.csv", curves);
  auto set = read_curves(dir / "curve.csv");
  REQUIRE(set.size() == 3);
  const auto* c = set.as_of(Date(2012, 2, 29));
  REQUIRE(c != nullptr);
  CHECK(c->zero_rate(10.0) == curves[1].zero_rate(10.0));
}
