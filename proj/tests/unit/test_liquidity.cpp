#include "muni/errors.hpp"
#include "muni/liquidity.hpp"
#include "muni/synth.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>

using namespace muni;
using namespace muni::liquidity;
using trades::Side;

namespace {

IssuanceWindowTrades window(std::vector<WindowTrade> ts, double offering = 100.0) {
  return {"W", offering, std::move(ts)};
}

WindowTrade buy(double price, double vol = 1e5, Date d = Date(2014, 3, 2)) { return {d, price, vol, Side::CustomerBuy}; }
WindowTrade dealer(double price, double vol = 1e5, Date d = Date(2014, 3, 2)) { return {d, price, vol, Side::Interdealer}; }

IssuanceWindowTrades random_window(synth::Rng& rng) {
  std::vector<WindowTrade> ts;
  const int n = rng.between(2, 25);
  for (int i = 0; i < n; ++i) {
    const auto side = i == 0 ? Side::CustomerBuy : i == 1 ? Side::Interdealer : static_cast<Side>(rng.below(3));
    ts.push_back({Date(2014, 3, 1).add_days(rng.between(0, 5)), rng.uniform(95, 106), rng.uniform(5e3, 2e6), side});
  }
  std::stable_sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
  return window(ts, rng.uniform(97, 103));
}

}  // namespace

TEST_CASE("offering-price markup") {
  CHECK(markup_offering(window({buy(100.0)})) == 0.0);
  CHECK(markup_offering(window({buy(101.0), buy(102.0)})) == doctest::Approx(150.0).epsilon(1e-13));
  CHECK(markup_offering(window({buy(101.0, 1e5), buy(104.0, 3e5)})) == doctest::Approx(325.0).epsilon(1e-13));
  // Dealer trades and customer sells are not purchases.
  CHECK(markup_offering(window({buy(101.0), dealer(90.0), {Date(2014, 3, 2), 80.0, 1e5, Side::CustomerSell}})) ==
        doctest::Approx(100.0).epsilon(1e-13));
  CHECK_THROWS_KIND(markup_offering(window({dealer(101.0)})), ErrorKind::NoCustomerTrades);
}

TEST_CASE("average-price markup") {
  CHECK(markup_avg_po(window({buy(103.0)})) == doctest::Approx(300.0).epsilon(1e-13));
  CHECK(markup_avg_po(window({buy(102.0), buy(104.0)})) == doctest::Approx(300.0).epsilon(1e-13));
  CHECK(markup_avg_po(window({buy(97.5)}, 97.5)) == 0.0);
  CHECK_THROWS_KIND(markup_avg_po(window({})), ErrorKind::NoCustomerTrades);
}

TEST_CASE("the two offering markups agree on every window") {
  synth::Rng rng(51);
  for (int rep = 0; rep < 2000; ++rep) {
    auto w = random_window(rng);
    CHECK(std::abs(markup_offering(w) - markup_avg_po(w)) < 1e-9);
  }
}

TEST_CASE("markups ignore the volume scale") {
  synth::Rng rng(52);
  for (int rep = 0; rep < 200; ++rep) {
    auto w = random_window(rng);
    auto doubled = w;
    for (auto& t : doubled.trades) t.volume *= 2.0;
    CHECK(markup_offering(doubled) == doctest::Approx(markup_offering(w)).epsilon(1e-12).scale(1e-9));
    CHECK(markup_interdealer(doubled) == doctest::Approx(markup_interdealer(w)).epsilon(1e-12).scale(1e-9));
  }
}

TEST_CASE("interdealer markup") {
  CHECK(markup_interdealer(window({buy(100.5), dealer(100.5)})) == 0.0);
  CHECK(markup_interdealer(window({buy(101.0), dealer(100.0)})) == doctest::Approx(100.0).epsilon(1e-13));
  CHECK_THROWS_KIND(markup_interdealer(window({buy(101.0)})), ErrorKind::NoInterdealerTrades);
  CHECK_THROWS_KIND(markup_interdealer(window({dealer(101.0)})), ErrorKind::NoCustomerTrades);

  // Swapping the sides: m' = -m * V / P, with P and V the side means.
  synth::Rng rng(53);
  for (int rep = 0; rep < 200; ++rep) {
    const double p = rng.uniform(95, 106), v = rng.uniform(95, 106);
    auto w = window({buy(p, 2e5), dealer(v, 3e5)});
    auto swapped = window({dealer(p, 2e5), buy(v, 3e5)});
    CHECK(markup_interdealer(swapped) == doctest::Approx(-markup_interdealer(w) * v / p).epsilon(1e-12).scale(1e-9));
  }
}

TEST_CASE("price dispersion") {
  CHECK(price_dispersion(window({buy(101.0), buy(101.0), dealer(101.0)})) == 0.0);
  CHECK(price_dispersion(window({buy(99.0), dealer(101.0)})) == doctest::Approx(1.0).epsilon(1e-13));
  // Days with one trade are skipped; qualifying days are averaged.
  const Date d2(2014, 3, 5);
  CHECK(price_dispersion(window({buy(99.0), dealer(101.0), buy(100.0, 1e5, Date(2014, 3, 4)), buy(97.0, 1e5, d2),
                                 buy(103.0, 1e5, d2)})) == doctest::Approx(2.0).epsilon(1e-13));
  // Volume weighting: 98 with 3x the volume of 102 gives mean 99, sd sqrt(3).
  CHECK(price_dispersion(window({buy(98.0, 3e5), buy(102.0, 1e5)})) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
  CHECK_THROWS_KIND(price_dispersion(window({buy(99.0), buy(101.0, 1e5, Date(2014, 3, 9))})),
                    ErrorKind::InsufficientTrades);
}

TEST_CASE("dispersion is exactly zero when every trade prints the same price") {
  synth::Rng rng(56);
  for (int rep = 0; rep < 500; ++rep) {
    auto w = random_window(rng);
    const double p = rng.uniform(90, 110);
    for (auto& t : w.trades) {
      t.price = p;
      t.date = Date(2014, 3, 3);
    }
    CHECK(price_dispersion(w) == 0.0);
  }
}

TEST_CASE("dispersion shifts, scales and permutes as expected") {
  synth::Rng rng(54);
  for (int rep = 0; rep < 300; ++rep) {
    auto w = random_window(rng);
    double base;
    try {
      base = price_dispersion(w);
    } catch (const Error&) {
      continue;
    }
    auto shifted = w, scaled = w, permuted = w;
    const double c = rng.uniform(-5, 5), k = rng.uniform(0.5, 1.5);
    for (auto& t : shifted.trades) t.price += c;
    for (auto& t : scaled.trades) t.price *= k;
    std::reverse(permuted.trades.begin(), permuted.trades.end());
    CHECK(price_dispersion(shifted) == doctest::Approx(base).epsilon(1e-9).scale(1e-9));
    CHECK(price_dispersion(scaled) == doctest::Approx(k * base).epsilon(1e-10).scale(1e-9));
    CHECK(price_dispersion(permuted) == doctest::Approx(base).epsilon(1e-12).scale(1e-9));
    CHECK(markup_offering(permuted) == doctest::Approx(markup_offering(w)).epsilon(1e-12).scale(1e-9));
  }
}

TEST_CASE("Amihud illiquidity") {
  CHECK(amihud(window({buy(100.0), buy(100.0), dealer(100.0)})) == 0.0);
  CHECK(amihud(window({buy(100.0), buy(101.0, 1e6)})) == doctest::Approx(std::log(1.01)).epsilon(1e-14));
  CHECK(std::abs(amihud(window({buy(100.0), buy(101.0, 1e6)})) - 0.00995) < 5e-6);
  CHECK(amihud(window({buy(100.0, 1e6), buy(110.0, 2e6), buy(100.0, 5e5)})) ==
        doctest::Approx((std::log(1.1) / 2e6 + std::log(1.1) / 5e5) * 1e6 / 2).epsilon(1e-14));
  CHECK_THROWS_KIND(amihud(window({buy(100.0)})), ErrorKind::InsufficientTrades);

  synth::Rng rng(55);
  for (int rep = 0; rep < 500; ++rep) CHECK(amihud(random_window(rng)) >= 0.0);
}

TEST_CASE("issuance window selection") {
  bonds::Bond b;
  b.cusip = "L";
  b.dated_date = Date(2014, 3, 1);
  b.maturity_date = Date(2030, 3, 1);
  b.coupon_rate = 0.04;
  b.offering_price = 99.5;
  std::vector<trades::TradeRecord> ts = {
      {"L", Date(2014, 3, 31), 101, 0.03, 1e5, Side::CustomerBuy},
      {"L", Date(2014, 3, 30), 102, 0.03, 1e5, Side::Interdealer},
      {"L", Date(2014, 2, 28), 100, 0.03, 1e5, Side::CustomerBuy},
      {"L", Date(2014, 3, 1), 100, 0.03, 1e5, Side::CustomerBuy},
      {"M", Date(2014, 3, 2), 100, 0.03, 1e5, Side::CustomerBuy},
  };
  auto w = build_window(b, ts);
  CHECK(w.offering_price == 99.5);
  REQUIRE(w.trades.size() == 2);
  CHECK(w.trades[0].date == Date(2014, 3, 1));
  CHECK(w.trades[1].date == Date(2014, 3, 30));

  auto rows = compute_liquidity({{"L", b}}, ts);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n_trades_window == 2);
  CHECK(*rows[0].markup_bps == doctest::Approx(1e4 * 0.5 / 99.5).epsilon(1e-13));
  CHECK(rows[0].markup_pv_bps.has_value());
  CHECK_FALSE(rows[0].price_dispersion.has_value());

  b.offering_price.reset();
  CHECK_THROWS_KIND(build_window(b, ts), ErrorKind::MissingField);
  CHECK(compute_liquidity({{"L", b}}, ts).empty());
}
