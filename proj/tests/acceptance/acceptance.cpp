// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every oracle here is computed independently of the library code
// under test.

#include "muni/bonds.hpp"
#include "muni/curve.hpp"
#include "muni/errors.hpp"
#include "muni/liquidity.hpp"
#include "muni/matching.hpp"
#include "muni/panel.hpp"
#include "muni/pipeline.hpp"
#include "muni/spreads.hpp"
#include "muni/synth.hpp"
#include "muni/trades.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace muni;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// 1. Back-of-envelope impacts.
Outcome impacts() {
  const double w1 = bonds::wealth_impact(631e9, 8.04, 0.0289, 0.001525);
  const double a = bonds::annual_interest_delta(71e6, 0.00126);
  const double w2 = bonds::wealth_impact(207e6, 8.0, 0.0, 0.00126);
  Outcome o;
  o.pass = w1 >= 7.60e9 && w1 <= 7.66e9 && a >= 89000 && a <= 90000 && w2 >= 2.05e6 && w2 <= 2.12e6;
  o.detail = fmt::format("wealth_impact={:.6g} annual_interest_delta={:.6g} wealth_impact={:.6g}", w1, a, w2);
  return o;
}

// 2. Federal schedule and zero-state retention.
Outcome tax_schedule() {
  const auto regime = spreads::TaxRegime::builtin_federal();
  Outcome o;
  int checked = 0;
  for (int year = 2005; year <= 2019; ++year) {
    const double want = year <= 2012 ? 0.35 : year <= 2017 ? 0.396 : 0.37;
    const double fed = regime.federal_rate(year);
    auto with_zero_state = regime;
    with_zero_state.set_state("NY", year, 0.0);
    const double ret = spreads::combined_retention(with_zero_state, "NY", std::nullopt, year);
    if (fed != want || ret != 1.0 - want) o.pass = false;
    ++checked;
  }
  o.detail = fmt::format("{} years checked", checked);
  return o;
}

// 3. HDFE vs explicit dummy-variable OLS and a direct two-way sandwich.

Eigen::MatrixXd one_hot(const std::vector<int>& codes, int levels) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(codes.size()), levels);
  for (std::size_t i = 0; i < codes.size(); ++i) d(static_cast<Eigen::Index>(i), codes[i]) = 1.0;
  return d;
}

/// Orthonormal basis of the column space, from singular values above a
/// relative threshold.
Eigen::MatrixXd column_basis(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] > 1e-9 * sv[0]) ++r;
  return svd.matrixU().leftCols(r);
}

/// Cluster meat for one grouping of score rows.
Eigen::MatrixXd meat(const Eigen::MatrixXd& scores, const std::vector<std::string>& groups, double& g_count) {
  std::map<std::string, Eigen::VectorXd> sums;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    auto it = sums.try_emplace(groups[static_cast<std::size_t>(i)], Eigen::VectorXd::Zero(scores.cols())).first;
    it->second += scores.row(i).transpose();
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(scores.cols(), scores.cols());
  for (const auto& [g, s] : sums) m += s * s.transpose();
  g_count = static_cast<double>(sums.size());
  return m;
}

Outcome estimator_oracle() {
  const auto start = Clock::now();
  synth::Rng rng(20240501);
  double max_beta_dev = 0, max_vcov_rel = 0;
  int floored = 0, flag_mismatch = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = rng.between(200, 2000), dims = rng.between(1, 3), nx = rng.between(1, 3);
    std::vector<int> levels;
    std::vector<std::vector<int>> codes(static_cast<std::size_t>(dims), std::vector<int>(static_cast<std::size_t>(n)));
    std::vector<std::vector<double>> effects(static_cast<std::size_t>(dims));
    for (int d = 0; d < dims; ++d) {
      levels.push_back(rng.between(3, 40));
      for (int l = 0; l < levels.back(); ++l) effects[static_cast<std::size_t>(d)].push_back(rng.normal(0, 3));
    }
    std::vector<std::string> c2(static_cast<std::size_t>(n));
    const int g2 = rng.between(8, 40);
    Eigen::MatrixXd x(n, nx);
    Eigen::VectorXd y(n);
    std::vector<double> beta(static_cast<std::size_t>(nx));
    for (auto& b : beta) b = rng.normal(0, 2);
    for (int i = 0; i < n; ++i) {
      double fe = 0;
      for (int d = 0; d < dims; ++d) {
        const int L = levels[static_cast<std::size_t>(d)];
        const int code = i < 2 * L ? i % L : static_cast<int>(rng.below(static_cast<std::uint64_t>(L)));
        codes[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] = code;
        fe += effects[static_cast<std::size_t>(d)][static_cast<std::size_t>(code)];
      }
      c2[static_cast<std::size_t>(i)] = "g" + std::to_string(rng.below(static_cast<std::uint64_t>(g2)));
      y[i] = fe + rng.normal();
      for (int j = 0; j < nx; ++j) {
        x(i, j) = 0.5 * fe + rng.normal();
        y[i] += beta[static_cast<std::size_t>(j)] * x(i, j);
      }
    }

    panel::Frame frame(static_cast<std::size_t>(n));
    frame.add_numeric("y", std::vector<double>(y.data(), y.data() + n));
    panel::RegressionSpec spec{.outcome = "y"};
    for (int j = 0; j < nx; ++j) {
      std::vector<double> col(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = x(i, j);
      frame.add_numeric("x" + std::to_string(j), col);
      spec.regressors.push_back("x" + std::to_string(j));
    }
    std::vector<std::string> c1(static_cast<std::size_t>(n));
    for (int d = 0; d < dims; ++d) {
      std::vector<std::string> keys(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        keys[static_cast<std::size_t>(i)] = "L" + std::to_string(codes[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)]);
      if (d == 0) c1 = keys;
      frame.add_categorical("f" + std::to_string(d), keys);
      spec.fe.push_back("f" + std::to_string(d));
    }
    frame.add_categorical("c2", c2);
    spec.cluster = {"f0", "c2"};
    const auto fit = panel::fit(frame, spec);
    if (fit.vcov_floored) ++floored;

    // Dummy-variable regression with every level of every effect.
    Eigen::Index cols = nx;
    for (int d = 0; d < dims; ++d) cols += levels[static_cast<std::size_t>(d)];
    Eigen::MatrixXd dmat(n, cols - nx);
    Eigen::Index at = 0;
    for (int d = 0; d < dims; ++d) {
      dmat.middleCols(at, levels[static_cast<std::size_t>(d)]) =
          one_hot(codes[static_cast<std::size_t>(d)], levels[static_cast<std::size_t>(d)]);
      at += levels[static_cast<std::size_t>(d)];
    }
    Eigen::MatrixXd full(n, cols);
    full << x, dmat;
    const Eigen::MatrixXd basis = column_basis(full);
    const Eigen::VectorXd e = y - basis * (basis.transpose() * y);
    const double k = static_cast<double>(basis.cols());

    // Slopes and the slope block of the full-design sandwich: bread
    // (X~'X~)^-1 with X~ the dummy-residualized regressors, scores X~ e.
    const Eigen::MatrixXd dbasis = column_basis(dmat);
    const Eigen::MatrixXd xt = x - dbasis * (dbasis.transpose() * x);
    const Eigen::VectorXd coef = (xt.transpose() * xt).ldlt().solve(xt.transpose() * y);
    max_beta_dev = std::max(max_beta_dev, (coef - fit.beta).cwiseAbs().maxCoeff());
    const Eigen::MatrixXd bread = (xt.transpose() * xt).inverse();
    const Eigen::MatrixXd scores = xt.array().colwise() * e.array();
    std::vector<std::string> both(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) both[static_cast<std::size_t>(i)] = c1[static_cast<std::size_t>(i)] + "|" + c2[static_cast<std::size_t>(i)];
    const double nn = n;
    auto scaled = [&](const std::vector<std::string>& g) {
      double count = 0;
      Eigen::MatrixXd m = meat(scores, g, count);
      return Eigen::MatrixXd(count / (count - 1) * (nn - 1) / (nn - k) * m);
    };
    Eigen::MatrixXd v = bread * (scaled(c1) + scaled(c2) - scaled(both)) * bread;
    v = 0.5 * (v + v.transpose()).eval();
    // An indefinite two-way sum has its negative eigenvalues set to zero.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
    const auto& ev = es.eigenvalues();
    const bool indefinite = ev.minCoeff() < -1e-12 * ev.cwiseAbs().maxCoeff();
    if (indefinite) v = es.eigenvectors() * ev.cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
    if (indefinite != fit.vcov_floored) ++flag_mismatch;
    max_vcov_rel = std::max(max_vcov_rel, (fit.vcov - v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = max_beta_dev < 1e-7 && max_vcov_rel < 1e-8 && flag_mismatch == 0 && secs < 60.0;
  o.detail = fmt::format("max |dbeta|={:.3g}, max rel dvcov={:.3g}, floored {}/100, {:.2f}s", max_beta_dev,
                         max_vcov_rel, floored, secs);
  return o;
}

// 4. Monte Carlo recovery of the DiD effect.
Outcome monte_carlo() {
  const auto start = Clock::now();
  const int reps = 500;
  const double truth = 15.25;
  std::vector<double> est;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    synth::PanelDgp dgp;
    dgp.seed = 500000 + static_cast<std::uint64_t>(r);
    dgp.beta0 = truth;
    auto s = synth::gen_panel(dgp);
    panel::build_did(s.frame, "treat", "post");
    auto f = panel::fit(s.frame, {.outcome = "y", .regressors = {"treat_x_post", "x"}, .fe = {"unit", "period"},
                                  .cluster = {"cluster"}});
    const double b = f.beta[0], half = panel::t_critical(f.df_inference) * f.se[0];
    est.push_back(b);
    if (std::abs(b - truth) <= half) ++covered;
  }
  double mean = 0;
  for (double b : est) mean += b;
  mean /= reps;
  double ss = 0;
  for (double b : est) ss += (b - mean) * (b - mean);
  const double mc_se = std::sqrt(ss / (reps - 1) / reps);
  const double coverage = static_cast<double>(covered) / reps;
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = std::abs(mean - truth) <= 3.0 * mc_se && coverage >= 0.92 && coverage <= 0.98 && secs < 300.0;
  o.detail = fmt::format("mean={:.4f} (MC SE {:.4f}), coverage={:.3f}, {:.1f}s", mean, mc_se, coverage, secs);
  return o;
}

// 5. Event-study size of the pre-trend test and coverage of post buckets.
Outcome event_study_shape() {
  const auto start = Clock::now();
  const int reps = 200;
  const double jump = 10.0;
  int rejections = 0, tested = 0;
  std::map<int, std::pair<int, int>> post_cover;  // bucket -> (covered, seen)
  int all_covered = 0;
  for (int r = 0; r < reps; ++r) {
    synth::PanelDgp dgp;
    dgp.seed = 700000 + static_cast<std::uint64_t>(r);
    dgp.staggered = true;
    dgp.beta0 = jump;
    dgp.pre_trend = 0.0;
    auto s = synth::gen_panel(dgp);
    auto layout = panel::build_event_study(s.frame, "treat", "event_time", panel::Bucket::Year, -1);
    auto f = panel::fit(s.frame, {.outcome = "y", .regressors = layout.regressors(), .fe = {"unit", "period"},
                                  .cluster = {"cluster"}});
    auto sum = panel::summarize_event_study(f, layout);
    if (sum.pretrend) {
      ++tested;
      if (sum.pretrend->p_value < 0.05) ++rejections;
    }
    bool all = true;
    for (const auto& c : sum.contrasts) {
      if (c.bucket < 1) continue;
      const bool in = c.ci_low <= jump && jump <= c.ci_high;
      auto& [covered, seen] = post_cover[c.bucket];
      covered += in;
      ++seen;
      all = all && in;
    }
    all_covered += all;
  }
  const double reject_rate = static_cast<double>(rejections) / reps;
  double worst = 1.0;
  std::string per_bucket;
  for (const auto& [b, cs] : post_cover) {
    const double rate = static_cast<double>(cs.first) / cs.second;
    worst = std::min(worst, rate);
    per_bucket += fmt::format(" {}:{:.3f}", b, rate);
  }
  Outcome o;
  o.pass = tested == reps && reject_rate <= 0.10 && !post_cover.empty() && worst >= 0.90;
  o.detail = fmt::format("pre-trend rejection={:.3f} ({} tests), post coverage by bucket{}, all jointly={:.3f}, {:.1f}s",
                         reject_rate, tested, per_bucket, static_cast<double>(all_covered) / reps,
                         seconds_since(start));
  return o;
}

// 6. Cleaning counts and idempotence.
Outcome cleaning() {
  Outcome o;
  int fixtures = 0;
  synth::Rng rng(606);
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    synth::ViolationRecipe rc;
    rc.unmatched = rng.below(6);
    rc.maturity_range = rng.below(6);
    rc.missing_coupon = rng.below(6);
    rc.price_range = rng.below(6);
    rc.primary_market = rng.below(6);
    rc.near_issuance = rng.below(6);
    rc.short_maturity = rng.below(6);
    rc.yield_range = rng.below(6);
    rc.thin_bonds = rng.below(4);
    auto s = synth::gen_trades(seed, 30, rc);
    const std::size_t planted[trades::kRuleCount] = {rc.unmatched,   rc.maturity_range, rc.missing_coupon,
                                                     rc.price_range, rc.primary_market, rc.near_issuance,
                                                     rc.short_maturity, rc.yield_range, 0};
    auto first = trades::clean(s.trades, s.bonds, s.window);
    for (std::size_t k = 0; k < trades::kRuleCount; ++k) {
      const auto rule = static_cast<trades::Rule>(k);
      if (first.report.dropped(rule) != s.expected.dropped(rule)) o.pass = false;
      if (k + 1 < trades::kRuleCount && first.report.dropped(rule) != planted[k]) o.pass = false;
    }
    if (first.report.steps[trades::kRuleCount - 1].dropped == 0 && rc.thin_bonds > 0) o.pass = false;
    auto second = trades::clean(first.trades, s.bonds, s.window);
    if (second.report.total_dropped() != 0 || second.trades.size() != first.trades.size()) o.pass = false;
    ++fixtures;
  }
  o.detail = fmt::format("{} fixtures, rule order {}..{}", fixtures, trades::describe(trades::Rule::UnmatchedCusip),
                         trades::describe(trades::Rule::MinTrades));
  return o;
}

// 7. Curve and bond arithmetic.
Outcome bond_math() {
  synth::Rng rng(707);
  double roundtrip = 0, par = 0, duration = 0, cey = 0;
  for (int i = 0; i < 1000; ++i) {
    const double c = rng.uniform(0.0, 0.08), T = rng.uniform(0.6, 30.0), y = rng.uniform(0.0, 0.12);
    const auto cf = bonds::coupon_schedule(c, T);
    roundtrip = std::max(roundtrip, std::abs(bonds::ytm_from_price(cf, bonds::price_from_yield(cf, y)) - y));
    const double n = std::ceil(2.0 * T - 1e-12);
    const auto whole = bonds::coupon_schedule(c, n / 2.0);
    par = std::max(par, std::abs(bonds::price_from_yield(whole, c) - 100.0));
    const curve::CashflowSchedule zero({{T, 100.0}});
    duration = std::max(duration, std::abs(bonds::macaulay_duration(zero, y) - T));
    const double r = rng.uniform(-0.01, 0.10);
    const double closed = 2.0 * (std::exp(r / 2.0) - 1.0);
    cey = std::max(cey, std::abs(curve::coupon_equivalent_riskfree_yield(curve::ZeroCurve::flat(r), cf) - closed));
  }
  Outcome o;
  o.pass = roundtrip <= 1e-9 && par <= 1e-9 && duration == 0.0 && cey <= 1e-10;
  o.detail = fmt::format("roundtrip={:.3g} par={:.3g} zero duration={:.3g} cey={:.3g}", roundtrip, par, duration, cey);
  return o;
}

// 8. Liquidity identities.
Outcome liquidity_identities() {
  synth::Rng rng(808);
  double markup_gap = 0, shift_gap = 0, constant = 0, min_amihud = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<liquidity::WindowTrade> ts;
    const int n = rng.between(2, 30);
    for (int i = 0; i < n; ++i) {
      const auto side = i == 0 ? trades::Side::CustomerBuy : static_cast<trades::Side>(rng.below(3));
      ts.push_back({Date(2015, 6, 1).add_days(rng.between(0, 6)), rng.uniform(90, 110), rng.uniform(5e3, 5e6), side});
    }
    std::stable_sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
    liquidity::IssuanceWindowTrades w{"X", rng.uniform(95, 105), ts};
    markup_gap = std::max(markup_gap, std::abs(liquidity::markup_offering(w) - liquidity::markup_avg_po(w)));
    min_amihud = std::min(min_amihud, liquidity::amihud(w));

    auto flat = w;
    const double p = rng.uniform(90, 110);
    for (auto& t : flat.trades) t.price = p;
    auto shifted = w;
    const double c = rng.uniform(-5, 5);
    for (auto& t : shifted.trades) t.price += c;
    try {
      constant = std::max(constant, liquidity::price_dispersion(flat));
      shift_gap = std::max(shift_gap, std::abs(liquidity::price_dispersion(shifted) - liquidity::price_dispersion(w)));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientTrades) throw;
    }
  }
  Outcome o;
  o.pass = markup_gap < 1e-9 && constant == 0.0 && shift_gap < 1e-9 && min_amihud >= 0.0;
  o.detail = fmt::format("markup gap={:.3g} bps, constant dispersion={:.3g}, shift gap={:.3g}, min amihud={:.3g}",
                         markup_gap, constant, shift_gap, min_amihud);
  return o;
}

// 9. Matching properties.
Outcome matching_properties() {
  synth::Rng rng(909);
  Outcome o;
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<matching::FeatureRow> pool;
    const int n = rng.between(4, 40);
    for (int i = 0; i < n; ++i) {
      matching::FeatureRow r{fmt::format("{:05d}", 1001 + 2 * i), {}};
      for (int j = 0; j < 5; ++j) r.values.push_back(rng.normal(0, 1 + 10.0 * j));
      pool.push_back(r);
    }
    const auto& twin = pool[rng.below(static_cast<std::uint64_t>(n))];
    const matching::FeatureRow copy{"99999", twin.values};
    auto exact = matching::match(copy, pool);
    if (exact.controls[0].fips != twin.fips || exact.controls[0].distance != 0.0) o.pass = false;

    matching::FeatureRow t{"99999", {}};
    for (int j = 0; j < 5; ++j) t.values.push_back(rng.normal(0, 1 + 10.0 * j));
    auto base = matching::match(t, pool, {.k = 3});
    for (std::size_t i = 1; i < base.controls.size(); ++i)
      if (base.controls[i - 1].distance > base.controls[i].distance) o.pass = false;

    const std::size_t j = rng.below(5);
    const double a = rng.uniform(0.01, 1000.0) * (rng.below(2) ? 1 : -1), b = rng.uniform(-100, 100);
    auto pool2 = pool;
    auto t2 = t;
    for (auto& r : pool2) r.values[j] = a * r.values[j] + b;
    t2.values[j] = a * t2.values[j] + b;
    if (matching::match(t2, pool2).controls[0].fips != base.controls[0].fips) o.pass = false;

    auto shuffled = pool;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    auto again = matching::match(t, shuffled, {.k = 3});
    for (std::size_t i = 0; i < 3; ++i)
      if (again.controls[i].fips != base.controls[i].fips || again.controls[i].distance != base.controls[i].distance)
        o.pass = false;
  }
  o.detail = "300 random pools";
  return o;
}

// 10. Byte-identical pipeline reruns across thread counts.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> run_pipeline(const fs::path& root, const char* threads) {
  ::setenv("MUNI_ECON_THREADS", threads, 1);
  fs::remove_all(root);
  const auto synth = root / "synth", clean = root / "clean", agg = root / "aggregate", spr = root / "spreads",
             liq = root / "liquidity", mat = root / "match", fit = root / "fit", es = root / "event";
  auto s = [](const fs::path& p) { return p.string(); };
  std::vector<pipeline::RunSummary> runs;
  runs.push_back(pipeline::cmd_synth({{"out", s(synth)}, {"seed", "11"}}));
  runs.push_back(pipeline::cmd_clean({{"bonds", s(synth / "bonds.csv")}, {"trades", s(synth / "trades.csv")}, {"out", s(clean)}}));
  runs.push_back(pipeline::cmd_aggregate(
      {{"bonds", s(synth / "bonds.csv")}, {"trades", s(clean / "trades_clean.csv")}, {"out", s(agg)}}));
  runs.push_back(pipeline::cmd_spreads({{"bonds", s(synth / "bonds.csv")},
                                        {"bond-months", s(agg / "bond_months.csv")},
                                        {"curve", s(synth / "curve.csv")},
                                        {"out", s(spr)}}));
  runs.push_back(pipeline::cmd_liquidity(
      {{"bonds", s(synth / "bonds.csv")}, {"trades", s(clean / "trades_clean.csv")}, {"out", s(liq)}}));
  runs.push_back(pipeline::cmd_match(
      {{"county", s(synth / "county.csv")}, {"events", s(synth / "events.csv")}, {"k", "3"}, {"out", s(mat)}}));
  runs.push_back(pipeline::cmd_fit({{"data", s(synth / "panel.csv")},
                                    {"outcome", "y"},
                                    {"regressors", "x"},
                                    {"treat", "treat"},
                                    {"post", "post"},
                                    {"fe", "unit,period"},
                                    {"cluster", "cluster"},
                                    {"out", s(fit)}}));
  runs.push_back(pipeline::cmd_event_study({{"data", s(synth / "panel.csv")},
                                            {"outcome", "y"},
                                            {"regressors", "x"},
                                            {"fe", "unit,period"},
                                            {"cluster", "cluster"},
                                            {"bucket", "year"},
                                            {"out", s(es)}}));
  std::map<std::string, std::string> files;
  for (const auto& r : runs)
    for (const auto& p : r.outputs)
      if (p.extension() == ".csv") files[fs::relative(p, root).string()] = slurp(p);
  return files;
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / fmt::format("muni_acceptance_{}", ::getpid());
  const char* saved = std::getenv("MUNI_ECON_THREADS");
  const std::string restore = saved ? saved : "";
  const auto one = run_pipeline(root / "t1", "1");
  const auto eight = run_pipeline(root / "t8", "8");
  const auto again = run_pipeline(root / "t8b", "8");
  if (saved)
    ::setenv("MUNI_ECON_THREADS", restore.c_str(), 1);
  else
    ::unsetenv("MUNI_ECON_THREADS");
  fs::remove_all(root);
  Outcome o;
  o.pass = !one.empty() && one == eight && eight == again;
  std::size_t bytes = 0;
  for (const auto& [name, body] : one) bytes += body.size();
  o.detail = fmt::format("{} CSV files, {} bytes compared across 1, 8 and 8 threads", one.size(), bytes);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"back-of-envelope impacts", impacts},
      {"tax schedule", tax_schedule},
      {"estimator oracle equivalence", estimator_oracle},
      {"Monte Carlo recovery", monte_carlo},
      {"event-study shape", event_study_shape},
      {"cleaning exactness", cleaning},
      {"curve and bond math", bond_math},
      {"liquidity identities", liquidity_identities},
      {"matching properties", matching_properties},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    if (!o.pass) ++failures;
    fmt::print("{} criterion {}: {} ({})\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
