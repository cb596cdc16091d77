#include "muni/panel.hpp"

#include "muni/csv.hpp"
#include "muni/errors.hpp"
#include "muni/numeric.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseQR>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

namespace muni::panel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr char kKeySep = '\x1f';

std::vector<std::string> split_composite(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = spec.find('#', start);
    parts.push_back(spec.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  for (const auto& p : parts)
    if (p.empty()) throw Error(ErrorKind::Validation, fmt::format("malformed key spec '{}'", spec));
  return parts;
}

bool looks_like_code(std::string_view cell) {
  return cell.size() > 1 && cell[0] == '0' && cell[1] >= '0' && cell[1] <= '9';
}

std::vector<int> encode_keys(const std::vector<std::string>& keys, const std::vector<std::size_t>& rows, int& levels) {
  std::unordered_map<std::string_view, int> index;
  std::vector<int> codes(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto [it, inserted] = index.try_emplace(keys[rows[i]], static_cast<int>(index.size()));
    codes[i] = it->second;
  }
  levels = static_cast<int>(index.size());
  return codes;
}

FeCodes encode_all(const std::vector<std::vector<std::string>>& keys, const std::vector<std::size_t>& rows) {
  FeCodes fe;
  for (const auto& k : keys) {
    int levels = 0;
    fe.codes.push_back(encode_keys(k, rows, levels));
    fe.levels.push_back(levels);
  }
  return fe;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Rank of the stacked dummy matrices. Two dimensions: all levels of the
// first, plus the second's levels minus the connected components they form
// together. Three or more: sparse rank-revealing QR of the dummy matrix.
std::size_t absorbed_dof(const FeCodes& fe) {
  if (fe.codes.empty()) return 0;
  const std::size_t n = fe.codes[0].size();
  if (fe.codes.size() == 1) return static_cast<std::size_t>(fe.levels[0]);
  if (fe.codes.size() == 2) {
    const int g0 = fe.levels[0];
    UnionFind uf(static_cast<std::size_t>(g0 + fe.levels[1]));
    for (std::size_t i = 0; i < n; ++i) uf.unite(fe.codes[0][i], g0 + fe.codes[1][i]);
    std::set<int> components;
    for (int l = 0; l < fe.levels[1]; ++l) components.insert(uf.find(g0 + l));
    return static_cast<std::size_t>(g0 + fe.levels[1]) - components.size();
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(n * fe.codes.size());
  int offset = 0;
  for (std::size_t d = 0; d < fe.codes.size(); ++d) {
    for (std::size_t i = 0; i < n; ++i)
      entries.emplace_back(static_cast<int>(i), offset + fe.codes[d][i], 1.0);
    offset += fe.levels[d];
  }
  Eigen::SparseMatrix<double> dummies(static_cast<Eigen::Index>(n), offset);
  dummies.setFromTriplets(entries.begin(), entries.end());
  dummies.makeCompressed();
  Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
  qr.setPivotThreshold(1e-8);
  qr.compute(dummies);
  return static_cast<std::size_t>(qr.rank());
}

double two_sided_t(double t, double df) {
  if (!std::isfinite(t)) return std::isnan(t) ? kNaN : 0.0;
  if (!(df > 0)) return kNaN;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

void require_binary(const std::vector<double>& v, const std::string& name) {
  for (double x : v)
    if (!std::isnan(x) && x != 0.0 && x != 1.0)
      throw Error(ErrorKind::NonBinary, fmt::format("column '{}' has value {}; expected 0 or 1", name, x));
}

}  // namespace

void Frame::add_numeric(const std::string& name, std::vector<double> values) {
  if (order_.empty() && rows_ == 0) rows_ = values.size();
  if (values.size() != rows_)
    throw Error(ErrorKind::Validation, fmt::format("column '{}' has {} rows; frame has {}", name, values.size(), rows_));
  if (!has(name)) order_.push_back(name);
  categorical_.erase(name);
  numeric_[name] = std::move(values);
}

void Frame::add_categorical(const std::string& name, std::vector<std::string> values) {
  if (order_.empty() && rows_ == 0) rows_ = values.size();
  if (values.size() != rows_)
    throw Error(ErrorKind::Validation, fmt::format("column '{}' has {} rows; frame has {}", name, values.size(), rows_));
  if (!has(name)) order_.push_back(name);
  numeric_.erase(name);
  categorical_[name] = std::move(values);
}

bool Frame::has(const std::string& name) const { return numeric_.contains(name) || categorical_.contains(name); }

const std::vector<double>& Frame::numeric(const std::string& name) const {
  auto it = numeric_.find(name);
  if (it != numeric_.end()) return it->second;
  if (categorical_.contains(name))
    throw Error(ErrorKind::Validation, fmt::format("column '{}' is not numeric", name));
  throw Error(ErrorKind::MissingField, fmt::format("column '{}' not found", name));
}

std::vector<std::string> Frame::keys(const std::string& spec) const {
  std::vector<std::string> out(rows_);
  std::vector<char> missing(rows_, 0);
  bool first = true;
  for (const auto& part : split_composite(spec)) {
    auto n = numeric_.find(part);
    auto c = categorical_.find(part);
    if (n == numeric_.end() && c == categorical_.end())
      throw Error(ErrorKind::MissingField, fmt::format("column '{}' not found", part));
    for (std::size_t i = 0; i < rows_; ++i) {
      if (missing[i]) continue;
      std::string cell;
      if (n != numeric_.end()) {
        if (std::isnan(n->second[i])) {
          missing[i] = 1;
          continue;
        }
        cell = format_number(n->second[i]);
      } else {
        cell = c->second[i];
        if (cell.empty()) {
          missing[i] = 1;
          continue;
        }
      }
      if (!first) out[i] += kKeySep;
      out[i] += cell;
    }
    first = false;
  }
  for (std::size_t i = 0; i < rows_; ++i)
    if (missing[i]) out[i].clear();
  return out;
}

Frame Frame::select(const std::vector<std::size_t>& rows) const {
  Frame f(rows.size());
  for (const auto& name : order_) {
    if (auto n = numeric_.find(name); n != numeric_.end()) {
      std::vector<double> v(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) v[i] = n->second.at(rows[i]);
      f.add_numeric(name, std::move(v));
    } else {
      const auto& src = categorical_.at(name);
      std::vector<std::string> v(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) v[i] = src.at(rows[i]);
      f.add_categorical(name, std::move(v));
    }
  }
  return f;
}

Frame Frame::read_csv(const std::filesystem::path& path) {
  auto t = CsvTable::read_file(path);
  Frame f(t.rows());
  for (std::size_t c = 0; c < t.header().size(); ++c) {
    const auto& name = t.header()[c];
    bool numeric = true;
    std::vector<double> values(t.rows(), kNaN);
    for (std::size_t r = 0; r < t.rows() && numeric; ++r) {
      if (looks_like_code(t.cell(r, c))) {
        numeric = false;
        break;
      }
      try {
        values[r] = t.optional_number(r, name).value_or(kNaN);
      } catch (const Error&) {
        numeric = false;
      }
    }
    if (numeric) {
      f.add_numeric(name, std::move(values));
    } else {
      std::vector<std::string> cells(t.rows());
      for (std::size_t r = 0; r < t.rows(); ++r) cells[r] = std::string(t.cell(r, c));
      f.add_categorical(name, std::move(cells));
    }
  }
  return f;
}

void Frame::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", path.string()));
  CsvWriter w(out, order_);
  std::vector<std::string> cells(order_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < order_.size(); ++c) {
      if (auto n = numeric_.find(order_[c]); n != numeric_.end())
        cells[c] = format_number(n->second[r]);
      else
        cells[c] = categorical_.at(order_[c])[r];
    }
    w.row(cells);
  }
}

FeCodes encode_fixed_effects(const Frame& frame, const std::vector<std::string>& fe,
                             const std::vector<std::size_t>& rows) {
  std::vector<std::vector<std::string>> keys;
  for (const auto& spec : fe) keys.push_back(frame.keys(spec));
  return encode_all(keys, rows);
}

DemeanResult demean(const Eigen::MatrixXd& columns, const FeCodes& fe, const Eigen::VectorXd& weights, double tol,
                    int max_iter) {
  DemeanResult result;
  result.data = columns;
  const std::size_t dims = fe.codes.size();
  if (dims == 0 || columns.cols() == 0) return result;
  const auto n = static_cast<std::size_t>(columns.rows());
  if (static_cast<std::size_t>(weights.size()) != n)
    throw Error(ErrorKind::Validation, "weight vector length differs from data");
  for (const auto& c : fe.codes)
    if (c.size() != n) throw Error(ErrorKind::Validation, "fixed-effect codes length differs from data");

  std::vector<std::vector<double>> wsum(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    wsum[d].assign(fe.levels[d], 0.0);
    for (std::size_t i = 0; i < n; ++i) wsum[d][fe.codes[d][i]] += weights[i];
  }

  const auto cols = static_cast<std::size_t>(columns.cols());
  std::vector<int> iterations(cols, 0);
  std::vector<double> last_change(cols, 0.0);
  std::vector<char> converged(cols, 0);
  parallel_for(cols, [&](std::size_t j) {
    double* x = result.data.col(static_cast<Eigen::Index>(j)).data();
    std::vector<double> acc;
    for (int it = 1; it <= max_iter; ++it) {
      double change = 0;
      for (std::size_t d = 0; d < dims; ++d) {
        const auto& code = fe.codes[d];
        acc.assign(fe.levels[d], 0.0);
        for (std::size_t i = 0; i < n; ++i) acc[code[i]] += weights[i] * x[i];
        for (std::size_t g = 0; g < acc.size(); ++g) {
          acc[g] /= wsum[d][g];
          change = std::max(change, std::abs(acc[g]));
        }
        for (std::size_t i = 0; i < n; ++i) x[i] -= acc[code[i]];
      }
      iterations[j] = it;
      last_change[j] = change;
      if (dims == 1 || change < tol) {
        converged[j] = 1;
        break;
      }
    }
  });

  result.iterations = *std::max_element(iterations.begin(), iterations.end());
  result.max_change = *std::max_element(last_change.begin(), last_change.end());
  result.converged = std::all_of(converged.begin(), converged.end(), [](char c) { return c != 0; });
  if (!result.converged)
    throw Error(ErrorKind::NotConverged, fmt::format("demeaning did not reach tolerance {} in {} iterations "
                                                     "(last change {})",
                                                     tol, max_iter, result.max_change));
  return result;
}

DemeanResult demean(const Frame& frame, const std::vector<std::string>& columns, const std::vector<std::string>& fe,
                    double tol, int max_iter) {
  std::vector<std::size_t> rows(frame.rows());
  std::iota(rows.begin(), rows.end(), 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(frame.rows()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const auto& v = frame.numeric(columns[j]);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i]))
        throw Error(ErrorKind::Validation, fmt::format("column '{}' row {} is not finite", columns[j], i));
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i];
    }
  }
  return demean(m, encode_fixed_effects(frame, fe, rows), Eigen::VectorXd::Ones(m.rows()), tol, max_iter);
}

std::optional<std::size_t> FitResult::index(const std::string& term) const {
  auto it = std::find(terms.begin(), terms.end(), term);
  if (it == terms.end()) return std::nullopt;
  return static_cast<std::size_t>(it - terms.begin());
}

FitResult fit(const Frame& frame, const RegressionSpec& spec, const FitOptions& opt) {
  if (spec.outcome.empty()) throw Error(ErrorKind::Validation, "regression needs an outcome");
  {
    std::set<std::string> seen;
    for (const auto& r : spec.regressors)
      if (!seen.insert(r).second) throw Error(ErrorKind::Validation, fmt::format("regressor '{}' listed twice", r));
  }
  const auto& y_all = frame.numeric(spec.outcome);
  std::vector<const std::vector<double>*> x_all;
  for (const auto& r : spec.regressors) x_all.push_back(&frame.numeric(r));
  const std::vector<double>* w_all = spec.weights ? &frame.numeric(*spec.weights) : nullptr;
  std::vector<std::vector<std::string>> fe_keys, cl_keys;
  for (const auto& f : spec.fe) fe_keys.push_back(frame.keys(f));
  for (const auto& c : spec.cluster) cl_keys.push_back(frame.keys(c));

  FitResult res;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    bool ok = std::isfinite(y_all[i]);
    for (const auto* x : x_all) ok = ok && std::isfinite((*x)[i]);
    if (w_all) {
      double w = (*w_all)[i];
      if (std::isfinite(w) && w <= 0.0)
        throw Error(ErrorKind::Validation, fmt::format("weight {} at row {} is not positive", w, i));
      ok = ok && std::isfinite(w);
    }
    for (const auto& k : fe_keys) ok = ok && !k[i].empty();
    for (const auto& k : cl_keys) ok = ok && !k[i].empty();
    if (ok) rows.push_back(i);
  }
  res.missing_dropped = frame.rows() - rows.size();

  FeCodes fe = encode_all(fe_keys, rows);
  if (opt.drop_singletons && !fe.codes.empty()) {
    while (true) {
      std::vector<char> keep(rows.size(), 1);
      bool any = false;
      for (std::size_t d = 0; d < fe.codes.size(); ++d) {
        std::vector<int> count(fe.levels[d], 0);
        for (int c : fe.codes[d]) ++count[c];
        for (std::size_t i = 0; i < rows.size(); ++i)
          if (count[fe.codes[d][i]] == 1) keep[i] = 0, any = true;
      }
      if (!any) break;
      std::vector<std::size_t> next;
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (keep[i]) next.push_back(rows[i]);
      res.singletons_dropped += rows.size() - next.size();
      rows = std::move(next);
      fe = encode_all(fe_keys, rows);
    }
  }

  const std::size_t n = rows.size();
  const bool add_cons = spec.fe.empty() && spec.intercept;
  std::vector<std::string> names;
  if (add_cons) names.push_back("_cons");
  names.insert(names.end(), spec.regressors.begin(), spec.regressors.end());
  const std::size_t p = names.size();
  if (n == 0) throw Error(ErrorKind::Underdetermined, "no observations left after dropping missing values");

  Eigen::MatrixXd raw(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = rows[i];
    const auto ii = static_cast<Eigen::Index>(i);
    raw(ii, 0) = y_all[r];
    Eigen::Index col = 1;
    if (add_cons) raw(ii, col++) = 1.0;
    for (const auto* x : x_all) raw(ii, col++) = (*x)[r];
    w[ii] = w_all ? (*w_all)[r] : 1.0;
  }

  Eigen::MatrixXd dm = raw;
  if (!fe.codes.empty()) {
    auto d = demean(raw, fe, w, opt.demean_tol, opt.max_iter);
    dm = std::move(d.data);
    res.fe_iterations = d.iterations;
  }
  const Eigen::VectorXd sw = w.array().sqrt();

  // Column selection in declared order: a regressor is dropped when the
  // fixed effects absorb it or when it lies in the span of earlier columns.
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::VectorXd> basis;
  for (std::size_t j = 0; j < p; ++j) {
    const auto cj = static_cast<Eigen::Index>(j + 1);
    const double raw_norm = (sw.array() * raw.col(cj).array()).matrix().norm();
    Eigen::VectorXd v = sw.array() * dm.col(cj).array();
    if (!(raw_norm > 0.0) || v.norm() <= opt.absorbed_tol * raw_norm) {
      res.dropped.push_back(names[j]);
      continue;
    }
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= q.dot(v) * q;
    if (v.norm() <= opt.pivot_tol * raw_norm) {
      res.dropped.push_back(names[j]);
      continue;
    }
    basis.push_back(v / v.norm());
    kept.push_back(cj);
  }

  const std::size_t k = kept.size();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) X.col(static_cast<Eigen::Index>(j)) = dm.col(kept[j]);
  const Eigen::VectorXd yt = dm.col(0);
  for (auto c : kept) res.terms.push_back(names[static_cast<std::size_t>(c - 1)]);

  res.n = n;
  res.absorbed_dof = absorbed_dof(fe);
  const double big_k = static_cast<double>(k + res.absorbed_dof);
  res.df_resid = static_cast<double>(n) - big_k;
  if (res.df_resid <= 0)
    throw Error(ErrorKind::Underdetermined,
                fmt::format("{} observations for {} parameters (including absorbed effects)", n, k + res.absorbed_dof));

  Eigen::MatrixXd bread = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  res.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  if (k > 0) {
    const Eigen::MatrixXd Xw = sw.asDiagonal() * X;
    const Eigen::VectorXd yw = sw.asDiagonal() * yt;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
    res.beta = qr.solve(yw);
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))
                                  .template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv = R.template triangularView<Eigen::Upper>().solve(
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
    const auto& P = qr.colsPermutation();
    bread = P * (Rinv * Rinv.transpose()) * P.transpose();
  }
  res.residuals = yt - X * res.beta;
  const Eigen::ArrayXd we = w.array() * res.residuals.array();
  const double rss = (we * res.residuals.array()).sum();

  if (spec.cluster.empty()) {
    res.vcov_type = "ols";
    res.vcov = (rss / res.df_resid) * bread;
    res.df_inference = res.df_resid;
  } else {
    res.vcov_type = "cluster";
    res.cluster_dims = spec.cluster;
    const std::size_t dims = spec.cluster.size();
    if (dims > 8) throw Error(ErrorKind::Validation, "at most 8 cluster dimensions are supported");
    std::vector<std::vector<int>> codes;
    for (const auto& keys : cl_keys) {
      int levels = 0;
      codes.push_back(encode_keys(keys, rows, levels));
      if (levels < 2)
        throw Error(ErrorKind::DegenerateCluster,
                    fmt::format("cluster dimension '{}' has {} cluster(s)", spec.cluster[codes.size() - 1], levels));
      res.cluster_counts.push_back(static_cast<std::size_t>(levels));
    }
    const Eigen::MatrixXd scores = X.array().colwise() * we;
    res.vcov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (unsigned mask = 1; mask < (1u << dims); ++mask) {
      std::map<std::vector<int>, int> index;
      std::vector<int> group(n);
      std::vector<int> key;
      for (std::size_t i = 0; i < n; ++i) {
        key.clear();
        for (std::size_t d = 0; d < dims; ++d)
          if (mask & (1u << d)) key.push_back(codes[d][i]);
        group[i] = index.try_emplace(key, static_cast<int>(index.size())).first->second;
      }
      const double g = static_cast<double>(index.size());
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(index.size()), static_cast<Eigen::Index>(k));
      for (std::size_t i = 0; i < n; ++i) sums.row(group[i]) += scores.row(static_cast<Eigen::Index>(i));
      const double c = g > 1 ? g / (g - 1.0) * (static_cast<double>(n) - 1.0) / res.df_resid : 0.0;
      const double sign = (std::popcount(mask) % 2 == 1) ? 1.0 : -1.0;
      res.vcov += sign * c * (bread * (sums.transpose() * sums) * bread);
    }
    if (dims > 1 && k > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.vcov);
      const auto& ev = es.eigenvalues();
      if (ev.minCoeff() < -1e-12 * ev.cwiseAbs().maxCoeff()) {
        res.vcov = es.eigenvectors() * ev.cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
        res.vcov_floored = true;
      }
    }
    res.df_inference =
        static_cast<double>(*std::min_element(res.cluster_counts.begin(), res.cluster_counts.end())) - 1.0;
  }

  res.vcov = 0.5 * (res.vcov + res.vcov.transpose()).eval();
  res.se = res.vcov.diagonal().cwiseMax(0.0).cwiseSqrt();
  res.t = res.beta.cwiseQuotient(res.se);
  res.p.resize(static_cast<Eigen::Index>(k));
  for (Eigen::Index j = 0; j < res.t.size(); ++j) res.p[j] = two_sided_t(res.t[j], res.df_inference);

  const Eigen::VectorXd y = raw.col(0);
  const double wsum = w.sum();
  const double ybar = w.dot(y) / wsum;
  const double tss = (w.array() * (y.array() - ybar).square()).sum();
  const double tss_within = (w.array() * yt.array().square()).sum();
  res.r2 = tss > 0 ? 1.0 - rss / tss : kNaN;
  res.adj_r2 = tss > 0 ? 1.0 - (1.0 - res.r2) * (static_cast<double>(n) - 1.0) / res.df_resid : kNaN;
  res.within_r2 = fe.codes.empty() ? res.r2 : (tss_within > 0 ? 1.0 - rss / tss_within : kNaN);
  res.rows = std::move(rows);
  return res;
}

FitResult fit_lpm(const Frame& frame, const RegressionSpec& spec, const FitOptions& options) {
  require_binary(frame.numeric(spec.outcome), spec.outcome);
  return fit(frame, spec, options);
}

DiffTest diff_test(const FitResult& f, const std::string& a, const std::string& b) {
  auto ia = f.index(a), ib = f.index(b);
  if (!ia) throw Error(ErrorKind::MissingCoefficient, fmt::format("coefficient '{}' not in fit", a));
  if (!ib) throw Error(ErrorKind::MissingCoefficient, fmt::format("coefficient '{}' not in fit", b));
  const auto i = static_cast<Eigen::Index>(*ia), j = static_cast<Eigen::Index>(*ib);
  DiffTest t{};
  t.difference = f.beta[i] - f.beta[j];
  t.se = std::sqrt(std::max(0.0, f.vcov(i, i) + f.vcov(j, j) - 2.0 * f.vcov(i, j)));
  t.z = t.difference == 0.0 ? 0.0 : t.difference / t.se;
  boost::math::normal norm;
  t.p_value = std::isfinite(t.z) ? 2.0 * boost::math::cdf(boost::math::complement(norm, std::abs(t.z))) : kNaN;
  return t;
}

WaldTest wald_test(const FitResult& f, const std::vector<std::map<std::string, double>>& rows) {
  if (rows.empty()) throw Error(ErrorKind::Validation, "Wald test needs at least one restriction");
  const auto q = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(q, static_cast<Eigen::Index>(f.k()));
  for (Eigen::Index r = 0; r < q; ++r)
    for (const auto& [term, coef] : rows[static_cast<std::size_t>(r)]) {
      auto idx = f.index(term);
      if (!idx) throw Error(ErrorKind::MissingCoefficient, fmt::format("coefficient '{}' not in fit", term));
      L(r, static_cast<Eigen::Index>(*idx)) += coef;
    }
  const Eigen::VectorXd d = L * f.beta;
  const Eigen::MatrixXd V = L * f.vcov * L.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
  if (!lu.isInvertible()) throw Error(ErrorKind::Validation, "restriction covariance is singular");
  WaldTest t{};
  t.statistic = d.dot(lu.solve(d));
  t.q = rows.size();
  t.f_stat = t.statistic / static_cast<double>(t.q);
  t.df_denominator = f.df_inference;
  if (t.df_denominator > 0 && std::isfinite(t.f_stat)) {
    boost::math::fisher_f dist(static_cast<double>(t.q), t.df_denominator);
    t.p_value = boost::math::cdf(boost::math::complement(dist, std::max(0.0, t.f_stat)));
  } else {
    t.p_value = kNaN;
  }
  return t;
}

double t_critical(double df, double level) {
  if (!(level > 0 && level < 1)) throw Error(ErrorKind::Validation, "confidence level must lie in (0, 1)");
  if (!(df > 0)) throw Error(ErrorKind::Validation, "t reference needs positive degrees of freedom");
  boost::math::students_t dist(df);
  return boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
}

DidTerms build_did(Frame& frame, const std::string& treat, const std::string& post,
                   const std::optional<std::string>& group, const std::optional<std::string>& time) {
  const auto tr = frame.numeric(treat);
  const auto po = frame.numeric(post);
  require_binary(tr, treat);
  require_binary(po, post);
  std::vector<double> tp(frame.rows());
  for (std::size_t i = 0; i < tp.size(); ++i) tp[i] = tr[i] * po[i];

  DidTerms out;
  if (!group) {
    auto name = fmt::format("{}_x_{}", treat, post);
    frame.add_numeric(name, std::move(tp));
    out.regressors.push_back(name);
    return out;
  }
  if (!time) throw Error(ErrorKind::Validation, "a group split needs a time column for the group#time effect");
  const auto keys = frame.keys(*group);
  std::set<std::string> levels(keys.begin(), keys.end());
  levels.erase("");
  for (const auto& g : levels) {
    std::vector<double> v(frame.rows());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = keys[i].empty() ? kNaN : tp[i] * (keys[i] == g ? 1.0 : 0.0);
    auto name = fmt::format("{}_x_{}_x_{}={}", treat, post, *group, g);
    frame.add_numeric(name, std::move(v));
    out.regressors.push_back(name);
  }
  out.fe.push_back(fmt::format("{}#{}", *group, *time));
  return out;
}

int bucket_months(Bucket b) {
  switch (b) {
    case Bucket::Quarter: return 3;
    case Bucket::Half: return 6;
    case Bucket::Year: return 12;
  }
  return 3;
}

int bucket_of(int m, Bucket b) {
  const int s = bucket_months(b);
  return m >= 0 ? m / s + 1 : -((-m - 1) / s + 1);
}

Bucket parse_bucket(const std::string& name) {
  if (name == "quarter") return Bucket::Quarter;
  if (name == "half") return Bucket::Half;
  if (name == "year") return Bucket::Year;
  throw Error(ErrorKind::Validation, fmt::format("unknown bucket '{}'; expected quarter, half or year", name));
}

std::vector<std::string> EventStudyLayout::regressors() const {
  std::vector<std::string> out;
  for (const auto& t : terms) out.push_back(t.name);
  out.insert(out.end(), trend_terms.begin(), trend_terms.end());
  return out;
}

EventStudyLayout build_event_study(Frame& frame, const std::string& cohort, const std::string& event_time,
                                   Bucket bucket, int benchmark, const std::optional<TrendSpec>& trend) {
  const auto co = frame.numeric(cohort);
  const auto et = frame.numeric(event_time);
  require_binary(co, cohort);
  std::vector<int> b(frame.rows(), 0);
  std::vector<char> valid(frame.rows(), 0);
  std::set<int> present;
  for (std::size_t i = 0; i < et.size(); ++i) {
    if (std::isnan(et[i])) continue;
    if (et[i] != std::floor(et[i]))
      throw Error(ErrorKind::Validation, fmt::format("event time {} at row {} is not a whole month", et[i], i));
    b[i] = bucket_of(static_cast<int>(et[i]), bucket);
    valid[i] = 1;
    present.insert(b[i]);
  }
  if (!present.contains(benchmark))
    throw Error(ErrorKind::MissingBenchmark, fmt::format("benchmark bucket {} has no observations", benchmark));

  EventStudyLayout layout{bucket, benchmark, {}, {}, {}};
  for (int x : present)
    if (x != benchmark) layout.buckets.push_back(x);
  for (bool treated : {true, false}) {
    for (int x : layout.buckets) {
      auto name = fmt::format("{}[{}]", treated ? "treated" : "control", x);
      std::vector<double> v(frame.rows());
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!valid[i] || std::isnan(co[i])) {
          v[i] = kNaN;
          continue;
        }
        v[i] = ((co[i] == 1.0) == treated && b[i] == x) ? 1.0 : 0.0;
      }
      frame.add_numeric(name, std::move(v));
      layout.terms.push_back({treated, x, name});
    }
  }
  if (trend) {
    const auto keys = frame.keys(trend->unit);
    const auto tt = frame.numeric(trend->time);
    std::set<std::string> units(keys.begin(), keys.end());
    units.erase("");
    for (const auto& u : units) {
      auto name = fmt::format("trend[{}]", u);
      std::vector<double> v(frame.rows());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = keys[i].empty() ? kNaN : (keys[i] == u ? tt[i] : 0.0);
      frame.add_numeric(name, std::move(v));
      layout.trend_terms.push_back(name);
    }
  }
  return layout;
}

EventStudySummary summarize_event_study(const FitResult& f, const EventStudyLayout& layout, double level) {
  EventStudySummary s;
  const double crit = t_critical(f.df_inference, level);
  std::vector<std::map<std::string, double>> pre;
  for (int x : layout.buckets) {
    const auto tn = fmt::format("treated[{}]", x), cn = fmt::format("control[{}]", x);
    auto ti = f.index(tn), ci = f.index(cn);
    if (!ti) continue;
    // When every control shares the event calendar, the control dummy is
    // absorbed by the time effects and the treated dummy is already the
    // treated-minus-control contrast.
    const bool control_absorbed =
        !ci && std::find(f.dropped.begin(), f.dropped.end(), cn) != f.dropped.end();
    if (!ci && !control_absorbed) continue;
    const auto a = static_cast<Eigen::Index>(*ti);
    BucketContrast c{};
    c.bucket = x;
    c.treated = f.beta[a];
    if (ci) {
      const auto b = static_cast<Eigen::Index>(*ci);
      c.control = f.beta[b];
      c.se = std::sqrt(std::max(0.0, f.vcov(a, a) + f.vcov(b, b) - 2.0 * f.vcov(a, b)));
    } else {
      c.control = 0.0;
      c.se = std::sqrt(std::max(0.0, f.vcov(a, a)));
    }
    c.difference = c.treated - c.control;
    c.ci_low = c.difference - crit * c.se;
    c.ci_high = c.difference + crit * c.se;
    s.contrasts.push_back(c);
    if (x < 0) {
      std::map<std::string, double> row{{tn, 1.0}};
      if (ci) row[cn] = -1.0;
      pre.push_back(std::move(row));
    }
  }
  if (!pre.empty()) s.pretrend = wald_test(f, pre);
  return s;
}

void write_fit(const std::filesystem::path& results_csv, const std::filesystem::path& diagnostics,
               const FitResult& f) {
  {
    std::ofstream out(results_csv, std::ios::binary);
    if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", results_csv.string()));
    CsvWriter w(out, {"term", "estimate", "se", "t", "p"});
    for (std::size_t j = 0; j < f.k(); ++j) {
      const auto i = static_cast<Eigen::Index>(j);
      w.row({f.terms[j], format_number(f.beta[i]), format_number(f.se[i]), format_number(f.t[i]),
             format_number(f.p[i])});
    }
  }
  std::ofstream out(diagnostics, std::ios::binary);
  if (!out) throw Error(ErrorKind::Validation, fmt::format("cannot write '{}'", diagnostics.string()));
  auto join = [](const auto& items) {
    std::string s;
    for (const auto& x : items) {
      if (!s.empty()) s += ',';
      s += fmt::format("{}", x);
    }
    return s;
  };
  out << "n=" << f.n << '\n'
      << "k=" << f.k() << '\n'
      << "absorbed_dof=" << f.absorbed_dof << '\n'
      << "df_resid=" << format_number(f.df_resid) << '\n'
      << "df_inference=" << format_number(f.df_inference) << '\n'
      << "r2=" << format_number(f.r2) << '\n'
      << "adj_r2=" << format_number(f.adj_r2) << '\n'
      << "within_r2=" << format_number(f.within_r2) << '\n'
      << "vcov=" << f.vcov_type << '\n'
      << "cluster_dims=" << join(f.cluster_dims) << '\n'
      << "cluster_counts=" << join(f.cluster_counts) << '\n'
      << "vcov_floored=" << (f.vcov_floored ? 1 : 0) << '\n'
      << "fe_iterations=" << f.fe_iterations << '\n'
      << "singletons_dropped=" << f.singletons_dropped << '\n'
      << "missing_dropped=" << f.missing_dropped << '\n'
      << "dropped=" << join(f.dropped) << '\n';
}

}  // namespace muni::panel
