#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace muni::panel {

/// Column store for regression inputs. Numeric columns hold doubles (NaN for
/// missing); categorical columns hold string keys. Either kind can serve as
/// a fixed-effect or cluster key.
class Frame {
public:
  Frame() = default;
  explicit Frame(std::size_t rows) : rows_(rows) {}

  std::size_t rows() const { return rows_; }
  const std::vector<std::string>& columns() const { return order_; }

  void add_numeric(const std::string& name, std::vector<double> values);
  void add_categorical(const std::string& name, std::vector<std::string> values);

  bool has(const std::string& name) const;
  bool is_numeric(const std::string& name) const { return numeric_.contains(name); }
  /// Throws Error(MissingField).
  const std::vector<double>& numeric(const std::string& name) const;
  /// Key view of one column, or of a composite `a#b#c`.
  std::vector<std::string> keys(const std::string& spec) const;

  Frame select(const std::vector<std::size_t>& rows) const;

  /// Columns whose non-blank cells all parse as numbers become numeric.
  static Frame read_csv(const std::filesystem::path& path);
  void write_csv(const std::filesystem::path& path) const;

private:
  std::size_t rows_ = 0;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<double>> numeric_;
  std::map<std::string, std::vector<std::string>> categorical_;
};

/// Declarative regression: outcome ~ regressors | fe, clustered by `cluster`.
struct RegressionSpec {
  std::string outcome;
  std::vector<std::string> regressors;
  std::vector<std::string> fe;       // e.g. {"issuer", "state#year"}
  std::vector<std::string> cluster;  // zero, one or two dimensions
  std::optional<std::string> weights;
  /// Adds `_cons` when no fixed effect is absorbed.
  bool intercept = true;
};

struct FitOptions {
  double demean_tol = 1e-10;
  int max_iter = 10000;
  double pivot_tol = 1e-10;
  /// Demeaned-to-raw norm ratio under which a regressor counts as absorbed.
  double absorbed_tol = 1e-8;
  bool drop_singletons = true;
};

/// Integer-coded fixed-effect dimensions over the estimation rows.
struct FeCodes {
  std::vector<std::vector<int>> codes;  // [dim][row]
  std::vector<int> levels;              // [dim]
};

FeCodes encode_fixed_effects(const Frame& frame, const std::vector<std::string>& fe,
                             const std::vector<std::size_t>& rows);

struct DemeanResult {
  Eigen::MatrixXd data;
  int iterations = 0;
  bool converged = true;
  double max_change = 0;
};

/// Alternating weighted within-group demeaning of every column, cycling
/// over dimensions until a full sweep moves no value by more than `tol`.
/// One dimension finishes in a single pass. Columns are processed
/// independently, so results do not depend on the thread count.
/// Throws Error(NotConverged) when max_iter sweeps are exhausted.
DemeanResult demean(const Eigen::MatrixXd& columns, const FeCodes& fe, const Eigen::VectorXd& weights,
                    double tol = 1e-8, int max_iter = 10000);

/// Frame-level convenience over `columns` with unit weights.
DemeanResult demean(const Frame& frame, const std::vector<std::string>& columns, const std::vector<std::string>& fe,
                    double tol = 1e-8, int max_iter = 10000);

struct FitResult {
  std::vector<std::string> terms;
  Eigen::VectorXd beta;
  Eigen::MatrixXd vcov;
  Eigen::VectorXd se;
  Eigen::VectorXd t;
  Eigen::VectorXd p;
  Eigen::VectorXd residuals;
  std::vector<std::size_t> rows;  // frame rows used, in order

  std::size_t n = 0;
  std::size_t absorbed_dof = 0;
  std::size_t singletons_dropped = 0;
  std::size_t missing_dropped = 0;
  int fe_iterations = 0;
  std::vector<std::string> dropped;  // collinear or absorbed regressors

  double r2 = 0;
  double adj_r2 = 0;
  double within_r2 = 0;
  double df_resid = 0;
  /// Degrees of freedom for t reference: G-1 (smallest cluster count) or N-K.
  double df_inference = 0;

  std::string vcov_type;  // "ols" or "cluster"
  std::vector<std::string> cluster_dims;
  std::vector<std::size_t> cluster_counts;
  bool vcov_floored = false;

  std::optional<std::size_t> index(const std::string& term) const;
  std::size_t k() const { return terms.size(); }
};

/// Weighted least squares on the demeaned design. Rank-deficient columns are
/// dropped via column-pivoted QR and reported. Clustered covariance uses
/// G/(G-1)*(N-1)/(N-K) per dimension; two-way by inclusion-exclusion with
/// negative eigenvalues floored at zero.
FitResult fit(const Frame& frame, const RegressionSpec& spec, const FitOptions& options = {});

/// Same estimator; the outcome must be 0/1 (Error(NonBinary)). Fitted values
/// are not clipped to [0, 1].
FitResult fit_lpm(const Frame& frame, const RegressionSpec& spec, const FitOptions& options = {});

struct DiffTest {
  double difference;
  double se;
  double z;
  double p_value;  // two-sided, normal reference
};

/// Wald test of coef_a = coef_b. Throws Error(MissingCoefficient).
DiffTest diff_test(const FitResult& fit, const std::string& coef_a, const std::string& coef_b);

struct WaldTest {
  double statistic;  // chi-square form
  std::size_t q;
  double f_stat;
  double df_denominator;
  double p_value;  // F(q, df_inference)
};

/// Joint test that every linear combination in `rows` is zero. Each row maps
/// term -> coefficient. Throws Error(MissingCoefficient).
WaldTest wald_test(const FitResult& fit, const std::vector<std::map<std::string, double>>& rows);

/// Two-sided t critical value for a given confidence level.
double t_critical(double df, double level = 0.95);

struct DidTerms {
  std::vector<std::string> regressors;
  std::vector<std::string> fe;  // composite keys to add to the spec
};

/// Adds treat x post, or with `group` one treat x post x 1{group = g}
/// column per group value plus a `group#time` fixed effect.
/// Throws Error(NonBinary) when treat or post is not 0/1.
DidTerms build_did(Frame& frame, const std::string& treat, const std::string& post,
                   const std::optional<std::string>& group = std::nullopt,
                   const std::optional<std::string>& time = std::nullopt);

enum class Bucket { Quarter, Half, Year };

int bucket_months(Bucket b);
/// Month 0 opens bucket 1; month -1 closes bucket -1.
int bucket_of(int event_month, Bucket b);
Bucket parse_bucket(const std::string& name);

struct EventTerm {
  bool treated;
  int bucket;
  std::string name;
};

struct EventStudyLayout {
  Bucket bucket;
  int benchmark;
  std::vector<int> buckets;  // present in data, benchmark excluded
  std::vector<EventTerm> terms;
  std::vector<std::string> trend_terms;
  std::vector<std::string> regressors() const;
};

struct TrendSpec {
  std::string unit;  // column whose levels get their own slope
  std::string time;  // numeric time index
};

/// One dummy per cohort (treated, control) and event-time bucket, omitting
/// the benchmark bucket for both cohorts. Throws Error(MissingBenchmark).
EventStudyLayout build_event_study(Frame& frame, const std::string& cohort, const std::string& event_time,
                                   Bucket bucket, int benchmark, const std::optional<TrendSpec>& trend = std::nullopt);

struct BucketContrast {
  int bucket;
  double treated;
  double control;
  double difference;
  double se;
  double ci_low;
  double ci_high;
};

struct EventStudySummary {
  std::vector<BucketContrast> contrasts;
  std::optional<WaldTest> pretrend;  // joint test of pre-event differences
};

/// Treated-minus-control difference per bucket and the joint pre-trend test.
EventStudySummary summarize_event_study(const FitResult& fit, const EventStudyLayout& layout, double level = 0.95);

void write_fit(const std::filesystem::path& results_csv, const std::filesystem::path& diagnostics,
               const FitResult& fit);

}  // namespace muni::panel
