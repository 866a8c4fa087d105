#pragma once

// Trial-outcome statistics: fixed-effects logistic regression with positions nested in
// environments, Wald tests and odds-ratio intervals, plus success-rate tables.

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenesmith/errors.hpp"

namespace scenesmith {

struct TrialRecord {
  std::string environment;
  std::string position;  ///< nested in environment
  std::string target;
  std::string model;
  bool success = false;
  std::optional<double> episode_len;

  bool operator==(const TrialRecord&) const = default;
};

/// Comma-separated, header row required. Columns: environment, position, target, model,
/// success (1/0/true/false), optional episode_len (blank = absent). Labels are taken
/// verbatim, so "A" and "A " are different levels. No quoting.
std::vector<TrialRecord> parse_trials(std::string_view text);
std::vector<TrialRecord> load_trials(const std::filesystem::path& path);

/// Which factors enter the design. The intercept is always present.
struct FactorSet {
  bool model = true;
  bool target = true;
  bool environment = true;
  bool position = true;  ///< nested: one column per non-reference position per environment

  /// Comma list drawn from model, target, environment, position.
  static FactorSet parse(std::string_view list);
};

struct Design {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;  ///< "(Intercept)", "model[B]", "environment[E]:position[P]", ...
};

/// Treatment coding; each factor's reference level is its lexicographically first label
/// (per environment for positions). Throws DegenerateInputError when the response is
/// constant and RankDeficiencyError when coded columns are collinear.
Design build_design(const std::vector<TrialRecord>& records, const FactorSet& factors = {});

struct FitOptions {
  double tol = 1e-8;
  int max_iter = 100;
  double ridge = 0;  ///< L2 penalty on non-intercept coefficients; for separated data only

  bool operator==(const FitOptions&) const = default;
};

struct Coefficient {
  std::string name;
  double estimate = 0;
  double std_error = 0;
  double z = 0;
  double p_value = 1;
};

struct OddsRatio {
  double point = 1;
  double ci_lo = 1;
  double ci_hi = 1;
};

struct RegressionReport {
  std::vector<Coefficient> coefficients;
  std::vector<std::pair<std::string, OddsRatio>> odds_ratios;  ///< 95%, same order
  bool converged = false;
  int iterations = 0;
  std::size_t n = 0;
  double log_likelihood = 0;
  bool separation_warning = false;  ///< some |estimate| > 10

  const Coefficient& at(std::string_view name) const;  ///< UnknownCoefficientError
};

struct NonConvergenceError : Error {
  NonConvergenceError(const std::string& what, RegressionReport r) : Error(what), report(std::move(r)) {}
  RegressionReport report;  ///< last iterate, converged = false
};

/// Maximum likelihood by iteratively reweighted least squares, stopping when the largest
/// coefficient change is below tol. Standard errors from the inverse observed
/// information; two-sided Wald p-values.
RegressionReport fit_logistic(const Design& design, const FitOptions& opts = {});

double log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);
Eigen::VectorXd log_likelihood_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& beta);

/// Standard normal quantile, p in (0, 1).
double normal_quantile(double p);

/// exp(estimate) with exp(estimate -/+ z(level) * std_error) bounds.
OddsRatio odds_ratio(double estimate, double std_error, double level = 0.95);
OddsRatio odds_ratio(const RegressionReport& report, std::string_view name, double level = 0.95);

/// Coefficient table (name, Coef., Std. Err., p-value) followed by odds-ratio lines.
std::string render_report(const RegressionReport& report);

struct SummaryCell {
  std::string model;
  std::string environment;  ///< empty for the aggregate column
  std::size_t n = 0;
  std::optional<double> success_pct;      ///< absent when n == 0
  std::optional<double> mean_episode_len;  ///< absent when no record has a length
};

struct TrialSummary {
  std::vector<std::string> models;
  std::vector<std::string> environments;
  std::vector<SummaryCell> cells;  ///< model-major; environments then the aggregate

  const SummaryCell& cell(std::string_view model, std::string_view environment) const;
};

TrialSummary summarize_trials(const std::vector<TrialRecord>& records);
/// Success % per model and environment plus an "All" column; "-" marks empty cells.
std::string render_summary(const TrialSummary& summary);

/// Structured report holding the summary and, when given, the regression fit.
std::string write_stats_json(const TrialSummary& summary, const RegressionReport* report);

}  // namespace scenesmith
