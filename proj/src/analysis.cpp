#include "scenesmith/analysis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "json_fields.hpp"
#include "scenesmith/template.hpp"

namespace scenesmith {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = line.find(sep, start);
    out.push_back(line.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) return out;
    start = at + 1;
  }
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  // "-0.00" reads as a sign where there is none.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

// Table with a left-aligned first column and right-aligned others.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c > 0) out << " | ";
      const std::size_t pad = width[c] - rows[r][c].size();
      if (c == 0) out << rows[r][c] << std::string(pad, ' ');
      else out << std::string(pad, ' ') << rows[r][c];
    }
    out << "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w;
      out << std::string(total + 3 * (width.size() - 1), '-') << "\n";
    }
  }
  return out.str();
}

double sigmoid(double eta) {
  return eta >= 0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

std::vector<TrialRecord> parse_trials(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw SchemaError("header", "trial file is empty");

  const auto header = split(lines[0], ',');
  std::map<std::string, std::size_t, std::less<>> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name(header[i]);
    static const std::set<std::string> known{"environment", "position", "target", "model", "success", "episode_len"};
    if (!known.contains(name)) throw SchemaError("header", "unknown column '" + name + "'");
    if (!col.emplace(name, i).second) throw SchemaError("header", "duplicate column '" + name + "'");
  }
  for (const char* required : {"environment", "position", "target", "model", "success"})
    if (!col.contains(required)) throw SchemaError("header", std::string("missing column '") + required + "'");

  std::vector<TrialRecord> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string where = "line " + std::to_string(li + 1);
    const auto fields = split(lines[li], ',');
    if (fields.size() != header.size())
      throw SchemaError(where, "expected " + std::to_string(header.size()) + " fields, got " +
                                   std::to_string(fields.size()));
    auto label = [&](const char* name) {
      const std::string v(fields[col.at(name)]);
      if (v.empty()) throw SchemaError(where + "." + name, "empty label");
      return v;
    };
    TrialRecord r;
    r.environment = label("environment");
    r.position = label("position");
    r.target = label("target");
    r.model = label("model");
    const std::string_view s = fields[col.at("success")];
    if (s == "1" || s == "true") r.success = true;
    else if (s == "0" || s == "false") r.success = false;
    else throw SchemaError(where + ".success", "expected 1, 0, true or false");
    if (auto it = col.find("episode_len"); it != col.end() && !fields[it->second].empty()) {
      const std::string v(fields[it->second]);
      std::size_t used = 0;
      double len = 0;
      try {
        len = std::stod(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != v.size() || !std::isfinite(len) || len < 0)
        throw SchemaError(where + ".episode_len", "expected a non-negative number");
      r.episode_len = len;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrialRecord> load_trials(const std::filesystem::path& path) { return parse_trials(read_file(path)); }

FactorSet FactorSet::parse(std::string_view list) {
  FactorSet f{false, false, false, false};
  for (std::string_view name : split(list, ',')) {
    if (name == "model") f.model = true;
    else if (name == "target") f.target = true;
    else if (name == "environment") f.environment = true;
    else if (name == "position") f.position = true;
    else throw SchemaError("factors", "unknown factor '" + std::string(name) + "'");
  }
  return f;
}

Design build_design(const std::vector<TrialRecord>& records, const FactorSet& factors) {
  const auto n = static_cast<Eigen::Index>(records.size());
  bool any_success = false, any_failure = false;
  for (const TrialRecord& r : records) (r.success ? any_success : any_failure) = true;
  if (!any_success || !any_failure) throw DegenerateInputError("response needs both successes and failures");

  std::vector<std::string> names{"(Intercept)"};
  std::vector<std::vector<double>> cols{std::vector<double>(records.size(), 1.0)};

  auto add_factor = [&](const char* factor, auto field) {
    std::set<std::string> levels;
    for (const TrialRecord& r : records) levels.insert(field(r));
    for (auto it = std::next(levels.begin()); it != levels.end(); ++it) {
      names.push_back(std::string(factor) + "[" + *it + "]");
      auto& c = cols.emplace_back(records.size(), 0.0);
      for (std::size_t i = 0; i < records.size(); ++i) c[i] = field(records[i]) == *it ? 1.0 : 0.0;
    }
  };
  if (factors.model) add_factor("model", [](const TrialRecord& r) { return r.model; });
  if (factors.target) add_factor("target", [](const TrialRecord& r) { return r.target; });
  if (factors.environment) add_factor("environment", [](const TrialRecord& r) { return r.environment; });
  if (factors.position) {
    std::map<std::string, std::set<std::string>> nested;
    for (const TrialRecord& r : records) nested[r.environment].insert(r.position);
    for (const auto& [env, positions] : nested)
      for (auto it = std::next(positions.begin()); it != positions.end(); ++it) {
        names.push_back("environment[" + env + "]:position[" + *it + "]");
        auto& c = cols.emplace_back(records.size(), 0.0);
        for (std::size_t i = 0; i < records.size(); ++i)
          c[i] = records[i].environment == env && records[i].position == *it ? 1.0 : 0.0;
      }
  }

  Design d;
  d.names = std::move(names);
  d.X.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    d.X.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(cols[j].data(), n);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) d.y(i) = records[static_cast<std::size_t>(i)].success ? 1.0 : 0.0;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.X);
  qr.setThreshold(1e-10);
  if (qr.rank() < d.X.cols())
    throw RankDeficiencyError("design has " + std::to_string(d.X.cols()) + " columns but rank " +
                              std::to_string(qr.rank()));
  return d;
}

double log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = X * beta;
  double ll = 0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y(i) * eta(i) - softplus(eta(i));
  return ll;
}

Eigen::VectorXd log_likelihood_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& beta) {
  const Eigen::VectorXd p = (X * beta).unaryExpr([](double e) { return sigmoid(e); });
  return X.transpose() * (y - p);
}

const Coefficient& RegressionReport::at(std::string_view name) const {
  for (const Coefficient& c : coefficients)
    if (c.name == name) return c;
  throw UnknownCoefficientError("no coefficient named '" + std::string(name) + "'");
}

RegressionReport fit_logistic(const Design& design, const FitOptions& opts) {
  const Eigen::MatrixXd& X = design.X;
  const Eigen::VectorXd& y = design.y;
  const Eigen::Index k = X.cols();
  if (X.rows() != y.size() || static_cast<std::size_t>(k) != design.names.size())
    throw DegenerateInputError("design matrix, response and names disagree in size");

  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(k, opts.ridge);
  if (k > 0) penalty(0) = 0;

  RegressionReport rep;
  rep.n = static_cast<std::size_t>(X.rows());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd info(k, k);

  auto information = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd p = (X * b).unaryExpr([](double e) { return sigmoid(e); });
    const Eigen::VectorXd w = p.array() * (1.0 - p.array());
    Eigen::MatrixXd h = X.transpose() * w.asDiagonal() * X;
    h.diagonal() += penalty;
    return std::pair{h, Eigen::VectorXd(X.transpose() * (y - p) - penalty.cwiseProduct(b))};
  };

  for (rep.iterations = 1; rep.iterations <= opts.max_iter; ++rep.iterations) {
    auto [h, g] = information(beta);
    const Eigen::VectorXd delta = h.ldlt().solve(g);
    if (!delta.allFinite()) break;
    beta += delta;
    if (delta.cwiseAbs().maxCoeff() < opts.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.iterations = std::min(rep.iterations, opts.max_iter);

  info = information(beta).first;
  const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  rep.log_likelihood = log_likelihood(X, y, beta);
  for (Eigen::Index j = 0; j < k; ++j) {
    Coefficient c;
    c.name = design.names[static_cast<std::size_t>(j)];
    c.estimate = beta(j);
    c.std_error = std::sqrt(std::max(0.0, cov(j, j)));
    c.z = c.std_error > 0 ? c.estimate / c.std_error : 0.0;
    c.p_value = std::clamp(std::erfc(std::abs(c.z) / std::sqrt(2.0)), 0.0, 1.0);
    rep.separation_warning = rep.separation_warning || std::abs(c.estimate) > 10;
    rep.odds_ratios.emplace_back(c.name, odds_ratio(c.estimate, c.std_error));
    rep.coefficients.push_back(std::move(c));
  }
  if (!rep.converged)
    throw NonConvergenceError("logistic fit did not converge in " + std::to_string(opts.max_iter) + " iterations" +
                                  (rep.separation_warning ? " (data look separated)" : ""),
                              rep);
  return rep;
}

// Acklam's rational approximation, polished with one Halley step against erfc.
double normal_quantile(double p) {
  if (!(p > 0 && p < 1)) throw DegenerateInputError("normal quantile needs p in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double lo = 0.02425;
  double x;
  if (p < lo) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - lo) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

OddsRatio odds_ratio(double estimate, double std_error, double level) {
  if (!(level > 0 && level < 1)) throw DegenerateInputError("confidence level must be in (0, 1)");
  const double z = normal_quantile(0.5 + level / 2);
  return {std::exp(estimate), std::exp(estimate - z * std_error), std::exp(estimate + z * std_error)};
}

OddsRatio odds_ratio(const RegressionReport& report, std::string_view name, double level) {
  const Coefficient& c = report.at(name);
  return odds_ratio(c.estimate, c.std_error, level);
}

std::string render_report(const RegressionReport& report) {
  std::vector<std::vector<std::string>> rows{{"", "Coef.", "Std. Err.", "p-value"}};
  for (const Coefficient& c : report.coefficients)
    rows.push_back({c.name, fixed(c.estimate, 4), fixed(c.std_error, 4),
                    c.p_value < 1e-4 ? "<0.0001" : fixed(c.p_value, 4)});
  std::ostringstream out;
  out << render_table(rows) << "\n";
  for (const auto& [name, o] : report.odds_ratios) {
    if (name == "(Intercept)") continue;
    out << name << ": odds ratio exp(" << fixed(report.at(name).estimate, 2) << ") = " << fixed(o.point, 3)
        << " (95% CI [" << fixed(o.ci_lo, 2) << ", " << fixed(o.ci_hi, 2) << "])\n";
  }
  out << "\nn = " << report.n << ", iterations = " << report.iterations
      << ", log-likelihood = " << fixed(report.log_likelihood, 4) << "\n";
  if (report.separation_warning) out << "warning: some |coefficient| > 10, data may be separated\n";
  return out.str();
}

const SummaryCell& TrialSummary::cell(std::string_view model, std::string_view environment) const {
  for (const SummaryCell& c : cells)
    if (c.model == model && c.environment == environment) return c;
  throw UnknownCoefficientError("no summary cell for (" + std::string(model) + ", " + std::string(environment) + ")");
}

TrialSummary summarize_trials(const std::vector<TrialRecord>& records) {
  std::set<std::string> models, envs;
  for (const TrialRecord& r : records) {
    models.insert(r.model);
    envs.insert(r.environment);
  }
  TrialSummary s;
  s.models.assign(models.begin(), models.end());
  s.environments.assign(envs.begin(), envs.end());
  auto tally = [&](const std::string& model, const std::string& env) {
    SummaryCell c{model, env, 0, std::nullopt, std::nullopt};
    std::size_t wins = 0, with_len = 0;
    double len = 0;
    for (const TrialRecord& r : records) {
      if (r.model != model || (!env.empty() && r.environment != env)) continue;
      ++c.n;
      wins += r.success ? 1 : 0;
      if (r.episode_len) {
        ++with_len;
        len += *r.episode_len;
      }
    }
    if (c.n > 0) c.success_pct = 100.0 * static_cast<double>(wins) / static_cast<double>(c.n);
    if (with_len > 0) c.mean_episode_len = len / static_cast<double>(with_len);
    return c;
  };
  for (const std::string& m : s.models) {
    for (const std::string& e : s.environments) s.cells.push_back(tally(m, e));
    s.cells.push_back(tally(m, ""));
  }
  return s;
}

std::string render_summary(const TrialSummary& summary) {
  auto section = [&](const char* title, auto value) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{title};
    header.insert(header.end(), summary.environments.begin(), summary.environments.end());
    header.emplace_back("All");
    rows.push_back(std::move(header));
    for (const std::string& m : summary.models) {
      std::vector<std::string> row{m};
      for (const std::string& e : summary.environments) row.push_back(value(summary.cell(m, e)));
      row.push_back(value(summary.cell(m, "")));
      rows.push_back(std::move(row));
    }
    return render_table(rows);
  };
  std::string out = section("Success Rate (%)", [](const SummaryCell& c) {
    return c.success_pct ? fixed(*c.success_pct, 1) : std::string("-");
  });
  const bool lengths = std::any_of(summary.cells.begin(), summary.cells.end(),
                                   [](const SummaryCell& c) { return c.mean_episode_len.has_value(); });
  if (lengths)
    out += "\n" + section("Episode Length", [](const SummaryCell& c) {
      return c.mean_episode_len ? fixed(*c.mean_episode_len, 1) : std::string("-");
    });
  return out;
}

std::string write_stats_json(const TrialSummary& summary, const RegressionReport* report) {
  using detail::Json;
  Json cells = Json::array();
  for (const SummaryCell& c : summary.cells) {
    Json j{{"model", c.model}, {"environment", c.environment.empty() ? Json(nullptr) : Json(c.environment)}, {"n", c.n}};
    j["success_pct"] = c.success_pct ? Json(*c.success_pct) : Json(nullptr);
    j["mean_episode_len"] = c.mean_episode_len ? Json(*c.mean_episode_len) : Json(nullptr);
    cells.push_back(std::move(j));
  }
  Json out{{"summary", {{"models", summary.models}, {"environments", summary.environments}, {"cells", cells}}}};
  if (report) {
    Json coefs = Json::array();
    for (const Coefficient& c : report->coefficients)
      coefs.push_back(
          {{"name", c.name}, {"estimate", c.estimate}, {"std_error", c.std_error}, {"z", c.z}, {"p_value", c.p_value}});
    Json ors = Json::object();
    for (const auto& [name, o] : report->odds_ratios)
      ors[name] = {{"point", o.point}, {"ci_lo", o.ci_lo}, {"ci_hi", o.ci_hi}};
    out["regression"] = {{"n", report->n},
                         {"converged", report->converged},
                         {"iterations", report->iterations},
                         {"log_likelihood", report->log_likelihood},
                         {"separation_warning", report->separation_warning},
                         {"coefficients", coefs},
                         {"odds_ratios", ors}};
  }
  return out.dump(2) + "\n";
}

}  // namespace scenesmith
