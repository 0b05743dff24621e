#include "hetbias/inference.hpp"

#include <cmath>

#include "hetbias/errors.hpp"
#include "hetbias/minimax.hpp"
#include "hetbias/numeric.hpp"

namespace hetbias {

void check_dataset(const RegressionDataset& data) {
  const Eigen::Index t = data.y.size();
  if (t < 3) throw TooShort("dataset: need at least 3 observations");
  if (data.x.size() != t) throw LengthMismatch("dataset: y and x lengths differ");
  if (data.w_columns.size() > 0 && data.w_columns.rows() != t) {
    throw LengthMismatch("dataset: control column length differs from y");
  }
}

OlsFit ols_fit(const RegressionDataset& data) {
  check_dataset(data);
  RegressorSequence reg = standardize(data.x);
  const Eigen::Index t = reg.t_count;
  const double dt = static_cast<double>(t);
  const double s = std::sqrt(reg.s_squared);
  const double y_mean = csum(data.y) / dt;
  const double x_mean = csum(data.x) / dt;
  const double beta2 = cdot(reg.z, data.y) / (dt * s);
  const double beta1 = y_mean - beta2 * x_mean;

  Eigen::VectorXd residuals(t);
  for (Eigen::Index i = 0; i < t; ++i) {
    residuals[i] = data.y[i] - beta1 - beta2 * data.x[i];
  }

  const double y_scale = data.y.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * dt * std::max(1.0, y_scale);
  if (std::abs(csum(residuals)) > tol ||
      std::abs(cdot(reg.z, residuals)) > tol) {
    throw NumericError("ols_fit: residual orthogonality check failed");
  }
  return {beta1, beta2, std::move(residuals), std::move(reg)};
}

namespace {

HccmeReport report_from_fit(const OlsFit& fit, std::optional<double> u_bound) {
  const Eigen::Index t = fit.reg.t_count;
  const double dt = static_cast<double>(t);
  const double k = fit.reg.kurtosis;

  HccmeReport rep;
  rep.beta1 = fit.beta1;
  rep.beta2 = fit.beta2;
  rep.t_count = t;
  rep.s_squared = fit.reg.s_squared;
  rep.kurtosis_used = k;
  rep.degenerate_fallback = (k + 1.0 >= dt);
  rep.a_star_used =
      rep.degenerate_fallback ? k + 1.0 : a_star_analytic(k, t);

  const struct {
    const char* label;
    double a;
  } members[] = {
      {"EW", 0.0},
      {"Hinkley", 2.0},
      {"MinimaxFinite", rep.a_star_used},
      {"MinimaxAsymptotic", k + 1.0},
  };
  for (const auto& m : members) {
    const double value = estimator_value(EstimatorSpec::custom(m.a), fit.reg,
                                         fit.residuals);
    rep.entries.push_back({m.label, m.a, value, std::sqrt(value)});
  }

  // Interval computed from the centered regressor in original units,
  // exactly as the worst-case rule is stated.
  const double s = std::sqrt(fit.reg.s_squared);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < t; ++i) {
    const double xc = fit.reg.z[i] * s;
    acc.add(xc * xc * fit.residuals[i] * fit.residuals[i]);
  }
  const double half = 2.0 / (dt * fit.reg.s_squared) *
                      std::sqrt((1.0 + (k + 1.0) / dt) * acc.value());
  rep.interval_low = fit.beta2 - half;
  rep.interval_high = fit.beta2 + half;
  rep.significant = (rep.interval_low > 0.0) || (rep.interval_high < 0.0);

  if (u_bound) {
    if (!(*u_bound > 0.0)) throw InvalidInput("hccme_report: U must be positive");
    const double bp = worst_case_positive(rep.a_star_used, fit.reg, *u_bound).value;
    const double bm = worst_case_negative(rep.a_star_used, fit.reg, *u_bound).value;
    rep.worst_case_bias_bound = std::max(bp, -bm);
  }
  return rep;
}

}  // namespace

HccmeReport hccme_report(const RegressionDataset& data,
                         std::optional<double> u_bound) {
  return report_from_fit(ols_fit(data), u_bound);
}

std::string screening_verdict_name(ScreeningVerdict v) {
  switch (v) {
    case ScreeningVerdict::Significant: return "Significant";
    case ScreeningVerdict::Insignificant: return "Insignificant";
    case ScreeningVerdict::Ambiguous: return "Ambiguous";
  }
  return "Unknown";
}

ScreeningResult screening(const RegressionDataset& data,
                          std::optional<double> u_bound) {
  check_dataset(data);
  if (data.w_columns.cols() < 1) {
    throw InvalidInput("screening: need at least one control column");
  }

  ScreeningResult result{ScreeningVerdict::Ambiguous,
                         hccme_report({data.y, data.x, {}}, u_bound), std::nullopt};
  if (!result.step1.significant) {
    result.verdict = ScreeningVerdict::Insignificant;
    return result;
  }

  // Purge the controls (plus intercept) from y.
  const Eigen::Index t = data.y.size();
  Eigen::MatrixXd design(t, data.w_columns.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(data.w_columns.cols()) = data.w_columns;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < design.cols()) {
    throw RankDeficient("screening: control design is rank deficient");
  }
  const Eigen::VectorXd fitted = design * qr.solve(data.y);
  const Eigen::VectorXd purged = data.y - fitted;

  result.step2 = hccme_report({purged, data.x, {}}, u_bound);
  result.verdict = result.step2->significant ? ScreeningVerdict::Significant
                                             : ScreeningVerdict::Ambiguous;
  return result;
}

}  // namespace hetbias
