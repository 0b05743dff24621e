#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hetbias/bias.hpp"
#include "hetbias/regressor.hpp"

namespace hetbias {

// Response plus single regressor of interest; w_columns (possibly
// empty) holds additional control regressors used only by screening.
struct RegressionDataset {
  Eigen::VectorXd y;
  Eigen::VectorXd x;
  Eigen::MatrixXd w_columns;  // T x k, k >= 0
};

void check_dataset(const RegressionDataset& data);

// Intercept-plus-slope OLS fit. Residuals satisfy sum e_t = 0 and
// sum z_t e_t = 0 (orthogonality, checked to 1e-9 relative).
struct OlsFit {
  double beta1;
  double beta2;
  Eigen::VectorXd residuals;
  RegressorSequence reg;
};

OlsFit ols_fit(const RegressionDataset& data);

struct HccmeEntry {
  std::string label;
  double a;
  double variance_estimate;
  double std_error;
};

// Variance estimates across the estimator family plus the worst-case
// significance interval beta2 +- 2 (1/(T s^2)) sqrt((1 + (K+1)/T)
// sum x~_t^2 e_t^2), x~ centered. Multiplier is the literal 2.
struct HccmeReport {
  double beta1;
  double beta2;
  Eigen::Index t_count;
  double s_squared;
  double kurtosis_used;
  double a_star_used;
  bool degenerate_fallback;  // K+1 >= T; a_star_used fell back to K+1
  std::vector<HccmeEntry> entries;  // EW, Hinkley, MinimaxFinite, MinimaxAsymptotic
  double interval_low;
  double interval_high;
  bool significant;  // zero outside the interval
  std::optional<double> worst_case_bias_bound;  // max(B+, -B-) at a_star_used
};

HccmeReport hccme_report(const RegressionDataset& data,
                         std::optional<double> u_bound = std::nullopt);

enum class ScreeningVerdict { Significant, Insignificant, Ambiguous };

std::string screening_verdict_name(ScreeningVerdict v);

// Three-step significance triage for a multiple-regressor model:
// (i) y on x alone not significant -> Insignificant;
// (ii) purge the controls from y, regress the purged residuals on x;
//      significant -> Significant;
// (iii) otherwise Ambiguous.
// Each step applies the same worst-case interval rule as hccme_report.
struct ScreeningResult {
  ScreeningVerdict verdict;
  HccmeReport step1;                 // y on x
  std::optional<HccmeReport> step2;  // purged residuals on x
};

ScreeningResult screening(const RegressionDataset& data,
                          std::optional<double> u_bound = std::nullopt);

}  // namespace hetbias
