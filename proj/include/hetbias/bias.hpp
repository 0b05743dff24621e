#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "hetbias/regressor.hpp"

namespace hetbias {

// Heteroskedastic error-variance sequence with an optional common upper
// bound U. Invariants: sigma_sq[t] >= 0; if bound present, sigma_sq[t]
// <= U * (1 + 1e-12).
struct VariancePattern {
  Eigen::VectorXd sigma_sq;
  std::optional<double> bound_u;
};

// Validate invariants; throws InvalidInput on violation.
void check_pattern(const VariancePattern& var);

// p(lambda) = c0 + c1*lambda + c2*lambda^2 + c4*lambda^4.
struct BiasPolynomial {
  double c0;
  double c1;
  double c2;
  double c4;
  double a;
  Eigen::Index t_count;
  double skewness;
  double kurtosis;

  double eval(double lambda) const {
    const double l2 = lambda * lambda;
    return c0 + c1 * lambda + c2 * l2 + c4 * l2 * l2;
  }
};

enum class EstimatorLabel { EickerWhite, Hinkley, Minimax, Custom };

// One member of the scaled squared-residual variance estimator family,
// selected by the scale parameter a >= 0.
struct EstimatorSpec {
  double a;
  EstimatorLabel label;

  static EstimatorSpec eicker_white() { return {0.0, EstimatorLabel::EickerWhite}; }
  static EstimatorSpec hinkley() { return {2.0, EstimatorLabel::Hinkley}; }
  static EstimatorSpec minimax(double a_star) { return {a_star, EstimatorLabel::Minimax}; }
  static EstimatorSpec custom(double a) { return {a, EstimatorLabel::Custom}; }
};

std::string estimator_label_name(EstimatorLabel label);

// Validate label/a consistency and a >= 0; throws InvalidInput.
void check_spec(const EstimatorSpec& spec);

// True variance of the OLS slope: (1/(T^2 s^2)) sum z_t^2 sigma_t^2.
double true_variance(const RegressorSequence& reg, const VariancePattern& var);

// Hat-matrix entry (1/T)(1 + z_s z_t).
double hat_entry(const RegressorSequence& reg, Eigen::Index s_idx,
                 Eigen::Index t_idx);

// Cross moments of the variance pattern against powers of z, computed
// once per (reg, var) pair: EV = (1/T) sum sigma_i^2, EVZ = (1/T) sum
// z_i sigma_i^2, EVZ2 = (1/T) sum z_i^2 sigma_i^2.
struct VarianceMoments {
  double ev;
  double evz;
  double evz2;
};
VarianceMoments variance_moments(const RegressorSequence& reg,
                                 const VariancePattern& var);

// Expected squared OLS residual for observation t:
// sigma_t^2 + (1/T){EV - 2 sigma_t^2 - 2 z_t^2 sigma_t^2
//                   + 2 z_t EVZ + z_t^2 EVZ2}.
double expected_sq_residual(const RegressorSequence& reg,
                            const VariancePattern& var, Eigen::Index t_idx);
double expected_sq_residual(const RegressorSequence& reg,
                            const VariancePattern& var, Eigen::Index t_idx,
                            const VarianceMoments& vm);

// Realized estimator value (1/(T^2 s^2))(1 + a/T) sum z_t^2 e_t^2.
double estimator_value(const EstimatorSpec& spec, const RegressorSequence& reg,
                       const Eigen::Ref<const Eigen::VectorXd>& residuals);

// Coefficients of the bias polynomial for given scale a and regressor
// moments: c0 = 1 + a/T, c1 = 2(1 + a/T) EZ^3,
// c2 = a + (1 + a/T)(EZ^4 - 2), c4 = -2(1 + a/T).
BiasPolynomial build_polynomial(double a, const RegressorSequence& reg);

// Exact bias E estimator - true variance, via the polynomial route:
// (1/(T^3 s^2)) sum p(z_t) sigma_t^2.
double bias(const EstimatorSpec& spec, const RegressorSequence& reg,
            const VariancePattern& var);

// Same quantity via expected squared residuals:
// (1/(T^2 s^2)) sum z_t^2 [(1 + a/T) E e_t^2 - sigma_t^2].
// The two routes agree to 1e-12 relative; the second exists as an
// internal cross-check and for the validate command.
double bias_via_residual_expectation(const EstimatorSpec& spec,
                                     const RegressorSequence& reg,
                                     const VariancePattern& var);

}  // namespace hetbias
