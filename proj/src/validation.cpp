#include "hetbias/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hetbias/errors.hpp"
#include "hetbias/experiments.hpp"
#include "hetbias/minimax.hpp"
#include "hetbias/rng.hpp"

namespace hetbias {

namespace {

constexpr std::uint64_t kValidationStream = 3;

double rel_gap(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

std::string describe(double max_error, int instances) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max gap %.3g over %d instances", max_error,
                instances);
  return buf;
}

// A moderately irregular regressor: normal draws pushed through a mild
// quadratic so the instances span a range of skewness and kurtosis.
RegressorSequence random_regressor(Rng& rng, Eigen::Index t_count) {
  Eigen::VectorXd v = rng.normal_vector(t_count);
  Eigen::VectorXd raw(t_count);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    raw(t) = 3.0 + 1.7 * (v(t) + 0.35 * v(t) * v(t));
  }
  return standardize(raw);
}

VariancePattern random_pattern(Rng& rng, Eigen::Index t_count, double u) {
  VariancePattern var;
  var.sigma_sq.resize(t_count);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    var.sigma_sq(t) = u * rng.uniform01();
  }
  var.bound_u = u;
  return var;
}

}  // namespace

Eigen::MatrixXd dense_hat_matrix(const RegressorSequence& reg) {
  const Eigen::Index t = reg.t_count;
  Eigen::MatrixXd design(t, 2);
  design.col(0).setOnes();
  design.col(1) = reg.raw;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
  Eigen::MatrixXd q_thin =
      qr.householderQ() * Eigen::MatrixXd::Identity(t, 2);
  return q_thin * q_thin.transpose();
}

Eigen::VectorXd dense_expected_sq_residuals(const RegressorSequence& reg,
                                            const VariancePattern& var) {
  check_pattern(var);
  if (var.sigma_sq.size() != reg.t_count) {
    throw LengthMismatch("variance pattern length != regressor length");
  }
  const Eigen::Index t = reg.t_count;
  const Eigen::MatrixXd annihilator =
      Eigen::MatrixXd::Identity(t, t) - dense_hat_matrix(reg);
  const Eigen::MatrixXd covariance =
      annihilator * var.sigma_sq.asDiagonal() * annihilator;
  return covariance.diagonal();
}

VertexExtremes enumerate_vertices(const EstimatorSpec& spec,
                                  const RegressorSequence& reg,
                                  double bound_u) {
  const Eigen::Index t = reg.t_count;
  if (t > 20) throw InvalidInput("vertex enumeration limited to T <= 20");
  VertexExtremes out;
  VariancePattern var;
  var.sigma_sq.resize(t);
  var.bound_u = bound_u;
  const std::uint64_t masks = std::uint64_t{1} << t;
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    for (Eigen::Index i = 0; i < t; ++i) {
      var.sigma_sq(i) = (mask >> i) & 1 ? bound_u : 0.0;
    }
    const double b = bias(spec, reg, var);
    out.max_bias = std::max(out.max_bias, b);
    out.min_bias = std::min(out.min_bias, b);
  }
  return out;
}

std::vector<ValidationCheck> run_validation(int reps, std::uint64_t seed) {
  std::vector<ValidationCheck> checks;

  {
    ValidationCheck c{"expected-residuals-dense", true, 0.0, ""};
    const int n = 25;
    for (int k = 0; k < n; ++k) {
      Rng rng = Rng::derive(seed, kValidationStream, 100 + k);
      const Eigen::Index t =
          static_cast<Eigen::Index>(5 + rng.next_u64() % 146);
      const RegressorSequence reg = random_regressor(rng, t);
      const VariancePattern var = random_pattern(rng, t, 1.0);
      const Eigen::VectorXd dense = dense_expected_sq_residuals(reg, var);
      const VarianceMoments vm = variance_moments(reg, var);
      for (Eigen::Index i = 0; i < t; ++i) {
        c.max_error = std::max(
            c.max_error, rel_gap(expected_sq_residual(reg, var, i, vm),
                                 dense(i)));
      }
    }
    c.pass = c.max_error <= 1e-12;
    c.detail = describe(c.max_error, n);
    checks.push_back(c);
  }

  {
    ValidationCheck c{"bias-routes-agree", true, 0.0, ""};
    const int n = 25;
    for (int k = 0; k < n; ++k) {
      Rng rng = Rng::derive(seed, kValidationStream, 200 + k);
      const Eigen::Index t =
          static_cast<Eigen::Index>(5 + rng.next_u64() % 146);
      const RegressorSequence reg = random_regressor(rng, t);
      const VariancePattern var = random_pattern(rng, t, 1.0);
      const EstimatorSpec spec = EstimatorSpec::custom(8.0 * rng.uniform01());
      c.max_error = std::max(
          c.max_error, rel_gap(bias_via_residual_expectation(spec, reg, var),
                               bias(spec, reg, var)));
    }
    c.pass = c.max_error <= 1e-12;
    c.detail = describe(c.max_error, n);
    checks.push_back(c);
  }

  {
    ValidationCheck c{"vertex-enumeration", true, 0.0, ""};
    const int n = 15;
    for (int k = 0; k < n; ++k) {
      Rng rng = Rng::derive(seed, kValidationStream, 300 + k);
      const Eigen::Index t = static_cast<Eigen::Index>(5 + rng.next_u64() % 8);
      const RegressorSequence reg = random_regressor(rng, t);
      const EstimatorSpec spec = EstimatorSpec::custom(8.0 * rng.uniform01());
      const double u = 0.5 + 2.0 * rng.uniform01();
      const VertexExtremes brute = enumerate_vertices(spec, reg, u);
      const WorstCase plus = worst_case_positive(spec.a, reg, u);
      const WorstCase minus = worst_case_negative(spec.a, reg, u);
      c.max_error = std::max(c.max_error, rel_gap(plus.value, brute.max_bias));
      c.max_error = std::max(c.max_error, rel_gap(minus.value, brute.min_bias));
    }
    c.pass = c.max_error <= 1e-12;
    c.detail = describe(c.max_error, n);
    checks.push_back(c);
  }

  {
    ValidationCheck c{"bias-within-envelope", true, 0.0, ""};
    const int n = 20;
    for (int k = 0; k < n; ++k) {
      Rng rng = Rng::derive(seed, kValidationStream, 400 + k);
      const Eigen::Index t =
          static_cast<Eigen::Index>(5 + rng.next_u64() % 146);
      const RegressorSequence reg = random_regressor(rng, t);
      const EstimatorSpec spec = EstimatorSpec::custom(8.0 * rng.uniform01());
      const double u = 0.5 + 2.0 * rng.uniform01();
      const WorstCase plus = worst_case_positive(spec.a, reg, u);
      const WorstCase minus = worst_case_negative(spec.a, reg, u);
      for (int j = 0; j < 10; ++j) {
        const VariancePattern var = random_pattern(rng, t, u);
        const double b = bias(spec, reg, var);
        c.max_error = std::max(c.max_error, b - plus.value);
        c.max_error = std::max(c.max_error, minus.value - b);
      }
    }
    c.pass = c.max_error <= 1e-12;
    c.detail = describe(c.max_error, n);
    checks.push_back(c);
  }

  {
    ValidationCheck c{"config-attains-extreme", true, 0.0, ""};
    const int n = 15;
    for (int k = 0; k < n; ++k) {
      Rng rng = Rng::derive(seed, kValidationStream, 500 + k);
      const Eigen::Index t =
          static_cast<Eigen::Index>(5 + rng.next_u64() % 146);
      const RegressorSequence reg = random_regressor(rng, t);
      const EstimatorSpec spec = EstimatorSpec::custom(8.0 * rng.uniform01());
      const double u = 0.5 + 2.0 * rng.uniform01();
      for (const WorstCase& wc : {worst_case_positive(spec.a, reg, u),
                                  worst_case_negative(spec.a, reg, u)}) {
        VariancePattern var{wc.config.sigma_sq, u};
        c.max_error =
            std::max(c.max_error, rel_gap(bias(spec, reg, var), wc.value));
      }
    }
    c.pass = c.max_error <= 1e-12;
    c.detail = describe(c.max_error, n);
    checks.push_back(c);
  }

  {
    ValidationCheck c{"minimax-scale-free-in-u", true, 0.0, ""};
    const int n = 8;
    for (int k = 0; k < n; ++k) {
      Rng rng = Rng::derive(seed, kValidationStream, 600 + k);
      const RegressorSequence reg = random_regressor(rng, 60);
      const double a1 = minimax_a_numeric(reg, 1.0);
      const double a2 = minimax_a_numeric(reg, 7.5);
      c.max_error = std::max(c.max_error, std::abs(a1 - a2));
    }
    c.pass = c.max_error <= 1e-9;
    c.detail = describe(c.max_error, n);
    checks.push_back(c);
  }

  {
    ValidationCheck c{"three-level-closed-form", true, 0.0, ""};
    const double m = std::sqrt(3.0);
    const Eigen::Index t = 18;
    const RegressorSequence reg = three_point_sequence(t, m);
    const double u = 1.0;
    const double scale =
        m * m * static_cast<double>(t) * static_cast<double>(t) *
        reg.s_squared / u;
    int n = 0;
    for (double a : {0.0, 1.0, 3.0}) {
      const ThreePointBiases cf = three_point_closed_form(a, t, m * m);
      const WorstCase plus = worst_case_positive(a, reg, u);
      const WorstCase minus = worst_case_negative(a, reg, u);
      c.max_error = std::max(
          c.max_error, rel_gap(scale * plus.value, cf.scaled_b_plus));
      c.max_error = std::max(
          c.max_error, rel_gap(-scale * minus.value, cf.scaled_minus_b_minus));
      ++n;
    }
    c.pass = c.max_error <= 1e-10;
    c.detail = describe(c.max_error, n);
    checks.push_back(c);
  }

  {
    ValidationCheck c{"normal-limit-crossing", true, 0.0, ""};
    int n = 0;
    for (double a : {0.0, 1.0, 2.0, 3.7, 4.0, 5.5, 8.0}) {
      const AsymptoticBiases ab = normal_asymptotic_biases(a);
      c.max_error = std::max(
          c.max_error, std::abs((ab.b_plus - ab.minus_b_minus) - (a - 4.0)));
      ++n;
    }
    c.pass = c.max_error <= 1e-12;
    c.detail = describe(c.max_error, n);
    checks.push_back(c);
  }

  {
    ValidationCheck c{"monte-carlo-bias", true, 0.0, ""};
    const int replications = std::max(reps, 1000);
    const int n = 3;
    double worst_sigma = 0.0;
    for (int k = 0; k < n; ++k) {
      Rng rng = Rng::derive(seed, kValidationStream, 700 + k);
      const RegressorSequence reg = random_regressor(rng, 40);
      const VariancePattern var = random_pattern(rng, 40, 1.0);
      const EstimatorSpec spec =
          k == 0 ? EstimatorSpec::eicker_white() : EstimatorSpec::hinkley();
      const double exact = bias(spec, reg, var);
      const McResult mc =
          mc_validate_bias(spec, reg, var, replications, seed + k);
      const double sigmas = std::abs(mc.mean - exact) / std::max(mc.se, 1e-300);
      worst_sigma = std::max(worst_sigma, sigmas);
    }
    c.max_error = worst_sigma;
    c.pass = worst_sigma <= 4.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max |mean - exact| = %.3g SE over %d runs",
                  worst_sigma, n);
    c.detail = buf;
    checks.push_back(c);
  }

  return checks;
}

}  // namespace hetbias
