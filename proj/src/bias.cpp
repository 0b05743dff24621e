#include "hetbias/bias.hpp"

#include <cmath>

#include "hetbias/errors.hpp"
#include "hetbias/numeric.hpp"

namespace hetbias {

void check_pattern(const VariancePattern& var) {
  for (Eigen::Index i = 0; i < var.sigma_sq.size(); ++i) {
    if (!(var.sigma_sq[i] >= 0.0)) {
      throw InvalidInput("VariancePattern: negative variance entry");
    }
  }
  if (var.bound_u) {
    if (!(*var.bound_u > 0.0)) {
      throw InvalidInput("VariancePattern: bound U must be positive");
    }
    const double cap = *var.bound_u * (1.0 + 1e-12);
    for (Eigen::Index i = 0; i < var.sigma_sq.size(); ++i) {
      if (var.sigma_sq[i] > cap) {
        throw InvalidInput("VariancePattern: entry exceeds bound U");
      }
    }
  }
}

std::string estimator_label_name(EstimatorLabel label) {
  switch (label) {
    case EstimatorLabel::EickerWhite: return "EickerWhite";
    case EstimatorLabel::Hinkley: return "Hinkley";
    case EstimatorLabel::Minimax: return "Minimax";
    case EstimatorLabel::Custom: return "Custom";
  }
  return "Unknown";
}

void check_spec(const EstimatorSpec& spec) {
  if (!(spec.a >= 0.0)) throw InvalidInput("EstimatorSpec: a must be >= 0");
  if (spec.label == EstimatorLabel::EickerWhite && spec.a != 0.0) {
    throw InvalidInput("EstimatorSpec: EickerWhite requires a = 0");
  }
  if (spec.label == EstimatorLabel::Hinkley && spec.a != 2.0) {
    throw InvalidInput("EstimatorSpec: Hinkley requires a = 2");
  }
}

namespace {

void require_same_length(const RegressorSequence& reg,
                         const VariancePattern& var) {
  if (reg.t_count != var.sigma_sq.size()) {
    throw LengthMismatch("regressor and variance pattern lengths differ");
  }
}

}  // namespace

double true_variance(const RegressorSequence& reg, const VariancePattern& var) {
  require_same_length(reg, var);
  const double dt = static_cast<double>(reg.t_count);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < reg.t_count; ++i) {
    acc.add(reg.z[i] * reg.z[i] * var.sigma_sq[i]);
  }
  return acc.value() / (dt * dt * reg.s_squared);
}

double hat_entry(const RegressorSequence& reg, Eigen::Index s_idx,
                 Eigen::Index t_idx) {
  if (s_idx < 0 || s_idx >= reg.t_count || t_idx < 0 || t_idx >= reg.t_count) {
    throw IndexOutOfRange("hat_entry: index outside [0, T)");
  }
  return (1.0 + reg.z[s_idx] * reg.z[t_idx]) / static_cast<double>(reg.t_count);
}

VarianceMoments variance_moments(const RegressorSequence& reg,
                                 const VariancePattern& var) {
  require_same_length(reg, var);
  const double dt = static_cast<double>(reg.t_count);
  CompensatedSum ev, evz, evz2;
  for (Eigen::Index i = 0; i < reg.t_count; ++i) {
    const double s = var.sigma_sq[i];
    ev.add(s);
    evz.add(reg.z[i] * s);
    evz2.add(reg.z[i] * reg.z[i] * s);
  }
  return {ev.value() / dt, evz.value() / dt, evz2.value() / dt};
}

double expected_sq_residual(const RegressorSequence& reg,
                            const VariancePattern& var, Eigen::Index t_idx,
                            const VarianceMoments& vm) {
  require_same_length(reg, var);
  if (t_idx < 0 || t_idx >= reg.t_count) {
    throw IndexOutOfRange("expected_sq_residual: index outside [0, T)");
  }
  const double dt = static_cast<double>(reg.t_count);
  const double zt = reg.z[t_idx];
  const double st = var.sigma_sq[t_idx];
  return st + (vm.ev - 2.0 * st - 2.0 * zt * zt * st + 2.0 * zt * vm.evz +
               zt * zt * vm.evz2) /
                  dt;
}

double expected_sq_residual(const RegressorSequence& reg,
                            const VariancePattern& var, Eigen::Index t_idx) {
  return expected_sq_residual(reg, var, t_idx, variance_moments(reg, var));
}

double estimator_value(const EstimatorSpec& spec, const RegressorSequence& reg,
                       const Eigen::Ref<const Eigen::VectorXd>& residuals) {
  check_spec(spec);
  if (reg.t_count != residuals.size()) {
    throw LengthMismatch("regressor and residual lengths differ");
  }
  const double dt = static_cast<double>(reg.t_count);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < reg.t_count; ++i) {
    acc.add(reg.z[i] * reg.z[i] * residuals[i] * residuals[i]);
  }
  return (1.0 + spec.a / dt) * acc.value() / (dt * dt * reg.s_squared);
}

BiasPolynomial build_polynomial(double a, const RegressorSequence& reg) {
  if (!(a >= 0.0)) throw InvalidInput("build_polynomial: a must be >= 0");
  const double dt = static_cast<double>(reg.t_count);
  const double scale = 1.0 + a / dt;
  BiasPolynomial p;
  p.c0 = scale;
  p.c1 = 2.0 * scale * reg.skewness;
  p.c2 = a + scale * (reg.kurtosis - 2.0);
  p.c4 = -2.0 * scale;
  p.a = a;
  p.t_count = reg.t_count;
  p.skewness = reg.skewness;
  p.kurtosis = reg.kurtosis;
  return p;
}

double bias(const EstimatorSpec& spec, const RegressorSequence& reg,
            const VariancePattern& var) {
  check_spec(spec);
  require_same_length(reg, var);
  const BiasPolynomial p = build_polynomial(spec.a, reg);
  const double dt = static_cast<double>(reg.t_count);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < reg.t_count; ++i) {
    acc.add(p.eval(reg.z[i]) * var.sigma_sq[i]);
  }
  return acc.value() / (dt * dt * dt * reg.s_squared);
}

double bias_via_residual_expectation(const EstimatorSpec& spec,
                                     const RegressorSequence& reg,
                                     const VariancePattern& var) {
  check_spec(spec);
  require_same_length(reg, var);
  const double dt = static_cast<double>(reg.t_count);
  const double scale = 1.0 + spec.a / dt;
  const VarianceMoments vm = variance_moments(reg, var);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < reg.t_count; ++i) {
    const double ee = expected_sq_residual(reg, var, i, vm);
    acc.add(reg.z[i] * reg.z[i] * (scale * ee - var.sigma_sq[i]));
  }
  return acc.value() / (dt * dt * reg.s_squared);
}

}  // namespace hetbias
