#include "hetbias/minimax.hpp"

#include <cmath>

#include "hetbias/errors.hpp"
#include "hetbias/numeric.hpp"

namespace hetbias {

std::string normalization_name(Normalization n) {
  switch (n) {
    case Normalization::Raw: return "raw";
    case Normalization::TSquaredSSquaredOverU: return "t2s2-over-u";
    case Normalization::TOverU: return "t-over-u";
  }
  return "unknown";
}

Normalization parse_normalization(const std::string& name) {
  if (name == "raw") return Normalization::Raw;
  if (name == "t2s2-over-u") return Normalization::TSquaredSSquaredOverU;
  if (name == "t-over-u") return Normalization::TOverU;
  throw InvalidInput("unknown normalization: " + name);
}

double apply_normalization(double raw_bias, Normalization n, Eigen::Index t,
                           double s_squared, double u) {
  const double dt = static_cast<double>(t);
  switch (n) {
    case Normalization::Raw:
      return raw_bias;
    case Normalization::TSquaredSSquaredOverU:
      return raw_bias * dt * dt * s_squared / u;
    case Normalization::TOverU:
      return raw_bias * dt / u;
  }
  throw InvalidInput("apply_normalization: bad enum");
}

namespace {

WorstCase worst_case_impl(double a, const RegressorSequence& reg, double u,
                          Direction dir) {
  if (!(u > 0.0)) throw InvalidInput("worst_case: bound U must be positive");
  if (!(a >= 0.0)) throw InvalidInput("worst_case: a must be >= 0");
  const BiasPolynomial p = build_polynomial(a, reg);
  const double dt = static_cast<double>(reg.t_count);
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(reg.t_count);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < reg.t_count; ++i) {
    const double pz = p.eval(reg.z[i]);
    const bool take = (dir == Direction::Positive) ? (pz > 0.0) : (pz < 0.0);
    if (take) {
      sigma[i] = u;
      acc.add(pz * u);
    }
  }
  const double value = acc.value() / (dt * dt * dt * reg.s_squared);
  return {value, {std::move(sigma), dir}};
}

}  // namespace

WorstCase worst_case_positive(double a, const RegressorSequence& reg,
                              double u) {
  return worst_case_impl(a, reg, u, Direction::Positive);
}

WorstCase worst_case_negative(double a, const RegressorSequence& reg,
                              double u) {
  return worst_case_impl(a, reg, u, Direction::Negative);
}

BiasProfile bias_profile(const RegressorSequence& reg, double u, double a_min,
                         double a_max, Eigen::Index steps, Normalization n) {
  if (steps < 1) throw InvalidInput("bias_profile: need at least one grid point");
  if (!(a_min >= 0.0) || !(a_max >= a_min)) {
    throw InvalidInput("bias_profile: need 0 <= a_min <= a_max");
  }
  BiasProfile prof;
  prof.a_grid.resize(steps);
  prof.b_plus.resize(steps);
  prof.b_minus.resize(steps);
  prof.bound_u = u;
  prof.normalization = n;
  for (Eigen::Index i = 0; i < steps; ++i) {
    const double frac =
        (steps == 1) ? 0.0
                     : static_cast<double>(i) / static_cast<double>(steps - 1);
    const double a = a_min + frac * (a_max - a_min);
    prof.a_grid[i] = a;
    prof.b_plus[i] = apply_normalization(worst_case_positive(a, reg, u).value,
                                         n, reg.t_count, reg.s_squared, u);
    prof.b_minus[i] = apply_normalization(worst_case_negative(a, reg, u).value,
                                          n, reg.t_count, reg.s_squared, u);
  }
  return prof;
}

double minimax_a_numeric(const RegressorSequence& reg, double u,
                         double a_max) {
  if (!(u > 0.0)) throw InvalidInput("minimax_a_numeric: bound U must be positive");
  const auto g = [&](double a) {
    return worst_case_positive(a, reg, u).value +
           worst_case_negative(a, reg, u).value;
  };
  double hi = (a_max > 0.0) ? a_max : 4.0 * (reg.kurtosis + 2.0);
  double g_lo = g(0.0);
  double g_hi = g(hi);
  if (g_lo == 0.0) return 0.0;
  if (g_lo * g_hi > 0.0) {
    hi *= 2.0;
    g_hi = g(hi);
    if (g_lo * g_hi > 0.0) {
      throw NoBracket("minimax_a_numeric: no sign change of B+ + B- on [0, " +
                      format_double(hi) + "]");
    }
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = g(mid);
    if (g_mid == 0.0) return mid;
    if (g_lo * g_mid < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      g_lo = g_mid;
    }
  }
  return 0.5 * (lo + hi);
}

double a_star_analytic(double kurtosis, Eigen::Index t_count) {
  const double dt = static_cast<double>(t_count);
  const double k1 = kurtosis + 1.0;
  if (k1 >= dt) {
    throw DegenerateSampleSize("a_star_analytic: K + 1 must be below T");
  }
  return k1 / (1.0 - k1 / dt);
}

double normal_asymptotic_root(double a) {
  if (!(a >= 0.0)) throw InvalidInput("normal_asymptotic_root: a must be >= 0");
  const double b = 1.0 + a;
  return (b + std::sqrt(8.0 + b * b)) / 4.0;
}

AsymptoticBiases normal_asymptotic_biases(double a) {
  const double r = normal_asymptotic_root(a);
  const double sr = std::sqrt(r);
  const double shared = 2.0 * (2.0 * r - a + 5.0) * sr * normal_pdf(sr) +
                        2.0 * (a - 4.0) * normal_cdf(sr);
  return {shared - a + 4.0, shared - 2.0 * a + 8.0};
}

PerformanceTriple asymptotic_performance(double kurtosis) {
  if (!(kurtosis > 1.0)) {
    throw InvalidInput("asymptotic_performance: kurtosis must exceed 1");
  }
  const double inv_k = 1.0 / kurtosis;
  return {kurtosis + 2.0 - inv_k, kurtosis - inv_k, 1.0 - inv_k};
}

double three_point_root(double a, Eigen::Index t_count) {
  if (!(a >= 0.0)) throw InvalidInput("three_point_root: a must be >= 0");
  const double c = 1.0 + a / static_cast<double>(t_count);
  const double half_b = a - 2.0 * c;
  return (half_b + std::sqrt(half_b * half_b + 4.0 * c * c)) / (2.0 * c);
}

ThreePointBiases three_point_closed_form(double a, Eigen::Index t_count,
                                         double m_squared) {
  if (!(m_squared > 1.0)) {
    throw InvalidInput("three_point_closed_form: need M^2 > 1");
  }
  const double limit = m_squared + 2.0 - 1.0 / m_squared;
  if (!(a >= 0.0) || !(a < limit)) {
    throw InvalidInput(
        "three_point_closed_form: need 0 <= a < M^2 + 2 - 1/M^2");
  }
  const double at = a / static_cast<double>(t_count);
  const double m4 = m_squared * m_squared;
  ThreePointBiases out;
  out.scaled_b_plus = (m_squared - 1.0) + at * (m_squared - 1.0);
  out.scaled_minus_b_minus =
      m4 + (2.0 - a) * m_squared - 1.0 + at * (m4 + 2.0 * m_squared - 1.0);
  return out;
}

}  // namespace hetbias
