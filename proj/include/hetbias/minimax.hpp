#pragma once

#include <Eigen/Dense>
#include <string>

#include "hetbias/bias.hpp"
#include "hetbias/regressor.hpp"

namespace hetbias {

// How bias values are scaled for display. Raw is the bias itself;
// TSquaredSSquaredOverU multiplies by T^2 s^2 / U; TOverU by T / U.
enum class Normalization { Raw, TSquaredSSquaredOverU, TOverU };

std::string normalization_name(Normalization n);
Normalization parse_normalization(const std::string& name);

double apply_normalization(double raw_bias, Normalization n, Eigen::Index t,
                           double s_squared, double u);

// Sampled worst-case bias curves over an a-grid.
struct BiasProfile {
  Eigen::VectorXd a_grid;
  Eigen::VectorXd b_plus;   // >= 0 entrywise
  Eigen::VectorXd b_minus;  // <= 0 entrywise
  double bound_u;
  Normalization normalization;
};

enum class Direction { Positive, Negative };

// Vertex of the box [0, U]^T achieving a worst-case bias. sigma_sq
// entries are exactly 0 or U; ties p(z_t) = 0 resolve to 0.
struct LeastFavorableConfig {
  Eigen::VectorXd sigma_sq;
  Direction direction;
};

struct WorstCase {
  double value;
  LeastFavorableConfig config;
};

// Largest achievable positive bias B+ = (1/(T^3 s^2)) sum max(p(z_t),0) U
// and the variance pattern attaining it.
WorstCase worst_case_positive(double a, const RegressorSequence& reg, double u);

// Largest-magnitude negative bias B- = (1/(T^3 s^2)) sum min(p(z_t),0) U.
WorstCase worst_case_negative(double a, const RegressorSequence& reg, double u);

// Evaluate both worst-case curves over a uniform a-grid.
BiasProfile bias_profile(const RegressorSequence& reg, double u, double a_min,
                         double a_max, Eigen::Index steps, Normalization n);

// The scale a* where B+(a) and -B-(a) cross, located by bisection on
// g(a) = B+(a) + B-(a). g is piecewise linear and continuous in a, so
// bisection is reliable where Newton would not be. a_max <= 0 selects
// the default bracket 4(K+2), doubled once if needed.
double minimax_a_numeric(const RegressorSequence& reg, double u,
                         double a_max = 0.0);

// Closed-form minimax scale (K+1)/(1 - (K+1)/T).
double a_star_analytic(double kurtosis, Eigen::Index t_count);

// --- limiting normal-regressor case ------------------------------------

// Positive root r of the limiting quadratic in lambda^2:
// r = (1 + a + sqrt(8 + (1+a)^2)) / 4.
double normal_asymptotic_root(double a);

// Limiting worst-case risk pair (B+, -B-) for normal regressors:
//   B+   = 2(2r - a + 5) sqrt(r) phi(sqrt(r)) + 2(a-4) Phi(sqrt(r)) - a + 4
//   -B-  = 2(2r - a + 5) sqrt(r) phi(sqrt(r)) + 2(a-4) Phi(sqrt(r)) - 2a + 8
// Their difference is identically a - 4, so the curves cross at a = 4.
struct AsymptoticBiases {
  double b_plus;
  double minus_b_minus;
};
AsymptoticBiases normal_asymptotic_biases(double a);

// Large-T normalized maximum risks T*B/U of the three named estimators:
// (K + 2 - 1/K, K - 1/K, 1 - 1/K).
struct PerformanceTriple {
  double eicker_white;
  double hinkley;
  double minimax;
};
PerformanceTriple asymptotic_performance(double kurtosis);

// --- discrete three-level regressors ------------------------------------

// Positive root r+ of p(+-M) viewed as a polynomial in M^2:
// with c = 1 + a/T, r+ = ((a - 2c) + sqrt((a - 2c)^2 + 4 c^2)) / (2c).
// Sign contract: p(+-M) < 0 for M^2 > r+, p(+-M) > 0 for M^2 < r+.
double three_point_root(double a, Eigen::Index t_count);

// Closed-form worst-case biases for the exact three-level sequence, in
// the M^2 T^2 s^2 B / U normalization (s^2 = 1 here):
//   scaled_b_plus        = (M^2 - 1) + (a/T)(M^2 - 1)
//   scaled_minus_b_minus = M^4 + (2-a) M^2 - 1 + (a/T)(M^4 + 2 M^2 - 1)
// Valid for a < M^2 + 2 - 1/M^2, where p(+-M) < 0.
struct ThreePointBiases {
  double scaled_b_plus;
  double scaled_minus_b_minus;
};
ThreePointBiases three_point_closed_form(double a, Eigen::Index t_count,
                                         double m_squared);

}  // namespace hetbias
