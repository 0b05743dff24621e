#include <cmath>

#include "doctest.h"
#include "hetbias/errors.hpp"
#include "hetbias/minimax.hpp"
#include "hetbias/regressor.hpp"
#include "hetbias/rng.hpp"
#include "hetbias/validation.hpp"

using namespace hetbias;

TEST_CASE("worst cases match exhaustive vertex enumeration") {
  Rng rng(17);
  const RegressorSequence reg = standardize(rng.normal_vector(10));
  for (const double a : {0.0, 2.0, 5.5}) {
    const EstimatorSpec spec = EstimatorSpec::custom(a);
    const VertexExtremes brute = enumerate_vertices(spec, reg, 1.5);
    CHECK(worst_case_positive(a, reg, 1.5).value ==
          doctest::Approx(brute.max_bias).epsilon(1e-12));
    CHECK(worst_case_negative(a, reg, 1.5).value ==
          doctest::Approx(brute.min_bias).epsilon(1e-12));
  }
}

TEST_CASE("worst-case configs sit at box vertices and attain the extremes") {
  Rng rng(23);
  const RegressorSequence reg = standardize(rng.normal_vector(40));
  const double u = 2.0;
  for (const WorstCase& wc :
       {worst_case_positive(1.0, reg, u), worst_case_negative(1.0, reg, u)}) {
    for (Eigen::Index i = 0; i < 40; ++i) {
      const bool vertexed =
          wc.config.sigma_sq[i] == 0.0 || wc.config.sigma_sq[i] == u;
      CHECK(vertexed);
    }
    VariancePattern var{wc.config.sigma_sq, u};
    CHECK(bias(EstimatorSpec::custom(1.0), reg, var) ==
          doctest::Approx(wc.value).epsilon(1e-12));
  }
}

TEST_CASE("bias profile is signed, normalized, and grid-shaped") {
  Rng rng(31);
  const RegressorSequence reg = standardize(rng.normal_vector(30));
  const BiasProfile raw =
      bias_profile(reg, 2.0, 0.0, 8.0, 17, Normalization::Raw);
  const BiasProfile scaled =
      bias_profile(reg, 2.0, 0.0, 8.0, 17, Normalization::TOverU);
  CHECK(raw.a_grid.size() == 17);
  CHECK(raw.a_grid[0] == 0.0);
  CHECK(raw.a_grid[16] == 8.0);
  const double factor = 30.0 / 2.0;  // T/U
  for (int i = 0; i < 17; ++i) {
    CHECK(raw.b_plus[i] >= 0.0);
    CHECK(raw.b_minus[i] <= 0.0);
    CHECK(scaled.b_plus[i] ==
          doctest::Approx(raw.b_plus[i] * factor).epsilon(1e-14));
  }
  CHECK_THROWS_AS(bias_profile(reg, 2.0, 0.0, 8.0, 0, Normalization::Raw),
                  InvalidInput);
}

TEST_CASE("numeric minimax scale agrees with the closed form") {
  const RegressorSequence tp = three_point_sequence(18, std::sqrt(3.0));
  const double num = minimax_a_numeric(tp, 1.0);
  const double ana = a_star_analytic(tp.kurtosis, 18);
  CHECK(num == doctest::Approx(ana).epsilon(1e-8));
  // equalization: B+ = -B- at the crossing
  const double bp = worst_case_positive(num, tp, 1.0).value;
  const double bm = worst_case_negative(num, tp, 1.0).value;
  CHECK(bp + bm == doctest::Approx(0.0).epsilon(1e-12));

  const RegressorSequence gen = generate_with_moments(100, {0.0, 3.0, 1e-8}, 1);
  CHECK(minimax_a_numeric(gen, 1.0) ==
        doctest::Approx(a_star_analytic(gen.kurtosis, 100)).epsilon(1e-8));
}

TEST_CASE("minimax scale ignores the bound U") {
  Rng rng(41);
  const RegressorSequence reg = standardize(rng.normal_vector(50));
  CHECK(std::abs(minimax_a_numeric(reg, 1.0) - minimax_a_numeric(reg, 9.0)) <=
        1e-10);
}

TEST_CASE("closed-form minimax scale") {
  CHECK(a_star_analytic(3.0, 100) == doctest::Approx(4.0 / 0.96).epsilon(1e-15));
  CHECK(a_star_analytic(4.0, 100) == doctest::Approx(5.0 / 0.95).epsilon(1e-15));
  CHECK_THROWS_AS(a_star_analytic(9.0, 10), DegenerateSampleSize);
  CHECK_THROWS_AS(a_star_analytic(10.0, 10), DegenerateSampleSize);
}

TEST_CASE("limiting normal-regressor curves") {
  CHECK(normal_asymptotic_root(0.0) == 1.0);  // (1+0+sqrt(9))/4
  const AsymptoticBiases b0 = normal_asymptotic_biases(0.0);
  CHECK(b0.minus_b_minus ==
        doctest::Approx(4.656832174719664).epsilon(1e-12));
  const AsymptoticBiases b2 = normal_asymptotic_biases(2.0);
  CHECK(b2.minus_b_minus ==
        doctest::Approx(3.231986238332231).epsilon(1e-12));
  const AsymptoticBiases b4 = normal_asymptotic_biases(4.0);
  CHECK(b4.b_plus == doctest::Approx(2.175260853762625).epsilon(1e-12));
  CHECK(b4.b_plus == doctest::Approx(b4.minus_b_minus).epsilon(1e-12));
  // the two curves differ by exactly a - 4, so they cross at a = 4
  for (double a = 0.0; a <= 10.0; a += 0.25) {
    const AsymptoticBiases b = normal_asymptotic_biases(a);
    CHECK(b.b_plus - b.minus_b_minus ==
          doctest::Approx(a - 4.0).epsilon(1e-12));
  }
}

TEST_CASE("large-T performance triple") {
  const PerformanceTriple p = asymptotic_performance(3.0);
  CHECK(p.eicker_white == doctest::Approx(14.0 / 3.0).epsilon(1e-14));
  CHECK(p.hinkley == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(p.minimax == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  for (double k = 1.05; k <= 100.0; k += 0.55) {
    CHECK(asymptotic_performance(k).minimax < 1.0);
  }
  CHECK_THROWS_AS(asymptotic_performance(1.0), InvalidInput);
  CHECK_THROWS_AS(asymptotic_performance(0.5), InvalidInput);
}

TEST_CASE("three-level polynomial root and sign contract") {
  // a=0 makes c=1 for any T, so r+ = sqrt(2)-1 exactly
  CHECK(three_point_root(0.0, 96) ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  // designs with M^2 on either side of r+ put opposite signs on p(+-M)
  const double a = 4.5;
  const double rp = three_point_root(a, 18);  // approx 2.08 at this c
  CHECK(rp > 2.0);
  CHECK(rp < 3.0);
  const RegressorSequence below = three_point_sequence(16, std::sqrt(2.0));
  CHECK(build_polynomial(a, below).eval(std::sqrt(2.0)) > 0.0);
  const RegressorSequence above = three_point_sequence(18, std::sqrt(3.0));
  CHECK(build_polynomial(a, above).eval(std::sqrt(3.0)) < 0.0);
}

TEST_CASE("three-level closed forms match the generic machinery") {
  const Eigen::Index t = 18;
  const double m2 = 3.0;
  const RegressorSequence tp = three_point_sequence(t, std::sqrt(m2));
  const double scale = m2 * 18.0 * 18.0 * tp.s_squared;  // u = 1
  for (const double a : {0.0, 1.0, 2.5, 4.0}) {
    const ThreePointBiases cf = three_point_closed_form(a, t, m2);
    CHECK(scale * worst_case_positive(a, tp, 1.0).value ==
          doctest::Approx(cf.scaled_b_plus).epsilon(1e-12));
    CHECK(-scale * worst_case_negative(a, tp, 1.0).value ==
          doctest::Approx(cf.scaled_minus_b_minus).epsilon(1e-12));
  }
  // valid only while p(+-M) < 0: a must stay below M^2 + 2 - 1/M^2
  CHECK_THROWS_AS(three_point_closed_form(4.7, t, m2), InvalidInput);
  CHECK_THROWS_AS(three_point_closed_form(-0.5, t, m2), InvalidInput);
}

TEST_CASE("normalization parsing and arithmetic") {
  CHECK(parse_normalization("raw") == Normalization::Raw);
  CHECK(parse_normalization("t2s2-over-u") ==
        Normalization::TSquaredSSquaredOverU);
  CHECK(parse_normalization("t-over-u") == Normalization::TOverU);
  CHECK_THROWS_AS(parse_normalization("bogus"), InvalidInput);
  for (const Normalization n :
       {Normalization::Raw, Normalization::TSquaredSSquaredOverU,
        Normalization::TOverU}) {
    CHECK(parse_normalization(normalization_name(n)) == n);
  }
  CHECK(apply_normalization(0.5, Normalization::Raw, 10, 2.0, 4.0) == 0.5);
  CHECK(apply_normalization(0.5, Normalization::TSquaredSSquaredOverU, 10, 2.0,
                            4.0) == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(apply_normalization(0.5, Normalization::TOverU, 10, 2.0, 4.0) ==
        doctest::Approx(1.25).epsilon(1e-15));
}
