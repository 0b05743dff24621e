#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "hetbias/errors.hpp"
#include "hetbias/inference.hpp"
#include "hetbias/minimax.hpp"
#include "hetbias/numeric.hpp"

using namespace hetbias;

namespace {

// Same observations as tests/fixtures/audit_fixture.csv, inlined so the
// oracle checks do not depend on the working directory.
RegressionDataset fixture_dataset() {
  const double xs[] = {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0,  4.5, 5.0, 5.5,
                       6.0, 6.5, 7.0, 7.5, 8.0, 8.5, 9.0,  9.5, 10.0, 13.0};
  const double ys[] = {5.42,  6.31,  8.33,  8.93,  11.11, 12.78, 13.56,
                       15.55, 17.61, 18.27, 19.64, 21.99, 22.92, 24.67,
                       25.48, 27.88, 29.24, 29.89, 32.09, 40.87};
  RegressionDataset data;
  data.y = Eigen::Map<const Eigen::VectorXd>(ys, 20);
  data.x = Eigen::Map<const Eigen::VectorXd>(xs, 20);
  return data;
}

const double kNoise[] = {0.3, -0.7, 0.2, 0.9,  -0.4, 0.6, -0.1, 0.8,  -0.5, 0.2,
                         -0.9, 0.4, 0.1, -0.6, 0.7,  -0.2, 0.5, -0.8, 0.3, -0.3};

}  // namespace

TEST_CASE("ols fit reproduces reference coefficients and orthogonality") {
  const OlsFit fit = ols_fit(fixture_dataset());
  CHECK(fit.beta1 == doctest::Approx(2.0895534290270978).epsilon(1e-12));
  CHECK(fit.beta2 == doctest::Approx(2.9850972886762381).epsilon(1e-12));
  CHECK(fit.reg.t_count == 20);
  CHECK(fit.reg.s_squared == doctest::Approx(9.796875).epsilon(1e-14));
  CHECK(fit.reg.skewness == doctest::Approx(0.32675034429444727).epsilon(1e-12));
  CHECK(fit.reg.kurtosis == doctest::Approx(2.4038567493112946).epsilon(1e-12));
  const double scale = fit.residuals.cwiseAbs().sum();
  CHECK(std::abs(csum(fit.residuals)) <= 1e-9 * scale);
  CHECK(std::abs(cdot(fit.reg.z, fit.residuals)) <= 1e-9 * scale);
}

TEST_CASE("variance report reproduces frozen reference values") {
  const HccmeReport rep = hccme_report(fixture_dataset());
  CHECK(rep.beta1 == doctest::Approx(2.0895534290270978).epsilon(1e-12));
  CHECK(rep.beta2 == doctest::Approx(2.9850972886762381).epsilon(1e-12));
  CHECK(rep.t_count == 20);
  CHECK(rep.kurtosis_used == doctest::Approx(2.4038567493112946).epsilon(1e-12));
  CHECK(rep.a_star_used == doctest::Approx(4.1019852599428992).epsilon(1e-12));
  CHECK_FALSE(rep.degenerate_fallback);

  REQUIRE(rep.entries.size() == 4);
  CHECK(rep.entries[0].label == "EW");
  CHECK(rep.entries[0].a == 0.0);
  CHECK(rep.entries[0].variance_estimate ==
        doctest::Approx(0.00049006688561015839).epsilon(1e-12));
  CHECK(rep.entries[0].std_error ==
        doctest::Approx(0.022137454361560147).epsilon(1e-12));
  CHECK(rep.entries[1].label == "Hinkley");
  CHECK(rep.entries[1].a == 2.0);
  CHECK(rep.entries[1].variance_estimate ==
        doctest::Approx(0.0005390735741711742).epsilon(1e-12));
  CHECK(rep.entries[1].std_error ==
        doctest::Approx(0.023217958010367194).epsilon(1e-12));
  CHECK(rep.entries[2].label == "MinimaxFinite");
  CHECK(rep.entries[2].a == doctest::Approx(4.1019852599428992).epsilon(1e-12));
  CHECK(rep.entries[2].variance_estimate ==
        doctest::Approx(0.00059057924266810798).epsilon(1e-12));
  CHECK(rep.entries[2].std_error ==
        doctest::Approx(0.024301836199516036).epsilon(1e-12));
  CHECK(rep.entries[3].label == "MinimaxAsymptotic");
  CHECK(rep.entries[3].a == doctest::Approx(3.4038567493112946).epsilon(1e-12));
  CHECK(rep.entries[3].variance_estimate ==
        doctest::Approx(0.00057347275942006362).epsilon(1e-12));
  CHECK(rep.entries[3].std_error ==
        doctest::Approx(0.023947291275216571).epsilon(1e-12));

  CHECK(rep.interval_low == doctest::Approx(2.937202706125805).epsilon(1e-12));
  CHECK(rep.interval_high == doctest::Approx(3.0329918712266712).epsilon(1e-12));
  CHECK(rep.significant);
  CHECK_FALSE(rep.worst_case_bias_bound.has_value());
}

TEST_CASE("bound argument adds the worst-case bias bound") {
  const RegressionDataset data = fixture_dataset();
  const HccmeReport rep = hccme_report(data, 1.0);
  REQUIRE(rep.worst_case_bias_bound.has_value());
  const OlsFit fit = ols_fit(data);
  const double bp = worst_case_positive(rep.a_star_used, fit.reg, 1.0).value;
  const double bm = worst_case_negative(rep.a_star_used, fit.reg, 1.0).value;
  CHECK(*rep.worst_case_bias_bound ==
        doctest::Approx(std::max(bp, -bm)).epsilon(1e-12));
  CHECK_THROWS_AS((void)hccme_report(data, 0.0), InvalidInput);
}

TEST_CASE("an exact linear law gives a zero-width significant interval") {
  RegressionDataset data = fixture_dataset();
  data.y = 1.0 + 2.0 * data.x.array();
  const HccmeReport rep = hccme_report(data);
  CHECK(rep.beta2 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.interval_high - rep.interval_low ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK(rep.significant);
}

TEST_CASE("degenerate regressors and malformed datasets are rejected") {
  RegressionDataset constant = fixture_dataset();
  constant.x.setConstant(3.0);
  CHECK_THROWS_AS((void)ols_fit(constant), ConstantRegressor);

  RegressionDataset short_y = fixture_dataset();
  short_y.y.conservativeResize(19);
  CHECK_THROWS_AS((void)ols_fit(short_y), LengthMismatch);

  RegressionDataset bad_w = fixture_dataset();
  bad_w.w_columns.resize(19, 1);
  bad_w.w_columns.setOnes();
  CHECK_THROWS_AS((void)screening(bad_w), LengthMismatch);
}

TEST_CASE("screening separates direct, spurious, and proxy regressors") {
  const double x1v[] = {0.7, -1.2, 0.4,  1.9, -0.3, 0.8, -1.5, 0.2,  1.1, -0.6,
                        1.4, -0.9, 0.5,  -1.8, 0.3, 1.6, -0.4, 0.9, -1.1, 0.6};
  const double dv[] = {0.42, -0.19, 0.33, -0.57, 0.11,  0.28, -0.44,
                       0.05, 0.61,  -0.23, -0.36, 0.49, -0.08, 0.17,
                       -0.52, 0.38, 0.24,  -0.61, 0.09, -0.13};
  const double xnv[] = {0.12, -0.41, 0.33, -0.05, 0.27,  -0.18, 0.09,
                        -0.36, 0.22, -0.14, 0.31, -0.27, 0.04,  -0.09,
                        0.18,  -0.33, 0.25, -0.07, 0.15, -0.21};

  SUBCASE("regressor with its own effect -> Significant") {
    RegressionDataset data;
    data.x.resize(20);
    data.y.resize(20);
    data.w_columns.resize(20, 1);
    for (int i = 0; i < 20; ++i) {
      data.x[i] = x1v[i];
      data.w_columns(i, 0) = (i % 2 == 0) ? 1.0 : -1.0;
      data.y[i] = 5.0 * x1v[i] + 0.01 * kNoise[i];
    }
    const ScreeningResult r = screening(data);
    CHECK(r.verdict == ScreeningVerdict::Significant);
    CHECK(screening_verdict_name(r.verdict) == "Significant");
    CHECK(r.step1.significant);
    CHECK(r.step1.interval_low ==
          doctest::Approx(4.997807662680198).epsilon(1e-10));
    CHECK(r.step1.interval_high ==
          doctest::Approx(5.0031128120417945).epsilon(1e-10));
    REQUIRE(r.step2.has_value());
    CHECK(r.step2->significant);
    CHECK(r.step2->interval_low ==
          doctest::Approx(4.9522312825785315).epsilon(1e-10));
    CHECK(r.step2->interval_high ==
          doctest::Approx(5.044949354745085).epsilon(1e-10));
  }

  SUBCASE("noise regressor -> Insignificant, no second step") {
    RegressionDataset data;
    data.x.resize(20);
    data.y.resize(20);
    data.w_columns.resize(20, 1);
    for (int i = 0; i < 20; ++i) {
      data.x[i] = xnv[i];
      data.w_columns(i, 0) = i + 1.0;
      data.y[i] = 4.0 + 2.0 * (i + 1.0) + 0.5 * kNoise[i];
    }
    const ScreeningResult r = screening(data);
    CHECK(r.verdict == ScreeningVerdict::Insignificant);
    CHECK_FALSE(r.step1.significant);
    CHECK(r.step1.interval_low ==
          doctest::Approx(-27.007763188456696).epsilon(1e-10));
    CHECK(r.step1.interval_high ==
          doctest::Approx(22.156778810871668).epsilon(1e-10));
    CHECK_FALSE(r.step2.has_value());
  }

  SUBCASE("proxy for a control -> Ambiguous") {
    RegressionDataset data;
    data.x.resize(20);
    data.y.resize(20);
    data.w_columns.resize(20, 1);
    for (int i = 0; i < 20; ++i) {
      const double w = i + 1.0;
      data.w_columns(i, 0) = w;
      data.x[i] = w + 0.15 * dv[i];
      data.y[i] = 1.0 + 2.0 * w + 0.3 * kNoise[i];
    }
    const ScreeningResult r = screening(data);
    CHECK(r.verdict == ScreeningVerdict::Ambiguous);
    CHECK(r.step1.significant);
    CHECK(r.step1.interval_low ==
          doctest::Approx(1.9849987708690409).epsilon(1e-10));
    CHECK(r.step1.interval_high ==
          doctest::Approx(2.011729470731765).epsilon(1e-10));
    REQUIRE(r.step2.has_value());
    CHECK_FALSE(r.step2->significant);
    CHECK(r.step2->interval_low ==
          doctest::Approx(-0.012575821512966764).epsilon(1e-10));
    CHECK(r.step2->interval_high ==
          doctest::Approx(0.01260921402346232).epsilon(1e-10));
  }

  SUBCASE("duplicate controls -> RankDeficient; none -> InvalidInput") {
    RegressionDataset data;
    data.x.resize(20);
    data.y.resize(20);
    data.w_columns.resize(20, 2);
    for (int i = 0; i < 20; ++i) {
      data.x[i] = x1v[i];
      data.w_columns(i, 0) = i + 1.0;
      data.w_columns(i, 1) = i + 1.0;
      data.y[i] = 5.0 * x1v[i] + 0.01 * kNoise[i];
    }
    CHECK_THROWS_AS((void)screening(data), RankDeficient);
    data.w_columns.resize(20, 0);
    CHECK_THROWS_AS((void)screening(data), InvalidInput);
  }
}
