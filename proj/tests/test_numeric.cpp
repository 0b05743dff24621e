#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "hetbias/errors.hpp"
#include "hetbias/numeric.hpp"

using namespace hetbias;

TEST_CASE("compensated sum recovers cancelled small terms") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);  // naive summation gives 0

  Eigen::VectorXd v(3);
  v << 1e16, 1.0, -1e16;
  CHECK(csum(v) == 1.0);
  CHECK(csum(Eigen::VectorXd()) == 0.0);
}

TEST_CASE("compensated dot product") {
  Eigen::VectorXd a(3), b(3);
  a << 1.0, 2.0, 3.0;
  b << 4.0, 5.0, 6.0;
  CHECK(cdot(a, b) == 32.0);
  Eigen::VectorXd c(2);
  c << 1.0, 2.0;
  CHECK_THROWS_AS(cdot(a, c), InvalidInput);
}

TEST_CASE("sample moments of a small known vector") {
  Eigen::VectorXd v(4);
  v << 1.0, 2.0, 3.0, 4.0;
  // mean 2.5, divide-by-T variance 1.25, symmetric, kurtosis 1.64
  CHECK(sample_skewness(v) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(sample_kurtosis(v) == doctest::Approx(1.64).epsilon(1e-14));

  Eigen::VectorXd flat = Eigen::VectorXd::Constant(5, 3.0);
  CHECK_THROWS_AS(sample_skewness(flat), NumericError);
  CHECK_THROWS_AS(sample_kurtosis(flat), NumericError);
}

TEST_CASE("normal density and distribution") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-15));
  CHECK(normal_pdf(0.0) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-15));
  for (double x : {-2.5, -0.3, 0.7, 3.1}) {
    CHECK(normal_cdf(-x) == doctest::Approx(1.0 - normal_cdf(x)).epsilon(1e-14));
  }
}

TEST_CASE("format_double round-trips and spells specials") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  for (double x : {1.0 / 3.0, 9.796875, -2.0895534290270978, 1e-300, 8.25}) {
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}
