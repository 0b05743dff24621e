#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace hetbias {

// Compensated (Neumaier) summation. Keeps a running error term so that
// long sums of mixed-magnitude doubles stay accurate to ~1 ulp of the
// true result.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Compensated sum of the entries of v.
double csum(const Eigen::Ref<const Eigen::VectorXd>& v);

// Compensated sum of elementwise products, sum_t a_t * b_t.
double cdot(const Eigen::Ref<const Eigen::VectorXd>& a,
            const Eigen::Ref<const Eigen::VectorXd>& b);

// Mean, and central moments 2..4 of v (divisor n), all via compensated
// accumulation.
struct MomentSummary {
  double mean;
  double m2;
  double m3;
  double m4;
};
MomentSummary central_moments(const Eigen::Ref<const Eigen::VectorXd>& v);

// Sample skewness m3 / m2^(3/2) and kurtosis m4 / m2^2 of v.
// Throws NumericError if v is constant.
double sample_skewness(const Eigen::Ref<const Eigen::VectorXd>& v);
double sample_kurtosis(const Eigen::Ref<const Eigen::VectorXd>& v);

// Standard normal CDF, evaluated via erfc for accuracy in the tails.
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x);

// Format a double with up to 17 significant digits, shortest form that
// round-trips is not required; fixed 17-digit general format keeps CSV
// and JSON output byte-stable across platforms. NaN renders as "nan".
std::string format_double(double x);

}  // namespace hetbias
