#include "hetbias/numeric.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "hetbias/errors.hpp"

namespace hetbias {

double csum(const Eigen::Ref<const Eigen::VectorXd>& v) {
  CompensatedSum s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s.add(v[i]);
  return s.value();
}

double cdot(const Eigen::Ref<const Eigen::VectorXd>& a,
            const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw InvalidInput("cdot: length mismatch");
  CompensatedSum s;
  for (Eigen::Index i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

MomentSummary central_moments(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const Eigen::Index n = v.size();
  if (n == 0) throw InvalidInput("central_moments: empty vector");
  const double mean = csum(v) / static_cast<double>(n);
  CompensatedSum s2, s3, s4;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = v[i] - mean;
    const double d2 = d * d;
    s2.add(d2);
    s3.add(d2 * d);
    s4.add(d2 * d2);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  return {mean, s2.value() * inv_n, s3.value() * inv_n, s4.value() * inv_n};
}

double sample_skewness(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const MomentSummary m = central_moments(v);
  if (m.m2 <= 0.0) throw NumericError("sample_skewness: zero variance");
  return m.m3 / std::pow(m.m2, 1.5);
}

double sample_kurtosis(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const MomentSummary m = central_moments(v);
  if (m.m2 <= 0.0) throw NumericError("sample_kurtosis: zero variance");
  return m.m4 / (m.m2 * m.m2);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779399461;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", x);
  assert(n > 0 && n < static_cast<int>(sizeof(buf)));
  return std::string(buf, static_cast<size_t>(n));
}

}  // namespace hetbias
