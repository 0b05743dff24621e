#include "hetbias/regressor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "hetbias/errors.hpp"
#include "hetbias/numeric.hpp"
#include "hetbias/rng.hpp"

namespace hetbias {

namespace {

RegressorSequence finalize(const Eigen::Ref<const Eigen::VectorXd>& raw,
                           Eigen::VectorXd z, double s_squared) {
  const Eigen::Index t = raw.size();
  const double dt = static_cast<double>(t);

  // Refinement pass: remove residual rounding in the first pass so the
  // stored z meets the 1e-10 sum invariants even when the raw values
  // have a huge mean and tiny spread.
  const double zm = csum(z) / dt;
  z.array() -= zm;
  const double zvar = cdot(z, z) / dt;
  if (zvar <= 0.0) throw ConstantRegressor("standardize: zero variance after refinement");
  z /= std::sqrt(zvar);

  CompensatedSum s1, s3, s4;
  for (Eigen::Index i = 0; i < t; ++i) {
    const double zi = z[i];
    const double z2 = zi * zi;
    s1.add(zi);
    s3.add(z2 * zi);
    s4.add(z2 * z2);
  }
  const double sum_z = s1.value();
  const double mean_sq = cdot(z, z) / dt;
  if (std::abs(sum_z) > 1e-10 * dt || std::abs(mean_sq - 1.0) > 1e-10) {
    throw NumericError("standardize: invariant check failed after refinement");
  }

  RegressorSequence out;
  out.raw = raw;
  out.z = std::move(z);
  out.t_count = t;
  out.s_squared = s_squared;
  out.skewness = s3.value() / dt;
  out.kurtosis = s4.value() / dt;
  if (out.kurtosis < 1.0 + out.skewness * out.skewness - 1e-9) {
    throw NumericError("standardize: infeasible sample moments");
  }
  return out;
}

}  // namespace

RegressorSequence standardize(const Eigen::Ref<const Eigen::VectorXd>& raw) {
  const Eigen::Index t = raw.size();
  if (t < 3) throw TooShort("standardize: need at least 3 observations");
  const double dt = static_cast<double>(t);

  const double mean = csum(raw) / dt;
  double max_abs = 0.0;
  double max_dev = 0.0;
  for (Eigen::Index i = 0; i < t; ++i) {
    max_abs = std::max(max_abs, std::abs(raw[i]));
    max_dev = std::max(max_dev, std::abs(raw[i] - mean));
  }
  if (max_dev <= 1e-14 * std::max(1.0, max_abs)) {
    throw ConstantRegressor("standardize: regressor is constant");
  }

  Eigen::VectorXd centered = raw.array() - mean;
  const double s_squared = cdot(centered, centered) / dt;
  if (s_squared <= 0.0) throw ConstantRegressor("standardize: zero variance");
  Eigen::VectorXd z = centered / std::sqrt(s_squared);
  return finalize(raw, std::move(z), s_squared);
}

RegressorSequence three_point_sequence(Eigen::Index t_count, double m) {
  if (t_count < 3) throw TooShort("three_point_sequence: need T >= 3");
  if (!(m > 1.0)) throw IncompatibleShape("three_point_sequence: need m > 1");
  const double k_real = static_cast<double>(t_count) / (2.0 * m * m);
  const double k_round = std::round(k_real);
  if (k_round < 1.0 || std::abs(k_real - k_round) > 1e-12 * std::max(1.0, k_real)) {
    throw IncompatibleShape("three_point_sequence: T/(2m^2) is not a positive integer");
  }
  const Eigen::Index k = static_cast<Eigen::Index>(k_round);
  if (2 * k > t_count) throw IncompatibleShape("three_point_sequence: 2k exceeds T");

  Eigen::VectorXd raw = Eigen::VectorXd::Zero(t_count);
  raw.head(k).setConstant(-m);
  raw.tail(k).setConstant(m);

  // Moments are exact by construction; bypass the ill-conditioned
  // general path and record them directly.
  RegressorSequence out;
  out.raw = raw;
  out.z = raw;
  out.t_count = t_count;
  out.s_squared = 1.0;
  out.skewness = 0.0;
  out.kurtosis = m * m;
  return out;
}

namespace {

// --- sample-moment objective -------------------------------------------

struct SampleMoments {
  double skew;
  double kurt;
};

SampleMoments standardized_moments(const Eigen::VectorXd& q) {
  const Eigen::Index t = q.size();
  const double dt = static_cast<double>(t);
  const double mean = csum(q) / dt;
  CompensatedSum s2, s3, s4;
  for (Eigen::Index i = 0; i < t; ++i) {
    const double d = q[i] - mean;
    const double d2 = d * d;
    s2.add(d2);
    s3.add(d2 * d);
    s4.add(d2 * d2);
  }
  const double m2 = s2.value() / dt;
  if (m2 <= 0.0) return {0.0, 0.0};
  const double m3 = s3.value() / dt;
  const double m4 = s4.value() / dt;
  return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

// --- population pre-solve for the cubic basis --------------------------

// Standard-normal raw moments E v^k for k = 0..12.
constexpr std::array<double, 13> kNormalMoments = {
    1, 0, 1, 0, 3, 0, 15, 0, 105, 0, 945, 0, 10395};

std::optional<SampleMoments> population_cubic_moments(double c, double d) {
  // q(v) = v + c v^2 + d v^3 as coefficient array over powers of v.
  std::vector<double> q = {0.0, 1.0, c, d};
  std::vector<double> power = q;
  std::array<double, 4> raw_moment{};
  for (int k = 1; k <= 4; ++k) {
    double acc = 0.0;
    for (size_t i = 0; i < power.size(); ++i) acc += power[i] * kNormalMoments[i];
    raw_moment[k - 1] = acc;
    if (k < 4) {
      std::vector<double> next(power.size() + q.size() - 1, 0.0);
      for (size_t i = 0; i < power.size(); ++i)
        for (size_t j = 0; j < q.size(); ++j) next[i + j] += power[i] * q[j];
      power = std::move(next);
    }
  }
  const double mu = raw_moment[0];
  const double var = raw_moment[1] - mu * mu;
  if (var <= 1e-12) return std::nullopt;
  const double m3 = raw_moment[2] - 3.0 * mu * raw_moment[1] + 2.0 * mu * mu * mu;
  const double m4 = raw_moment[3] - 4.0 * mu * raw_moment[2] +
                    6.0 * mu * mu * raw_moment[1] - 3.0 * mu * mu * mu * mu;
  const double s = std::sqrt(var);
  return SampleMoments{m3 / (var * s), m4 / (var * var)};
}

std::optional<std::pair<double, double>> population_cubic_solve(double skew,
                                                               double kurt) {
  double c = skew / 6.0;
  double d = (kurt - 3.0) / 24.0;
  for (int it = 0; it < 60; ++it) {
    auto r = population_cubic_moments(c, d);
    if (!r) return std::nullopt;
    const double f0 = r->skew - skew;
    const double f1 = r->kurt - kurt;
    if (std::max(std::abs(f0), std::abs(f1)) < 1e-9) return std::make_pair(c, d);
    const double h = 1e-7;
    auto rcp = population_cubic_moments(c + h, d);
    auto rcm = population_cubic_moments(c - h, d);
    auto rdp = population_cubic_moments(c, d + h);
    auto rdm = population_cubic_moments(c, d - h);
    if (!rcp || !rcm || !rdp || !rdm) return std::nullopt;
    const double j00 = (rcp->skew - rcm->skew) / (2.0 * h);
    const double j10 = (rcp->kurt - rcm->kurt) / (2.0 * h);
    const double j01 = (rdp->skew - rdm->skew) / (2.0 * h);
    const double j11 = (rdp->kurt - rdm->kurt) / (2.0 * h);
    const double det = j00 * j11 - j01 * j10;
    if (std::abs(det) < 1e-13) return std::nullopt;
    const double step_c = (-f0 * j11 + f1 * j01) / det;
    const double step_d = (-j00 * f1 + j10 * f0) / det;
    const double fn = std::hypot(f0, f1);
    double lambda = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 12; ++ls) {
      auto rc = population_cubic_moments(c + lambda * step_c, d + lambda * step_d);
      if (rc && std::hypot(rc->skew - skew, rc->kurt - kurt) < fn) {
        c += lambda * step_c;
        d += lambda * step_d;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) return std::nullopt;
  }
  auto r = population_cubic_moments(c, d);
  if (r && std::abs(r->skew - skew) < 1e-6 && std::abs(r->kurt - kurt) < 1e-6) {
    return std::make_pair(c, d);
  }
  return std::nullopt;
}

// --- damped Newton over one basis pair ---------------------------------

struct NewtonOutcome {
  double c;
  double d;
  bool converged;
};

// Budget is shared across all attempts of one generate call; each call
// decrements it per iteration.
NewtonOutcome damped_newton(const Eigen::VectorXd& v, const Eigen::VectorXd& b1,
                            const Eigen::VectorXd& b2, double skew, double kurt,
                            double c0, double d0, double tol, int iter_cap,
                            int& budget) {
  double c = c0;
  double d = d0;
  const auto eval = [&](double cc, double dd) -> std::pair<double, double> {
    const Eigen::VectorXd q = v + cc * b1 + dd * b2;
    const SampleMoments m = standardized_moments(q);
    return {m.skew - skew, m.kurt - kurt};
  };
  auto [f0, f1] = eval(c, d);
  double best = std::hypot(f0, f1);
  int stall = 0;
  for (int used = 0; used < iter_cap && budget > 0; ++used) {
    if (std::max(std::abs(f0), std::abs(f1)) <= tol) return {c, d, true};
    --budget;
    const double h = 1e-7 * std::max(1.0, std::max(std::abs(c), std::abs(d)));
    auto [cp0, cp1] = eval(c + h, d);
    auto [cm0, cm1] = eval(c - h, d);
    auto [dp0, dp1] = eval(c, d + h);
    auto [dm0, dm1] = eval(c, d - h);
    double j00 = (cp0 - cm0) / (2.0 * h);
    double j10 = (cp1 - cm1) / (2.0 * h);
    double j01 = (dp0 - dm0) / (2.0 * h);
    double j11 = (dp1 - dm1) / (2.0 * h);
    double det = j00 * j11 - j01 * j10;
    const double amax = std::max({std::abs(j00), std::abs(j01), std::abs(j10),
                                  std::abs(j11)});
    if (std::abs(det) < 1e-14 * std::max(1.0, amax * amax)) {
      const double bump = 1e-6 * std::max(1.0, amax);
      j00 += bump;
      j11 += bump;
      det = j00 * j11 - j01 * j10;
      if (det == 0.0) return {c, d, false};
    }
    const double step_c = (-f0 * j11 + f1 * j01) / det;
    const double step_d = (-j00 * f1 + j10 * f0) / det;
    const double fn = std::hypot(f0, f1);
    double lambda = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 15; ++ls) {
      auto [t0, t1] = eval(c + lambda * step_c, d + lambda * step_d);
      if (std::hypot(t0, t1) < fn) {
        c += lambda * step_c;
        d += lambda * step_d;
        f0 = t0;
        f1 = t1;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) return {c, d, false};
    const double nrm = std::hypot(f0, f1);
    stall = (nrm > 0.9 * best) ? stall + 1 : 0;
    best = std::min(best, nrm);
    if (stall >= 5) return {c, d, false};
  }
  auto [g0, g1] = eval(c, d);
  return {c, d, std::max(std::abs(g0), std::abs(g1)) <= tol};
}

struct Attempt {
  const Eigen::VectorXd* b1;
  const Eigen::VectorXd* b2;
  double c0;
  double d0;
};

constexpr std::array<double, 13> kPatternQuantiles = {
    0.5, 0.44, 0.38, 0.32, 0.27, 0.22, 0.18, 0.145, 0.115, 0.09, 0.07, 0.05,
    0.035};

double two_level_skew(double p) {
  return (1.0 - 2.0 * p) / std::sqrt(p * (1.0 - p));
}

}  // namespace

RegressorSequence generate_with_moments(Eigen::Index t_count,
                                        const MomentTarget& target,
                                        std::uint64_t seed) {
  if (t_count < 8) throw TooShort("generate_with_moments: need T >= 8");
  const double skew = target.skewness_target;
  const double kurt = target.kurtosis_target;
  if (!(target.tolerance > 0.0)) {
    throw InfeasibleTarget("generate_with_moments: tolerance must be positive");
  }
  if (kurt < 1.0 + skew * skew + target.tolerance) {
    throw InfeasibleTarget(
        "generate_with_moments: kurtosis target below 1 + skewness^2");
  }

  Rng rng = Rng::derive(seed, /*stream=*/1, /*index=*/0);
  const Eigen::VectorXd v = rng.normal_vector(t_count);
  const Eigen::VectorXd b_sq = v.array().square();
  const Eigen::VectorXd b_cu = v.array().cube();

  // Cubic-basis starts, led by the population-moment pre-solve when the
  // target is inside that family's attainable region.
  std::vector<Attempt> cubic_attempts;
  const auto pop = population_cubic_solve(skew, kurt);
  if (pop) cubic_attempts.push_back({&b_sq, &b_cu, pop->first, pop->second});
  cubic_attempts.push_back({&b_sq, &b_cu, skew / 6.0, (kurt - 3.0) / 24.0});
  cubic_attempts.push_back({&b_sq, &b_cu, 0.0, 0.0});
  cubic_attempts.push_back({&b_sq, &b_cu, skew / 4.0, (kurt - 3.0) / 12.0});

  // Two-level-pattern basis: reorder the quantile grid so patterns whose
  // own skewness sits just beyond the target's are tried first.
  Eigen::VectorXd u(t_count);
  for (Eigen::Index i = 0; i < t_count; ++i) u[i] = normal_cdf(v[i]);
  std::array<double, kPatternQuantiles.size()> ordered = kPatternQuantiles;
  const double want = std::abs(skew) * 1.1 + 0.15;
  std::stable_sort(ordered.begin(), ordered.end(), [&](double a, double b) {
    return std::abs(two_level_skew(a) - want) < std::abs(two_level_skew(b) - want);
  });

  std::vector<Eigen::VectorXd> patterns;
  patterns.reserve(ordered.size());
  std::vector<Attempt> pattern_attempts;
  for (const double p : ordered) {
    const double pp = (skew >= 0.0) ? p : 1.0 - p;
    Eigen::Index n_low = 0;
    for (Eigen::Index i = 0; i < t_count; ++i) n_low += (u[i] < pp) ? 1 : 0;
    if (n_low < 1 || n_low > t_count - 1) continue;
    const double lo = -std::sqrt((1.0 - pp) / pp);
    const double hi = std::sqrt(pp / (1.0 - pp));
    Eigen::VectorXd b2(t_count);
    for (Eigen::Index i = 0; i < t_count; ++i) b2[i] = (u[i] < pp) ? lo : hi;
    patterns.push_back(std::move(b2));
    const Eigen::VectorXd* b2p = &patterns.back();

    const double sp = two_level_skew(pp);
    const double kp = 1.0 + sp * sp;
    std::vector<double> d0s;
    if (std::abs(kp - 3.0) > 0.2) {
      const double lam = std::clamp((kurt - 3.0) / (kp - 3.0), 0.05, 0.93);
      const double dk = std::sqrt(lam / (1.0 - lam));
      d0s.push_back(dk);
      d0s.push_back(2.0 * dk);
    }
    if (skew != 0.0 && sp != 0.0 && skew * sp > 0.0) {
      const double lam =
          std::clamp(std::pow(std::abs(skew / sp), 2.0 / 3.0), 0.05, 0.93);
      d0s.push_back(std::sqrt(lam / (1.0 - lam)));
    }
    if (d0s.empty()) {
      d0s.push_back(1.0);
      d0s.push_back(2.5);
    }
    for (const double d0 : d0s) pattern_attempts.push_back({&b_sq, b2p, 0.0, d0});
  }

  std::vector<Attempt> schedule;
  if (pop) {
    schedule = cubic_attempts;
    schedule.insert(schedule.end(), pattern_attempts.begin(), pattern_attempts.end());
  } else {
    schedule = pattern_attempts;
    schedule.insert(schedule.end(), cubic_attempts.begin(), cubic_attempts.end());
  }

  const double tol = std::min(target.tolerance, 1e-10);
  int budget = 200;
  for (const Attempt& at : schedule) {
    if (budget <= 0) break;
    const NewtonOutcome out = damped_newton(v, *at.b1, *at.b2, skew, kurt,
                                            at.c0, at.d0, tol, 16, budget);
    if (out.converged) {
      const Eigen::VectorXd q = v + out.c * (*at.b1) + out.d * (*at.b2);
      // The generated sequence is the standardized one: re-standardizing
      // its z makes raw itself mean-0 variance-1, so downstream biases
      // are on the s^2 = 1 scale.
      RegressorSequence seq = standardize(standardize(q).z);
      if (std::abs(seq.skewness - skew) <= target.tolerance &&
          std::abs(seq.kurtosis - kurt) <= target.tolerance) {
        return seq;
      }
    }
  }
  throw MomentMatchFailed(
      "generate_with_moments: no basis attempt converged within 200 iterations");
}

}  // namespace hetbias
