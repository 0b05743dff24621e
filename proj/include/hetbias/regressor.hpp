#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace hetbias {

// Centered, standardized regressor values with cached sample moments.
// Invariants (enforced at construction):
//   T >= 3, s_squared > 0,
//   |sum z_t| <= 1e-10 * T, |(1/T) sum z_t^2 - 1| <= 1e-10,
//   kurtosis >= 1 + skewness^2 (moment feasibility).
struct RegressorSequence {
  Eigen::VectorXd raw;   // original units
  Eigen::VectorXd z;     // (x_t - mean) / s, dimensionless
  Eigen::Index t_count;
  double s_squared;      // (1/T) sum (x_t - mean)^2
  double skewness;       // (1/T) sum z_t^3
  double kurtosis;       // (1/T) sum z_t^4
};

struct MomentTarget {
  double skewness_target;
  double kurtosis_target;
  double tolerance = 1e-8;
};

// Center and scale raw values by the divide-by-T standard deviation.
// A refinement pass re-centers and re-scales the computed z so the
// stored moments meet the 1e-10 invariants even for ill-conditioned
// inputs (huge mean, tiny spread).
RegressorSequence standardize(const Eigen::Ref<const Eigen::VectorXd>& raw);

// The discrete three-level sequence: k = T/(2m^2) entries at -m, then
// T-2k zeros, then k entries at +m. Exact moments by construction:
// EZ=0, EZ^2=1, EZ^3=0, EZ^4=m^2, s^2=1.
RegressorSequence three_point_sequence(Eigen::Index t_count, double m);

// Draw T seeded standard normals, reshape them by a two-parameter basis
// transform, and solve for the parameters so the SAMPLE skewness and
// kurtosis of the restandardized sequence hit the target exactly (to
// target.tolerance). Deterministic for a fixed seed.
//
// The solver runs damped Newton over a deterministic schedule of basis
// choices and starting points (see solve notes in regressor.cpp);
// throws MomentMatchFailed once 200 total iterations are spent.
RegressorSequence generate_with_moments(Eigen::Index t_count,
                                        const MomentTarget& target,
                                        std::uint64_t seed);

}  // namespace hetbias
