#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hetbias/bias.hpp"
#include "hetbias/regressor.hpp"

namespace hetbias {

// Brute-force counterparts of the analytic formulas, kept deliberately
// independent of the closed forms they cross-check.

// Hat matrix of the design [1 x] built from the raw regressor, via a
// dense least-squares solve.
Eigen::MatrixXd dense_hat_matrix(const RegressorSequence& reg);

// diag((I - H) diag(sigma_sq) (I - H)') from the dense hat matrix.
Eigen::VectorXd dense_expected_sq_residuals(const RegressorSequence& reg,
                                            const VariancePattern& var);

// Exhaustive maximum / minimum of the bias over all 2^T vertices of the
// variance box [0, U]^T. Only usable for small T.
struct VertexExtremes {
  double max_bias = 0.0;
  double min_bias = 0.0;
};
VertexExtremes enumerate_vertices(const EstimatorSpec& spec,
                                  const RegressorSequence& reg, double bound_u);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double max_error = 0.0;
  std::string detail;
};

// Full self-check battery; `reps` sizes the Monte Carlo check.
std::vector<ValidationCheck> run_validation(int reps, std::uint64_t seed);

}  // namespace hetbias
