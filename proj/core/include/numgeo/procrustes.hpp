#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "numgeo/rng.hpp"

namespace numgeo {

/// Alignment of X onto Y. Both configurations are centered and scaled to unit
/// Frobenius norm before fitting, so disparity = min_{s,R} ||s X^ R - Y^||_F^2
/// = 1 - (sum of singular values of X^T Y)^2, which lies in [0, 1].
/// `scale` and `translation` map raw X into Y's frame: Y ~ scale * X * R + 1 t^T.
struct ProcrustesResult {
  double disparity = 0.0;
  Eigen::MatrixXd rotation;      // d x d, empty unless requested
  double scale = 1.0;
  Eigen::RowVectorXd translation;  // empty unless the rotation was requested
};

struct ProcrustesOptions {
  bool compute_rotation = true;
};

/// Throws Error(invalid_argument) for mismatched shapes and
/// Error(degenerate) when either configuration has all rows identical.
ProcrustesResult procrustes(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const ProcrustesOptions& options = {});

struct PermutationBaseline {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> disparities;
};

/// Disparities of X against Y with Y's rows shuffled (identity excluded);
/// permutation k uses CounterRng(seed, k).
PermutationBaseline procrustes_permutation_baseline(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                                    std::size_t permutations, RngSeed seed);

}  // namespace numgeo
