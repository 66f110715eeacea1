#pragma once

#include <Eigen/Dense>

namespace numgeo {

/// Centered PCA. `components` holds orthonormal directions as rows;
/// variances use the n - 1 denominator.
struct PcaResult {
  Eigen::MatrixXd components;          // k x d
  Eigen::VectorXd explained_variance;  // k, descending
  Eigen::RowVectorXd mean;             // d
  double total_variance = 0.0;
  Eigen::Index rank = 0;
  bool rank_deficient = false;  // fewer than the requested k directions were available

  Eigen::Index count() const noexcept { return components.rows(); }
  double explained_ratio() const { return total_variance > 0.0 ? explained_variance.sum() / total_variance : 0.0; }
};

/// Requires n >= 2 and 1 <= k <= min(n - 1, d).
PcaResult pca(const Eigen::MatrixXd& x, Eigen::Index k);

/// Smallest k whose cumulative explained-variance ratio reaches threshold.
Eigen::Index components_for_variance(const Eigen::MatrixXd& x, double threshold);

/// Overlap(A <- B): share of B's total variance captured by A's top-k
/// directions. Throws Error(zero_variance) when B is constant.
double subspace_overlap(const PcaResult& pca_a, const Eigen::MatrixXd& x_b, Eigen::Index k);

struct SvccaResult {
  Eigen::VectorXd rhos;  // non-increasing, each in [0, 1]
  double mean_rho = 0.0;
};

inline constexpr double kDefaultCcaRidge = 1e-8;
inline constexpr double kMaxCcaCondition = 1e12;

/// PCA-reduce both inputs to n_comp dimensions, then canonical correlations
/// from the SVD of the whitened cross-covariance (ridge added to the
/// covariance diagonals). Rows must be aligned. Throws Error(ill_conditioned)
/// if a ridged covariance has condition number above 1e12.
SvccaResult svcca(const Eigen::MatrixXd& x_a, const Eigen::MatrixXd& x_b, Eigen::Index n_comp,
                  double ridge = kDefaultCcaRidge);

}  // namespace numgeo
