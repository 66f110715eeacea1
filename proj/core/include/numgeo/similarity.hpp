#pragma once

#include <vector>

#include <Eigen/Dense>

#include "numgeo/embedstore.hpp"
#include "numgeo/stats.hpp"

namespace numgeo {

/// Cosine similarities between the numbers 1..m (index v-1 <-> number v).
/// Effect fits are defined for any m >= 2; mean matrices give m = 9.
struct SimilarityMatrix {
  Eigen::MatrixXd values;

  Eigen::Index size() const noexcept { return values.rows(); }
  double operator()(int i, int j) const { return values(i - 1, j - 1); }
};

SimilarityMatrix cosine_similarity_matrix(const MeanMatrix& mm);
SimilarityMatrix cosine_similarity_matrix(const Eigen::MatrixXd& unit_rows);

/// One unordered pair of numbers i < j with its similarity.
struct NumberPair {
  int i = 0;
  int j = 0;
  double similarity = 0.0;
};

/// Upper-triangle pairs in row-major order (36 for m = 9).
std::vector<NumberPair> upper_pairs(const SimilarityMatrix& s);

/// Similarity regressed on |i - j|.
FitResult fit_distance_effect(const SimilarityMatrix& s, const PermutationOptions& options = {});

/// Similarities z-scored within each |i - j| bin (bins with >= 2 pairs and
/// nonzero spread), pooled and regressed on min(i, j). Throws
/// Error(insufficient_bins) with fewer than 3 usable bins.
FitResult fit_size_effect(const SimilarityMatrix& s, const PermutationOptions& options = {});

/// The normalized values used by fit_size_effect, in upper_pairs order with
/// unusable bins dropped; exposed for reporting and checking.
struct SizeEffectSamples {
  std::vector<double> min_value;
  std::vector<double> z;
  std::size_t usable_bins = 0;
};
SizeEffectSamples size_effect_samples(const SimilarityMatrix& s);

/// exp_fit of similarity against max(i, j) / min(i, j).
ExpFitResult fit_ratio_effect(const SimilarityMatrix& s, const PermutationOptions& options = {});

}  // namespace numgeo
