#pragma once

#include <cstddef>
#include <span>

#include "numgeo/rng.hpp"

namespace numgeo {

struct PermutationOptions {
  std::size_t permutations = 10000;
  RngSeed seed{};
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

/// y ~ a * exp(-b * x) + c with b >= 0.
struct ExpFitResult {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double r = 0.0;  // correlation between fitted and observed y
  double p = 1.0;
  std::size_t n = 0;
  double rss = 0.0;
  bool degenerate = false;  // flat target or b pinned at a grid edge
};

/// Product-moment correlation. Throws Error(zero_variance) for a constant
/// input and Error(invalid_argument) for fewer than 3 points or unequal sizes.
double pearson(std::span<const double> x, std::span<const double> y);

/// (1 + #{|r_perm| >= |observed|}) / (perms + 1), permuting y against x.
/// Permutation k draws from CounterRng(seed, k), so the result does not
/// depend on evaluation order. Requires perms >= 99.
double permutation_pvalue(std::span<const double> x, std::span<const double> y, double observed_stat,
                          std::size_t permutations, RngSeed seed);

/// Least squares line with r = pearson(x, y) and a permutation p-value.
/// Throws Error(degenerate) for constant x, Error(zero_variance) for constant y.
FitResult linear_fit(std::span<const double> x, std::span<const double> y, const PermutationOptions& options = {});

/// Grid search over b on [1e-3, 1e2] (200 log-spaced points), closed-form
/// (a, c) at each b, then golden-section refinement of log b.
ExpFitResult exp_fit(std::span<const double> x, std::span<const double> y, const PermutationOptions& options = {});

/// 0 to 3 stars at the 0.05 / 0.01 / 0.001 thresholds.
int significance_stars(double p) noexcept;

}  // namespace numgeo
