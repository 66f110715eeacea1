#pragma once

#include <Eigen/Dense>

namespace numgeo {

/// Gaussian product-kernel density of 2-D points evaluated on a regular grid.
/// density(i, j) is the value at (grid_x(i), grid_y(j)); the grid is
/// renormalized so that density.sum() * cell_area() == 1.
struct DensityGrid {
  Eigen::VectorXd grid_x;
  Eigen::VectorXd grid_y;
  Eigen::MatrixXd density;
  double bandwidth_x = 0.0;
  double bandwidth_y = 0.0;
  /// Largest t with mass{density >= t} >= 0.80.
  double level80 = 0.0;

  double cell_area() const;
  double mass() const;
  double mass_above(double level) const;
};

inline constexpr double kTopDensityMass = 0.80;

/// Scott bandwidths h_j = sigma_j * n^(-1/6); the grid spans data +- 3h.
/// Requires n >= 5 and grid_size >= 8. Throws Error(degenerate) when either
/// coordinate has zero variance.
DensityGrid kde_density(const Eigen::MatrixXd& points, Eigen::Index grid_size);

/// Number of 4-connected components of {density >= level}.
int superlevel_components(const DensityGrid& grid, double level);

/// Grid location of the density maximum.
Eigen::Vector2d density_peak(const DensityGrid& grid);

/// Rolls-Tovee sparseness on absolute values: (mean |v|)^2 / mean(v^2), in
/// (0, 1]. 1 when all |v_i| are equal, 1/d for a one-hot vector.
/// Throws Error(zero_row) for the zero vector.
double sparseness(const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace numgeo
