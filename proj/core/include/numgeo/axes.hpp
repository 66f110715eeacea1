#pragma once

#include <span>

#include <Eigen/Dense>

namespace numgeo {

/// Minimum-norm least-squares w with X_c w ~ values_c (both centered), via
/// the SVD pseudo-inverse, normalized to unit length.
/// Throws Error(degenerate) for constant values or a zero solution.
Eigen::VectorXd magnitude_axis(const Eigen::MatrixXd& x, std::span<const double> values);

/// Unit vector from the class-0 centroid to the class-1 centroid.
/// Throws Error(empty_class) or Error(zero_difference).
Eigen::VectorXd category_axis(const Eigen::MatrixXd& x, std::span<const int> labels);

/// Angle between two undirected axes, arccos(|u.v|) in degrees, in [0, 90].
double axis_angle(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// n x 2 coordinates of the centered rows: column 0 along axis1, column 1
/// along axis2 after Gram-Schmidt against axis1.
/// Throws Error(parallel_axes) when axis2 has no component orthogonal to axis1.
Eigen::MatrixXd project_2d(const Eigen::MatrixXd& x, const Eigen::VectorXd& axis1, const Eigen::VectorXd& axis2);

}  // namespace numgeo
