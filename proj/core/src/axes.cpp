#include "numgeo/axes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "numgeo/error.hpp"

namespace numgeo {

namespace {

void check_unit(const Eigen::VectorXd& v, const char* name) {
  if (std::abs(v.norm() - 1.0) > 1e-6) {
    throw Error(Errc::invalid_argument, std::string(name) + " is not a unit vector");
  }
}

}  // namespace

Eigen::VectorXd magnitude_axis(const Eigen::MatrixXd& x, std::span<const double> values) {
  if (static_cast<Eigen::Index>(values.size()) != x.rows()) {
    throw Error(Errc::invalid_argument, "one value per row required");
  }
  if (x.rows() < 2) throw Error(Errc::invalid_argument, "magnitude axis needs at least 2 rows");
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), x.rows());
  if (y.maxCoeff() == y.minCoeff()) throw Error(Errc::degenerate, "values are constant");
  y.array() -= y.mean();
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double tol = s.size() > 0 ? s(0) * static_cast<double>(std::max(x.rows(), x.cols())) *
                                        std::numeric_limits<double>::epsilon()
                                  : 0.0;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= tol) break;
    w += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(y) / s(i));
  }
  const double norm = w.norm();
  if (!(norm > 0.0)) throw Error(Errc::degenerate, "regression has no non-trivial solution");
  return w / norm;
}

Eigen::VectorXd category_axis(const Eigen::MatrixXd& x, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
    throw Error(Errc::invalid_argument, "one label per row required");
  }
  Eigen::RowVectorXd sum0 = Eigen::RowVectorXd::Zero(x.cols());
  Eigen::RowVectorXd sum1 = Eigen::RowVectorXd::Zero(x.cols());
  Eigen::Index n0 = 0, n1 = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const int label = labels[static_cast<std::size_t>(r)];
    if (label == 1) {
      sum1 += x.row(r);
      ++n1;
    } else if (label == 0) {
      sum0 += x.row(r);
      ++n0;
    } else {
      throw Error(Errc::invalid_argument, "labels must be 0 or 1");
    }
  }
  if (n0 == 0 || n1 == 0) throw Error(Errc::empty_class, "both classes need at least one row");
  const Eigen::VectorXd diff = (sum1 / static_cast<double>(n1) - sum0 / static_cast<double>(n0)).transpose();
  const double norm = diff.norm();
  const double scale = std::max(x.cwiseAbs().maxCoeff(), 1e-300);
  if (!(norm > 1e-14 * scale)) throw Error(Errc::zero_difference, "class centroids coincide");
  return diff / norm;
}

double axis_angle(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) throw Error(Errc::invalid_argument, "axes differ in dimension");
  check_unit(u, "u");
  check_unit(v, "v");
  const double c = std::clamp(std::abs(u.dot(v)), 0.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

Eigen::MatrixXd project_2d(const Eigen::MatrixXd& x, const Eigen::VectorXd& axis1, const Eigen::VectorXd& axis2) {
  if (axis1.size() != x.cols() || axis2.size() != x.cols()) {
    throw Error(Errc::invalid_argument, "axes must match the embedding dimension");
  }
  check_unit(axis1, "axis1");
  check_unit(axis2, "axis2");
  Eigen::VectorXd second = axis2 - axis1 * axis1.dot(axis2);
  const double norm = second.norm();
  if (norm < 1e-9) throw Error(Errc::parallel_axes, "axis2 is parallel to axis1");
  second /= norm;
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd out(x.rows(), 2);
  out.col(0) = centered * axis1;
  out.col(1) = centered * second;
  return out;
}

}  // namespace numgeo
