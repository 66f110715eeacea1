#include "numgeo/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "numgeo/error.hpp"

namespace numgeo {

namespace {

struct Decomposition {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd centered;
  Eigen::VectorXd singular;  // descending
  Eigen::MatrixXd directions;  // d x r (right singular vectors)
  Eigen::Index rank = 0;
};

Decomposition decompose(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw Error(Errc::invalid_argument, "PCA needs at least 2 rows");
  if (!x.allFinite()) throw Error(Errc::non_finite_value, "PCA input contains non-finite values");
  Decomposition d;
  d.mean = x.colwise().mean();
  d.centered = x.rowwise() - d.mean;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(d.centered, Eigen::ComputeThinV);
  d.singular = svd.singularValues();
  d.directions = svd.matrixV();
  const double tol = d.singular.size() > 0
                         ? d.singular(0) * static_cast<double>(std::max(x.rows(), x.cols())) *
                               std::numeric_limits<double>::epsilon()
                         : 0.0;
  d.rank = (d.singular.array() > tol).count();
  return d;
}

Eigen::MatrixXd scores(const Eigen::MatrixXd& x, Eigen::Index k) {
  const auto d = decompose(x);
  return d.centered * d.directions.leftCols(k);
}

}  // namespace

PcaResult pca(const Eigen::MatrixXd& x, Eigen::Index k) {
  const auto n = x.rows();
  if (k < 1 || k > std::min(n - 1, x.cols())) {
    throw Error(Errc::invalid_argument, "k = " + std::to_string(k) + " outside [1, min(n-1, d)] = [1, " +
                                            std::to_string(std::min(n - 1, x.cols())) + "]");
  }
  const auto d = decompose(x);
  PcaResult out;
  out.mean = d.mean;
  out.rank = d.rank;
  out.total_variance = d.centered.squaredNorm() / static_cast<double>(n - 1);
  const auto kept = std::min(k, d.rank);
  out.rank_deficient = kept < k;
  out.components = d.directions.leftCols(kept).transpose();
  out.explained_variance = d.singular.head(kept).array().square() / static_cast<double>(n - 1);
  return out;
}

Eigen::Index components_for_variance(const Eigen::MatrixXd& x, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(Errc::invalid_argument, "threshold must lie in (0, 1)");
  const auto d = decompose(x);
  const Eigen::ArrayXd var = d.singular.array().square();
  const double total = var.sum();
  if (!(total > 0.0)) throw Error(Errc::zero_variance, "data has no variance");
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < var.size(); ++i) {
    cumulative += var(i);
    if (cumulative / total >= threshold - 1e-12) return i + 1;
  }
  return var.size();
}

double subspace_overlap(const PcaResult& pca_a, const Eigen::MatrixXd& x_b, Eigen::Index k) {
  if (k < 1 || k > pca_a.count()) {
    throw Error(Errc::invalid_argument, "k = " + std::to_string(k) + " exceeds the " +
                                            std::to_string(pca_a.count()) + " available components");
  }
  if (x_b.cols() != pca_a.components.cols()) throw Error(Errc::invalid_argument, "dimension mismatch");
  if (x_b.rows() < 2) throw Error(Errc::invalid_argument, "overlap needs at least 2 rows");
  const Eigen::MatrixXd centered = x_b.rowwise() - x_b.colwise().mean();
  const double total = centered.squaredNorm();
  const double scale = std::max(x_b.cwiseAbs().maxCoeff(), 1e-300);
  if (!(total > 1e-28 * scale * scale * static_cast<double>(x_b.size()))) {
    throw Error(Errc::zero_variance, "B has no variance");
  }
  const double captured = (centered * pca_a.components.topRows(k).transpose()).squaredNorm();
  return std::clamp(captured / total, 0.0, 1.0);
}

namespace {

Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& cov, const char* which) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd w = eig.eigenvalues();
  const double hi = w.maxCoeff();
  const double lo = w.minCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCcaCondition) {
    throw Error(Errc::ill_conditioned, std::string(which) + " covariance condition number " +
                                           std::to_string(lo > 0.0 ? hi / lo : INFINITY) + " exceeds 1e12");
  }
  return eig.eigenvectors() * w.cwiseInverse().cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

SvccaResult svcca(const Eigen::MatrixXd& x_a, const Eigen::MatrixXd& x_b, Eigen::Index n_comp, double ridge) {
  const auto n = x_a.rows();
  if (x_b.rows() != n) throw Error(Errc::invalid_argument, "SVCCA inputs must have aligned rows");
  if (n_comp < 1 || n_comp >= n) {
    throw Error(Errc::invalid_argument, "n_comp = " + std::to_string(n_comp) + " must satisfy 1 <= n_comp < n = " +
                                            std::to_string(n));
  }
  if (n_comp > x_a.cols() || n_comp > x_b.cols()) {
    throw Error(Errc::invalid_argument, "n_comp exceeds the embedding dimension");
  }
  if (!(ridge >= 0.0)) throw Error(Errc::invalid_argument, "ridge must be non-negative");

  const Eigen::MatrixXd a = scores(x_a, n_comp);
  const Eigen::MatrixXd b = scores(x_b, n_comp);
  const double denom = static_cast<double>(n - 1);
  const auto identity = Eigen::MatrixXd::Identity(n_comp, n_comp);
  const Eigen::MatrixXd caa = a.transpose() * a / denom + ridge * identity;
  const Eigen::MatrixXd cbb = b.transpose() * b / denom + ridge * identity;
  const Eigen::MatrixXd cab = a.transpose() * b / denom;

  const Eigen::MatrixXd whitened = inverse_sqrt(caa, "A") * cab * inverse_sqrt(cbb, "B");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(whitened);
  SvccaResult out;
  out.rhos = svd.singularValues().cwiseMax(0.0).cwiseMin(1.0);
  out.mean_rho = out.rhos.mean();
  return out;
}

}  // namespace numgeo
