#include "numgeo/procrustes.hpp"

#include <algorithm>
#include <numeric>

#include "numgeo/error.hpp"

namespace numgeo {

namespace {

struct Standardized {
  Eigen::MatrixXd data;
  Eigen::RowVectorXd mean;
  double norm = 0.0;
};

Standardized standardize(const Eigen::MatrixXd& m, const char* name) {
  Standardized s;
  s.mean = m.colwise().mean();
  s.data = m.rowwise() - s.mean;
  s.norm = s.data.norm();
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if (!(s.norm > 1e-14 * scale * std::sqrt(static_cast<double>(m.size())))) {
    throw Error(Errc::degenerate, std::string(name) + " has all rows identical");
  }
  s.data /= s.norm;
  return s;
}

void check_shapes(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw Error(Errc::invalid_argument, "procrustes inputs differ in shape");
  }
  if (x.rows() < 2 || x.cols() < 1) throw Error(Errc::invalid_argument, "procrustes needs at least 2 rows");
}

// Row-space factors: X^T = Qx Rx, so X^T Y = Qx (Rx Ry^T) Qy^T and the
// singular values of the d x d product are those of the small n x n core.
Eigen::MatrixXd row_factor(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m.transpose());
  const auto k = std::min(m.rows(), m.cols());
  return qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
}

double nuclear_norm(const Eigen::MatrixXd& core) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(core).singularValues().sum();
}

double disparity_from_trace(double trace) { return std::clamp(1.0 - trace * trace, 0.0, 1.0); }

}  // namespace

ProcrustesResult procrustes(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const ProcrustesOptions& options) {
  check_shapes(x, y);
  const auto sx = standardize(x, "X");
  const auto sy = standardize(y, "Y");

  ProcrustesResult result;
  double trace = 0.0;
  if (options.compute_rotation) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(sx.data.transpose() * sy.data, Eigen::ComputeFullU | Eigen::ComputeFullV);
    result.rotation = svd.matrixU() * svd.matrixV().transpose();
    trace = svd.singularValues().sum();
  } else {
    trace = nuclear_norm(row_factor(sx.data) * row_factor(sy.data).transpose());
  }
  result.disparity = disparity_from_trace(trace);
  result.scale = trace * sy.norm / sx.norm;
  if (options.compute_rotation) {
    result.translation = sy.mean - result.scale * sx.mean * result.rotation;
  }
  return result;
}

PermutationBaseline procrustes_permutation_baseline(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                                    std::size_t permutations, RngSeed seed) {
  check_shapes(x, y);
  if (permutations < 99) throw Error(Errc::invalid_argument, "baseline needs at least 99 permutations");
  const auto sx = standardize(x, "X");
  const auto sy = standardize(y, "Y");

  // Permuting Y's rows permutes the columns of its row factor; centering and
  // norm are unchanged, so the factors are computed once.
  const Eigen::MatrixXd rx = row_factor(sx.data);
  const Eigen::MatrixXd ry = row_factor(sy.data);
  const auto n = static_cast<std::size_t>(y.rows());

  std::vector<Eigen::Index> order(n);
  PermutationBaseline out;
  out.disparities.reserve(permutations);
  Eigen::MatrixXd permuted(ry.rows(), ry.cols());
  for (std::size_t k = 0; k < permutations; ++k) {
    CounterRng rng(seed, k);
    bool identity = true;
    while (identity) {
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      rng.shuffle(order.begin(), order.end());
      for (std::size_t i = 0; i < n && identity; ++i) identity = order[i] == static_cast<Eigen::Index>(i);
    }
    for (std::size_t i = 0; i < n; ++i) permuted.col(static_cast<Eigen::Index>(i)) = ry.col(order[i]);
    out.disparities.push_back(disparity_from_trace(nuclear_norm(rx * permuted.transpose())));
  }
  out.mean = std::accumulate(out.disparities.begin(), out.disparities.end(), 0.0) /
             static_cast<double>(out.disparities.size());
  const auto [lo, hi] = std::minmax_element(out.disparities.begin(), out.disparities.end());
  out.min = *lo;
  out.max = *hi;
  return out;
}

}  // namespace numgeo
