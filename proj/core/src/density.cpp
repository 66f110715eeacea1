#include "numgeo/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include "numgeo/error.hpp"

namespace numgeo {

double DensityGrid::cell_area() const {
  const auto gx = grid_x.size();
  const auto gy = grid_y.size();
  return (grid_x(gx - 1) - grid_x(0)) / static_cast<double>(gx - 1) *
         ((grid_y(gy - 1) - grid_y(0)) / static_cast<double>(gy - 1));
}

double DensityGrid::mass() const { return density.sum() * cell_area(); }

double DensityGrid::mass_above(double level) const {
  return (density.array() >= level).select(density.array(), 0.0).sum() * cell_area();
}

DensityGrid kde_density(const Eigen::MatrixXd& points, Eigen::Index grid_size) {
  if (points.cols() != 2) throw Error(Errc::invalid_argument, "kde_density expects n x 2 points");
  const auto n = points.rows();
  if (n < 5) throw Error(Errc::invalid_argument, "kde_density needs at least 5 points");
  if (grid_size < 8) throw Error(Errc::invalid_argument, "grid_size must be >= 8");
  if (!points.allFinite()) throw Error(Errc::non_finite_value, "non-finite point");

  const Eigen::RowVector2d mean = points.colwise().mean();
  const Eigen::MatrixXd centered = points.rowwise() - mean;
  const Eigen::Array2d sd = (centered.colwise().squaredNorm().array() / static_cast<double>(n - 1)).sqrt().transpose();
  for (int j = 0; j < 2; ++j) {
    const double scale = std::max(points.col(j).cwiseAbs().maxCoeff(), 1e-300);
    if (!(sd(j) > 1e-12 * scale)) {
      throw Error(Errc::degenerate, std::string("coordinate ") + (j == 0 ? "x" : "y") + " has zero spread");
    }
  }

  DensityGrid grid;
  const double factor = std::pow(static_cast<double>(n), -1.0 / 6.0);
  grid.bandwidth_x = sd(0) * factor;
  grid.bandwidth_y = sd(1) * factor;

  auto axis = [&](int col, double h) {
    const double lo = points.col(col).minCoeff() - 3.0 * h;
    const double hi = points.col(col).maxCoeff() + 3.0 * h;
    return Eigen::VectorXd::LinSpaced(grid_size, lo, hi).eval();
  };
  grid.grid_x = axis(0, grid.bandwidth_x);
  grid.grid_y = axis(1, grid.bandwidth_y);

  // Separable kernel: density = Kx * Ky^T / n.
  auto kernel = [&](const Eigen::VectorXd& g, int col, double h) {
    Eigen::MatrixXd k(g.size(), n);
    const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
    for (Eigen::Index p = 0; p < n; ++p) {
      k.col(p) = ((g.array() - points(p, col)) / h).square().unaryExpr([norm](double u) {
        return norm * std::exp(-0.5 * u);
      });
    }
    return k;
  };
  grid.density = kernel(grid.grid_x, 0, grid.bandwidth_x) * kernel(grid.grid_y, 1, grid.bandwidth_y).transpose() /
                 static_cast<double>(n);
  grid.density /= grid.mass();

  std::vector<double> cells(grid.density.data(), grid.density.data() + grid.density.size());
  std::sort(cells.begin(), cells.end(), std::greater<>());
  const double area = grid.cell_area();
  double cumulative = 0.0;
  grid.level80 = cells.back();
  for (double c : cells) {
    cumulative += c * area;
    if (cumulative >= kTopDensityMass) {
      grid.level80 = c;
      break;
    }
  }
  return grid;
}

int superlevel_components(const DensityGrid& grid, double level) {
  const auto gx = grid.density.rows();
  const auto gy = grid.density.cols();
  std::vector<char> seen(static_cast<std::size_t>(gx * gy), 0);
  auto index = [gy](Eigen::Index i, Eigen::Index j) { return static_cast<std::size_t>(i * gy + j); };
  int components = 0;
  std::queue<std::pair<Eigen::Index, Eigen::Index>> frontier;
  for (Eigen::Index i = 0; i < gx; ++i) {
    for (Eigen::Index j = 0; j < gy; ++j) {
      if (seen[index(i, j)] || grid.density(i, j) < level) continue;
      ++components;
      seen[index(i, j)] = 1;
      frontier.emplace(i, j);
      while (!frontier.empty()) {
        const auto [ci, cj] = frontier.front();
        frontier.pop();
        const std::pair<Eigen::Index, Eigen::Index> next[] = {{ci - 1, cj}, {ci + 1, cj}, {ci, cj - 1}, {ci, cj + 1}};
        for (const auto& [ni, nj] : next) {
          if (ni < 0 || nj < 0 || ni >= gx || nj >= gy) continue;
          if (seen[index(ni, nj)] || grid.density(ni, nj) < level) continue;
          seen[index(ni, nj)] = 1;
          frontier.emplace(ni, nj);
        }
      }
    }
  }
  return components;
}

Eigen::Vector2d density_peak(const DensityGrid& grid) {
  Eigen::Index i = 0, j = 0;
  grid.density.maxCoeff(&i, &j);
  return {grid.grid_x(i), grid.grid_y(j)};
}

double sparseness(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() == 0) throw Error(Errc::invalid_argument, "sparseness of an empty vector");
  const double peak = v.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) throw Error(Errc::zero_row, "sparseness of the zero vector");
  // Scaling by the peak makes the equal-magnitude and one-hot cases exact.
  const Eigen::ArrayXd u = v.cwiseAbs().array() / peak;
  const double s1 = u.sum();
  const double s2 = u.square().sum();
  return std::min(1.0, s1 * s1 / (static_cast<double>(v.size()) * s2));
}

}  // namespace numgeo
