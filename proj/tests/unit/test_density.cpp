#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "numgeo/density.hpp"
#include "numgeo/error.hpp"
#include "test_util.hpp"

using namespace numgeo;
using numgeo::testing::error_code_of;

namespace {

Eigen::MatrixXd cloud(Eigen::Index n, std::uint64_t seed, double cx = 0.0, double cy = 0.0, double sx = 1.0,
                      double sy = 1.0) {
  Eigen::MatrixXd p = testing::gaussian(n, 2, seed);
  p.col(0) = p.col(0) * sx + Eigen::VectorXd::Constant(n, cx);
  p.col(1) = p.col(1) * sy + Eigen::VectorXd::Constant(n, cy);
  return p;
}

}  // namespace

TEST_CASE("density grid is normalized and has the Scott bandwidth") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto points = cloud(30 + static_cast<Eigen::Index>(seed) * 5, seed, 1.0, -2.0, 0.5 + 0.1 * seed, 2.0);
    const auto grid = kde_density(points, 64);
    CHECK(std::abs(grid.mass() - 1.0) < 1e-6);
    CHECK((grid.density.array() >= 0.0).all());
    const double mass80 = grid.mass_above(grid.level80);
    CHECK(mass80 >= 0.79);
    CHECK(mass80 <= 0.81);

    const auto n = static_cast<double>(points.rows());
    const Eigen::MatrixXd c = points.rowwise() - points.colwise().mean();
    const double sd_x = std::sqrt(c.col(0).squaredNorm() / (n - 1));
    CHECK(std::abs(grid.bandwidth_x - sd_x * std::pow(n, -1.0 / 6.0)) < 1e-12);
    CHECK(std::abs(grid.grid_x(0) - (points.col(0).minCoeff() - 3.0 * grid.bandwidth_x)) < 1e-12);
    CHECK(std::abs(grid.grid_y(63) - (points.col(1).maxCoeff() + 3.0 * grid.bandwidth_y)) < 1e-12);
  }
}

TEST_CASE("level80 is the largest threshold keeping 80% of the mass") {
  const auto grid = kde_density(cloud(50, 4), 40);
  CHECK(grid.mass_above(grid.level80) >= kTopDensityMass);
  // The next larger cell value loses the guarantee.
  double next = INFINITY;
  for (Eigen::Index i = 0; i < grid.density.size(); ++i) {
    const double v = grid.density.data()[i];
    if (v > grid.level80) next = std::min(next, v);
  }
  CHECK(grid.mass_above(next) < kTopDensityMass);
}

TEST_CASE("density values match a direct kernel sum") {
  const auto points = cloud(12, 9);
  const auto grid = kde_density(points, 16);
  const double hx = grid.bandwidth_x, hy = grid.bandwidth_y;
  Eigen::MatrixXd raw(16, 16);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      double acc = 0.0;
      for (Eigen::Index p = 0; p < 12; ++p) {
        const double u = (grid.grid_x(i) - points(p, 0)) / hx;
        const double v = (grid.grid_y(j) - points(p, 1)) / hy;
        acc += std::exp(-0.5 * (u * u + v * v)) / (2.0 * std::numbers::pi * hx * hy);
      }
      raw(i, j) = acc / 12.0;
    }
  }
  raw /= raw.sum() * grid.cell_area();
  CHECK((raw - grid.density).cwiseAbs().maxCoeff() < 1e-12 * raw.maxCoeff());
}

TEST_CASE("unimodal and bimodal shapes") {
  const auto single = cloud(200, 3, 2.0, 5.0, 0.3, 0.3);
  const auto grid = kde_density(single, 64);
  const auto peak = density_peak(grid);
  const Eigen::RowVector2d mean = single.colwise().mean();
  const double step_x = grid.grid_x(1) - grid.grid_x(0);
  const double step_y = grid.grid_y(1) - grid.grid_y(0);
  CHECK(std::abs(peak(0) - mean(0)) <= 1.5 * step_x + 0.1);
  CHECK(std::abs(peak(1) - mean(1)) <= 1.5 * step_y + 0.1);
  CHECK(superlevel_components(grid, grid.level80) == 1);

  Eigen::MatrixXd two(200, 2);
  two.topRows(100) = cloud(100, 5, -6.0, 0.0, 0.4, 0.4);
  two.bottomRows(100) = cloud(100, 6, 6.0, 0.0, 0.4, 0.4);
  const auto bimodal = kde_density(two, 96);
  CHECK(superlevel_components(bimodal, bimodal.level80) == 2);
  CHECK(superlevel_components(bimodal, 0.0) == 1);
}

TEST_CASE("density errors") {
  CHECK(error_code_of([] { kde_density(cloud(4, 1), 32); }) == Errc::invalid_argument);
  CHECK(error_code_of([] { kde_density(cloud(10, 1), 4); }) == Errc::invalid_argument);
  Eigen::MatrixXd flat = cloud(10, 1);
  flat.col(1).setConstant(2.0);
  CHECK(error_code_of([&] { kde_density(flat, 32); }) == Errc::degenerate);
}

TEST_CASE("sparseness closed forms") {
  CHECK(sparseness(Eigen::VectorXd::Constant(7, 0.3)) == 1.0);
  Eigen::VectorXd signs(6);
  signs << 1, -1, 1, -1, -1, 1;
  CHECK(sparseness(2.5 * signs) == 1.0);
  for (int d = 1; d <= 64; ++d) {
    CHECK(sparseness(Eigen::VectorXd::Unit(d, d / 2)) == 1.0 / d);
    CHECK(sparseness(-3.0 * Eigen::VectorXd::Unit(d, 0)) == 1.0 / d);
  }
  CHECK(sparseness(Eigen::VectorXd::Unit(4, 1)) == 0.25);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::VectorXd v = testing::gaussian(32, 1, seed).col(0);
    const double s = sparseness(v);
    // Oracle: the textbook ratio of means.
    const double a = v.cwiseAbs().mean();
    const double b = v.squaredNorm() / 32.0;
    CHECK(std::abs(s - a * a / b) < 1e-12);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    CHECK(std::abs(sparseness(1e-5 * v) - s) < 1e-12);
    CHECK(std::abs(sparseness(4e6 * v) - s) < 1e-12);
  }
  CHECK(error_code_of([] { sparseness(Eigen::VectorXd::Zero(5)); }) == Errc::zero_row);
}
