#include <doctest.h>

#include <cmath>
#include <map>

#include "numgeo/error.hpp"
#include "numgeo/similarity.hpp"
#include "numgeo/synthesize.hpp"
#include "test_util.hpp"

using namespace numgeo;
using numgeo::testing::error_code_of;

namespace {

const PermutationOptions kFast{999, RngSeed{3}};

template <class F>
SimilarityMatrix from_function(int m, F f) {
  SimilarityMatrix s;
  s.values = Eigen::MatrixXd::Ones(m, m);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      if (i != j) s.values(i - 1, j - 1) = f(std::min(i, j), std::max(i, j));
  return s;
}

}  // namespace

TEST_CASE("cosine similarity matrices") {
  const Eigen::MatrixXd same = Eigen::RowVectorXd::Unit(5, 2).replicate(9, 1);
  CHECK(cosine_similarity_matrix(same).values.isApprox(Eigen::MatrixXd::Ones(9, 9)));
  CHECK(cosine_similarity_matrix(Eigen::MatrixXd::Identity(9, 12)).values == Eigen::MatrixXd::Identity(9, 9));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = testing::unit_rows(testing::gaussian(9, 16, seed));
    const auto s = cosine_similarity_matrix(x);
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        double dot = 0.0;
        for (int c = 0; c < 16; ++c) dot += x(i, c) * x(j, c);
        CHECK(std::abs(s.values(i, j) - dot) < 1e-12);
        CHECK(s.values(i, j) == s.values(j, i));
        CHECK(std::abs(s.values(i, j)) <= 1.0);
      }
      CHECK(std::abs(s.values(i, i) - 1.0) < 1e-9);
    }
  }
  const auto pairs = upper_pairs(cosine_similarity_matrix(testing::unit_rows(testing::gaussian(9, 4, 1))));
  REQUIRE(pairs.size() == 36);
  CHECK(pairs.front().i == 1);
  CHECK(pairs.front().j == 2);
  CHECK(pairs.back().i == 8);
  CHECK(pairs.back().j == 9);
}

TEST_CASE("distance effect") {
  const auto s = from_function(9, [](int i, int j) { return 1.0 - 0.1 * (j - i); });
  const auto fit = fit_distance_effect(s, kFast);
  CHECK(std::abs(fit.slope + 0.1) < 1e-12);
  CHECK(std::abs(fit.intercept - 1.0) < 1e-12);
  CHECK(std::abs(fit.r + 1.0) < 1e-9);
  CHECK(fit.n == 36);
  CHECK(fit.p == 1.0 / 1000.0);

  const auto flat = from_function(9, [](int, int) { return 0.4; });
  CHECK(error_code_of([&] { fit_distance_effect(flat, kFast); }) == Errc::zero_variance);
}

TEST_CASE("size effect matches a hand-rolled z-score regression") {
  const auto s = from_function(9, [](int i, int j) { return 1.0 - 0.05 * i - 0.1 * (j - i) + 0.003 * i * i; });

  // Oracle: population z-scores within |i-j| bins of two or more pairs, then least squares.
  std::map<int, std::vector<std::pair<int, double>>> bins;
  for (int i = 1; i <= 9; ++i)
    for (int j = i + 1; j <= 9; ++j) bins[j - i].push_back({i, s(i, j)});
  std::vector<double> xs, zs;
  for (const auto& [d, members] : bins) {
    if (members.size() < 2) continue;
    double mean = 0.0, var = 0.0;
    for (const auto& m : members) mean += m.second / static_cast<double>(members.size());
    for (const auto& m : members) var += (m.second - mean) * (m.second - mean) / static_cast<double>(members.size());
    for (const auto& m : members) {
      xs.push_back(m.first);
      zs.push_back((m.second - mean) / std::sqrt(var));
    }
  }
  double mx = 0.0, mz = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k] / static_cast<double>(xs.size());
    mz += zs[k] / static_cast<double>(xs.size());
  }
  double sxx = 0.0, sxz = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxz += (xs[k] - mx) * (zs[k] - mz);
  }

  const auto fit = fit_size_effect(s, kFast);
  CHECK(fit.n == xs.size());
  CHECK(fit.n == 35);
  CHECK(std::abs(fit.slope - sxz / sxx) < 1e-12);
  CHECK(std::abs(fit.intercept - (mz - sxz / sxx * mx)) < 1e-12);
  CHECK(fit.slope < 0.0);

  const auto samples = size_effect_samples(s);
  CHECK(samples.usable_bins == 7);
  CHECK(samples.z.size() == 35);
}

TEST_CASE("size effect edge cases") {
  // Symmetric in min(i, j) about the middle of each bin.
  const auto sym = from_function(9, [](int i, int j) {
    const double centre = (10.0 - (j - i)) / 2.0;
    return 0.9 - 0.05 * (j - i) - 0.01 * (i - centre) * (i - centre);
  });
  CHECK(std::abs(fit_size_effect(sym, kFast).slope) < 1e-9);

  const auto small = from_function(3, [](int i, int j) { return 1.0 - 0.1 * i - 0.2 * (j - i); });
  CHECK(error_code_of([&] { fit_size_effect(small, kFast); }) == Errc::insufficient_bins);

  // Every bin flat: no usable spread.
  const auto distance_only = from_function(9, [](int i, int j) { return 1.0 - 0.1 * (j - i); });
  CHECK(error_code_of([&] { fit_size_effect(distance_only, kFast); }) == Errc::insufficient_bins);
}

TEST_CASE("ratio effect") {
  const auto s = from_function(9, [](int i, int j) { return std::exp(-static_cast<double>(j) / i); });
  const auto fit = fit_ratio_effect(s, kFast);
  CHECK(std::abs(fit.b - 1.0) < 1e-3);
  CHECK(fit.r > 0.999);
  CHECK(fit.n == 36);

  const auto flat = from_function(9, [](int, int) { return 0.4; });
  CHECK(fit_ratio_effect(flat, kFast).degenerate);
}

TEST_CASE("log-ratio similarity caps the distance correlation") {
  // Similarity linear in |log i - log j| is the best a ratio-only code can do
  // against |i - j|; its correlation is about -0.85.
  const auto s = from_function(9, [](int i, int j) { return 1.0 - 0.2 * std::log(static_cast<double>(j) / i); });
  const double r = fit_distance_effect(s, kFast).r;
  CHECK(r < -0.85);
  CHECK(r > -0.86);
}

TEST_CASE("effects on synthetic log-scaffold embeddings") {
  const auto tasks = synthesize(4, 5, 64, 0.05, 0.3, RngSeed{42});
  for (const auto& [task, tm] : tasks) {
    CAPTURE(to_string(task));
    const auto s = cosine_similarity_matrix(mean_by_number(tm));
    const auto distance = fit_distance_effect(s, kFast);
    CHECK(distance.r < -0.7);
    CHECK(distance.p < 0.001 + 1e-12);
    const auto ratio = fit_ratio_effect(s, kFast);
    CHECK(ratio.r > 0.95);
    CHECK(ratio.b > 0.0);
  }
}
