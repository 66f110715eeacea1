#include <doctest.h>

#include <cmath>

#include "numgeo/error.hpp"
#include "numgeo/procrustes.hpp"
#include "numgeo/synthesize.hpp"
#include "test_util.hpp"

using namespace numgeo;
using numgeo::testing::error_code_of;

TEST_CASE("random_orthogonal is orthogonal with Haar-like spread") {
  CounterRng rng(RngSeed{1}, 0);
  const auto q = random_orthogonal(16, rng);
  CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(16, 16)).norm() < 1e-12);

  // E[q00^2] = 1/d under the Haar measure.
  double sum = 0.0;
  for (int i = 0; i < 400; ++i) {
    const auto m = random_orthogonal(8, rng);
    sum += m(0, 0) * m(0, 0);
  }
  CHECK(std::abs(sum / 400.0 - 1.0 / 8.0) < 0.03);
}

TEST_CASE("synthesized task matrices have the expected layout") {
  const auto tasks = synthesize(11, 5, 64, 0.05, 0.3, RngSeed{42});
  REQUIRE(tasks.size() == 11);
  for (const auto& [task, tm] : tasks) {
    CHECK(is_template_task(task));
    CHECK(tm.task == task);
    CHECK(tm.rows() == 45);
    CHECK(tm.dim() == 64);
    for (Eigen::Index r = 0; r < tm.rows(); ++r) {
      CHECK(tm.values[static_cast<std::size_t>(r)] == r / 5 + 1);
      CHECK(std::abs(tm.data.row(r).norm() - 1.0) < 1e-12);
    }
    CHECK(tm.ids.front() == task_stimulus_id(task, NumberFormat::Digit, 1, 0));
  }
}

TEST_CASE("synthesis is deterministic and seed-dependent") {
  const auto a = synthesize(3, 2, 16, 0.1, 0.3, RngSeed{7});
  const auto b = synthesize(3, 2, 16, 0.1, 0.3, RngSeed{7});
  const auto c = synthesize(3, 2, 16, 0.1, 0.3, RngSeed{8});
  for (const auto& [task, tm] : a) {
    CHECK(tm.data == b.at(task).data);
    CHECK(tm.data != c.at(task).data);
  }
  const auto word = synthesize(3, 2, 16, 0.1, 0.3, RngSeed{7}, NumberFormat::Word);
  CHECK(word.begin()->second.data != a.begin()->second.data);
  CHECK(word.begin()->second.format == NumberFormat::Word);
}

TEST_CASE("noiseless tasks share the scaffold exactly") {
  const auto planted = synthesize_planted({.tasks = 2, .reps = 1, .dim = 12, .noise = 0.0});
  const auto& first = planted.begin()->second;
  const auto& second = std::next(planted.begin())->second;
  CHECK(procrustes(first.matrix.data, second.matrix.data).disparity < 1e-10);

  // Rows are normalized images of the latent points under the task rotation.
  for (Eigen::Index r = 0; r < 9; ++r) {
    const int v = first.matrix.values[static_cast<std::size_t>(r)];
    Eigen::VectorXd latent = Eigen::VectorXd::Zero(12);
    latent(0) = kScaffoldScale * std::log(static_cast<double>(v));
    latent(1) = kScaffoldScale * 0.3 * (v % 2 ? 1.0 : -1.0);
    latent(2) = kScaffoldOffset;
    const Eigen::VectorXd expected = (first.rotation * latent).normalized();
    CHECK((first.matrix.data.row(r).transpose() - expected).norm() < 1e-12);
  }
}

TEST_CASE("synthesis parameter validation") {
  CHECK(error_code_of([] { synthesize(1, 1, 3, 0.0, 0.3, {}); }) == Errc::invalid_argument);
  CHECK(error_code_of([] { synthesize(1, 0, 8, 0.0, 0.3, {}); }) == Errc::invalid_argument);
  CHECK(error_code_of([] { synthesize(12, 1, 8, 0.0, 0.3, {}); }) == Errc::invalid_argument);
  CHECK(error_code_of([] { synthesize(1, 1, 8, -0.1, 0.3, {}); }) == Errc::invalid_argument);
}
