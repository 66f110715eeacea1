#pragma once

#include <map>

#include <Eigen/Dense>

#include "numgeo/embedstore.hpp"
#include "numgeo/rng.hpp"

namespace numgeo {

/// Embeddings with a known shared structure: number v sits at
///   kScaffoldScale * (log(v) e0 + parity_gain * (+1 odd / -1 even) e1) + kScaffoldOffset * e2
/// in a latent frame, each task applies its own random rotation of R^d (which
/// also moves the e2 offset), adds N(0, noise^2) per coordinate, and rows
/// are L2-normalized.
struct SynthesisParams {
  int tasks = 11;
  int reps = 5;
  int dim = 64;
  double noise = 0.05;
  double parity_gain = 0.3;
  RngSeed seed{};
  NumberFormat format = NumberFormat::Digit;
};

inline constexpr double kScaffoldScale = 3.0;
inline constexpr double kScaffoldOffset = 12.0;

struct SyntheticTask {
  TaskMatrix matrix;
  Eigen::MatrixXd rotation;  // d x d, latent -> ambient
  Eigen::VectorXd magnitude_direction() const { return rotation.col(0); }
  Eigen::VectorXd parity_direction() const { return rotation.col(1); }
};

/// Tasks are the first `tasks` template tasks. Requires dim >= 4, reps >= 1,
/// 1 <= tasks <= 11, noise >= 0.
std::map<TaskId, SyntheticTask> synthesize_planted(const SynthesisParams& params);

std::map<TaskId, TaskMatrix> synthesize(int tasks, int reps, int dim, double noise, double parity_gain, RngSeed seed,
                                        NumberFormat format = NumberFormat::Digit);

/// Haar-distributed orthogonal matrix drawn from `rng`.
Eigen::MatrixXd random_orthogonal(Eigen::Index dim, CounterRng& rng);

}  // namespace numgeo
