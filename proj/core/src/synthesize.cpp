#include "numgeo/synthesize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "numgeo/error.hpp"

namespace numgeo {

namespace {

constexpr std::uint64_t kRotationStream = 1 << 20;
constexpr std::uint64_t kNoiseStream = 2 << 20;
constexpr std::uint64_t kFormatStride = 1 << 16;

}  // namespace

Eigen::MatrixXd random_orthogonal(Eigen::Index dim, CounterRng& rng) {
  Eigen::MatrixXd g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) g(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& packed = qr.matrixQR();
  for (Eigen::Index c = 0; c < dim; ++c) {
    if (packed(c, c) < 0.0) q.col(c) *= -1.0;
  }
  return q;
}

std::map<TaskId, SyntheticTask> synthesize_planted(const SynthesisParams& params) {
  if (params.dim < 4) throw Error(Errc::invalid_argument, "synthesize needs dim >= 4");
  if (params.reps < 1) throw Error(Errc::invalid_argument, "synthesize needs reps >= 1");
  if (params.tasks < 1 || params.tasks > static_cast<int>(kTemplateTasks.size())) {
    throw Error(Errc::invalid_argument, "synthesize supports 1..11 tasks");
  }
  if (!(params.noise >= 0.0) || !std::isfinite(params.parity_gain)) {
    throw Error(Errc::invalid_argument, "noise must be >= 0 and parity_gain finite");
  }

  const auto d = static_cast<Eigen::Index>(params.dim);
  const std::uint64_t format_base = params.format == NumberFormat::Digit ? 0 : kFormatStride;
  std::map<TaskId, SyntheticTask> out;
  for (int t = 0; t < params.tasks; ++t) {
    const TaskId task = kTemplateTasks[static_cast<std::size_t>(t)];
    CounterRng rotation_rng(params.seed, kRotationStream + format_base + static_cast<std::uint64_t>(t));
    CounterRng noise_rng(params.seed, kNoiseStream + format_base + static_cast<std::uint64_t>(t));

    SyntheticTask synth;
    synth.rotation = random_orthogonal(d, rotation_rng);

    struct Row {
      int value;
      std::string id;
      Eigen::VectorXd x;
    };
    std::vector<Row> rows;
    for (int v = 1; v <= 9; ++v) {
      Eigen::VectorXd latent = Eigen::VectorXd::Zero(d);
      latent(0) = kScaffoldScale * std::log(static_cast<double>(v));
      latent(1) = kScaffoldScale * params.parity_gain * (v % 2 == 1 ? 1.0 : -1.0);
      latent(2) = kScaffoldOffset;
      const Eigen::VectorXd clean = synth.rotation * latent;
      for (int r = 0; r < params.reps; ++r) {
        Eigen::VectorXd x = clean;
        if (params.noise > 0.0) {
          for (Eigen::Index c = 0; c < d; ++c) x(c) += params.noise * noise_rng.normal();
        }
        rows.push_back({v, task_stimulus_id(task, params.format, v, static_cast<std::size_t>(r)), std::move(x)});
      }
    }
    // Same row order as build_task_matrix.
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return a.value != b.value ? a.value < b.value : a.id < b.id;
    });

    TaskMatrix& tm = synth.matrix;
    tm.task = task;
    tm.format = params.format;
    tm.data.resize(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      tm.data.row(static_cast<Eigen::Index>(i)) = rows[i].x.transpose();
      tm.values.push_back(rows[i].value);
      tm.ids.push_back(rows[i].id);
    }
    tm.data = l2_normalize(tm.data);
    out.emplace(task, std::move(synth));
  }
  return out;
}

std::map<TaskId, TaskMatrix> synthesize(int tasks, int reps, int dim, double noise, double parity_gain, RngSeed seed,
                                        NumberFormat format) {
  SynthesisParams params{tasks, reps, dim, noise, parity_gain, seed, format};
  std::map<TaskId, TaskMatrix> out;
  for (auto& [task, synth] : synthesize_planted(params)) out.emplace(task, std::move(synth.matrix));
  return out;
}

}  // namespace numgeo
