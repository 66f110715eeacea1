// One PASS/FAIL line per primary acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "numgeo/axes.hpp"
#include "numgeo/cli.hpp"
#include "numgeo/density.hpp"
#include "numgeo/procrustes.hpp"
#include "numgeo/similarity.hpp"
#include "numgeo/stats.hpp"
#include "numgeo/subspace.hpp"
#include "numgeo/synthesize.hpp"

#include <json.hpp>

using namespace numgeo;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(const std::string& name, Outcome& o) {
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << ":" << o.detail.str() << std::endl;
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, std::uint64_t stream = 1) {
  CounterRng rng(RngSeed{seed}, stream);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

Eigen::MatrixXd orthogonal(Eigen::Index d, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(RngSeed{seed}, stream);
  return random_orthogonal(d, rng);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = numgeo::cli::run_cli(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

void procrustes_invariance() {
  Outcome o;
  const auto start = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto x = gaussian(9, 16, seed);
    CounterRng rng(RngSeed{seed}, 2);
    const double s = 0.1 * std::pow(100.0, rng.uniform());  // log-uniform on [0.1, 10]
    const Eigen::RowVectorXd t = 10.0 * gaussian(1, 16, seed, 3);
    const Eigen::MatrixXd y = (s * x * orthogonal(16, seed, 4)).rowwise() + t;
    worst = std::max(worst, procrustes(x, y).disparity);
  }
  const double elapsed = seconds_since(start);
  o.detail << " 100 seeds, max disparity " << worst << ", " << elapsed << " s";
  o.require(worst < 1e-10, "disparity < 1e-10");
  o.require(elapsed < 1.0, "runtime < 1 s");
  report("procrustes_invariance", o);
}

void procrustes_baseline_separation(const fs::path& work) {
  Outcome o;
  const auto data = work / "separation";
  const auto start = Clock::now();
  o.require(invoke({"synth", "--noise", "0.05", "--out", data.string()}) == 0, "synth exit 0");
  o.require(invoke({"analyze", "procrustes", "--embeddings", (data / "embeddings.nge").string(), "--stimuli",
                 (data / "stimuli.jsonl").string(), "--permutations", "999", "--out", (data / "rep").string()}) == 0,
            "analyze exit 0");
  const double elapsed = seconds_since(start);
  double worst = 0.0;
  std::size_t pairs = 0;
  if (o.pass) {
    const auto report = nlohmann::json::parse(slurp(data / "rep/procrustes.json"));
    for (const auto& t : report["tables"]) {
      if (t["name"] != "pairs") continue;
      for (const auto& row : t["rows"]) {
        worst = std::max(worst, row[7].get<double>());  // disparity / baseline mean
        ++pairs;
      }
    }
  }
  o.detail << " " << pairs << " pairs, max aligned/baseline " << worst << ", " << elapsed << " s";
  o.require(pairs == 110, "110 task pairs");
  o.require(worst < 0.2, "ratio < 0.2");
  o.require(elapsed < 10.0, "runtime < 10 s");
  report("procrustes_baseline_separation", o);
}

// Rank-k data plus an offset.
Eigen::MatrixXd low_rank(Eigen::Index n, Eigen::Index d, Eigen::Index k, std::uint64_t seed) {
  const Eigen::MatrixXd w = orthogonal(d, seed, 5).leftCols(k).transpose();
  return (gaussian(n, k, seed) * w).rowwise() + gaussian(1, d, seed, 6).row(0);
}

void overlap_bounds() {
  Outcome o;
  double self_err = 0.0, orth = 0.0;
  bool monotone = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = low_rank(45, 32, 6, seed);
    const auto pa = pca(a, 6);
    self_err = std::max(self_err, std::abs(subspace_overlap(pa, a, 6) - 1.0));
    // B spans the orthogonal complement of A's directions.
    const Eigen::MatrixXd basis = orthogonal(32, seed, 5);
    const Eigen::MatrixXd b = gaussian(45, 10, seed, 7) * basis.middleCols(6, 10).transpose();
    orth = std::max(orth, subspace_overlap(pa, b, 6));

    const auto xa = gaussian(45, 16, seed, 8);
    const auto xb = gaussian(45, 16, seed, 9);
    const auto p = pca(xa, 16);
    double previous = 0.0;
    for (Eigen::Index k = 1; k <= 16; ++k) {
      const double v = subspace_overlap(p, xb, k);
      monotone = monotone && v >= previous && v <= 1.0 + 1e-12;
      previous = v;
    }
  }
  o.detail << " max |self - 1| " << self_err << ", max orthogonal " << orth << ", monotone " << monotone;
  o.require(self_err <= 1e-10, "self overlap 1 +- 1e-10");
  o.require(orth <= 1e-12, "orthogonal overlap 0 +- 1e-12");
  o.require(monotone, "monotone in k");
  report("overlap_bounds", o);
}

void svcca_invariance() {
  Outcome o;
  double worst = 1.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = low_rank(45, 32, 5, seed);
    const Eigen::MatrixXd a = gaussian(32, 32, seed, 10) + 4.0 * Eigen::MatrixXd::Identity(32, 32);
    worst = std::min(worst, svcca(x, x * a, 5).mean_rho);
  }

  const auto xa = gaussian(45, 32, 1, 11);
  const auto xb = gaussian(45, 32, 2, 11);
  const double observed = svcca(xa, xb, 5).mean_rho;
  std::vector<double> null;
  std::vector<Eigen::Index> order(45);
  for (std::size_t k = 0; k < 999; ++k) {
    CounterRng rng(RngSeed{3}, k);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    rng.shuffle(order.begin(), order.end());
    Eigen::MatrixXd shuffled(45, 32);
    for (Eigen::Index i = 0; i < 45; ++i) shuffled.row(i) = xb.row(order[static_cast<std::size_t>(i)]);
    null.push_back(svcca(xa, shuffled, 5).mean_rho);
  }
  std::sort(null.begin(), null.end());
  const double q95 = null[static_cast<std::size_t>(0.95 * static_cast<double>(null.size()))];
  o.detail << " min mean rho under Y = XA " << worst << ", independent " << observed << " vs null q95 " << q95;
  o.require(worst >= 0.999, "mean rho >= 0.999");
  o.require(observed < q95, "independent below null 95th percentile");
  report("svcca_invariance", o);
}

void effect_fit_oracles() {
  Outcome o;
  Eigen::MatrixXd s(9, 9);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) s(i, j) = 1.0 - 0.1 * std::abs(i - j);
  const auto dist = fit_distance_effect({s}, {999, RngSeed{1}});
  o.require(std::abs(dist.r + 1.0) <= 1e-9, "distance r = -1 +- 1e-9");

  double exp_err = 0.0;
  const double planted[][3] = {{3.0, 0.5, 0.1}, {0.8, 1.0, 0.2}, {-0.4, 0.3, 0.9}, {5.0, 2.0, -1.0}};
  for (const auto& p : planted) {
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) {
      x.push_back(1.0 + 0.25 * i);
      y.push_back(p[0] * std::exp(-p[1] * x.back()) + p[2]);
    }
    const auto fit = exp_fit(x, y, {99, RngSeed{1}});
    exp_err = std::max({exp_err, std::abs(fit.a - p[0]) / std::abs(p[0]), std::abs(fit.b - p[1]) / std::abs(p[1]),
                        std::abs(fit.c - p[2]) / std::abs(p[2])});
  }
  o.require(exp_err <= 1e-6, "exp_fit within 1e-6 relative");

  // Normal equations for y = b0 + b1 x, solved by Cramer's rule in long double.
  double lin_err = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = gaussian(25, 2, seed, 12);
    std::vector<double> x(25), y(25);
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 25; ++i) {
      x[static_cast<std::size_t>(i)] = m(i, 0);
      y[static_cast<std::size_t>(i)] = 0.7 * m(i, 0) + m(i, 1);
      sx += x[static_cast<std::size_t>(i)];
      sy += y[static_cast<std::size_t>(i)];
      sxx += static_cast<long double>(x[static_cast<std::size_t>(i)]) * x[static_cast<std::size_t>(i)];
      sxy += static_cast<long double>(x[static_cast<std::size_t>(i)]) * y[static_cast<std::size_t>(i)];
    }
    const long double det = 25 * sxx - sx * sx;
    const auto slope = static_cast<double>((25 * sxy - sx * sy) / det);
    const auto intercept = static_cast<double>((sxx * sy - sx * sxy) / det);
    const auto fit = linear_fit(x, y, {99, RngSeed{seed}});
    lin_err = std::max({lin_err, std::abs(fit.slope - slope), std::abs(fit.intercept - intercept)});
  }
  o.require(lin_err <= 1e-12, "linear fit within 1e-12 of normal equations");
  o.detail << " distance r " << dist.r << ", exp_fit max rel err " << exp_err << ", linear max abs err " << lin_err;
  report("effect_fit_oracles", o);
}

// Magnitude/parity angle range over 50 seeds.
std::pair<double, double> parity_angles(int dim) {
  double lo = 90.0, hi = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SynthesisParams params;
    params.tasks = 1;
    params.dim = dim;
    params.noise = 0.02;
    params.seed = RngSeed{seed};
    const auto tm = synthesize_planted(params).begin()->second.matrix;
    std::vector<double> values(tm.values.begin(), tm.values.end());
    std::vector<int> parity;
    for (int v : tm.values) parity.push_back(v % 2);
    const double angle = axis_angle(magnitude_axis(tm.data, values), category_axis(tm.data, parity));
    lo = std::min(lo, angle);
    hi = std::max(hi, angle);
  }
  return {lo, hi};
}

void axis_geometry() {
  Outcome o;
  const auto [lo, hi] = parity_angles(64);
  // With 45 rows in 64 dimensions the regression interpolates; 16 dimensions keeps it overdetermined.
  const auto [lo16, hi16] = parity_angles(16);
  o.detail << " 50 seeds, angle range [" << lo << ", " << hi << "] deg at d = 64, [" << lo16 << ", " << hi16
           << "] deg at d = 16";
  o.require(lo >= 85.0 && hi <= 90.0, "angle in [85, 90]");
  report("axis_geometry", o);
}

void sparseness_closed_forms() {
  Outcome o;
  o.require(sparseness(Eigen::VectorXd::Constant(16, -0.7)) == 1.0, "constant -> 1 exactly");
  for (int d = 1; d <= 128; ++d) {
    if (sparseness(Eigen::VectorXd::Unit(d, d - 1)) != 1.0 / d) o.require(false, "one-hot(" + std::to_string(d) + ")");
  }
  double drift = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::VectorXd v = gaussian(64, 1, seed, 13).col(0);
    const double s = sparseness(v);
    for (double k : {1e-8, 0.3, 7.0, 1e9}) drift = std::max(drift, std::abs(sparseness(k * v) - s));
  }
  o.require(drift <= 1e-12, "scale invariance 1e-12");
  o.detail << " constant 1, one-hot 1/d for d <= 128, max scale drift " << drift;
  report("sparseness_closed_forms", o);
}

void kde_normalization() {
  Outcome o;
  double mass_err = 0.0, lo = 1.0, hi = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Eigen::MatrixXd p = gaussian(40 + static_cast<Eigen::Index>(seed) * 7, 2, seed, 14);
    p.col(0) *= 0.5 + 0.2 * static_cast<double>(seed);
    if (seed % 2) p.col(1) = p.col(1).array().abs().pow(1.5);  // skewed
    const auto g = kde_density(p, 64);
    mass_err = std::max(mass_err, std::abs(g.mass() - 1.0));
    const double top = g.mass_above(g.level80);
    lo = std::min(lo, top);
    hi = std::max(hi, top);
  }
  o.detail << " 20 datasets, max |mass - 1| " << mass_err << ", top-80% mass in [" << lo << ", " << hi << "]";
  o.require(mass_err <= 1e-6, "mass 1 +- 1e-6");
  o.require(lo >= 0.79 && hi <= 0.81, "top-80% mass in [0.79, 0.81]");
  report("kde_normalization", o);
}

void end_to_end_determinism(const fs::path& work) {
  Outcome o;
  const auto start = Clock::now();
  // Both runs use the same paths (reports echo them), then move aside.
  const auto dir = work / "run";
  for (const char* run : {"one", "two"}) {
    o.require(invoke({"synth", "--seed", "42", "--out", (dir / "data").string()}) == 0, "synth exit 0");
    o.require(invoke({"analyze", "all", "--embeddings", (dir / "data/embeddings.nge").string(), "--stimuli",
                      (dir / "data/stimuli.jsonl").string(), "--seed", "42", "--out", (dir / "rep").string()}) == 0,
              "analyze exit 0");
    fs::rename(dir, work / run);
  }
  const double elapsed = seconds_since(start);
  std::size_t files = 0, differing = 0;
  for (const char* sub : {"data", "rep"}) {
    for (const auto& e : fs::directory_iterator(work / "one" / sub)) {
      ++files;
      if (slurp(e.path()) != slurp(work / "two" / sub / e.path().filename())) ++differing;
    }
  }
  o.detail << " " << files << " files, " << differing << " differ, two full default runs in " << elapsed << " s";
  o.require(files == 2 + 7 + 21 && differing == 0, "byte-identical outputs");
  o.require(elapsed / 2.0 < 120.0, "one run < 2 min");
  report("end_to_end_determinism", o);
}

}  // namespace

int main() {
  const auto work = fs::temp_directory_path() / ("numgeo_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  procrustes_invariance();
  procrustes_baseline_separation(work);
  overlap_bounds();
  svcca_invariance();
  effect_fit_oracles();
  axis_geometry();
  sparseness_closed_forms();
  kde_normalization();
  end_to_end_determinism(work);

  fs::remove_all(work);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
