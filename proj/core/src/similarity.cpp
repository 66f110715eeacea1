#include "numgeo/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "numgeo/error.hpp"

namespace numgeo {

SimilarityMatrix cosine_similarity_matrix(const Eigen::MatrixXd& unit_rows) {
  SimilarityMatrix s;
  s.values = unit_rows * unit_rows.transpose();
  // Exact symmetry; the product can differ in the last bit across the diagonal.
  s.values = (0.5 * (s.values + s.values.transpose())).eval();
  s.values = s.values.cwiseMax(-1.0).cwiseMin(1.0);
  return s;
}

SimilarityMatrix cosine_similarity_matrix(const MeanMatrix& mm) { return cosine_similarity_matrix(mm.data); }

std::vector<NumberPair> upper_pairs(const SimilarityMatrix& s) {
  const auto m = static_cast<int>(s.size());
  if (m < 2 || s.values.cols() != m) throw Error(Errc::invalid_argument, "similarity matrix must be square, m >= 2");
  std::vector<NumberPair> out;
  out.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (int i = 1; i <= m; ++i) {
    for (int j = i + 1; j <= m; ++j) out.push_back({i, j, s(i, j)});
  }
  return out;
}

FitResult fit_distance_effect(const SimilarityMatrix& s, const PermutationOptions& options) {
  const auto pairs = upper_pairs(s);
  std::vector<double> x, y;
  for (const auto& p : pairs) {
    x.push_back(static_cast<double>(p.j - p.i));
    y.push_back(p.similarity);
  }
  return linear_fit(x, y, options);
}

SizeEffectSamples size_effect_samples(const SimilarityMatrix& s) {
  const auto pairs = upper_pairs(s);
  std::map<int, std::vector<const NumberPair*>> bins;
  for (const auto& p : pairs) bins[p.j - p.i].push_back(&p);

  // Bin statistics first, then emit in upper_pairs order.
  struct BinStats {
    double mean = 0.0;
    double sd = 0.0;
    bool usable = false;
  };
  std::map<int, BinStats> stats;
  SizeEffectSamples out;
  for (const auto& [distance, members] : bins) {
    BinStats b;
    if (members.size() >= 2) {
      for (const auto* p : members) b.mean += p->similarity;
      b.mean /= static_cast<double>(members.size());
      double ss = 0.0;
      double scale = 0.0;
      for (const auto* p : members) {
        ss += (p->similarity - b.mean) * (p->similarity - b.mean);
        scale = std::max(scale, std::abs(p->similarity));
      }
      b.sd = std::sqrt(ss / static_cast<double>(members.size()));
      b.usable = b.sd > 1e-12 * std::max(scale, 1e-300);
    }
    if (b.usable) ++out.usable_bins;
    stats[distance] = b;
  }
  for (const auto& p : pairs) {
    const auto& b = stats[p.j - p.i];
    if (!b.usable) continue;
    out.min_value.push_back(static_cast<double>(p.i));
    out.z.push_back((p.similarity - b.mean) / b.sd);
  }
  return out;
}

FitResult fit_size_effect(const SimilarityMatrix& s, const PermutationOptions& options) {
  const auto samples = size_effect_samples(s);
  if (samples.usable_bins < 3) {
    throw Error(Errc::insufficient_bins, std::to_string(samples.usable_bins) +
                                             " distance bins with two or more distinct pairs; need 3");
  }
  return linear_fit(samples.min_value, samples.z, options);
}

ExpFitResult fit_ratio_effect(const SimilarityMatrix& s, const PermutationOptions& options) {
  const auto pairs = upper_pairs(s);
  std::vector<double> x, y;
  for (const auto& p : pairs) {
    x.push_back(static_cast<double>(p.j) / static_cast<double>(p.i));
    y.push_back(p.similarity);
  }
  return exp_fit(x, y, options);
}

}  // namespace numgeo
