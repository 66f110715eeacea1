#include "numgeo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "numgeo/error.hpp"

namespace numgeo {

namespace {

constexpr double kGridLow = 1e-3;
constexpr double kGridHigh = 1e2;
constexpr std::size_t kGridPoints = 200;
constexpr int kGoldenIterations = 200;

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

void check_pair(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  if (x.size() != y.size()) throw Error(Errc::invalid_argument, "x and y differ in length");
  if (x.size() < min_n) {
    throw Error(Errc::invalid_argument, "need at least " + std::to_string(min_n) + " points, got " +
                                            std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw Error(Errc::non_finite_value, "non-finite sample");
  }
}

std::vector<double> centered(std::span<const double> v) {
  const double m = mean(v);
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [m](double a) { return a - m; });
  return out;
}

double sum_sq(std::span<const double> v) { return std::inner_product(v.begin(), v.end(), v.begin(), 0.0); }

// Variance check relative to the data scale, so constant vectors with
// round-off in their mean still count as constant.
bool is_constant(std::span<const double> v, std::span<const double> centered_v) {
  double scale = 0.0;
  for (double a : v) scale = std::max(scale, std::abs(a));
  const double ss = sum_sq(centered_v);
  return ss <= 1e-28 * std::max(scale * scale, 1e-300) * static_cast<double>(v.size());
}

struct LinearSolve {
  double a = 0.0;
  double c = 0.0;
  double rss = 0.0;
};

// Best (a, c) for y ~ a * basis + c.
LinearSolve solve_affine(std::span<const double> basis, std::span<const double> y, double y_mean, double y_ss) {
  const double bm = mean(basis);
  double sbb = 0.0;
  double sby = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double db = basis[i] - bm;
    sbb += db * db;
    sby += db * (y[i] - y_mean);
  }
  LinearSolve out;
  out.a = sbb > 0.0 ? sby / sbb : 0.0;
  out.c = y_mean - out.a * bm;
  double rss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - (out.a * basis[i] + out.c);
    rss += e * e;
  }
  out.rss = sbb > 0.0 ? rss : y_ss;
  return out;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 3);
  const auto xc = centered(x);
  const auto yc = centered(y);
  if (is_constant(x, xc) || is_constant(y, yc)) throw Error(Errc::zero_variance, "correlation of a constant series");
  const double sxy = std::inner_product(xc.begin(), xc.end(), yc.begin(), 0.0);
  const double r = sxy / std::sqrt(sum_sq(xc) * sum_sq(yc));
  return std::clamp(r, -1.0, 1.0);
}

double permutation_pvalue(std::span<const double> x, std::span<const double> y, double observed_stat,
                          std::size_t permutations, RngSeed seed) {
  check_pair(x, y, 3);
  if (permutations < 99) throw Error(Errc::invalid_argument, "permutation tests need at least 99 permutations");
  const auto xc = centered(x);
  const auto yc = centered(y);
  if (is_constant(x, xc) || is_constant(y, yc)) throw Error(Errc::zero_variance, "permutation test on a constant series");
  const double norm = std::sqrt(sum_sq(xc) * sum_sq(yc));
  // Ties within round-off of the observed statistic count as exceedances.
  const double threshold = std::abs(observed_stat) * (1.0 - 1e-12);

  std::vector<double> shuffled(yc.size());
  std::size_t exceed = 0;
  for (std::size_t k = 0; k < permutations; ++k) {
    CounterRng rng(seed, k);
    std::copy(yc.begin(), yc.end(), shuffled.begin());
    rng.shuffle(shuffled.begin(), shuffled.end());
    const double r = std::inner_product(xc.begin(), xc.end(), shuffled.begin(), 0.0) / norm;
    if (std::abs(r) >= threshold) ++exceed;
  }
  return static_cast<double>(1 + exceed) / static_cast<double>(permutations + 1);
}

FitResult linear_fit(std::span<const double> x, std::span<const double> y, const PermutationOptions& options) {
  check_pair(x, y, 3);
  const auto xc = centered(x);
  if (is_constant(x, xc)) throw Error(Errc::degenerate, "regressor is constant");
  const auto yc = centered(y);
  if (is_constant(y, yc)) throw Error(Errc::zero_variance, "response is constant");

  const double sxx = sum_sq(xc);
  const double sxy = std::inner_product(xc.begin(), xc.end(), yc.begin(), 0.0);
  FitResult fit;
  fit.n = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = mean(y) - fit.slope * mean(x);
  fit.r = pearson(x, y);
  fit.p = permutation_pvalue(x, y, fit.r, options.permutations, options.seed);
  return fit;
}

ExpFitResult exp_fit(std::span<const double> x, std::span<const double> y, const PermutationOptions& options) {
  check_pair(x, y, 4);
  if (std::any_of(x.begin(), x.end(), [](double v) { return !(v > 0.0); })) {
    throw Error(Errc::invalid_argument, "exp_fit needs positive x");
  }
  const double y_mean = mean(y);
  const auto yc = centered(y);
  const double y_ss = sum_sq(yc);

  std::vector<double> basis(x.size());
  auto evaluate = [&](double log_b) {
    const double b = std::exp(log_b);
    for (std::size_t i = 0; i < x.size(); ++i) basis[i] = std::exp(-b * x[i]);
    return solve_affine(basis, y, y_mean, y_ss);
  };

  const double lo = std::log(kGridLow);
  const double hi = std::log(kGridHigh);
  const double step = (hi - lo) / static_cast<double>(kGridPoints - 1);
  std::size_t best = 0;
  double best_rss = 0.0;
  for (std::size_t g = 0; g < kGridPoints; ++g) {
    const double rss = evaluate(lo + step * static_cast<double>(g)).rss;
    if (g == 0 || rss < best_rss) {
      best = g;
      best_rss = rss;
    }
  }

  ExpFitResult fit;
  fit.n = x.size();
  fit.degenerate = best == 0 || best == kGridPoints - 1;

  // Golden-section search on the bracket around the grid minimum.
  double left = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  double right = lo + step * static_cast<double>(std::min(best + 1, kGridPoints - 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double m1 = right - inv_phi * (right - left);
  double m2 = left + inv_phi * (right - left);
  double f1 = evaluate(m1).rss;
  double f2 = evaluate(m2).rss;
  for (int it = 0; it < kGoldenIterations && right - left > 1e-15 * std::max(1.0, std::abs(left)); ++it) {
    if (f1 <= f2) {
      right = m2;
      m2 = m1;
      f2 = f1;
      m1 = right - inv_phi * (right - left);
      f1 = evaluate(m1).rss;
    } else {
      left = m1;
      m1 = m2;
      f1 = f2;
      m2 = left + inv_phi * (right - left);
      f2 = evaluate(m2).rss;
    }
  }
  double log_b = f1 <= f2 ? m1 : m2;
  auto solved = evaluate(log_b);
  const auto grid_solved = evaluate(lo + step * static_cast<double>(best));
  if (grid_solved.rss < solved.rss) {
    log_b = lo + step * static_cast<double>(best);
    solved = grid_solved;
  }

  fit.b = std::exp(log_b);
  fit.a = solved.a;
  fit.c = solved.c;
  fit.rss = solved.rss;

  std::vector<double> fitted(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) fitted[i] = fit.a * std::exp(-fit.b * x[i]) + fit.c;
  const auto fc = centered(fitted);
  if (is_constant(y, yc) || is_constant(fitted, fc)) {
    fit.degenerate = true;
    fit.r = 0.0;
    fit.p = 1.0;
    return fit;
  }
  fit.r = pearson(fitted, y);
  fit.p = permutation_pvalue(fitted, y, fit.r, options.permutations, options.seed);
  return fit;
}

int significance_stars(double p) noexcept {
  if (p < 0.001) return 3;
  if (p < 0.01) return 2;
  if (p < 0.05) return 1;
  return 0;
}

}  // namespace numgeo
