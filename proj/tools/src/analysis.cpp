#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <set>
#include <thread>
#include <unordered_set>

#include "numgeo/axes.hpp"
#include "numgeo/density.hpp"
#include "numgeo/error.hpp"
#include "numgeo/procrustes.hpp"
#include "numgeo/rng.hpp"
#include "numgeo/similarity.hpp"
#include "numgeo/stats.hpp"
#include "numgeo/subspace.hpp"

namespace numgeo::cli {

namespace {

std::string name(TaskId t) { return std::string(to_string(t)); }
std::string name(NumberFormat f) { return std::string(to_string(f)); }

int load_exit_code(Errc code) {
  switch (code) {
    case Errc::duplicate_id:
    case Errc::missing_record:
    case Errc::missing_value:
      return kExitData;
    default:
      return kExitInput;
  }
}

std::string offender_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size() && i < 10; ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  if (items.size() > 10) out += ", ...";
  return out;
}

// Runs fn(0..n-1) on up to `threads` workers; each index is owned by one
// worker. The first failure in index order is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < n; i += step) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Wraps library errors raised while analyzing `what` into exit code 4.
template <class F>
auto guarded(std::string_view kind, const std::string& what, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Failure(kExitAnalysis, std::string(kind) + ": " + what + ": " + e.what());
  }
}

std::vector<double> as_doubles(const std::vector<int>& v) { return {v.begin(), v.end()}; }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<const Cell*> cells_of(const Dataset& data, NumberFormat format) {
  std::vector<const Cell*> out;
  for (const auto& c : data.cells) {
    if (c.format() == format) out.push_back(&c);
  }
  return out;
}

// Per-pair stream seed, stable under changes to the task selection.
RngSeed pair_seed(std::uint64_t seed, NumberFormat f, TaskId a, TaskId b) {
  const auto key = (static_cast<std::uint64_t>(f) << 16) | (static_cast<std::uint64_t>(a) << 8) |
                   static_cast<std::uint64_t>(b);
  return RngSeed{mix64(seed ^ mix64(key + 1))};
}

// ---------------------------------------------------------------------------

void effect_rows(Report& report, const std::string& task, NumberFormat format, const SimilarityMatrix& s,
                 const PermutationOptions& opts) {
  const auto what = task + "/" + name(format);
  const auto dist = guarded("effects", what + " distance", [&] { return fit_distance_effect(s, opts); });
  const auto size = guarded("effects", what + " size", [&] { return fit_size_effect(s, opts); });
  const auto ratio = guarded("effects", what + " ratio", [&] { return fit_ratio_effect(s, opts); });
  report.tables[0].add({task, name(format), dist.slope, dist.intercept, dist.r, dist.p, significance_stars(dist.p),
                        dist.n});
  report.tables[1].add({task, name(format), size.slope, size.intercept, size.r, size.p, significance_stars(size.p),
                        size.n});
  report.tables[2].add({task, name(format), ratio.a, ratio.b, ratio.c, ratio.r, ratio.p, significance_stars(ratio.p),
                        ratio.n, ratio.degenerate});
  auto& sim = report.tables[3];
  for (int i = 1; i <= s.size(); ++i) {
    for (int j = 1; j <= s.size(); ++j) sim.add({task, name(format), i, j, s(i, j)});
  }
}

void run_effects(Report& report, const Dataset& data, const AnalysisConfig& cfg) {
  const std::vector<std::string> fit_cols = {"task", "format", "slope", "intercept", "r", "p", "stars", "n"};
  report.table("distance", fit_cols);
  report.table("size", fit_cols);
  report.table("ratio", {"task", "format", "a", "b", "c", "r", "p", "stars", "n", "degenerate"});
  report.table("similarity", {"task", "format", "i", "j", "similarity"});
  const PermutationOptions opts{cfg.permutations, RngSeed{cfg.seed}};

  for (auto format : data.formats) {
    Eigen::MatrixXd pooled;
    int count = 0;
    for (const auto* cell : cells_of(data, format)) {
      if (is_property_task(cell->task()) && !cfg.include_properties) continue;
      const auto means = guarded("effects", cell->label(), [&] { return mean_by_number(cell->matrix); });
      const auto s = cosine_similarity_matrix(means);
      effect_rows(report, name(cell->task()), format, s, opts);
      pooled = count == 0 ? s.values : Eigen::MatrixXd(pooled + s.values);
      ++count;
    }
    if (count > 1) effect_rows(report, "all_tasks", format, SimilarityMatrix{Eigen::MatrixXd(pooled / count)}, opts);
  }
}

void run_procrustes(Report& report, const Dataset& data, const AnalysisConfig& cfg) {
  auto& pairs = report.table("pairs", {"format", "task_a", "task_b", "disparity", "baseline_mean", "baseline_min",
                                       "baseline_max", "ratio", "p", "stars"});
  auto& summary = report.table("summary", {"format", "pairs", "mean_disparity", "max_disparity", "mean_baseline",
                                           "min_baseline_mean", "max_ratio"});
  for (auto format : data.formats) {
    const auto cells = cells_of(data, format);
    std::vector<Eigen::MatrixXd> means;
    for (const auto* c : cells) {
      means.push_back(guarded("procrustes", c->label(), [&] { return mean_by_number(c->matrix).data; }));
    }
    std::vector<std::pair<std::size_t, std::size_t>> index;
    for (std::size_t a = 0; a < cells.size(); ++a) {
      for (std::size_t b = a + 1; b < cells.size(); ++b) index.emplace_back(a, b);
    }
    std::vector<std::vector<Json>> rows(index.size());
    std::vector<double> disparities(index.size()), baselines(index.size()), ratios(index.size());
    parallel_for(index.size(), cfg.threads, [&](std::size_t k) {
      const auto [a, b] = index[k];
      const auto what = cells[a]->label() + " vs " + cells[b]->label();
      const TaskId ta = cells[a]->task(), tb = cells[b]->task();
      guarded("procrustes", what, [&] {
        const double d = procrustes(means[a], means[b], {.compute_rotation = false}).disparity;
        const auto base =
            procrustes_permutation_baseline(means[a], means[b], cfg.permutations, pair_seed(cfg.seed, format, ta, tb));
        const auto below = std::count_if(base.disparities.begin(), base.disparities.end(),
                                         [d](double x) { return x <= d; });
        const double p = static_cast<double>(1 + below) / static_cast<double>(cfg.permutations + 1);
        disparities[k] = d;
        baselines[k] = base.mean;
        ratios[k] = d / base.mean;
        rows[k] = {name(format), name(ta), name(tb), d, base.mean, base.min, base.max, ratios[k], p,
                   significance_stars(p)};
        return 0;
      });
    });
    for (auto& r : rows) pairs.add(std::move(r));
    if (!index.empty()) {
      summary.add({name(format), index.size(), mean_of(disparities),
                   *std::max_element(disparities.begin(), disparities.end()), mean_of(baselines),
                   *std::min_element(baselines.begin(), baselines.end()),
                   *std::max_element(ratios.begin(), ratios.end())});
    }
  }
}

void run_overlap(Report& report, const Dataset& data, const AnalysisConfig& cfg) {
  auto& pairs = report.table("pairs", {"format", "subspace_task", "data_task", "k", "overlap"});
  auto& comps = report.table("components", {"format", "task", "components_95", "explained_ratio_k"});
  const Eigen::Index k = data.n_comp;
  for (auto format : data.formats) {
    const auto cells = cells_of(data, format);
    std::vector<PcaResult> fits(cells.size());
    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
      fits[i] = guarded("overlap", cells[i]->label(), [&] { return pca(cells[i]->matrix.data, k); });
    });
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto c95 = guarded("overlap", cells[i]->label(),
                               [&] { return components_for_variance(cells[i]->matrix.data, 0.95); });
      comps.add({name(format), name(cells[i]->task()), c95, fits[i].explained_ratio()});
    }
    for (std::size_t a = 0; a < cells.size(); ++a) {
      for (std::size_t b = 0; b < cells.size(); ++b) {
        const auto what = cells[a]->label() + " <- " + cells[b]->label();
        const double o = guarded("overlap", what, [&] { return subspace_overlap(fits[a], cells[b]->matrix.data, k); });
        pairs.add({name(format), name(cells[a]->task()), name(cells[b]->task()), k, o});
      }
    }
  }
}

void run_svcca(Report& report, const Dataset& data, const AnalysisConfig& cfg) {
  auto& pairs = report.table("pairs", {"format", "task_a", "task_b", "n_comp", "mean_rho", "min_rho", "max_rho"});
  auto& rhos = report.table("rhos", {"format", "task_a", "task_b", "index", "rho"});
  auto& summary = report.table("summary", {"format", "pairs", "mean_rho", "min_mean_rho", "max_mean_rho"});
  const Eigen::Index k = data.n_comp;
  for (auto format : data.formats) {
    const auto cells = cells_of(data, format);
    std::vector<std::pair<std::size_t, std::size_t>> index;
    for (std::size_t a = 0; a < cells.size(); ++a) {
      for (std::size_t b = a + 1; b < cells.size(); ++b) index.emplace_back(a, b);
    }
    std::vector<SvccaResult> results(index.size());
    parallel_for(index.size(), cfg.threads, [&](std::size_t p) {
      const auto& [a, b] = index[p];
      const auto what = cells[a]->label() + " vs " + cells[b]->label();
      if (cells[a]->matrix.values != cells[b]->matrix.values) {
        throw Failure(kExitAnalysis, "svcca: " + what + ": rows are not aligned by number value");
      }
      results[p] = guarded("svcca", what, [&] { return svcca(cells[a]->matrix.data, cells[b]->matrix.data, k); });
    });
    std::vector<double> means;
    for (std::size_t p = 0; p < index.size(); ++p) {
      const auto& r = results[p];
      const auto ta = name(cells[index[p].first]->task()), tb = name(cells[index[p].second]->task());
      pairs.add({name(format), ta, tb, k, r.mean_rho, r.rhos.minCoeff(), r.rhos.maxCoeff()});
      for (Eigen::Index i = 0; i < r.rhos.size(); ++i) rhos.add({name(format), ta, tb, i + 1, r.rhos(i)});
      means.push_back(r.mean_rho);
    }
    if (!means.empty()) {
      summary.add({name(format), means.size(), mean_of(means), *std::min_element(means.begin(), means.end()),
                   *std::max_element(means.begin(), means.end())});
    }
  }
}

void run_axes(Report& report, const Dataset& data, const AnalysisConfig&) {
  auto& angles = report.table("angles", {"task", "format", "magnitude_parity_deg", "magnitude_primality_deg",
                                         "parity_primality_deg"});
  auto& proj = report.table("projection", {"task", "format", "id", "value", "magnitude", "parity"});
  auto& summary = report.table("summary", {"format", "tasks", "mean_magnitude_parity_deg",
                                           "mean_magnitude_primality_deg"});
  for (auto format : data.formats) {
    std::vector<double> mp, mq;
    for (const auto* cell : cells_of(data, format)) {
      const auto& tm = cell->matrix;
      guarded("axes", cell->label(), [&] {
        std::vector<int> parity, prime;
        for (int v : tm.values) {
          parity.push_back(v % 2);
          prime.push_back(is_prime(v) ? 1 : 0);
        }
        const auto values = as_doubles(tm.values);
        const auto mag = magnitude_axis(tm.data, values);
        const auto par = category_axis(tm.data, parity);
        const auto pri = category_axis(tm.data, prime);
        const double a1 = axis_angle(mag, par), a2 = axis_angle(mag, pri);
        angles.add({name(cell->task()), name(format), a1, a2, axis_angle(par, pri)});
        mp.push_back(a1);
        mq.push_back(a2);
        const auto xy = project_2d(tm.data, mag, par);
        for (Eigen::Index r = 0; r < xy.rows(); ++r) {
          const auto i = static_cast<std::size_t>(r);
          proj.add({name(cell->task()), name(format), tm.ids[i], tm.values[i], xy(r, 0), xy(r, 1)});
        }
        return 0;
      });
    }
    if (!mp.empty()) summary.add({name(format), mp.size(), mean_of(mp), mean_of(mq)});
  }
}

void run_density(Report& report, const Dataset& data, const AnalysisConfig& cfg) {
  auto& var = report.table("projection", {"format", "points", "pc1_ratio", "pc2_ratio"});
  auto& summary = report.table("summary", {"format", "value", "n", "bandwidth_x", "bandwidth_y", "level80", "mass80",
                                           "peak_x", "peak_y", "components80"});
  auto& centroids = report.table("centroids", {"format", "task", "value", "x", "y"});
  auto& grid_table = report.table("grid", {"format", "value", "x", "y", "density", "top80"});
  for (auto format : data.formats) {
    const auto cells = cells_of(data, format);
    Eigen::Index rows = 0;
    for (const auto* c : cells) rows += c->matrix.rows();
    Eigen::MatrixXd pooled(rows, cells.front()->matrix.dim());
    std::vector<int> values;
    Eigen::Index at = 0;
    for (const auto* c : cells) {
      pooled.middleRows(at, c->matrix.rows()) = c->matrix.data;
      values.insert(values.end(), c->matrix.values.begin(), c->matrix.values.end());
      at += c->matrix.rows();
    }
    const auto fmt = name(format);
    const auto fit = guarded("density", fmt + " projection", [&] { return pca(pooled, 2); });
    if (fit.count() < 2) throw Failure(kExitAnalysis, "density: " + fmt + ": pooled embeddings have rank < 2");
    const Eigen::MatrixXd xy = (pooled.rowwise() - fit.mean) * fit.components.transpose();
    var.add({fmt, rows, fit.explained_variance(0) / fit.total_variance,
             fit.explained_variance(1) / fit.total_variance});

    at = 0;
    for (const auto* c : cells) {
      for (int v = 1; v <= 9; ++v) {
        Eigen::RowVector2d sum = Eigen::RowVector2d::Zero();
        int n = 0;
        for (Eigen::Index r = 0; r < c->matrix.rows(); ++r) {
          if (c->matrix.values[static_cast<std::size_t>(r)] != v) continue;
          sum += xy.row(at + r);
          ++n;
        }
        if (n > 0) centroids.add({fmt, name(c->task()), v, sum(0) / n, sum(1) / n});
      }
      at += c->matrix.rows();
    }

    for (int v = 1; v <= 9; ++v) {
      std::vector<Eigen::Index> idx;
      for (std::size_t r = 0; r < values.size(); ++r) {
        if (values[r] == v) idx.push_back(static_cast<Eigen::Index>(r));
      }
      if (idx.empty()) continue;
      Eigen::MatrixXd pts(static_cast<Eigen::Index>(idx.size()), 2);
      for (std::size_t i = 0; i < idx.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = xy.row(idx[i]);
      const auto what = fmt + " value " + std::to_string(v);
      const auto g = guarded("density", what, [&] { return kde_density(pts, cfg.density_grid); });
      const auto peak = density_peak(g);
      summary.add({fmt, v, pts.rows(), g.bandwidth_x, g.bandwidth_y, g.level80, g.mass_above(g.level80), peak(0),
                   peak(1), superlevel_components(g, g.level80)});
      for (Eigen::Index i = 0; i < g.grid_x.size(); ++i) {
        for (Eigen::Index j = 0; j < g.grid_y.size(); ++j) {
          const double d = g.density(i, j);
          grid_table.add({fmt, v, g.grid_x(i), g.grid_y(j), d, d >= g.level80});
        }
      }
    }
  }
}

void run_sparseness(Report& report, const Dataset& data, const AnalysisConfig&) {
  auto& by_value = report.table("by_value", {"format", "task", "value", "n", "mean", "sd"});
  auto& by_task = report.table("by_task", {"format", "task", "n", "mean", "sd"});
  auto& summary = report.table("summary", {"format", "n", "mean", "sd", "convention"});
  for (auto format : data.formats) {
    std::vector<double> all;
    for (const auto* cell : cells_of(data, format)) {
      const auto& tm = cell->matrix;
      std::map<int, std::vector<double>> per_value;
      std::vector<double> task_all;
      for (Eigen::Index r = 0; r < tm.rows(); ++r) {
        const double s = guarded("sparseness", cell->label() + " " + tm.ids[static_cast<std::size_t>(r)],
                                 [&] { return sparseness(tm.data.row(r).transpose()); });
        per_value[tm.values[static_cast<std::size_t>(r)]].push_back(s);
        task_all.push_back(s);
      }
      for (const auto& [v, xs] : per_value) {
        by_value.add({name(format), name(cell->task()), v, xs.size(), mean_of(xs), sd_of(xs)});
      }
      by_task.add({name(format), name(cell->task()), task_all.size(), mean_of(task_all), sd_of(task_all)});
      all.insert(all.end(), task_all.begin(), task_all.end());
    }
    if (!all.empty()) summary.add({name(format), all.size(), mean_of(all), sd_of(all), "absolute"});
  }
}

}  // namespace

std::string Cell::label() const { return name(task()) + "/" + name(format()); }

Dataset load_dataset(const AnalysisConfig& cfg) {
  if (cfg.permutations < 99) throw Failure(kExitInput, "--permutations must be at least 99");
  if (!(cfg.depth_fraction > 0.0 && cfg.depth_fraction <= 1.0)) {
    throw Failure(kExitInput, "--depth-fraction must lie in (0, 1]");
  }
  if (cfg.formats.empty()) throw Failure(kExitInput, "no formats selected");

  std::vector<Stimulus> stimuli;
  std::vector<EmbeddingRecord> records;
  try {
    stimuli = read_stimuli(cfg.stimuli);
  } catch (const Error& e) {
    throw Failure(load_exit_code(e.code()), std::string("stimuli: ") + e.what());
  }
  try {
    records = read_embeddings(cfg.embeddings);
  } catch (const Error& e) {
    throw Failure(load_exit_code(e.code()), std::string("embeddings: ") + e.what());
  }
  if (records.empty()) throw Failure(kExitInput, "embeddings: " + cfg.embeddings.string() + " has no records");

  Dataset data;
  std::set<int> layers;
  for (const auto& r : records) layers.insert(r.layer);
  if (cfg.layer) {
    data.layer = *cfg.layer;
  } else if (layers.size() == 1) {
    data.layer = *layers.begin();
  } else {
    data.layer = select_layer_fraction(*layers.rbegin(), cfg.depth_fraction);
  }
  if (!layers.contains(data.layer)) {
    throw Failure(kExitInput, "embeddings: no records at layer " + std::to_string(data.layer));
  }

  std::set<std::pair<TaskId, NumberFormat>> present;
  for (const auto& s : stimuli) present.emplace(s.task, s.format);
  data.formats = cfg.formats;
  if (cfg.tasks.empty()) {
    for (auto t : kTemplateTasks) {
      for (auto f : data.formats) {
        if (present.contains({t, f})) {
          data.tasks.push_back(t);
          break;
        }
      }
    }
  } else {
    for (auto t : kAllTasks) {
      if (std::find(cfg.tasks.begin(), cfg.tasks.end(), t) != cfg.tasks.end()) data.tasks.push_back(t);
    }
  }

  std::vector<std::pair<TaskId, NumberFormat>> selected;
  for (auto f : data.formats) {
    for (auto t : data.tasks) {
      if (present.contains({t, f})) {
        selected.emplace_back(t, f);
      } else if (!cfg.tasks.empty()) {
        throw Failure(kExitInput, "stimuli: no stimuli for " + name(t) + "/" + name(f));
      }
    }
  }
  if (selected.empty()) throw Failure(kExitInput, "stimuli: no stimuli match the selected tasks and formats");

  // Every selected stimulus needs a record at the layer, and every record must name a known stimulus.
  std::unordered_set<std::string_view> known, have;
  for (const auto& s : stimuli) known.insert(s.id);
  for (const auto& r : records) {
    if (r.layer == data.layer) have.insert(r.stimulus_id);
  }
  std::vector<std::string> offenders;
  std::set<std::pair<TaskId, NumberFormat>> wanted(selected.begin(), selected.end());
  for (const auto& s : stimuli) {
    if (wanted.contains({s.task, s.format}) && !have.contains(s.id)) offenders.push_back("missing record " + s.id);
  }
  std::set<std::string_view> unknown;
  for (const auto& r : records) {
    if (!known.contains(r.stimulus_id)) unknown.insert(r.stimulus_id);
  }
  for (auto id : unknown) offenders.push_back("unknown id " + std::string(id));
  if (!offenders.empty()) {
    throw Failure(kExitData, std::to_string(offenders.size()) + " id mismatches between " + cfg.stimuli.string() +
                                 " and " + cfg.embeddings.string() + ": " + offender_list(offenders));
  }

  for (auto [t, f] : selected) {
    try {
      data.cells.push_back({build_task_matrix(records, stimuli, t, f, data.layer)});
    } catch (const Error& e) {
      throw Failure(load_exit_code(e.code()), name(t) + "/" + name(f) + ": " + e.what());
    }
  }

  if (cfg.n_comp) {
    data.n_comp = *cfg.n_comp;
  } else {
    double sum = 0.0;
    for (const auto& c : data.cells) {
      sum += static_cast<double>(guarded("n_comp", c.label(), [&] { return components_for_variance(c.matrix.data, 0.95); }));
    }
    data.n_comp = static_cast<int>(std::lround(sum / static_cast<double>(data.cells.size())));
  }
  return data;
}

Json config_echo(const Dataset& data, const AnalysisConfig& cfg) {
  Json tasks = Json::array(), formats = Json::array();
  for (auto t : data.tasks) tasks.push_back(name(t));
  for (auto f : data.formats) formats.push_back(name(f));
  return {{"embeddings", cfg.embeddings.string()},
          {"stimuli", cfg.stimuli.string()},
          {"layer", data.layer},
          {"depth_fraction", cfg.depth_fraction},
          {"tasks", tasks},
          {"formats", formats},
          {"seed", cfg.seed},
          {"permutations", cfg.permutations},
          {"n_comp", data.n_comp},
          {"include_properties", cfg.include_properties},
          {"density_grid", cfg.density_grid},
          {"sparseness_convention", "absolute"}};
}

Report run_analysis(std::string_view kind, const Dataset& data, const AnalysisConfig& cfg) {
  Report report;
  report.kind = std::string(kind);
  report.config = config_echo(data, cfg);
  if (kind == "effects") {
    run_effects(report, data, cfg);
  } else if (kind == "procrustes") {
    run_procrustes(report, data, cfg);
  } else if (kind == "overlap") {
    run_overlap(report, data, cfg);
  } else if (kind == "svcca") {
    run_svcca(report, data, cfg);
  } else if (kind == "axes") {
    run_axes(report, data, cfg);
  } else if (kind == "density") {
    run_density(report, data, cfg);
  } else if (kind == "sparseness") {
    run_sparseness(report, data, cfg);
  } else {
    throw Failure(kExitInput, "unknown analysis kind '" + std::string(kind) + "'");
  }
  if (const auto bad = non_finite_cells(report); !bad.empty()) {
    throw Failure(kExitAnalysis, report.kind + ": non-finite values in " + offender_list(bad));
  }
  return report;
}

}  // namespace numgeo::cli
