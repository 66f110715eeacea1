#include "numgeo/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "analysis.hpp"
#include "numgeo/error.hpp"
#include "numgeo/numgeo.hpp"
#include "numgeo/synthesize.hpp"

namespace numgeo::cli {

namespace {

std::vector<TaskId> parse_tasks(const std::vector<std::string>& names) {
  std::vector<TaskId> out;
  for (const auto& n : names) {
    const auto t = try_parse_task(n);
    if (!t) throw Failure(kExitInput, "unknown task '" + n + "'");
    if (std::find(out.begin(), out.end(), *t) == out.end()) out.push_back(*t);
  }
  return out;
}

std::vector<NumberFormat> parse_formats(const std::vector<std::string>& names) {
  std::vector<NumberFormat> out;
  for (auto f : kAllFormats) {
    for (const auto& n : names) {
      if (!try_parse_format(n)) throw Failure(kExitInput, "unknown format '" + n + "'");
      if (*try_parse_format(n) == f) {
        out.push_back(f);
        break;
      }
    }
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(kExitInput, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Library errors outside an analysis are input problems.
template <class F>
auto input_step(F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Failure(kExitInput, e.what());
  }
}

struct GenStimuliArgs {
  std::string templates;
  std::vector<std::string> tasks;
  std::vector<std::string> formats{"digit", "word"};
  std::string corpus;
  std::size_t chunks = 900;
  std::size_t insertions = 100;
  std::size_t per_value = 50;
  std::uint64_t seed = 42;
  std::string out = "stimuli.jsonl";
};

int cmd_gen_stimuli(const GenStimuliArgs& a, std::ostream& out, std::ostream& err) {
  const auto templates = a.templates.empty()
                             ? TemplateSet::builtin()
                             : input_step([&] { return TemplateSet::load(a.templates); });
  const auto formats = parse_formats(a.formats);
  std::vector<TaskId> tasks = parse_tasks(a.tasks);
  if (tasks.empty()) {
    tasks.assign(kTemplateTasks.begin(), kTemplateTasks.end());
    if (!a.corpus.empty()) {
      tasks.push_back(TaskId::PseudoSentence);
      tasks.push_back(TaskId::RealSentence);
    }
  }
  std::vector<TaskId> template_tasks;
  bool pseudo = false, real = false;
  for (auto t : tasks) {
    if (is_template_task(t)) template_tasks.push_back(t);
    pseudo |= t == TaskId::PseudoSentence;
    real |= t == TaskId::RealSentence;
  }
  if ((pseudo || real) && a.corpus.empty()) throw Failure(kExitInput, "corpus tasks need --corpus");

  const std::vector<int> values = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  auto stimuli = input_step([&] { return generate_task_stimuli(templates, template_tasks, values, formats); });
  if (pseudo || real) {
    const auto corpus = read_text(a.corpus);
    for (auto f : formats) {
      if (pseudo) {
        auto s = input_step([&] { return chunk_pseudo_sentences(corpus, a.chunks, a.insertions, f, RngSeed{a.seed}); });
        stimuli.insert(stimuli.end(), s.begin(), s.end());
      }
      if (real) {
        auto h = harvest_real_sentences(corpus, a.per_value, f);
        if (h.shortage()) {
          err << "warning: real_sentence/" << to_string(f) << " short of " << a.per_value << " sentences for";
          for (int v : h.short_values()) err << ' ' << v << " (" << h.counts[static_cast<std::size_t>(v - 1)] << ")";
          err << '\n';
        }
        stimuli.insert(stimuli.end(), h.stimuli.begin(), h.stimuli.end());
      }
    }
  }
  input_step([&] {
    write_stimuli(stimuli, a.out);
    return 0;
  });

  std::map<std::pair<TaskId, NumberFormat>, std::size_t> counts;
  for (const auto& s : stimuli) ++counts[{s.task, s.format}];
  for (const auto& [key, n] : counts) out << to_string(key.first) << '\t' << to_string(key.second) << '\t' << n << '\n';
  out << "total\t" << stimuli.size() << '\t' << a.out << '\n';
  return kExitOk;
}

struct SynthArgs {
  int num_tasks = 11;
  int reps = 5;
  int dim = 64;
  double noise = 0.05;
  double parity_gain = 0.3;
  std::uint64_t seed = 42;
  std::vector<std::string> formats{"digit", "word"};
  int layers = 12;
  double depth_fraction = 0.75;
  bool json_lines = false;
  std::string out = "synth";
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const auto formats = parse_formats(a.formats);
  const int layer = input_step([&] { return select_layer_fraction(a.layers, a.depth_fraction); });
  const auto templates = TemplateSet::builtin();
  std::vector<EmbeddingRecord> records;
  std::vector<Stimulus> stimuli;
  for (auto f : formats) {
    const auto tasks = input_step([&] {
      return synthesize(a.num_tasks, a.reps, a.dim, a.noise, a.parity_gain, RngSeed{a.seed}, f);
    });
    for (const auto& [task, tm] : tasks) {
      std::map<int, std::size_t> seen;
      for (Eigen::Index r = 0; r < tm.rows(); ++r) {
        const auto i = static_cast<std::size_t>(r);
        const int v = tm.values[i];
        const std::size_t rep = seen[v]++;
        stimuli.push_back(render_stimulus(templates, task, v, f, rep % kTemplatesPerTask, tm.ids[i]));
        std::vector<float> vec(static_cast<std::size_t>(tm.dim()));
        for (Eigen::Index c = 0; c < tm.dim(); ++c) vec[static_cast<std::size_t>(c)] = static_cast<float>(tm.data(r, c));
        records.push_back({tm.ids[i], static_cast<std::uint16_t>(layer), std::move(vec)});
      }
    }
  }
  const std::filesystem::path dir = a.out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Failure(kExitInput, "cannot create " + dir.string() + ": " + ec.message());
  const auto emb = dir / (a.json_lines ? "embeddings.jsonl" : "embeddings.nge");
  const auto stim = dir / "stimuli.jsonl";
  input_step([&] {
    write_embeddings(records, emb, a.json_lines ? EmbeddingFileFormat::JsonLines : EmbeddingFileFormat::Binary);
    write_stimuli(stimuli, stim);
    return 0;
  });
  out << "layer\t" << layer << '\n' << "records\t" << records.size() << '\t' << emb.string() << '\n'
      << "stimuli\t" << stimuli.size() << '\t' << stim.string() << '\n';
  return kExitOk;
}

struct AnalyzeArgs {
  std::vector<std::string> kinds;
  std::string embeddings;
  std::string stimuli;
  int layer = -1;
  double depth_fraction = 0.75;
  std::vector<std::string> tasks;
  std::vector<std::string> formats{"digit", "word"};
  std::uint64_t seed = 42;
  std::size_t permutations = 10000;
  int n_comp = -1;
  bool include_properties = false;
  int density_grid = 40;
  unsigned threads = 1;
  std::string out = "reports";
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  std::vector<std::string> kinds;
  for (const auto& k : a.kinds) {
    if (k == "all") {
      kinds.assign(kAnalysisKinds.begin(), kAnalysisKinds.end());
      break;
    }
    if (std::find(kAnalysisKinds.begin(), kAnalysisKinds.end(), k) == kAnalysisKinds.end()) {
      throw Failure(kExitInput, "unknown analysis kind '" + k + "'");
    }
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
  }

  AnalysisConfig cfg;
  cfg.embeddings = a.embeddings;
  cfg.stimuli = a.stimuli;
  if (a.layer >= 0) cfg.layer = a.layer;
  cfg.depth_fraction = a.depth_fraction;
  cfg.tasks = parse_tasks(a.tasks);
  cfg.formats = parse_formats(a.formats);
  cfg.seed = a.seed;
  cfg.permutations = a.permutations;
  if (a.n_comp >= 0) cfg.n_comp = a.n_comp;
  cfg.include_properties = a.include_properties;
  cfg.density_grid = a.density_grid;
  cfg.threads = a.threads;

  const auto data = load_dataset(cfg);
  for (const auto& kind : kinds) {
    const auto report = run_analysis(kind, data, cfg);
    for (const auto& path : input_step([&] { return write_report(report, a.out); })) {
      out << path.string() << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Representational geometry of number embeddings", "numgeo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  GenStimuliArgs gen;
  auto* g = app.add_subcommand("gen-stimuli", "Render task sentences (and corpus sentences) as JSON lines");
  g->add_option("--templates", gen.templates, "Template JSON file (default: built-in set)");
  g->add_option("--tasks", gen.tasks, "Tasks to render")->delimiter(',');
  g->add_option("--formats", gen.formats, "digit,word")->delimiter(',')->capture_default_str();
  g->add_option("--corpus", gen.corpus, "Plain-text corpus for pseudo_sentence and real_sentence");
  g->add_option("--chunks", gen.chunks, "Seven-word corpus segments")->capture_default_str();
  g->add_option("--insertions", gen.insertions, "Insertions per value")->capture_default_str();
  g->add_option("--per-value", gen.per_value, "Real sentences per value")->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--out", gen.out, "Output JSON-lines file")->capture_default_str();

  SynthArgs syn;
  auto* s = app.add_subcommand("synth", "Write synthetic embeddings with a planted shared number line");
  s->add_option("--num-tasks", syn.num_tasks)->capture_default_str();
  s->add_option("--reps", syn.reps, "Sentences per task and value")->capture_default_str();
  s->add_option("--dim", syn.dim)->capture_default_str();
  s->add_option("--noise", syn.noise)->capture_default_str();
  s->add_option("--parity-gain", syn.parity_gain)->capture_default_str();
  s->add_option("--seed", syn.seed)->capture_default_str();
  s->add_option("--formats", syn.formats)->delimiter(',')->capture_default_str();
  s->add_option("--layers", syn.layers, "Model depth used to name the stored layer")->capture_default_str();
  s->add_option("--depth-fraction", syn.depth_fraction)->capture_default_str();
  s->add_flag("--json-lines", syn.json_lines, "Write embeddings.jsonl instead of the binary format");
  s->add_option("--out", syn.out, "Output directory")->capture_default_str();

  AnalyzeArgs an;
  auto* z = app.add_subcommand("analyze", "Run analyses and write JSON and CSV reports");
  z->add_option("kinds", an.kinds, "effects procrustes overlap svcca axes density sparseness | all")->required();
  z->add_option("--embeddings", an.embeddings)->required();
  z->add_option("--stimuli", an.stimuli)->required();
  auto* layer = z->add_option("--layer", an.layer, "Layer to analyze");
  z->add_option("--depth-fraction", an.depth_fraction, "Layer as a fraction of the deepest stored layer")
      ->capture_default_str()
      ->excludes(layer);
  z->add_option("--tasks", an.tasks)->delimiter(',');
  z->add_option("--formats", an.formats)->delimiter(',')->capture_default_str();
  z->add_option("--seed", an.seed)->capture_default_str();
  z->add_option("--permutations", an.permutations)->capture_default_str();
  z->add_option("--n-comp", an.n_comp, "Components for overlap and SVCCA (default: mean 95% count)");
  z->add_flag("--include-properties", an.include_properties, "Include parity and primality in effect fits");
  z->add_option("--density-grid", an.density_grid)->capture_default_str();
  z->add_option("--threads", an.threads, "Workers for pairwise analyses")->capture_default_str();
  z->add_option("--out", an.out, "Report directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (g->parsed()) return cmd_gen_stimuli(gen, out, err);
    if (s->parsed()) return cmd_synth(syn, out);
    return cmd_analyze(an, out);
  } catch (const Failure& f) {
    err << "error: " << f.what() << '\n';
    return f.exit_code();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitAnalysis;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitAnalysis;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"numgeo"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace numgeo::cli
