#include "aaseq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "aaseq/embed.hpp"
#include "aaseq/error.hpp"
#include "aaseq/io.hpp"
#include "aaseq/plot.hpp"
#include "aaseq/seq_io.hpp"
#include "aaseq/trainer.hpp"
#include "format.hpp"

namespace aaseq {

namespace {

namespace fs = std::filesystem;
using detail::format_double;

// Threshold for iterations_to_threshold when --threshold is not given,
// relative to the final loss of the alpha = 0 run.
constexpr double kDefaultThresholdFactor = 1.1;

/// Numerical failure surfaced by a command after its partial outputs are on disk.
struct NumericalFailure {
  std::string message;
};

fs::path with_suffix(const std::string& prefix, std::string_view suffix) {
  return fs::path(prefix + std::string(suffix));
}

KeyValueFile manifest_header(std::string_view command) {
  KeyValueFile m;
  m.set("command", std::string(command));
  m.set("tool_version", std::string(kToolVersion));
  return m;
}

void record_input(KeyValueFile& manifest, const std::string& key, std::string_view bytes) {
  manifest.set("input_digest." + key, content_digest(bytes));
}

void write_output(KeyValueFile& manifest, const std::string& key, const fs::path& path,
                  std::string_view bytes) {
  write_text_file(path, bytes);
  manifest.set("output." + key, path.string());
  manifest.set("output_digest." + key, content_digest(bytes));
}

std::vector<double> parse_grid(const std::string& text) {
  const char* op = "parse_grid";
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3) {
      throw Error(ErrorKind::InvalidParameter, op, "range grid must be start:stop:step");
    }
    const double start = detail::parse_double(parts[0], op);
    const double stop = detail::parse_double(parts[1], op);
    const double step = detail::parse_double(parts[2], op);
    if (!(step > 0.0) || stop < start) {
      throw Error(ErrorKind::InvalidParameter, op, "range grid needs step > 0 and stop >= start");
    }
    for (int i = 0;; ++i) {
      // Rounded to 12 decimals so that 0:1:0.1 yields exactly 0.1, 0.2, ...
      const double v = std::round((start + i * step) * 1e12) / 1e12;
      if (v > stop + 1e-9) break;
      grid.push_back(v);
    }
  } else {
    for (std::string_view part : detail::split(text, ',')) grid.push_back(detail::parse_double(part, op));
  }
  if (grid.empty()) throw Error(ErrorKind::InvalidParameter, op, "empty grid");
  return grid;
}

struct Targets {
  std::vector<std::string> classes;
  Eigen::MatrixXd one_hot;
};

Targets targets_for_rows(const std::vector<std::string>& row_ids,
                         const std::map<std::string, std::string>& labels) {
  std::set<std::string> distinct;
  std::vector<std::string> row_labels;
  for (const std::string& id : row_ids) {
    const auto it = labels.find(id);
    if (it == labels.end()) {
      throw Error(ErrorKind::UnknownLabel, "attach_labels", "matrix row '" + id + "' has no label");
    }
    distinct.insert(it->second);
    row_labels.push_back(it->second);
  }
  Targets t;
  t.classes.assign(distinct.begin(), distinct.end());
  if (t.classes.size() < 2) {
    throw Error(ErrorKind::InvalidParameter, "attach_labels", "need at least 2 classes");
  }
  t.one_hot = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(row_ids.size()),
                                    static_cast<Eigen::Index>(t.classes.size()));
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    const auto c = std::lower_bound(t.classes.begin(), t.classes.end(), row_labels[i]) -
                   t.classes.begin();
    t.one_hot(static_cast<Eigen::Index>(i), c) = 1.0;
  }
  return t;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  SynthParams params;
  std::string alphabet = "amino";
  std::string out;
};

void run_synth(const SynthArgs& a, std::ostream& out) {
  const Alphabet alphabet = Alphabet::from_spec(a.alphabet);
  const SynthOutput synth = synth_dataset(a.params, alphabet);
  KeyValueFile m = manifest_header("synth");
  m.set("classes", std::to_string(a.params.num_classes));
  m.set("per-class", std::to_string(a.params.per_class));
  m.set("length", std::to_string(a.params.length));
  m.set("motif-len", std::to_string(a.params.motif_len));
  m.set("noise", format_double(a.params.noise));
  m.set("seed", std::to_string(a.params.seed));
  m.set("alphabet", a.alphabet);
  m.set("out", a.out);
  write_output(m, "fasta", with_suffix(a.out, ".fasta"), to_fasta(synth.dataset));
  write_output(m, "labels", with_suffix(a.out, ".labels.tsv"), to_label_tsv(synth.dataset));
  m.set("status", "ok");
  write_text_file(with_suffix(a.out, ".manifest"), m.to_text());
  out << "wrote " << synth.dataset.sequences.size() << " sequences in "
      << synth.dataset.num_classes() << " classes to " << a.out << ".fasta\n";
}

// ---- embed -----------------------------------------------------------------

struct EmbedArgs {
  std::string fasta;
  std::string labels;
  std::string method = "spike2vec";
  std::optional<int> k;
  std::optional<int> m;
  std::optional<int> g;
  std::string alphabet = "amino";
  std::size_t pca_threshold = 1000;
  int pca_components = 500;
  std::string out;
};

void run_embed(const EmbedArgs& a, std::ostream& out, std::ostream& err) {
  SpectrumConfig cfg =
      SpectrumConfig::defaults(parse_embed_method(a.method), Alphabet::from_spec(a.alphabet));
  if (a.k) cfg.k = *a.k;
  if (a.m) cfg.m = *a.m;
  if (a.g) cfg.g = *a.g;
  cfg.validate();

  const std::string fasta_text = read_text_file(a.fasta, "parse_fasta");
  const std::string label_text = read_text_file(a.labels, "attach_labels");
  const auto records = parse_fasta(fasta_text, cfg.alphabet);
  const AttachResult joined = attach_labels(records, parse_label_table(label_text));
  if (!joined.unlabeled.empty()) {
    err << "warning: attach_labels: dropped " << joined.unlabeled.size()
        << " record(s) without a label (first: " << joined.unlabeled.front() << ")\n";
  }
  const FeatureMatrix matrix =
      embed_dataset(joined.dataset, cfg, EmbedOptions{a.pca_threshold, a.pca_components});

  KeyValueFile m = manifest_header("embed");
  m.set("fasta", a.fasta);
  m.set("labels", a.labels);
  m.set("method", std::string(to_string(cfg.method)));
  m.set("k", std::to_string(cfg.k));
  m.set("m", std::to_string(cfg.m));
  m.set("g", std::to_string(cfg.g));
  m.set("alphabet", a.alphabet);
  m.set("pca-threshold", std::to_string(a.pca_threshold));
  m.set("pca-components", std::to_string(a.pca_components));
  m.set("out", a.out);
  record_input(m, "fasta", fasta_text);
  record_input(m, "labels", label_text);
  write_output(m, "matrix", with_suffix(a.out, ".matrix.csv"), to_matrix_csv(matrix));
  write_output(m, "labels", with_suffix(a.out, ".labels.tsv"), to_label_tsv(joined.dataset));
  m.set("rows", std::to_string(matrix.rows()));
  m.set("cols", std::to_string(matrix.cols()));
  m.set("pca_applied", matrix.columns == ColumnMeaning::PcRank ? "true" : "false");
  m.set("status", "ok");
  write_text_file(with_suffix(a.out, ".manifest"), m.to_text());
  out << "embedded " << matrix.rows() << " sequences into " << matrix.cols() << " columns ("
      << to_string(cfg.method) << (matrix.columns == ColumnMeaning::PcRank ? ", PCA" : "")
      << ")\n";
}

// ---- train / sweep ---------------------------------------------------------

struct TrainArgs {
  std::string matrix;
  std::string labels;
  TrainConfig cfg;
  std::string norm = "softmax";
  std::string out;
};

struct LoadedData {
  std::string matrix_text;
  std::string label_text;
  FeatureMatrix features;
  Targets targets;
};

LoadedData load_training_data(const std::string& matrix_path, const std::string& label_path) {
  LoadedData d;
  d.matrix_text = read_text_file(matrix_path, "parse_matrix_csv");
  d.label_text = read_text_file(label_path, "attach_labels");
  d.features = parse_matrix_csv(d.matrix_text);
  d.targets = targets_for_rows(d.features.row_ids, parse_label_table(d.label_text));
  return d;
}

void set_train_params(KeyValueFile& m, const TrainConfig& cfg) {
  m.set("iters", std::to_string(cfg.iters));
  m.set("seed", std::to_string(cfg.seed));
  m.set("norm", std::string(to_string(cfg.norm)));
  m.set("step", format_double(cfg.step));
  m.set("epsilon", format_double(cfg.epsilon));
}

void run_train(TrainArgs a, std::ostream& out) {
  a.cfg.norm = parse_norm_mode(a.norm);
  a.cfg.validate();
  const LoadedData data = load_training_data(a.matrix, a.labels);
  const TrainResult result = train(data.features.values, data.targets.one_hot, a.cfg);

  KeyValueFile m = manifest_header("train");
  m.set("matrix", a.matrix);
  m.set("labels", a.labels);
  m.set("alpha", format_double(a.cfg.alpha));
  set_train_params(m, a.cfg);
  m.set("out", a.out);
  record_input(m, "matrix", data.matrix_text);
  record_input(m, "labels", data.label_text);
  write_output(m, "trace", with_suffix(a.out, ".trace.csv"), to_trace_csv(result.trace));
  SavedModel model{data.targets.classes, a.cfg, result.state.iteration, result.state.weights};
  write_output(m, "model", with_suffix(a.out, ".model"), to_model_text(model));
  m.set("degenerate_samples", std::to_string(result.trace.degenerate_samples));
  const bool ok = result.trace.status == TrainStatus::Ok;
  m.set("status", ok ? "ok" : "nonfinite");
  m.set("partial", ok ? "false" : "true");
  if (!ok) m.set("diagnostic", result.trace.diagnostic);
  write_text_file(with_suffix(a.out, ".manifest"), m.to_text());
  if (!ok) throw NumericalFailure{result.trace.diagnostic};
  const TraceRecord& last = result.trace.records.back();
  out << "final mean_loss=" << format_double(last.mean_loss)
      << " accuracy=" << format_double(last.accuracy) << "\n";
}

struct SweepArgs {
  std::string matrix;
  std::string labels;
  TrainConfig cfg;
  std::string norm = "softmax";
  std::string grid = "0:1:0.1";
  std::optional<double> threshold;
  std::string out;
};

void run_sweep(SweepArgs a, std::ostream& out) {
  a.cfg.norm = parse_norm_mode(a.norm);
  a.cfg.validate();
  const std::vector<double> grid = parse_grid(a.grid);
  const LoadedData data = load_training_data(a.matrix, a.labels);

  AlphaSweepResult sweep =
      alpha_sweep(data.features.values, data.targets.one_hot, a.cfg, grid,
                  a.threshold.value_or(-std::numeric_limits<double>::infinity()));
  std::optional<double> threshold = a.threshold;
  if (!threshold) {
    const AlphaRun* baseline = sweep.find(0.0);
    if (baseline != nullptr && !baseline->failed) {
      threshold = kDefaultThresholdFactor * baseline->final_loss;
    }
    for (AlphaRun& run : sweep.runs) {
      run.iterations_to_threshold =
          threshold ? iterations_to_threshold(run.trace, *threshold) : std::nullopt;
    }
  }

  KeyValueFile m = manifest_header("sweep");
  m.set("matrix", a.matrix);
  m.set("labels", a.labels);
  m.set("grid", a.grid);
  if (a.threshold) m.set("threshold", format_double(*a.threshold));
  set_train_params(m, a.cfg);
  m.set("out", a.out);
  record_input(m, "matrix", data.matrix_text);
  record_input(m, "labels", data.label_text);
  if (threshold) m.set("resolved_threshold", format_double(*threshold));
  write_output(m, "sweep", with_suffix(a.out, ".sweep.csv"), to_sweep_csv(sweep));
  for (const AlphaRun& run : sweep.runs) {
    const std::string tag = "alpha-" + format_double(run.alpha);
    write_output(m, tag, with_suffix(a.out, "." + tag + ".trace.csv"), to_trace_csv(run.trace));
  }
  if (sweep.best_alpha) m.set("best_alpha", format_double(*sweep.best_alpha));
  m.set("status", sweep.best_alpha ? "ok" : "failed");
  write_text_file(with_suffix(a.out, ".manifest"), m.to_text());
  if (!sweep.best_alpha) throw NumericalFailure{"every alpha in the grid diverged"};
  out << "best_alpha=" << format_double(*sweep.best_alpha) << "\n";
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
  std::string with_aa;
  std::string without_aa;
  std::string with_aa_label = "with AA";
  std::string without_aa_label = "without AA";
  std::string title;
  std::string out;
};

void run_report(const ReportArgs& a, std::ostream& out) {
  if (a.with_aa.empty() && a.without_aa.empty()) {
    throw Error(ErrorKind::InvalidParameter, "report", "give --with-aa and/or --without-aa");
  }
  KeyValueFile manifest = manifest_header("report");
  if (!a.with_aa.empty()) manifest.set("with-aa", a.with_aa);
  if (!a.without_aa.empty()) manifest.set("without-aa", a.without_aa);
  manifest.set("with-aa-label", a.with_aa_label);
  manifest.set("without-aa-label", a.without_aa_label);
  manifest.set("title", a.title);
  manifest.set("out", a.out);

  PlotSpec spec;
  spec.title = a.title;
  auto add = [&](const std::string& path, const std::string& label, SeriesRole role,
                 const std::string& key) {
    if (path.empty()) return;
    const std::string text = read_text_file(path, "parse_trace_csv");
    spec.series.push_back({label, parse_trace_csv(text), role});
    record_input(manifest, key, text);
  };
  add(a.without_aa, a.without_aa_label, SeriesRole::WithoutAnderson, "without-aa");
  add(a.with_aa, a.with_aa_label, SeriesRole::WithAnderson, "with-aa");
  write_output(manifest, "svg", fs::path(a.out), render_loss_svg(spec));
  manifest.set("status", "ok");
  write_text_file(fs::path(a.out + ".manifest"), manifest.to_text());
  out << "wrote " << a.out << "\n";
}

// ---- driver ----------------------------------------------------------------

// Splices `--key value` pairs from a key=value config file in front of the
// command-line arguments, so explicit flags (parsed later) take precedence.
// Keys that are not options of `sub` are ignored.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& sub,
                                       std::size_t sub_pos) {
  std::vector<std::string> result(args.begin(), args.begin() + static_cast<long>(sub_pos) + 1);
  std::vector<std::string> rest;
  std::optional<std::string> config_path;
  for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path) {
    const KeyValueFile config = KeyValueFile::parse(read_text_file(*config_path, "config"));
    for (const auto& [key, value] : config.entries()) {
      if (sub.get_option_no_throw("--" + key) == nullptr) continue;
      result.push_back("--" + key);
      result.push_back(value);
    }
  }
  result.insert(result.end(), rest.begin(), rest.end());
  return result;
}

int replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const KeyValueFile manifest =
      KeyValueFile::parse(read_text_file(manifest_path, "replay"));
  const auto command = manifest.get("command");
  if (!command) throw Error(ErrorKind::InvalidParameter, "replay", "manifest has no command");
  for (const auto& [key, digest] : manifest.entries()) {
    if (key.rfind("input_digest.", 0) != 0) continue;
    const std::string input = key.substr(13);
    const auto path = manifest.get(input);
    if (!path) continue;
    if (content_digest(read_text_file(*path, "replay")) != digest) {
      throw Error(ErrorKind::InvalidParameter, "replay",
                  "input '" + *path + "' changed since the manifest was written");
    }
  }
  return run_cli({"aaseq", *command, "--config", manifest_path}, out, err);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequence embeddings and Anderson-accelerated linear classifier training"};
  app.name("aaseq");
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
  synth_cmd->add_option("--classes", synth.params.num_classes, "Number of classes")
      ->capture_default_str();
  synth_cmd->add_option("--per-class", synth.params.per_class, "Sequences per class")
      ->capture_default_str();
  synth_cmd->add_option("--length", synth.params.length, "Sequence length")->capture_default_str();
  synth_cmd->add_option("--motif-len", synth.params.motif_len, "Planted motif length")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.params.noise, "Per-residue substitution probability")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.params.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--alphabet", synth.alphabet, "amino, nucleotide or a symbol list")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output prefix")->required();

  EmbedArgs embed;
  CLI::App* embed_cmd = app.add_subcommand("embed", "Embed FASTA sequences into a feature matrix");
  embed_cmd->add_option("--fasta", embed.fasta, "FASTA input")->required();
  embed_cmd->add_option("--labels", embed.labels, "Label TSV (id<TAB>class)")->required();
  embed_cmd->add_option("--method", embed.method, "spike2vec, minimizer or spaced")
      ->capture_default_str();
  embed_cmd->add_option("--k", embed.k, "k-mer length (defaults: 3, 9, 4 by method)");
  embed_cmd->add_option("--m", embed.m, "Minimizer length (default 3)");
  embed_cmd->add_option("--g", embed.g, "Spaced window length (default 9)");
  embed_cmd->add_option("--alphabet", embed.alphabet, "amino, nucleotide or a symbol list")
      ->capture_default_str();
  embed_cmd->add_option("--pca-threshold", embed.pca_threshold, "Apply PCA above this width")
      ->capture_default_str();
  embed_cmd->add_option("--pca-components", embed.pca_components, "Principal components kept")
      ->capture_default_str();
  embed_cmd->add_option("--out", embed.out, "Output prefix")->required();

  auto add_train_options = [](CLI::App* cmd, TrainConfig& cfg, std::string& norm) {
    cmd->add_option("--iters", cfg.iters, "Iterations")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Weight initialization seed")->capture_default_str();
    cmd->add_option("--norm", norm, "softmax or paper-sum")->capture_default_str();
    cmd->add_option("--step", cfg.step, "Gradient step multiplier")->capture_default_str();
    cmd->add_option("--epsilon", cfg.epsilon, "Log guard")->capture_default_str();
  };

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the classifier and write a loss trace");
  train_cmd->add_option("--matrix", train_args.matrix, "Feature matrix CSV")->required();
  train_cmd->add_option("--labels", train_args.labels, "Label TSV")->required();
  train_cmd->add_option("--alpha", train_args.cfg.alpha, "Anderson factor in [0, 1]")
      ->capture_default_str();
  add_train_options(train_cmd, train_args.cfg, train_args.norm);
  train_cmd->add_option("--out", train_args.out, "Output prefix")->required();

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Train once per alpha and pick the best");
  sweep_cmd->add_option("--matrix", sweep.matrix, "Feature matrix CSV")->required();
  sweep_cmd->add_option("--labels", sweep.labels, "Label TSV")->required();
  sweep_cmd->add_option("--grid", sweep.grid, "start:stop:step or comma list")
      ->capture_default_str();
  sweep_cmd->add_option("--threshold", sweep.threshold,
                        "Loss threshold (default 1.1 x final loss at alpha 0)");
  add_train_options(sweep_cmd, sweep.cfg, sweep.norm);
  sweep_cmd->add_option("--out", sweep.out, "Output prefix")->required();

  ReportArgs report;
  CLI::App* report_cmd = app.add_subcommand("report", "Plot loss traces to SVG");
  report_cmd->add_option("--with-aa", report.with_aa, "Trace CSV trained with AA (green)");
  report_cmd->add_option("--without-aa", report.without_aa, "Trace CSV trained without AA (red)");
  report_cmd->add_option("--with-aa-label", report.with_aa_label)->capture_default_str();
  report_cmd->add_option("--without-aa-label", report.without_aa_label)->capture_default_str();
  report_cmd->add_option("--title", report.title);
  report_cmd->add_option("--out", report.out, "SVG output path")->required();

  std::string replay_manifest;
  CLI::App* replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay_cmd->add_option("manifest", replay_manifest, "Manifest file")->required();

  for (CLI::App* cmd : {synth_cmd, embed_cmd, train_cmd, sweep_cmd, report_cmd}) {
    cmd->add_option("--config", "key=value file; explicit flags override it");
  }

  try {
    std::vector<std::string> argv = args;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (CLI::App* sub = app.get_subcommand_no_throw(args[i]); sub != nullptr) {
        argv = expand_config(args, *sub, i);
        break;
      }
    }
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  } catch (const Error& e) {
    err << "aaseq: error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (synth_cmd->parsed()) run_synth(synth, out);
    if (embed_cmd->parsed()) run_embed(embed, out, err);
    if (train_cmd->parsed()) {
      if (!(train_args.cfg.alpha >= 0.0 && train_args.cfg.alpha <= 1.0)) {
        throw Error(ErrorKind::InvalidParameter, "train", "--alpha must be in [0, 1]");
      }
      run_train(train_args, out);
    }
    if (sweep_cmd->parsed()) run_sweep(sweep, out);
    if (report_cmd->parsed()) run_report(report, out);
    if (replay_cmd->parsed()) return replay(replay_manifest, out, err);
  } catch (const NumericalFailure& f) {
    err << "aaseq: numerical failure: " << f.message << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "aaseq: error: " << e.what() << "\n";
    return is_numerical(e.kind()) ? kExitNumerical : kExitInput;
  } catch (const std::exception& e) {
    err << "aaseq: error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace aaseq
