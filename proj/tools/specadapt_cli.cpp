// specadapt: data generation, offline training, prequential streaming runs,
// report comparison, drift checks and on-host timing.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specadapt/adaptation.hpp"
#include "specadapt/dimred.hpp"
#include "specadapt/drift.hpp"
#include "specadapt/error.hpp"
#include "specadapt/model_io.hpp"
#include "specadapt/network.hpp"
#include "specadapt/spectra.hpp"
#include "specadapt/streaming.hpp"
#include "specadapt/synthgen.hpp"

using namespace specadapt;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Seed for every random choice of the command");
  sub->add_option("--config", c.config, "Flat key=value file; command-line flags override it");
  sub->add_option("--out", c.out, "Output path");
}

struct SynthOptions {
  std::uint64_t spec_seed = 1;
  std::size_t dim = 1024;
  int classes = kDefaultClasses;
  double noise = 0.02;

  void add(CLI::App* sub) {
    sub->add_option("--spec-seed", spec_seed, "Seed of the class line tables");
    sub->add_option("--dim", dim, "Spectrum length D");
    sub->add_option("--classes", classes, "Number of classes");
    sub->add_option("--noise", noise, "Gaussian noise sigma");
  }
  GeneratorSpec spec() const {
    auto s = default_spec(spec_seed, classes, dim);
    s.noise_sigma = noise;
    return s;
  }
};

// ---- config file -----------------------------------------------------------

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    ++row;
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(row - 1, "expected key=value in " + path);
    std::string key = trim(t.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

// Command-line tokens with the config file's entries inserted right after the
// subcommand name, so later flags win (options take their last value).
std::vector<std::string> expand_config(const CLI::App& app, int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;

  std::size_t pos = 0;
  const CLI::App* sub = nullptr;
  for (; pos < args.size(); ++pos) {
    sub = app.get_subcommand_no_throw(args[pos]);
    if (sub) break;
  }
  if (!sub) return args;

  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config(*path)) {
    if (key == "config") continue;
    if (sub->get_option_no_throw("--" + key)) {
      injected.push_back("--" + key + "=" + value);
      continue;
    }
    bool known = false;
    for (const auto* other : app.get_subcommands({})) {
      known = known || other->get_option_no_throw("--" + key) != nullptr;
    }
    if (!known) std::cerr << "warning: ignoring unknown config key '" << key << "'\n";
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos) + 1, injected.begin(),
              injected.end());
  return args;
}

// ---- helpers ---------------------------------------------------------------

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Lltm make_lltm(const FeatureSet& pool, double amount, std::uint64_t seed) {
  if (amount <= 1.0) return build_lltm(pool, amount, seed);
  if (amount != std::floor(amount)) throw Error("--L above 1 must be a whole sample count");
  if (amount > static_cast<double>(pool.size())) {
    throw Error("--L " + fmt("%.0f", amount) + " exceeds the " + std::to_string(pool.size()) +
                " available LLTM samples");
  }
  return build_lltm_count(pool, static_cast<std::size_t>(amount), seed);
}

struct RetrainFlags {
  int epochs = kDefaultRetrainEpochs;
  double lr = 0.01;
  double momentum = 0.9;
  int batch = 64;
  double gamma = 10.0;
  std::string ramp = "up";

  void add(CLI::App* sub) {
    sub->add_option("--retrain-epochs", epochs, "Epochs per retrain episode");
    sub->add_option("--lr", lr, "Learning rate");
    sub->add_option("--momentum", momentum, "SGD momentum");
    sub->add_option("--batch", batch, "Mini-batch size");
    sub->add_option("--grl-gamma", gamma, "Reversal schedule steepness");
    sub->add_option("--ramp", ramp, "Reversal strength over training: up or down")
        ->check(CLI::IsMember({"up", "down"}));
  }
  TrainConfig config(std::uint64_t seed, double dropout) const {
    TrainConfig c;
    c.epochs = epochs;
    c.learning_rate = lr;
    c.momentum = momentum;
    c.batch_size = batch;
    c.grl_gamma = gamma;
    c.ramp = ramp == "down" ? LambdaRamp::kRampDown : LambdaRamp::kRampUp;
    c.seed = seed;
    c.dropout_rate = dropout;
    return c;
  }
};

// ---- gen -------------------------------------------------------------------

struct GenOptions {
  Common common;
  SynthOptions synth;
  std::size_t n = 1000;
  std::string shift = "none";
  std::size_t shift_start = 0;
};

int cmd_gen(const GenOptions& o) {
  if (o.common.out.empty()) throw Error("gen needs --out");
  const auto spec = o.synth.spec();
  if (o.n == 0) throw Error("--n must be at least 1");
  SpectraSet set(spec.dim, spec.n_classes);
  const std::size_t clean = o.shift == "default" ? std::min(o.shift_start, o.n) : o.n;
  if (clean > 0) {
    for (auto& s : generate(spec, clean, std::nullopt, o.common.seed)) set.add(s);
  }
  if (clean < o.n) {
    for (auto& s : generate(spec, o.n - clean, ShiftSpec{}, o.common.seed + 1)) set.add(s);
  }
  save_spectra(set, o.common.out);

  std::vector<std::size_t> counts(static_cast<std::size_t>(spec.n_classes));
  for (const auto& s : set) ++counts[static_cast<std::size_t>(*s.label)];
  std::cout << "wrote " << set.size() << " spectra (" << spec.n_classes << " classes, D="
            << spec.dim << ", " << o.n - clean << " shifted) to " << o.common.out << "\n";
  std::cout << "class counts:";
  for (auto c : counts) std::cout << ' ' << c;
  std::cout << "\n";
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainOptions {
  Common common;
  SynthOptions synth;
  std::string data;
  std::size_t i = 2000;
  double val = 0.2;
  Eigen::Index k = 0;
  int hidden = 64;
  int epochs = 100;
  double lr = 0.01;
  double momentum = 0.9;
  int batch = 64;
  double dropout = 0.25;
  std::string save_train;
};

int cmd_train(const TrainOptions& o) {
  if (o.common.out.empty()) throw Error("train needs --out");
  if (!(o.val >= 0.0 && o.val < 1.0)) throw Error("--val must lie in [0,1)");
  const SpectraSet raw = o.data.empty()
                             ? generate(o.synth.spec(), o.i, std::nullopt, o.common.seed)
                             : load_spectra(o.data, o.synth.classes);
  for (const auto& s : raw) {
    if (!s.label) throw Error("training data must be fully labeled");
  }
  const std::vector<double> fractions{1.0 - o.val, o.val};
  const auto parts = split(raw, fractions, o.common.seed);
  const SpectraSet train = normalize_all(parts[0]);
  const SpectraSet val = normalize_all(parts[1]);
  if (train.size() < 2) throw Error("need at least 2 training spectra");

  PcaOptions pca_opts;
  pca_opts.k = o.k > 0 ? o.k : default_components(train.size(), train.dim());
  pca_opts.seed = o.common.seed;
  Pipeline pipe;
  pipe.reduction = fit_pca(train, pca_opts);
  const FeatureSet ftrain = reduce(pipe.reduction, train);

  TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.learning_rate = o.lr;
  cfg.momentum = o.momentum;
  cfg.batch_size = o.batch;
  cfg.dropout_rate = o.dropout;
  cfg.seed = o.common.seed;
  auto init = init_model(pipe.reduction.output_dim(), o.hidden, raw.n_classes(), o.common.seed,
                         o.dropout);
  pipe.network = train_supervised(std::move(init), ftrain, cfg).model;

  std::cout << "train " << train.size() << " spectra, validation " << val.size()
            << " spectra, D=" << train.dim() << ", k=" << pca_opts.k << "\n";
  std::cout << "train accuracy " << fmt("%.6f", evaluate_accuracy(pipe.network, ftrain)) << "\n";
  if (!val.empty()) {
    const double acc = evaluate_accuracy(pipe.network, reduce(pipe.reduction, val));
    std::cout << "validation accuracy " << fmt("%.6f", acc) << "\n";
  }

  Checkpoint ckpt;
  ckpt.pipeline = std::move(pipe);
  ckpt.meta.seeds = {{"seed", o.common.seed}};
  if (o.data.empty()) ckpt.meta.seeds["spec_seed"] = o.synth.spec_seed;
  ckpt.meta.config = {{"data", o.data.empty() ? "synthetic" : o.data},
                      {"i", std::to_string(raw.size())},
                      {"k", std::to_string(pca_opts.k)},
                      {"hidden", std::to_string(o.hidden)},
                      {"epochs", std::to_string(o.epochs)},
                      {"lr", fmt("%g", o.lr)},
                      {"momentum", fmt("%g", o.momentum)},
                      {"batch", std::to_string(o.batch)},
                      {"dropout", fmt("%g", o.dropout)},
                      {"val", fmt("%g", o.val)}};
  ckpt.meta.created = utc_timestamp();
  save_checkpoint(ckpt, o.common.out);
  std::cout << "wrote checkpoint " << o.common.out << "\n";

  if (!o.save_train.empty()) {
    // Raw training split: the LLTM source for `stream`.
    save_spectra(parts[0], o.save_train);
    std::cout << "wrote training spectra " << o.save_train << "\n";
  }
  return 0;
}

// ---- stream ----------------------------------------------------------------

struct StreamOptions {
  Common common;
  RetrainFlags retrain;
  std::string model, stream, lltm, model_out;
  double L = 1.0;
  std::size_t U = 100;
  std::size_t chunk_size = 2500;
  std::size_t n_chunks = 10;
  bool adapt = false;
  std::string fill = "tail";
};

int cmd_stream(const StreamOptions& o) {
  const Checkpoint ckpt = load_checkpoint(o.model);
  const auto& pipe = ckpt.pipeline;
  const FeatureSet stream = pipe.features(load_spectra(o.stream, pipe.network.n_classes()));
  const FeatureSet pool = pipe.features(load_spectra(o.lltm, pipe.network.n_classes()));
  const Lltm lltm = make_lltm(pool, o.L, o.common.seed);

  StreamConfig cfg;
  cfg.chunk_size = o.chunk_size;
  cfg.n_chunks = o.n_chunks;
  cfg.ustm_capacity = o.U;
  cfg.adapt = o.adapt;
  cfg.fill = o.fill == "uniform" ? UstmFill::kUniform : UstmFill::kTail;
  cfg.retrain = o.retrain.config(o.common.seed, pipe.network.dropout_rate);
  const auto run = prequential_run(pipe.network, stream, lltm, cfg);

  std::cout << (o.adapt ? "adaptive" : "baseline") << " run, LLTM " << lltm.size()
            << ", USTM " << o.U << "\n";
  for (const auto& r : run.report.chunks) {
    std::cout << "chunk " << r.chunk_index << "  n=" << r.n_samples << "  accuracy "
              << fmt("%.6f", r.accuracy) << "  retrain " << fmt("%.3f", r.retrain_seconds)
              << " s  inference " << fmt("%.3f", r.inference_seconds) << " s\n";
  }
  std::cout << "average accuracy " << fmt("%.6f", run.report.average_accuracy) << "\n";
  if (!o.common.out.empty()) write_report(run.report, o.common.out);
  if (!o.model_out.empty()) {
    Checkpoint adapted = ckpt;
    adapted.pipeline.network = run.final_model;
    adapted.meta.created = utc_timestamp();
    save_checkpoint(adapted, o.model_out);
  }
  return 0;
}

// ---- compare ---------------------------------------------------------------

struct CompareOptions {
  Common common;
  std::string a, b;
};

int cmd_compare(const CompareOptions& o) {
  const auto cmp = compare_reports(read_report(o.a), read_report(o.b));
  std::cout << "chunk  acc_a     acc_b     delta\n";
  for (std::size_t i = 0; i < cmp.deltas.size(); ++i) {
    std::cout << i << "  " << fmt("%.6f", cmp.acc_a[i]) << "  " << fmt("%.6f", cmp.acc_b[i])
              << "  " << fmt("%+.6f", cmp.deltas[i]) << "\n";
  }
  std::cout << "average delta " << fmt("%+.6f", cmp.average_delta) << "\n";
  if (!o.common.out.empty()) write_comparison(cmp, o.common.out);
  return 0;
}

// ---- bench -----------------------------------------------------------------

struct BenchOptions {
  Common common;
  RetrainFlags retrain;
  std::string model, stream, lltm;
  std::uint64_t spec_seed = 1;
  std::size_t U = 100;
  std::size_t chunk_size = 2500;
  int repeat = 5;
  bool inference_only = false;
};

void print_timing(const std::string& what, const std::vector<double>& t) {
  const double mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
  std::cout << what << ": ";
  if (t.size() == 1) {
    std::cout << fmt("%.6f", mean) << " s (1 run)\n";
    return;
  }
  double ss = 0.0;
  for (double v : t) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(t.size() - 1));
  std::cout << fmt("%.6f", mean) << " s ± " << fmt("%.6f", sd) << " s over " << t.size()
            << " runs\n";
}

int cmd_bench(const BenchOptions& o) {
  if (o.repeat < 1) throw Error("--repeat must be at least 1");
  const Checkpoint ckpt = load_checkpoint(o.model);
  const auto& pipe = ckpt.pipeline;
  const int classes = pipe.network.n_classes();
  const auto dim = static_cast<std::size_t>(pipe.reduction.input_dim());

  // Without files, time on synthetic spectra of the checkpoint's shape.
  std::optional<GeneratorSpec> spec;
  if (o.stream.empty() || o.lltm.empty()) spec = default_spec(o.spec_seed, classes, dim);
  const SpectraSet chunk_all = o.stream.empty()
                                   ? generate(*spec, o.chunk_size, ShiftSpec{}, o.common.seed)
                                   : load_spectra(o.stream, classes);
  if (chunk_all.size() < o.chunk_size) throw Error("stream is shorter than one chunk");
  std::vector<std::size_t> first(o.chunk_size);
  std::iota(first.begin(), first.end(), 0);
  const SpectraSet chunk = chunk_all.select(first);

  std::vector<double> inference;
  std::size_t checksum = 0;
  for (int r = 0; r < o.repeat; ++r) {
    const auto t = std::chrono::steady_clock::now();
    for (const auto& s : chunk) checksum += static_cast<std::size_t>(pipe.predict(s));
    inference.push_back(seconds_since(t));
  }
  std::cout << "chunk of " << chunk.size() << " spectra, D=" << dim << ", k="
            << pipe.reduction.output_dim() << " (prediction checksum " << checksum << ")\n";
  print_timing("inference per chunk", inference);
  if (!o.inference_only) {
    const SpectraSet lltm_raw = o.lltm.empty()
                                    ? generate(*spec, 2000, std::nullopt, o.common.seed + 1)
                                    : load_spectra(o.lltm, classes);
    const Lltm lltm(pipe.features(lltm_raw));
    const FeatureSet fchunk = pipe.features(chunk);
    Ustm ustm(o.U, fchunk.dim());
    const std::size_t take = std::min(o.U, fchunk.size());
    for (std::size_t k = fchunk.size() - take; k < fchunk.size(); ++k) {
      ustm.push(fchunk.x.col(static_cast<Eigen::Index>(k)));
    }
    std::vector<double> retrain_times;
    for (int r = 0; r < o.repeat; ++r) {
      const auto cfg = o.retrain.config(o.common.seed + static_cast<std::uint64_t>(r),
                                        pipe.network.dropout_rate);
      retrain_times.push_back(retrain(pipe.network, lltm, ustm, cfg).stats.wall_seconds);
    }
    std::cout << "retrain episode: LLTM " << lltm.size() << ", USTM " << ustm.size() << ", "
              << o.retrain.epochs << " epochs\n";
    print_timing("retrain per episode", retrain_times);
    inference.insert(inference.end(), retrain_times.begin(), retrain_times.end());
  }
  if (!o.common.out.empty()) {
    std::ofstream out(o.common.out);
    if (!out) throw Error("cannot write " + o.common.out);
    out << "kind,run,seconds\n";
    for (std::size_t i = 0; i < inference.size(); ++i) {
      const bool is_inf = i < static_cast<std::size_t>(o.repeat);
      const std::size_t run = is_inf ? i : i - static_cast<std::size_t>(o.repeat);
      out << (is_inf ? "inference" : "retrain") << ',' << run << ',' << fmt("%.6f", inference[i])
          << '\n';
    }
  }
  return 0;
}

// ---- drift -----------------------------------------------------------------

struct DriftOptions {
  Common common;
  std::string a, b;
  double alpha = kDefaultShiftAlpha;
  bool raw = false;
  int classes = kDefaultClasses;
};

std::vector<double> pooled(const SpectraSet& set, bool raw) {
  std::vector<double> out;
  out.reserve(set.size() * set.dim());
  for (const auto& s : set) {
    const auto& v = raw ? s.intensities : min_max_normalize(s).intensities;
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

int cmd_drift(const DriftOptions& o) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw Error("--alpha must lie in (0, 1)");
  const auto a = pooled(load_spectra(o.a, o.classes), o.raw);
  const auto b = pooled(load_spectra(o.b, o.classes), o.raw);
  const auto r = ks_two_sample(a, b);
  const bool shift = detect_shift(r, o.alpha);
  std::cout << "samples " << r.n << " vs " << r.m << (o.raw ? " (raw" : " (normalized")
            << " intensities)\n";
  std::cout << "statistic " << fmt("%.6f", r.statistic) << "\n";
  std::cout << "p_value " << fmt("%.6g", r.p_value) << "\n";
  std::cout << "verdict " << (shift ? "shift" : "no shift") << " (alpha " << fmt("%g", o.alpha)
            << ")\n";
  if (!o.common.out.empty()) {
    std::ofstream out(o.common.out);
    if (!out) throw Error("cannot write " + o.common.out);
    out << "statistic,p_value,n,m,shift\n"
        << fmt("%.17g", r.statistic) << ',' << fmt("%.17g", r.p_value) << ',' << r.n << ','
        << r.m << ',' << (shift ? 1 : 0) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised on-device adaptation for spectral classification"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Write synthetic labeled spectra as CSV");
  add_common(g, gen.common);
  gen.synth.add(g);
  g->add_option("--n", gen.n, "Number of spectra");
  g->add_option("--shift", gen.shift, "Domain of the generated spectra: none or default")
      ->check(CLI::IsMember({"none", "default"}));
  g->add_option("--shift-start", gen.shift_start, "First shifted index when --shift default");

  TrainOptions train;
  auto* t = app.add_subcommand("train", "Normalize, fit PCA, train the classifier, save");
  add_common(t, train.common);
  train.synth.add(t);
  t->add_option("--data", train.data, "Labeled spectra CSV (synthetic source data if absent)");
  t->add_option("--i", train.i, "Synthetic training set size");
  t->add_option("--val", train.val, "Held-out validation fraction");
  t->add_option("--k", train.k, "PCA components (0: size-based default)");
  t->add_option("--hidden", train.hidden, "Hidden layer width");
  t->add_option("--epochs", train.epochs, "Training epochs");
  t->add_option("--lr", train.lr, "Learning rate");
  t->add_option("--momentum", train.momentum, "SGD momentum");
  t->add_option("--batch", train.batch, "Mini-batch size");
  t->add_option("--dropout", train.dropout, "Dropout rate");
  t->add_option("--save-train", train.save_train, "Also write the raw training split (LLTM source)");

  StreamOptions stream;
  auto* s = app.add_subcommand("stream", "Prequential test-then-train run over a labeled stream");
  add_common(s, stream.common);
  stream.retrain.add(s);
  s->add_option("--model", stream.model, "Checkpoint")->required();
  s->add_option("--stream", stream.stream, "Labeled stream CSV")->required();
  s->add_option("--lltm", stream.lltm, "Labeled source spectra CSV for the LLTM")->required();
  s->add_option("--L", stream.L, "LLTM size: fraction in (0,1] or sample count");
  s->add_option("--U", stream.U, "USTM capacity");
  s->add_option("--chunk-size", stream.chunk_size, "Samples per chunk");
  s->add_option("--n-chunks", stream.n_chunks, "Number of chunks");
  s->add_flag("--adapt", stream.adapt, "Retrain after every chunk");
  s->add_option("--fill", stream.fill, "USTM refill from each chunk: tail or uniform")
      ->check(CLI::IsMember({"tail", "uniform"}));
  s->add_option("--model-out", stream.model_out, "Write the final (adapted) checkpoint");

  CompareOptions compare;
  auto* c = app.add_subcommand("compare", "Per-chunk accuracy deltas of two reports (a - b)");
  add_common(c, compare.common);
  c->add_option("report_a", compare.a, "Report CSV")->required();
  c->add_option("report_b", compare.b, "Report CSV")->required();

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "Time chunk inference and retrain episodes on this host");
  add_common(b, bench.common);
  bench.retrain.add(b);
  b->add_option("--model", bench.model, "Checkpoint")->required();
  b->add_option("--stream", bench.stream, "Stream CSV (synthetic shifted spectra if absent)");
  b->add_option("--lltm", bench.lltm, "LLTM CSV (synthetic source spectra if absent)");
  b->add_option("--spec-seed", bench.spec_seed, "Line-table seed for synthetic inputs");
  b->add_option("--U", bench.U, "USTM capacity");
  b->add_option("--chunk-size", bench.chunk_size, "Samples per chunk");
  b->add_option("--repeat", bench.repeat, "Measurements per timing");
  b->add_flag("--inference-only", bench.inference_only, "Skip retrain timing");

  DriftOptions drift;
  auto* d = app.add_subcommand("drift", "KS test on the pooled intensities of two spectra files");
  add_common(d, drift.common);
  d->add_option("file_a", drift.a, "Spectra CSV")->required();
  d->add_option("file_b", drift.b, "Spectra CSV")->required();
  d->add_option("--alpha", drift.alpha, "Significance level");
  d->add_flag("--raw", drift.raw, "Pool raw intensities instead of normalized ones");
  d->add_option("--classes", drift.classes, "Label range of the files");

  try {
    auto args = expand_config(app, argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (g->parsed()) return cmd_gen(gen);
    if (t->parsed()) return cmd_train(train);
    if (s->parsed()) return cmd_stream(stream);
    if (c->parsed()) return cmd_compare(compare);
    if (b->parsed()) return cmd_bench(bench);
    if (d->parsed()) return cmd_drift(drift);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
