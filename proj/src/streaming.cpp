#include "specadapt/streaming.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "specadapt/error.hpp"

namespace specadapt {

void StreamConfig::validate() const {
  if (chunk_size == 0 || n_chunks == 0) throw Error("chunk_size and n_chunks must be positive");
  if (ustm_capacity == 0) throw Error("ustm_capacity must be positive");
  retrain.validate();
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

StreamRun prequential_run(const MlpAdaptModel& m, const FeatureSet& stream, const Lltm& lltm,
                          const StreamConfig& cfg, const RetrainObserver& observer) {
  cfg.validate();
  if (stream.size() < cfg.chunk_size * cfg.n_chunks) {
    throw Error("stream has " + std::to_string(stream.size()) + " samples, need " +
                std::to_string(cfg.chunk_size * cfg.n_chunks));
  }
  if (!stream.fully_labeled()) throw Error("prequential scoring needs a labeled stream");
  if (stream.dim() != m.input_dim() || lltm.samples().dim() != m.input_dim()) {
    throw DimensionError("stream or LLTM width differs from the model input");
  }

  StreamRun run{{}, m};
  Ustm ustm(cfg.ustm_capacity, m.input_dim());
  std::vector<std::size_t> indices(cfg.chunk_size);

  for (std::size_t c = 0; c < cfg.n_chunks; ++c) {
    const std::size_t begin = c * cfg.chunk_size;
    std::iota(indices.begin(), indices.end(), begin);
    const FeatureSet chunk = stream.select(indices);

    ChunkRecord rec;
    rec.chunk_index = c;
    rec.n_samples = chunk.size();
    auto start = std::chrono::steady_clock::now();
    rec.accuracy = evaluate_accuracy(run.final_model, chunk);
    rec.inference_seconds = seconds_since(start);

    if (cfg.adapt) {
      const std::size_t take = std::min(cfg.ustm_capacity, chunk.size());
      if (cfg.fill == UstmFill::kTail) {
        for (std::size_t k = chunk.size() - take; k < chunk.size(); ++k) {
          ustm.push(chunk.x.col(static_cast<Eigen::Index>(k)));
        }
      } else {
        std::vector<std::size_t> pick(chunk.size());
        std::iota(pick.begin(), pick.end(), 0);
        std::mt19937_64 rng(cfg.retrain.seed ^ (0x9e3779b97f4a7c15ULL * (c + 1)));
        std::shuffle(pick.begin(), pick.end(), rng);
        pick.resize(take);
        std::sort(pick.begin(), pick.end());
        for (auto k : pick) ustm.push(chunk.x.col(static_cast<Eigen::Index>(k)));
      }
      TrainConfig rc = cfg.retrain;
      rc.seed = cfg.retrain.seed + c;
      auto result = retrain(run.final_model, lltm, ustm, rc);
      run.final_model = std::move(result.model);
      rec.retrain_seconds = result.stats.wall_seconds;
      if (observer) observer(c, ustm, run.final_model);
    }
    run.report.chunks.push_back(rec);
  }

  double sum = 0.0;
  for (const auto& r : run.report.chunks) sum += r.accuracy;
  run.report.average_accuracy = sum / static_cast<double>(run.report.chunks.size());
  return run;
}

ReportComparison compare_reports(const StreamReport& adapt, const StreamReport& baseline) {
  if (adapt.chunks.size() != baseline.chunks.size()) {
    throw Error("reports differ in chunk count (" + std::to_string(adapt.chunks.size()) + " vs " +
                std::to_string(baseline.chunks.size()) + ")");
  }
  if (adapt.chunks.empty()) throw Error("cannot compare empty reports");
  ReportComparison cmp;
  double sum = 0.0;
  for (std::size_t i = 0; i < adapt.chunks.size(); ++i) {
    cmp.acc_a.push_back(adapt.chunks[i].accuracy);
    cmp.acc_b.push_back(baseline.chunks[i].accuracy);
    cmp.deltas.push_back(adapt.chunks[i].accuracy - baseline.chunks[i].accuracy);
    sum += cmp.deltas.back();
  }
  cmp.average_delta = sum / static_cast<double>(cmp.deltas.size());
  return cmp;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_report(const StreamReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "chunk,n,accuracy,retrain_seconds,inference_seconds\n";
  for (const auto& r : report.chunks) {
    out << r.chunk_index << ',' << r.n_samples << ',' << fixed(r.accuracy, 6) << ','
        << fixed(r.retrain_seconds, 3) << ',' << fixed(r.inference_seconds, 3) << '\n';
  }
  out << "# average_accuracy=" << fixed(report.average_accuracy, 6) << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

StreamReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "chunk,n,accuracy,retrain_seconds,inference_seconds") {
    throw ParseError(0, "unexpected report header in " + path.string());
  }
  StreamReport report;
  bool have_average = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    if (line.rfind("# average_accuracy=", 0) == 0) {
      try {
        report.average_accuracy = std::stod(line.substr(19));
      } catch (const std::exception&) {
        throw ParseError(row, "bad average_accuracy footer");
      }
      have_average = true;
      continue;
    }
    std::istringstream fields(line);
    ChunkRecord r;
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    if (!(fields >> r.chunk_index >> c1 >> r.n_samples >> c2 >> r.accuracy >> c3 >>
          r.retrain_seconds >> c4 >> r.inference_seconds) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
      throw ParseError(row, "malformed report row");
    }
    report.chunks.push_back(r);
  }
  if (!have_average) {
    double sum = 0.0;
    for (const auto& r : report.chunks) sum += r.accuracy;
    report.average_accuracy = report.chunks.empty() ? 0.0 : sum / report.chunks.size();
  }
  return report;
}

void write_comparison(const ReportComparison& cmp, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "chunk,acc_a,acc_b,delta\n";
  for (std::size_t i = 0; i < cmp.deltas.size(); ++i) {
    out << i << ',' << fixed(cmp.acc_a[i], 6) << ',' << fixed(cmp.acc_b[i], 6) << ','
        << fixed(cmp.deltas[i], 6) << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace specadapt
