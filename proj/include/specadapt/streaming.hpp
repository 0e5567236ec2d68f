#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "specadapt/adaptation.hpp"
#include "specadapt/features.hpp"
#include "specadapt/network.hpp"

namespace specadapt {

enum class UstmFill {
  kTail,     // the chunk's most recent samples
  kUniform,  // uniform sample without replacement from the chunk
};

struct StreamConfig {
  std::size_t chunk_size = 2500;
  std::size_t n_chunks = 10;
  std::size_t ustm_capacity = 100;
  bool adapt = true;
  TrainConfig retrain{.epochs = kDefaultRetrainEpochs};
  UstmFill fill = UstmFill::kTail;

  void validate() const;
};

struct ChunkRecord {
  std::size_t chunk_index = 0;
  std::size_t n_samples = 0;
  double accuracy = 0.0;
  double retrain_seconds = 0.0;
  double inference_seconds = 0.0;
};

struct StreamReport {
  std::vector<ChunkRecord> chunks;
  double average_accuracy = 0.0;
};

struct StreamRun {
  StreamReport report;
  MlpAdaptModel final_model;
};

// Called after each chunk's retrain with the USTM that fed it and the
// updated model.
using RetrainObserver =
    std::function<void(std::size_t chunk_index, const Ustm& ustm, const MlpAdaptModel& model)>;

// Prequential (test-then-train) run: each chunk is scored with the current
// model, then, when adapting, its samples refill the USTM (labels never
// read) and the model is retrained against the LLTM. Chunk i's retrain uses
// seed cfg.retrain.seed + i.
StreamRun prequential_run(const MlpAdaptModel& m, const FeatureSet& stream, const Lltm& lltm,
                          const StreamConfig& cfg, const RetrainObserver& observer = {});

struct ReportComparison {
  std::vector<double> acc_a;
  std::vector<double> acc_b;
  std::vector<double> deltas;  // a - b
  double average_delta = 0.0;
};

ReportComparison compare_reports(const StreamReport& adapt, const StreamReport& baseline);

// Report CSV: `chunk,n,accuracy,retrain_seconds,inference_seconds` rows
// followed by `# average_accuracy=<value>`.
void write_report(const StreamReport& report, const std::filesystem::path& path);
StreamReport read_report(const std::filesystem::path& path);

// Plot-ready `chunk,acc_a,acc_b,delta`.
void write_comparison(const ReportComparison& cmp, const std::filesystem::path& path);

}  // namespace specadapt
