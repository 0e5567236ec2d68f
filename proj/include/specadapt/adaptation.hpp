#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <deque>
#include <vector>

#include "specadapt/features.hpp"
#include "specadapt/network.hpp"

namespace specadapt {

// Labeled long-term memory: the stored source-domain training samples.
// Read-only once built.
class Lltm {
 public:
  explicit Lltm(FeatureSet samples);

  const FeatureSet& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

 private:
  FeatureSet samples_;
};

// Stratified-by-class subsample of round(n * fraction) samples, kept in
// their original order. fraction 1 returns the whole set.
Lltm build_lltm(const FeatureSet& training, double fraction, std::uint64_t seed);
// Same with an absolute size in [1, n].
Lltm build_lltm_count(const FeatureSet& training, std::size_t count, std::uint64_t seed);

// Unlabeled short-term memory: fixed-capacity ring buffer of recent inputs,
// oldest evicted first.
class Ustm {
 public:
  Ustm(std::size_t capacity, Eigen::Index dim);

  void push(const Eigen::VectorXd& x);
  void clear() { items_.clear(); }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t capacity() const { return capacity_; }
  Eigen::Index dim() const { return dim_; }

  // Oldest first.
  const Eigen::VectorXd& at(std::size_t i) const { return items_.at(i); }
  // One sample per column, oldest first.
  Eigen::MatrixXd matrix() const;

 private:
  std::size_t capacity_;
  Eigen::Index dim_;
  std::deque<Eigen::VectorXd> items_;
};

// Epochs per on-device retrain episode; short enough that an episode takes
// seconds at desk scale.
inline constexpr int kDefaultRetrainEpochs = 30;

struct RetrainStats {
  std::vector<double> label_loss;
  std::vector<double> domain_loss;
  double wall_seconds = 0.0;
};

struct RetrainOptions {
  // Drop the domain path entirely: plain supervised training on the LLTM.
  bool detach_domain = false;
};

struct RetrainResult {
  MlpAdaptModel model;
  RetrainStats stats;
};

// Warm-started adversarial retraining: LLTM samples carry domain label 0 and
// their class labels, USTM samples carry domain label 1. An empty USTM
// returns the model unchanged with empty traces.
RetrainResult retrain(const MlpAdaptModel& m, const Lltm& lltm, const Ustm& ustm,
                      const TrainConfig& cfg, const RetrainOptions& options = {});

}  // namespace specadapt
