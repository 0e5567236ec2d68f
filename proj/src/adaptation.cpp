#include "specadapt/adaptation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "specadapt/error.hpp"
#include "specadapt/spectra.hpp"

namespace specadapt {

Lltm::Lltm(FeatureSet samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw Error("LLTM must hold at least one sample");
  if (!samples_.fully_labeled()) throw Error("LLTM samples must all be labeled");
}

Lltm build_lltm_count(const FeatureSet& training, std::size_t count, std::uint64_t seed) {
  const std::size_t n = training.size();
  if (count == 0) throw Error("LLTM size must be at least 1");
  if (count > n) throw Error("LLTM size exceeds the training set");
  if (count == n) return Lltm(training);

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[training.labels[i]].push_back(i);

  // Per-class quotas by largest remainder over the class proportions.
  std::vector<double> weights;
  for (const auto& [label, idx] : by_class) {
    weights.push_back(static_cast<double>(idx.size()) / static_cast<double>(n));
  }
  const auto quotas = largest_remainder_sizes(count, weights);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  std::size_t c = 0;
  for (auto& [label, idx] : by_class) {
    std::vector<std::size_t> pool = idx;
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t q = std::min(quotas[c++], pool.size());
    chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(q));
  }
  std::sort(chosen.begin(), chosen.end());
  return Lltm(training.select(chosen));
}

Lltm build_lltm(const FeatureSet& training, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("LLTM fraction must lie in (0,1]");
  const auto count =
      static_cast<std::size_t>(std::llround(static_cast<double>(training.size()) * fraction));
  return build_lltm_count(training, count, seed);
}

Ustm::Ustm(std::size_t capacity, Eigen::Index dim) : capacity_(capacity), dim_(dim) {
  if (capacity == 0) throw Error("USTM capacity must be positive");
}

void Ustm::push(const Eigen::VectorXd& x) {
  if (x.size() != dim_) {
    throw DimensionError("USTM expects " + std::to_string(dim_) + " features, got " +
                         std::to_string(x.size()));
  }
  items_.push_back(x);
  if (items_.size() > capacity_) items_.pop_front();
}

Eigen::MatrixXd Ustm::matrix() const {
  Eigen::MatrixXd out(dim_, static_cast<Eigen::Index>(items_.size()));
  for (std::size_t i = 0; i < items_.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = items_[i];
  return out;
}

RetrainResult retrain(const MlpAdaptModel& m, const Lltm& lltm, const Ustm& ustm,
                      const TrainConfig& cfg, const RetrainOptions& options) {
  if (ustm.empty()) return {m, {}};
  if (lltm.samples().dim() != m.input_dim() || ustm.dim() != m.input_dim()) {
    throw DimensionError("memory feature width differs from the model input");
  }
  const auto start = std::chrono::steady_clock::now();
  const Eigen::MatrixXd target = options.detach_domain ? Eigen::MatrixXd() : ustm.matrix();
  auto loop = detail::train_loop(m, lltm.samples(), target, cfg);
  RetrainResult r{std::move(loop.model), {}};
  r.stats.label_loss = std::move(loop.label_trace);
  r.stats.domain_loss = std::move(loop.domain_trace);
  r.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace specadapt
