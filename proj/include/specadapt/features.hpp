#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

namespace specadapt {

inline constexpr int kUnlabeled = -1;

// Reduced feature vectors stored one sample per column, with labels
// (kUnlabeled where absent).
struct FeatureSet {
  Eigen::MatrixXd x;
  std::vector<int> labels;

  FeatureSet() = default;
  FeatureSet(Eigen::MatrixXd features, std::vector<int> sample_labels);

  Eigen::Index dim() const { return x.rows(); }
  std::size_t size() const { return static_cast<std::size_t>(x.cols()); }
  bool empty() const { return x.cols() == 0; }
  bool fully_labeled() const;

  FeatureSet select(std::span<const std::size_t> indices) const;
  // Same features with every label replaced by kUnlabeled.
  FeatureSet without_labels() const;
};

}  // namespace specadapt
