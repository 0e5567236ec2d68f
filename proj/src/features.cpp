#include "specadapt/features.hpp"

#include <algorithm>

#include "specadapt/error.hpp"

namespace specadapt {

FeatureSet::FeatureSet(Eigen::MatrixXd features, std::vector<int> sample_labels)
    : x(std::move(features)), labels(std::move(sample_labels)) {
  if (labels.size() != static_cast<std::size_t>(x.cols())) {
    throw DimensionError("label count differs from sample count");
  }
}

bool FeatureSet::fully_labeled() const {
  return std::none_of(labels.begin(), labels.end(), [](int l) { return l < 0; });
}

FeatureSet FeatureSet::select(std::span<const std::size_t> indices) const {
  FeatureSet out;
  out.x.resize(x.rows(), static_cast<Eigen::Index>(indices.size()));
  out.labels.resize(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    out.x.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(indices[j]));
    out.labels[j] = labels.at(indices[j]);
  }
  return out;
}

FeatureSet FeatureSet::without_labels() const {
  return FeatureSet(x, std::vector<int>(labels.size(), kUnlabeled));
}

}  // namespace specadapt
