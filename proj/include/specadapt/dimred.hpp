#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "specadapt/error.hpp"
#include "specadapt/features.hpp"
#include "specadapt/spectra.hpp"

namespace specadapt {

// Interface for the dimensionality-reduction stage. Implementations are
// fitted once and then treated as immutable.
class Reducer {
 public:
  virtual ~Reducer() = default;
  virtual Eigen::Index input_dim() const = 0;
  virtual Eigen::Index output_dim() const = 0;
  virtual Eigen::VectorXd transform(std::span<const double> x) const = 0;
};

// Top-k principal directions. Rows of `components` are orthonormal.
class PcaModel final : public Reducer {
 public:
  PcaModel() = default;
  PcaModel(Eigen::VectorXd mean, Eigen::MatrixXd components);

  Eigen::Index input_dim() const override { return mean_.size(); }
  Eigen::Index output_dim() const override { return components_.rows(); }
  Eigen::VectorXd transform(std::span<const double> x) const override;

  // Map reduced coordinates back into the input space.
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& reduced) const;

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& components() const { return components_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd components_;  // k x D
};

struct PcaOptions {
  Eigen::Index k = 0;
  int max_iter = 20000;
  double tol = 1e-4;
  std::uint64_t seed = 0;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(Eigen::Index component, double residual);
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Power iteration with deflation on the sample covariance of `set`.
// Throws Error when k is outside [1, min(n-1, D)] and ConvergenceError when a
// direction does not settle within max_iter.
PcaModel fit_pca(const SpectraSet& set, const PcaOptions& options);
PcaModel fit_pca(const Eigen::MatrixXd& samples_by_row, const PcaOptions& options);

// Sample variance (n-1 denominator) of the projections of `set`, centered on
// the model mean, one entry per component.
std::vector<double> explained_variance(const PcaModel& model, const SpectraSet& set);

// k = 100 when D > 100, otherwise min(n-1, D, 32).
Eigen::Index default_components(std::size_t n_fit, std::size_t dim);

FeatureSet reduce(const Reducer& reducer, const SpectraSet& set);

}  // namespace specadapt
