#include "specadapt/dimred.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

namespace specadapt {

PcaModel::PcaModel(Eigen::VectorXd mean, Eigen::MatrixXd components)
    : mean_(std::move(mean)), components_(std::move(components)) {
  if (components_.cols() != mean_.size()) {
    throw DimensionError("PCA components width differs from mean length");
  }
}

Eigen::VectorXd PcaModel::transform(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != mean_.size()) {
    throw DimensionError("spectrum has " + std::to_string(x.size()) + " points, reducer expects " +
                         std::to_string(mean_.size()));
  }
  Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  return components_ * (v - mean_);
}

Eigen::VectorXd PcaModel::reconstruct(const Eigen::VectorXd& reduced) const {
  if (reduced.size() != components_.rows()) throw DimensionError("reduced vector length mismatch");
  return components_.transpose() * reduced + mean_;
}

namespace {

std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", r);
  return buf;
}

}  // namespace

ConvergenceError::ConvergenceError(Eigen::Index component, double residual)
    : Error("power iteration for component " + std::to_string(component) +
            " did not converge (last residual " + format_residual(residual) + ")"),
      residual_(residual) {}

namespace {

// Above this width the covariance is never formed; products go through the
// centered data instead.
constexpr Eigen::Index kExplicitCovarianceLimit = 2048;

class CovarianceOperator {
 public:
  explicit CovarianceOperator(const Eigen::MatrixXd& centered) : n_(centered.rows()) {
    if (centered.cols() <= kExplicitCovarianceLimit) {
      cov_ = Eigen::MatrixXd(centered.cols(), centered.cols());
      cov_.setZero();
      cov_.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(),
                                                      1.0 / static_cast<double>(n_ - 1));
      cov_.triangularView<Eigen::StrictlyUpper>() = cov_.transpose();
      trace_ = cov_.trace();
    } else {
      centered_ = &centered;
      trace_ = centered.squaredNorm() / static_cast<double>(n_ - 1);
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    if (!centered_) return cov_ * v;
    return centered_->transpose() * (*centered_ * v) / static_cast<double>(n_ - 1);
  }

  double trace() const { return trace_; }

 private:
  Eigen::Index n_;
  Eigen::MatrixXd cov_;
  const Eigen::MatrixXd* centered_ = nullptr;
  double trace_ = 0.0;
};

void deflate(Eigen::VectorXd& v, const Eigen::MatrixXd& found, Eigen::Index count) {
  if (count == 0) return;
  auto basis = found.topRows(count);
  v -= basis.transpose() * (basis * v);
}

void fix_sign(Eigen::VectorXd& c) {
  Eigen::Index arg = 0;
  c.cwiseAbs().maxCoeff(&arg);
  if (c(arg) < 0) c = -c;
}

}  // namespace

PcaModel fit_pca(const Eigen::MatrixXd& rows, const PcaOptions& options) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index dim = rows.cols();
  if (n == 0) throw Error("cannot fit PCA on an empty set");
  const Eigen::Index k = options.k;
  if (k < 1 || k > std::min(n - 1, dim)) {
    throw Error("PCA k=" + std::to_string(k) + " outside [1, min(n-1, D)] = [1, " +
                std::to_string(std::min(n - 1, dim)) + "]");
  }
  if (options.max_iter < 1 || !(options.tol > 0)) throw Error("invalid PCA iteration settings");

  Eigen::VectorXd mean = rows.colwise().mean().transpose();
  Eigen::MatrixXd centered = rows.rowwise() - mean.transpose();
  CovarianceOperator cov(centered);
  // Directions whose deflated image is this small span the null space.
  const double null_threshold = 1e-13 * std::max(cov.trace(), 1e-300);

  Eigen::MatrixXd components(k, dim);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = gauss(rng);
    deflate(v, components, c);
    deflate(v, components, c);
    v.normalize();

    bool converged = false;
    double residual = 0.0;
    for (int it = 0; it < options.max_iter; ++it) {
      Eigen::VectorXd w = cov.apply(v);
      deflate(w, components, c);
      const double norm = w.norm();
      if (norm <= null_threshold) {
        // Remaining spectrum is zero; any unit vector orthogonal to the
        // found components is an eigenvector.
        converged = true;
        break;
      }
      w /= norm;
      residual = (w - v).norm();
      v = std::move(w);
      if (residual < options.tol) {
        converged = true;
        break;
      }
    }
    if (!converged) throw ConvergenceError(c, residual);
    deflate(v, components, c);
    v.normalize();
    fix_sign(v);
    components.row(c) = v.transpose();
  }
  return PcaModel(std::move(mean), std::move(components));
}

PcaModel fit_pca(const SpectraSet& set, const PcaOptions& options) {
  if (set.empty()) throw Error("cannot fit PCA on an empty set");
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(set.size()), static_cast<Eigen::Index>(set.dim()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(set[i].intensities.data(), rows.cols());
  }
  return fit_pca(rows, options);
}

std::vector<double> explained_variance(const PcaModel& model, const SpectraSet& set) {
  if (set.empty()) throw Error("explained_variance needs a nonempty set");
  if (static_cast<Eigen::Index>(set.dim()) != model.input_dim()) {
    throw DimensionError("set dim differs from PCA input dim");
  }
  const Eigen::Index k = model.output_dim();
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(k);
  for (const auto& s : set) {
    Eigen::VectorXd p = model.transform(s.intensities);
    sum_sq += p.cwiseAbs2();
  }
  // Projections of centered data have zero mean only on the fit set; keep
  // the mean-about-zero form so the value is comparable across sets.
  const double denom = set.size() > 1 ? static_cast<double>(set.size() - 1) : 1.0;
  std::vector<double> out(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = sum_sq(i) / denom;
  return out;
}

Eigen::Index default_components(std::size_t n_fit, std::size_t dim) {
  const auto n1 = static_cast<Eigen::Index>(n_fit > 0 ? n_fit - 1 : 0);
  const auto d = static_cast<Eigen::Index>(dim);
  if (d >= 101) return std::min<Eigen::Index>(100, n1);
  return std::min({n1, d, Eigen::Index{32}});
}

FeatureSet reduce(const Reducer& reducer, const SpectraSet& set) {
  if (static_cast<Eigen::Index>(set.dim()) != reducer.input_dim()) {
    throw DimensionError("set dim " + std::to_string(set.dim()) + " differs from reducer input " +
                         std::to_string(reducer.input_dim()));
  }
  FeatureSet out;
  out.x.resize(reducer.output_dim(), static_cast<Eigen::Index>(set.size()));
  out.labels.resize(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.x.col(static_cast<Eigen::Index>(i)) = reducer.transform(set[i].intensities);
    out.labels[i] = set[i].label.value_or(kUnlabeled);
  }
  return out;
}

}  // namespace specadapt
