#include "specadapt/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "specadapt/error.hpp"

namespace specadapt {

DenseLayer DenseLayer::zeros(Eigen::Index out, Eigen::Index in) {
  return DenseLayer{Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)};
}

LayerSet LayerSet::zeros_like() const {
  auto z = [](const DenseLayer& l) { return DenseLayer::zeros(l.out(), l.in()); };
  return LayerSet{z(feature1), z(feature2), z(label_head), z(domain_hidden), z(domain_out)};
}

void MlpAdaptModel::validate() const {
  const auto& l = layers;
  const Eigen::Index h = l.feature1.out();
  bool ok = l.feature1.in() >= 1 && h >= 1 && l.feature2.in() == h &&
            l.feature2.out() == h && l.label_head.in() == h && l.label_head.out() >= 2 &&
            l.domain_hidden.in() == h && l.domain_out.in() == l.domain_hidden.out() &&
            l.domain_out.out() == 2;
  layers.for_each([&](const DenseLayer& d) { ok = ok && d.bias.size() == d.out(); });
  if (!ok) throw DimensionError("inconsistent network layer shapes");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw Error("dropout_rate must lie in [0,1)");
}

bool operator==(const MlpAdaptModel& a, const MlpAdaptModel& b) {
  if (a.dropout_rate != b.dropout_rate) return false;
  bool same = true;
  auto cmp = [&](const DenseLayer& x, const DenseLayer& y) {
    same = same && x.weights.rows() == y.weights.rows() && x.weights.cols() == y.weights.cols() &&
           x.weights == y.weights && x.bias == y.bias;
  };
  cmp(a.layers.feature1, b.layers.feature1);
  cmp(a.layers.feature2, b.layers.feature2);
  cmp(a.layers.label_head, b.layers.label_head);
  cmp(a.layers.domain_hidden, b.layers.domain_hidden);
  cmp(a.layers.domain_out, b.layers.domain_out);
  return same;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw Error("learning_rate must be positive");
  if (!(momentum >= 0 && momentum < 1)) throw Error("momentum must lie in [0,1)");
  if (epochs < 0) throw Error("epochs must be non-negative");
  if (batch_size < 1) throw Error("batch_size must be positive");
  if (!(grl_gamma > 0)) throw Error("grl_gamma must be positive");
  if (!(dropout_rate >= 0 && dropout_rate < 1)) throw Error("dropout_rate must lie in [0,1)");
}

MlpAdaptModel init_model(Eigen::Index input_dim, Eigen::Index hidden, int n_classes,
                         std::uint64_t seed, double dropout_rate) {
  if (input_dim < 1 || hidden < 1 || n_classes < 2) {
    throw Error("network dimensions must be positive (and at least 2 classes)");
  }
  Rng rng(seed);
  auto make = [&](Eigen::Index out, Eigen::Index in) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer l = DenseLayer::zeros(out, in);
    for (Eigen::Index j = 0; j < in; ++j) {
      for (Eigen::Index i = 0; i < out; ++i) l.weights(i, j) = dist(rng);
    }
    return l;
  };
  MlpAdaptModel m;
  m.layers.feature1 = make(hidden, input_dim);
  m.layers.feature2 = make(hidden, hidden);
  m.layers.label_head = make(n_classes, hidden);
  m.layers.domain_hidden = make(hidden, hidden);
  m.layers.domain_out = make(2, hidden);
  m.dropout_rate = dropout_rate;
  m.validate();
  return m;
}

namespace {

Eigen::MatrixXd affine(const DenseLayer& l, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd z = l.weights * x;
  z.colwise() += l.bias;
  return z;
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

Eigen::MatrixXd relu_grad(const Eigen::MatrixXd& upstream, const Eigen::MatrixXd& z) {
  return (z.array() > 0.0).select(upstream, 0.0);
}

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double mx = logits.col(c).maxCoeff();
    p.col(c) = (logits.col(c).array() - mx).exp();
    p.col(c) /= p.col(c).sum();
  }
  return p;
}

// Mean cross-entropy of `logits` against `targets`, plus d(loss)/d(logits)
// scaled by 1/denominator.
double cross_entropy(const Eigen::MatrixXd& logits, std::span<const int> targets, double denom,
                     Eigen::MatrixXd& dlogits) {
  dlogits = softmax_columns(logits);
  double loss = 0.0;
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const int y = targets[static_cast<std::size_t>(c)];
    const double mx = logits.col(c).maxCoeff();
    const double lse = mx + std::log((logits.col(c).array() - mx).exp().sum());
    loss += lse - logits(y, c);
    dlogits(y, c) -= 1.0;
  }
  dlogits /= denom;
  return loss / denom;
}

struct FeatureTrace {
  Eigen::MatrixXd z1, h1, z2, h2;
  Eigen::MatrixXd mask1, mask2;  // empty when no dropout is applied
};

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - rate);
  Eigen::MatrixXd mask(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) mask(i, j) = unit(rng) < rate ? 0.0 : keep_scale;
  }
  return mask;
}

FeatureTrace forward_features(const MlpAdaptModel& m, const Eigen::MatrixXd& x, bool train_mode,
                              Rng& rng) {
  const bool drop = train_mode && m.dropout_rate > 0.0;
  FeatureTrace t;
  t.z1 = affine(m.layers.feature1, x);
  t.h1 = relu(t.z1);
  if (drop) {
    t.mask1 = dropout_mask(t.h1.rows(), t.h1.cols(), m.dropout_rate, rng);
    t.h1.array() *= t.mask1.array();
  }
  t.z2 = affine(m.layers.feature2, t.h1);
  t.h2 = relu(t.z2);
  if (drop) {
    t.mask2 = dropout_mask(t.h2.rows(), t.h2.cols(), m.dropout_rate, rng);
    t.h2.array() *= t.mask2.array();
  }
  return t;
}

void check_input(const MlpAdaptModel& m, Eigen::Index rows) {
  if (rows != m.input_dim()) {
    throw DimensionError("input has " + std::to_string(rows) + " features, model expects " +
                         std::to_string(m.input_dim()));
  }
}

void accumulate(DenseLayer& g, const Eigen::MatrixXd& dz, const Eigen::MatrixXd& input) {
  g.weights.noalias() += dz * input.transpose();
  g.bias += dz.rowwise().sum();
}

// Backpropagate d(loss)/d(h2) through the shared extractor into `grads`.
void backprop_features(const MlpAdaptModel& m, const FeatureTrace& t, const Eigen::MatrixXd& x,
                       Eigen::MatrixXd dh2, LayerSet& grads) {
  if (t.mask2.size() > 0) dh2.array() *= t.mask2.array();
  Eigen::MatrixXd dz2 = relu_grad(dh2, t.z2);
  accumulate(grads.feature2, dz2, t.h1);
  Eigen::MatrixXd dh1 = m.layers.feature2.weights.transpose() * dz2;
  if (t.mask1.size() > 0) dh1.array() *= t.mask1.array();
  Eigen::MatrixXd dz1 = relu_grad(dh1, t.z1);
  accumulate(grads.feature1, dz1, x);
}

void check_labels(const MlpAdaptModel& m, std::span<const int> labels, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(labels.size()) != cols) {
    throw DimensionError("label count differs from batch size");
  }
  for (int y : labels) {
    if (y < 0 || y >= m.n_classes()) {
      throw Error("label " + std::to_string(y) + " outside [0, " + std::to_string(m.n_classes()) +
                  ")");
    }
  }
}

// Label-path forward/backward on the source batch. Returns d(loss)/d(h2).
Eigen::MatrixXd label_pass(const MlpAdaptModel& m, const FeatureTrace& t,
                           std::span<const int> labels, GradResult& out) {
  Eigen::MatrixXd dz3;
  out.label_loss = cross_entropy(affine(m.layers.label_head, t.h2), labels,
                                 static_cast<double>(t.h2.cols()), dz3);
  accumulate(out.grads.label_head, dz3, t.h2);
  return m.layers.label_head.weights.transpose() * dz3;
}

}  // namespace

HiddenActivations hidden_activations(const MlpAdaptModel& m, const Eigen::VectorXd& x,
                                     bool train_mode, Rng& rng) {
  check_input(m, x.size());
  auto t = forward_features(m, x, train_mode, rng);
  return {t.h1.col(0), t.h2.col(0)};
}

Eigen::VectorXd forward_label(const MlpAdaptModel& m, const Eigen::VectorXd& x, bool train_mode,
                              Rng& rng) {
  check_input(m, x.size());
  auto t = forward_features(m, x, train_mode, rng);
  return softmax_columns(affine(m.layers.label_head, t.h2)).col(0);
}

Eigen::VectorXd forward_domain(const MlpAdaptModel& m, const Eigen::VectorXd& x, bool train_mode,
                               Rng& rng) {
  check_input(m, x.size());
  auto t = forward_features(m, x, train_mode, rng);
  // The reversal layer is the identity in the forward direction.
  Eigen::MatrixXd a4 = relu(affine(m.layers.domain_hidden, t.h2));
  return softmax_columns(affine(m.layers.domain_out, a4)).col(0);
}

Eigen::MatrixXd predict_proba(const MlpAdaptModel& m, const Eigen::MatrixXd& x) {
  check_input(m, x.rows());
  Rng unused(0);
  auto t = forward_features(m, x, false, unused);
  return softmax_columns(affine(m.layers.label_head, t.h2));
}

Eigen::VectorXd grl_backward(const Eigen::VectorXd& upstream, double lambda) {
  return -lambda * upstream;
}

double lambda_schedule(double progress, double gamma) {
  if (!(progress >= 0.0 && progress <= 1.0)) throw Error("lambda progress must lie in [0,1]");
  return 2.0 / (1.0 + std::exp(-gamma * progress)) - 1.0;
}

double epoch_lambda(int epoch, int total, double gamma, LambdaRamp ramp) {
  const double p = total <= 1 ? 0.0 : static_cast<double>(epoch) / static_cast<double>(total - 1);
  return lambda_schedule(ramp == LambdaRamp::kRampUp ? p : 1.0 - p, gamma);
}

GradResult supervised_grads(const MlpAdaptModel& m, const Eigen::MatrixXd& x,
                            std::span<const int> labels, Rng& rng) {
  check_input(m, x.rows());
  if (x.cols() == 0) throw Error("source batch must be nonempty");
  check_labels(m, labels, x.cols());
  GradResult out;
  out.grads = m.layers.zeros_like();
  auto t = forward_features(m, x, true, rng);
  Eigen::MatrixXd dh2 = label_pass(m, t, labels, out);
  backprop_features(m, t, x, std::move(dh2), out.grads);
  return out;
}

GradResult compute_grads(const MlpAdaptModel& m, const Eigen::MatrixXd& source_x,
                         std::span<const int> source_labels, const Eigen::MatrixXd& target_x,
                         double lambda, Rng& rng) {
  if (target_x.cols() == 0) return supervised_grads(m, source_x, source_labels, rng);
  check_input(m, source_x.rows());
  check_input(m, target_x.rows());
  if (source_x.cols() == 0) throw Error("source batch must be nonempty");
  check_labels(m, source_labels, source_x.cols());

  GradResult out;
  out.grads = m.layers.zeros_like();
  auto src = forward_features(m, source_x, true, rng);
  auto tgt = forward_features(m, target_x, true, rng);
  Eigen::MatrixXd dh2_src = label_pass(m, src, source_labels, out);

  const Eigen::Index ns = source_x.cols();
  const Eigen::Index nt = target_x.cols();
  Eigen::MatrixXd h2_all(src.h2.rows(), ns + nt);
  h2_all << src.h2, tgt.h2;
  std::vector<int> domains(static_cast<std::size_t>(ns + nt), 1);
  std::fill_n(domains.begin(), ns, 0);

  Eigen::MatrixXd z4 = affine(m.layers.domain_hidden, h2_all);
  Eigen::MatrixXd a4 = relu(z4);
  Eigen::MatrixXd dz5;
  out.domain_loss = cross_entropy(affine(m.layers.domain_out, a4), domains,
                                  static_cast<double>(ns + nt), dz5);
  accumulate(out.grads.domain_out, dz5, a4);
  Eigen::MatrixXd dz4 = relu_grad(m.layers.domain_out.weights.transpose() * dz5, z4);
  accumulate(out.grads.domain_hidden, dz4, h2_all);

  // Reversal layer: the domain gradient re-enters the shared features negated.
  Eigen::MatrixXd reversed = -lambda * (m.layers.domain_hidden.weights.transpose() * dz4);
  dh2_src += reversed.leftCols(ns);
  backprop_features(m, src, source_x, std::move(dh2_src), out.grads);
  backprop_features(m, tgt, target_x, reversed.rightCols(nt), out.grads);
  return out;
}

void sgd_step(MlpAdaptModel& m, const LayerSet& grads, LayerSet& velocity, double lr,
              double momentum) {
  auto step = [&](DenseLayer& w, const DenseLayer& g, DenseLayer& v) {
    if (g.weights.rows() != w.weights.rows() || g.weights.cols() != w.weights.cols() ||
        v.weights.rows() != w.weights.rows() || v.weights.cols() != w.weights.cols()) {
      throw DimensionError("gradient shape differs from parameter shape");
    }
    v.weights = momentum * v.weights - lr * g.weights;
    v.bias = momentum * v.bias - lr * g.bias;
    w.weights += v.weights;
    w.bias += v.bias;
  };
  step(m.layers.feature1, grads.feature1, velocity.feature1);
  step(m.layers.feature2, grads.feature2, velocity.feature2);
  step(m.layers.label_head, grads.label_head, velocity.label_head);
  step(m.layers.domain_hidden, grads.domain_hidden, velocity.domain_hidden);
  step(m.layers.domain_out, grads.domain_out, velocity.domain_out);
}

namespace detail {

LoopResult train_loop(MlpAdaptModel m, const FeatureSet& source, const Eigen::MatrixXd& target,
                      const TrainConfig& cfg) {
  cfg.validate();
  LoopResult result{std::move(m), {}, {}};
  if (cfg.epochs == 0) return result;
  if (source.empty()) throw Error("training needs a nonempty labeled set");
  check_input(result.model, source.dim());
  if (target.cols() > 0) check_input(result.model, target.rows());

  MlpAdaptModel& model = result.model;
  model.dropout_rate = cfg.dropout_rate;
  LayerSet velocity = model.layers.zeros_like();
  Rng rng(cfg.seed);

  const bool adversarial = target.cols() > 0;
  const auto b = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t source_quota = adversarial ? (b + 1) / 2 : b;
  const std::size_t target_quota = adversarial ? b / 2 : 0;
  const std::size_t n = source.size();
  const auto n_target = static_cast<std::size_t>(target.cols());
  const std::size_t n_batches = (n + source_quota - 1) / source_quota;

  std::vector<std::size_t> perm(n);
  std::vector<std::size_t> target_pool(n_target);
  Eigen::MatrixXd xs(source.dim(), static_cast<Eigen::Index>(source_quota));
  Eigen::MatrixXd xt(source.dim(), static_cast<Eigen::Index>(target_quota));
  std::vector<int> ys(source_quota);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lambda =
        adversarial ? epoch_lambda(epoch, cfg.epochs, cfg.grl_gamma, cfg.ramp) : 0.0;
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    double label_sum = 0.0;
    double domain_sum = 0.0;

    for (std::size_t batch = 0; batch < n_batches; ++batch) {
      for (std::size_t k = 0; k < source_quota; ++k) {
        const std::size_t idx = perm[(batch * source_quota + k) % n];
        xs.col(static_cast<Eigen::Index>(k)) = source.x.col(static_cast<Eigen::Index>(idx));
        ys[k] = source.labels[idx];
      }
      if (target_quota > 0) {
        if (n_target >= target_quota) {
          // Partial Fisher-Yates: distinct target samples.
          std::iota(target_pool.begin(), target_pool.end(), 0);
          for (std::size_t k = 0; k < target_quota; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, n_target - 1);
            std::swap(target_pool[k], target_pool[pick(rng)]);
            xt.col(static_cast<Eigen::Index>(k)) =
                target.col(static_cast<Eigen::Index>(target_pool[k]));
          }
        } else {
          std::uniform_int_distribution<std::size_t> pick(0, n_target - 1);
          for (std::size_t k = 0; k < target_quota; ++k) {
            xt.col(static_cast<Eigen::Index>(k)) = target.col(static_cast<Eigen::Index>(pick(rng)));
          }
        }
      }
      GradResult g = compute_grads(model, xs, ys, xt, lambda, rng);
      label_sum += g.label_loss;
      domain_sum += g.domain_loss;
      sgd_step(model, g.grads, velocity, cfg.learning_rate, cfg.momentum);
    }
    result.label_trace.push_back(label_sum / static_cast<double>(n_batches));
    result.domain_trace.push_back(domain_sum / static_cast<double>(n_batches));
  }
  return result;
}

}  // namespace detail

TrainResult train_supervised(MlpAdaptModel m, const FeatureSet& labeled, const TrainConfig& cfg) {
  if (!labeled.fully_labeled()) throw Error("supervised training needs labeled samples");
  auto r = detail::train_loop(std::move(m), labeled, Eigen::MatrixXd(), cfg);
  return {std::move(r.model), std::move(r.label_trace)};
}

namespace {

int argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& p) {
  int best = 0;
  for (Eigen::Index i = 1; i < p.size(); ++i) {
    if (p(i) > p(best)) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace

int predict(const MlpAdaptModel& m, const Eigen::VectorXd& x) {
  Rng unused(0);
  return argmax_lowest(forward_label(m, x, false, unused));
}

std::vector<int> predict_batch(const MlpAdaptModel& m, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd p = predict_proba(m, x);
  std::vector<int> out(static_cast<std::size_t>(p.cols()));
  for (Eigen::Index c = 0; c < p.cols(); ++c) out[static_cast<std::size_t>(c)] = argmax_lowest(p.col(c));
  return out;
}

double evaluate_accuracy(const MlpAdaptModel& m, const FeatureSet& labeled) {
  if (labeled.empty()) throw Error("accuracy needs a nonempty set");
  if (!labeled.fully_labeled()) throw Error("accuracy needs every sample labeled");
  const auto pred = predict_batch(m, labeled.x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == labeled.labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

}  // namespace specadapt
