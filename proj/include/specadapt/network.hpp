#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "specadapt/features.hpp"

namespace specadapt {

using Rng = std::mt19937_64;

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out

  Eigen::Index in() const { return weights.cols(); }
  Eigen::Index out() const { return weights.rows(); }
  static DenseLayer zeros(Eigen::Index out, Eigen::Index in);
};

// Every trainable tensor of the two-head network. Also used for gradients
// and momentum buffers, which share the model's shapes.
struct LayerSet {
  DenseLayer feature1;       // hidden x input
  DenseLayer feature2;       // hidden x hidden
  DenseLayer label_head;     // classes x hidden
  DenseLayer domain_hidden;  // hidden x hidden, behind the reversal layer
  DenseLayer domain_out;     // 2 x hidden

  LayerSet zeros_like() const;

  template <typename F>
  void for_each(F&& f) {
    f(feature1), f(feature2), f(label_head), f(domain_hidden), f(domain_out);
  }
  template <typename F>
  void for_each(F&& f) const {
    f(feature1), f(feature2), f(label_head), f(domain_hidden), f(domain_out);
  }
};

// Shared two-layer feature extractor with a label head and a domain head.
// The label path alone is the plain (non-adapting) classifier.
struct MlpAdaptModel {
  LayerSet layers;
  double dropout_rate = 0.25;

  Eigen::Index input_dim() const { return layers.feature1.in(); }
  Eigen::Index hidden() const { return layers.feature1.out(); }
  int n_classes() const { return static_cast<int>(layers.label_head.out()); }

  // Throws DimensionError when the layer chain is inconsistent.
  void validate() const;

  friend bool operator==(const MlpAdaptModel& a, const MlpAdaptModel& b);
};

enum class LambdaRamp {
  kRampUp,    // reversal strength 0 -> 1 over training
  kRampDown,  // reversal strength 1 -> 0 over training
};

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int epochs = 100;
  int batch_size = 64;
  double grl_gamma = 10.0;
  LambdaRamp ramp = LambdaRamp::kRampUp;
  std::uint64_t seed = 0;
  double dropout_rate = 0.25;

  void validate() const;
};

// He-uniform weights in [-sqrt(6/fan_in), sqrt(6/fan_in)], zero biases.
MlpAdaptModel init_model(Eigen::Index input_dim, Eigen::Index hidden = 64, int n_classes = 12,
                         std::uint64_t seed = 0, double dropout_rate = 0.25);

// Class probabilities. In train mode inverted dropout follows each hidden
// ReLU, drawing masks from `rng`; eval mode leaves `rng` untouched.
Eigen::VectorXd forward_label(const MlpAdaptModel& m, const Eigen::VectorXd& x, bool train_mode,
                              Rng& rng);

// Source/target probabilities through the reversal layer (identity forward).
Eigen::VectorXd forward_domain(const MlpAdaptModel& m, const Eigen::VectorXd& x, bool train_mode,
                               Rng& rng);

struct HiddenActivations {
  Eigen::VectorXd first;   // after ReLU and dropout
  Eigen::VectorXd second;  // after ReLU and dropout
};

// Shared-feature activations for one input, with the same mask draws as
// forward_label.
HiddenActivations hidden_activations(const MlpAdaptModel& m, const Eigen::VectorXd& x,
                                     bool train_mode, Rng& rng);

// Column-wise probabilities for a batch, eval mode.
Eigen::MatrixXd predict_proba(const MlpAdaptModel& m, const Eigen::MatrixXd& x);

// Backward pass of the gradient reversal layer: -lambda * upstream.
Eigen::VectorXd grl_backward(const Eigen::VectorXd& upstream, double lambda);

// lambda(p) = 2 / (1 + exp(-gamma p)) - 1 for p in [0,1].
double lambda_schedule(double progress, double gamma = 10.0);

// Progress of epoch `epoch` out of `total`: epoch / (total - 1), or 0 for a
// single epoch. kRampDown mirrors the ramp so strength starts near 1.
double epoch_lambda(int epoch, int total, double gamma, LambdaRamp ramp);

struct GradResult {
  double label_loss = 0.0;
  double domain_loss = 0.0;
  LayerSet grads;
};

// Label loss: mean cross-entropy of the label head over the source batch.
// Domain loss: mean cross-entropy of the domain head over source (domain 0)
// and target (domain 1) samples; zero when the target batch is empty.
// Feature-extractor gradients combine the label gradient with the domain
// gradient reversed and scaled by lambda. Dropout masks are drawn for the
// source batch first, then the target batch.
GradResult compute_grads(const MlpAdaptModel& m, const Eigen::MatrixXd& source_x,
                         std::span<const int> source_labels, const Eigen::MatrixXd& target_x,
                         double lambda, Rng& rng);

// Plain supervised classifier gradients (label path only).
GradResult supervised_grads(const MlpAdaptModel& m, const Eigen::MatrixXd& x,
                            std::span<const int> labels, Rng& rng);

// v <- momentum v - lr g; w <- w + v for every parameter.
void sgd_step(MlpAdaptModel& m, const LayerSet& grads, LayerSet& velocity, double lr,
              double momentum);

struct TrainResult {
  MlpAdaptModel model;
  std::vector<double> loss_trace;
};

// Shuffled mini-batch SGD on the label loss only.
TrainResult train_supervised(MlpAdaptModel m, const FeatureSet& labeled, const TrainConfig& cfg);

namespace detail {

struct LoopResult {
  MlpAdaptModel model;
  std::vector<double> label_trace;
  std::vector<double> domain_trace;
};

// Mini-batch SGD shared by offline training and on-device retraining. With
// an empty `target` every batch holds batch_size source samples; otherwise
// ceil(b/2) source and floor(b/2) target samples, the target half drawn with
// replacement when fewer than floor(b/2) target samples exist. A batch that
// runs past the end of the source permutation wraps to its start.
LoopResult train_loop(MlpAdaptModel m, const FeatureSet& source, const Eigen::MatrixXd& target,
                      const TrainConfig& cfg);

}  // namespace detail

// argmax of eval-mode class probabilities, ties to the lowest index.
int predict(const MlpAdaptModel& m, const Eigen::VectorXd& x);
std::vector<int> predict_batch(const MlpAdaptModel& m, const Eigen::MatrixXd& x);

// Fraction of correctly classified samples. Throws on unlabeled members.
double evaluate_accuracy(const MlpAdaptModel& m, const FeatureSet& labeled);

}  // namespace specadapt
