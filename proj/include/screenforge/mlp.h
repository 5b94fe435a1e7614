#ifndef SCREENFORGE_MLP_H_
#define SCREENFORGE_MLP_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "screenforge/dataset.h"
#include "screenforge/features.h"
#include "screenforge/util.h"

namespace screenforge {

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

using LayerParams = std::vector<DenseLayer>;

struct AdamState {
  LayerParams m;
  LayerParams v;
  long step = 0;
};

struct TrainMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double learning_rate = 0.0;
  int batch_size = 0;
  double dropout_rate = 0.0;
};

struct MlpModel {
  std::vector<int> layer_sizes;  // input, hidden..., 1
  Activation activation = Activation::kRelu;
  LayerParams layers;
  AdamState adam;
  std::string target = "custom";
  FeatureSpec features;
  NormStats norm;
  TrainMeta meta;

  int input_size() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
  // Throws Error(kShapeMismatch) unless every layer and moment shape chains
  // from layer_sizes and the output width is 1.
  void validate() const;
};

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] drawn row by row,
// layer by layer; zero biases; zeroed Adam state.
MlpModel init_model(const std::vector<int>& layer_sizes, Activation activation, std::uint64_t seed);

// Affine-activation chain with a linear output. x is already normalized.
double forward(const MlpModel& model, const Eigen::VectorXd& x);
// One column per sample.
Eigen::VectorXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& x);

double mse_loss(std::span<const double> predictions, std::span<const double> targets);

struct LossAndGradients {
  double loss = 0.0;
  LayerParams gradients;
};

// MSE over the batch (one column per sample) and its gradient with respect
// to every parameter. With dropout_rate > 0 and an rng, inverted dropout is
// applied to each hidden activation.
LossAndGradients backprop(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          double dropout_rate = 0.0, Rng* rng = nullptr);

// Bias-corrected Adam update; Error(kShapeMismatch) on mismatched shapes.
void adam_step(MlpModel& model, const LayerParams& gradients, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

struct LossCurve {
  std::vector<double> train_mse;
  std::vector<double> holdout_mse;
};

// Mini-batch training. Each epoch reshuffles the training columns with a
// generator derived from cfg.seed, steps Adam once per batch, then records
// the dropout-free MSE on both sets.
LossCurve train(MlpModel& model, const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y_train,
                const Eigen::MatrixXd& x_holdout, const Eigen::VectorXd& y_holdout,
                const TrainConfig& cfg);

struct Confusion {
  int true_positive = 0;
  int false_positive = 0;
  int true_negative = 0;
  int false_negative = 0;
};

struct Evaluation {
  double mse = 0.0;
  double r2 = 0.0;
  Confusion confusion;  // actual and predicted both gated by value > gate
};

Evaluation evaluate_predictions(std::span<const double> predicted, std::span<const double> actual,
                                double gate = kActivityGate);
Evaluation evaluate(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    double gate = kActivityGate);

}  // namespace screenforge

#endif  // SCREENFORGE_MLP_H_
