#include "screenforge/mlp.h"

#include <cmath>
#include <numeric>

#include "screenforge/error.h"

namespace screenforge {

namespace {

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::kTanh) return z.array().tanh().matrix();
  return z.cwiseMax(0.0);
}

// Derivative expressed through the pre-activation z and output h.
Eigen::MatrixXd activation_grad(const Eigen::MatrixXd& z, const Eigen::MatrixXd& h, Activation a) {
  if (a == Activation::kTanh) return (1.0 - h.array().square()).matrix();
  return (z.array() > 0.0).cast<double>().matrix();
}

LayerParams zeros_like(const std::vector<int>& sizes) {
  LayerParams out;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    out.push_back({Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l]), Eigen::VectorXd::Zero(sizes[l + 1])});
  }
  return out;
}

void check_shapes(const LayerParams& p, const std::vector<int>& sizes, const char* what) {
  if (p.size() + 1 != sizes.size()) throw Error(Errc::kShapeMismatch, std::string(what) + ": layer count");
  for (std::size_t l = 0; l < p.size(); ++l) {
    if (p[l].weights.rows() != sizes[l + 1] || p[l].weights.cols() != sizes[l] ||
        p[l].bias.size() != sizes[l + 1]) {
      throw Error(Errc::kShapeMismatch, std::string(what) + ": layer " + std::to_string(l));
    }
  }
}

}  // namespace

void MlpModel::validate() const {
  if (layer_sizes.size() < 2 || layer_sizes.back() != 1) {
    throw Error(Errc::kShapeMismatch, "layer sizes must run from the input to a single output");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw Error(Errc::kShapeMismatch, "layer widths must be >= 1");
  }
  check_shapes(layers, layer_sizes, "weights");
  check_shapes(adam.m, layer_sizes, "adam first moment");
  check_shapes(adam.v, layer_sizes, "adam second moment");
}

MlpModel init_model(const std::vector<int>& layer_sizes, Activation activation, std::uint64_t seed) {
  MlpModel m;
  m.layer_sizes = layer_sizes;
  m.activation = activation;
  m.layers = zeros_like(layer_sizes);
  m.adam.m = zeros_like(layer_sizes);
  m.adam.v = zeros_like(layer_sizes);
  m.meta.seed = seed;
  m.validate();
  Rng rng(derive_seed(seed, "init"));
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(layer_sizes[l]));
    auto& w = m.layers[l].weights;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-scale, scale);
    }
  }
  return m;
}

Eigen::VectorXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& x) {
  if (x.rows() != model.input_size()) {
    throw Error(Errc::kShapeMismatch, "input has " + std::to_string(x.rows()) + " features, model expects " +
                                          std::to_string(model.input_size()));
  }
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    Eigen::MatrixXd z = (model.layers[l].weights * h).colwise() + model.layers[l].bias;
    h = l + 1 < model.layers.size() ? activate(z, model.activation) : z;
  }
  return h.row(0).transpose();
}

double forward(const MlpModel& model, const Eigen::VectorXd& x) {
  return forward_batch(model, x)[0];
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size() || predictions.empty()) {
    throw Error(Errc::kLengthMismatch, "mse needs equal, non-empty prediction and target lists");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double d = predictions[i] - targets[i];
    s += d * d;
  }
  return s / static_cast<double>(predictions.size());
}

LossAndGradients backprop(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          double dropout_rate, Rng* rng) {
  if (x.cols() != y.size() || x.cols() == 0) {
    throw Error(Errc::kLengthMismatch, "batch inputs and targets differ in count");
  }
  if (x.rows() != model.input_size()) throw Error(Errc::kShapeMismatch, "batch width does not match model");
  const std::size_t depth = model.layers.size();
  const bool drop = dropout_rate > 0.0 && rng != nullptr;
  const double keep = 1.0 - dropout_rate;

  // acts[l] is the input to layer l; zs[l] its pre-activation output.
  std::vector<Eigen::MatrixXd> acts{x}, zs, masks;
  for (std::size_t l = 0; l < depth; ++l) {
    Eigen::MatrixXd z = (model.layers[l].weights * acts.back()).colwise() + model.layers[l].bias;
    zs.push_back(z);
    if (l + 1 == depth) break;
    Eigen::MatrixXd h = activate(z, model.activation);
    if (drop) {
      Eigen::MatrixXd mask(h.rows(), h.cols());
      for (Eigen::Index j = 0; j < mask.cols(); ++j) {
        for (Eigen::Index i = 0; i < mask.rows(); ++i) mask(i, j) = rng->uniform01() < keep ? 1.0 / keep : 0.0;
      }
      h = h.cwiseProduct(mask);
      masks.push_back(std::move(mask));
    }
    acts.push_back(std::move(h));
  }

  const double n = static_cast<double>(y.size());
  Eigen::RowVectorXd residual = zs.back().row(0) - y.transpose();
  LossAndGradients out;
  out.loss = residual.squaredNorm() / n;
  out.gradients.resize(depth);

  Eigen::MatrixXd delta = (2.0 / n) * residual;  // dL/dz for the output layer
  for (std::size_t l = depth; l-- > 0;) {
    out.gradients[l].weights = delta * acts[l].transpose();
    out.gradients[l].bias = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = model.layers[l].weights.transpose() * delta;
    if (drop) back = back.cwiseProduct(masks[l - 1]);
    const Eigen::MatrixXd h = activate(zs[l - 1], model.activation);
    delta = back.cwiseProduct(activation_grad(zs[l - 1], h, model.activation));
  }
  return out;
}

void adam_step(MlpModel& model, const LayerParams& gradients, double lr, double beta1, double beta2,
               double eps) {
  check_shapes(gradients, model.layer_sizes, "gradients");
  model.adam.step += 1;
  const double t = static_cast<double>(model.adam.step);
  const double c1 = 1.0 - std::pow(beta1, t);
  const double c2 = 1.0 - std::pow(beta2, t);
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    update(model.layers[l].weights, model.adam.m[l].weights, model.adam.v[l].weights, gradients[l].weights);
    update(model.layers[l].bias, model.adam.m[l].bias, model.adam.v[l].bias, gradients[l].bias);
  }
}

LossCurve train(MlpModel& model, const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y_train,
                const Eigen::MatrixXd& x_holdout, const Eigen::VectorXd& y_holdout,
                const TrainConfig& cfg) {
  cfg.validate();
  model.validate();
  if (x_train.cols() == 0 || x_holdout.cols() == 0) {
    throw Error(Errc::kInsufficientTraining, "training and holdout sets must be non-empty");
  }
  if (x_train.cols() != y_train.size() || x_holdout.cols() != y_holdout.size()) {
    throw Error(Errc::kLengthMismatch, "feature and target counts differ");
  }
  if (x_train.rows() != model.input_size() || x_holdout.rows() != model.input_size()) {
    throw Error(Errc::kShapeMismatch, "feature width does not match model");
  }

  LossCurve curve;
  Rng rng(derive_seed(cfg.seed, "train"));
  const int n = static_cast<int>(x_train.cols());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int len = std::min(cfg.batch_size, n - start);
      Eigen::MatrixXd xb(x_train.rows(), len);
      Eigen::VectorXd yb(len);
      for (int k = 0; k < len; ++k) {
        xb.col(k) = x_train.col(order[start + k]);
        yb[k] = y_train[order[start + k]];
      }
      auto lg = backprop(model, xb, yb, cfg.dropout_rate, &rng);
      adam_step(model, lg.gradients, cfg.learning_rate);
    }
    curve.train_mse.push_back((forward_batch(model, x_train) - y_train).squaredNorm() / n);
    curve.holdout_mse.push_back((forward_batch(model, x_holdout) - y_holdout).squaredNorm() /
                                static_cast<double>(y_holdout.size()));
  }
  if (cfg.epochs == 0) return curve;
  model.meta.seed = cfg.seed;
  model.meta.epochs += cfg.epochs;
  model.meta.learning_rate = cfg.learning_rate;
  model.meta.batch_size = cfg.batch_size;
  model.meta.dropout_rate = cfg.dropout_rate;
  return curve;
}

Evaluation evaluate_predictions(std::span<const double> predicted, std::span<const double> actual,
                                double gate) {
  Evaluation e;
  e.mse = mse_loss(predicted, actual);
  const double n = static_cast<double>(actual.size());
  const double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_res += (predicted[i] - actual[i]) * (predicted[i] - actual[i]);
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
    const bool a = actual[i] > gate;
    const bool p = predicted[i] > gate;
    if (a && p) ++e.confusion.true_positive;
    if (!a && p) ++e.confusion.false_positive;
    if (!a && !p) ++e.confusion.true_negative;
    if (a && !p) ++e.confusion.false_negative;
  }
  // Constant targets: exact predictions score 1, anything else 0.
  e.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return e;
}

Evaluation evaluate(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double gate) {
  Eigen::VectorXd p = forward_batch(model, x);
  return evaluate_predictions(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                              std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), gate);
}

}  // namespace screenforge
