// Test-only oracles for the network: central finite differences and a
// noiseless linear regression fixture.
#ifndef SCREENFORGE_TESTS_MLP_ORACLE_H_
#define SCREENFORGE_TESTS_MLP_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <random>

#include "screenforge/mlp.h"

namespace sf_test {

using namespace screenforge;

inline double batch_loss(const MlpModel& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return (forward_batch(m, x) - y).squaredNorm() / static_cast<double>(y.size());
}

inline double max_gradient_error(Activation act, std::uint64_t seed) {
  MlpModel m = init_model({10, 8, 4, 1}, act, seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(10, 6);
  Eigen::VectorXd y(6);
  for (int j = 0; j < 6; ++j) {
    for (int i = 0; i < 10; ++i) x(i, j) = g(rng);
    y[j] = g(rng);
  }
  auto analytic = backprop(m, x, y).gradients;
  const double h = 1e-5;
  double worst = 0.0;
  auto check = [&](double& param, double grad) {
    const double saved = param;
    param = saved + h;
    const double up = batch_loss(m, x, y);
    param = saved - h;
    const double down = batch_loss(m, x, y);
    param = saved;
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max({std::abs(numeric), std::abs(grad), 1e-6});
    worst = std::max(worst, std::abs(numeric - grad) / denom);
  };
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    auto& w = m.layers[l].weights;
    for (int i = 0; i < w.rows(); ++i) {
      for (int j = 0; j < w.cols(); ++j) check(w(i, j), analytic[l].weights(i, j));
      check(m.layers[l].bias[i], analytic[l].bias[i]);
    }
  }
  return worst;
}

inline void linear_fixture(Eigen::MatrixXd& x, Eigen::VectorXd& y, int n = 20) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  x.resize(3, n);
  y.resize(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < 3; ++i) x(i, j) = u(rng);
    y[j] = 0.5 * x(0, j) - 1.5 * x(1, j) + 0.25 * x(2, j) + 0.3;
  }
}

}  // namespace sf_test

#endif  // SCREENFORGE_TESTS_MLP_ORACLE_H_
