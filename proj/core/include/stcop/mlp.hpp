#pragma once

#include <Eigen/Dense>

#include <vector>

#include "stcop/rng.hpp"
#include "stcop/ts_model.hpp"

namespace stcop {

/// Multilayer perceptron mapping a feature vector to a quantile level in
/// (0,1): tanh hidden layers, sigmoid output. window_lags (per series) and
/// level_lags describe the feature layout; feat_mean/feat_sd standardize the
/// lagged-value features.
struct MlpQuantileSelector {
  std::vector<int> layer_sizes;  // input, hidden..., 1
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  int window_lags = 5;
  int level_lags = 3;
  Eigen::VectorXd feat_mean;
  Eigen::VectorXd feat_sd;

  int input_dim() const { return layer_sizes.empty() ? 0 : layer_sizes[0]; }
};

struct AnnTrainingRecord {
  Eigen::VectorXd features;
  double target_level = 0.5;
};

// Level u* whose forecast quantile lands on y: the empirical PIT of y under
// the forecast samples, clipped to [1/(n+1), n/(n+1)].
double optimal_quantile_target(const ProbForecast& f, int series, double y);

MlpQuantileSelector make_mlp(const std::vector<int>& layer_sizes,
                             RngStream& rng);

double mlp_forward(const MlpQuantileSelector& m, const Eigen::VectorXd& feat);

// Backprop gradients of the squared error (output - target)^2 at one record;
// exposed for finite-difference verification.
void mlp_gradients(const MlpQuantileSelector& m, const Eigen::VectorXd& feat,
                   double target, std::vector<Eigen::MatrixXd>& grad_w,
                   std::vector<Eigen::VectorXd>& grad_b);

struct MlpTrainConfig {
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double validation_fraction = 0.1;  // chronological tail holdout
  uint64_t seed = 1;
};

// Mini-batch gradient descent with momentum on the MSE; returns the weights of
// the best validation epoch. Throws on divergence (non-finite loss), naming
// the epoch.
MlpQuantileSelector mlp_train(const std::vector<AnnTrainingRecord>& records,
                              const std::vector<int>& hidden_sizes,
                              const MlpTrainConfig& cfg);

double ann_point_forecast(const MlpQuantileSelector& m,
                          const Eigen::VectorXd& features,
                          const ProbForecast& f, int series);

}  // namespace stcop
