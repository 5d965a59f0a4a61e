#include "stcop/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stcop {

double optimal_quantile_target(const ProbForecast& f, int series, double y) {
  const int n = f.n();
  if (n < 2) {
    throw std::invalid_argument("optimal_quantile_target: need >= 2 samples");
  }
  std::vector<double> x(f.samples.col(series).data(),
                        f.samples.col(series).data() + n);
  std::sort(x.begin(), x.end());
  const double lo = 1.0 / (n + 1.0);
  const double hi = n / (n + 1.0);
  if (y <= x.front()) return lo;
  if (y >= x.back()) return hi;
  // inverse of the interpolated order-statistic quantile at y
  auto it = std::upper_bound(x.begin(), x.end(), y);
  size_t j = static_cast<size_t>(it - x.begin()) - 1;
  double gap = x[j + 1] - x[j];
  double frac = gap > 0.0 ? (y - x[j]) / gap : 0.0;
  double level = (static_cast<double>(j) + frac) / (n - 1.0);
  return std::clamp(level, lo, hi);
}

MlpQuantileSelector make_mlp(const std::vector<int>& layer_sizes,
                             RngStream& rng) {
  if (layer_sizes.size() < 2 || layer_sizes.back() != 1) {
    throw std::invalid_argument("make_mlp: need sizes input, ..., 1");
  }
  MlpQuantileSelector m;
  m.layer_sizes = layer_sizes;
  for (size_t l = 1; l < layer_sizes.size(); ++l) {
    int fan_in = layer_sizes[l - 1];
    int fan_out = layer_sizes[l];
    double scale = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i) {
      for (int j = 0; j < fan_in; ++j) {
        w(i, j) = scale * (2.0 * rng.uniform() - 1.0);
      }
    }
    m.weights.push_back(w);
    m.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return m;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// forward pass keeping post-activation values per layer
std::vector<Eigen::VectorXd> forward_acts(const MlpQuantileSelector& m,
                                          const Eigen::VectorXd& feat) {
  std::vector<Eigen::VectorXd> acts;
  acts.push_back(feat);
  for (size_t l = 0; l < m.weights.size(); ++l) {
    Eigen::VectorXd z = m.weights[l] * acts.back() + m.biases[l];
    if (l + 1 == m.weights.size()) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i));
    } else {
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std::tanh(z(i));
    }
    acts.push_back(z);
  }
  return acts;
}

}  // namespace

double mlp_forward(const MlpQuantileSelector& m, const Eigen::VectorXd& feat) {
  if (feat.size() != m.input_dim()) {
    throw std::invalid_argument("mlp_forward: feature dimension mismatch");
  }
  return forward_acts(m, feat).back()(0);
}

void mlp_gradients(const MlpQuantileSelector& m, const Eigen::VectorXd& feat,
                   double target, std::vector<Eigen::MatrixXd>& grad_w,
                   std::vector<Eigen::VectorXd>& grad_b) {
  auto acts = forward_acts(m, feat);
  const size_t n_layers = m.weights.size();
  grad_w.resize(n_layers);
  grad_b.resize(n_layers);
  // loss = (out - target)^2
  double out = acts.back()(0);
  Eigen::VectorXd delta(1);
  delta(0) = 2.0 * (out - target) * out * (1.0 - out);  // sigmoid'
  for (size_t l = n_layers; l-- > 0;) {
    grad_w[l] = delta * acts[l].transpose();
    grad_b[l] = delta;
    if (l > 0) {
      Eigen::VectorXd back = m.weights[l].transpose() * delta;
      const Eigen::VectorXd& a = acts[l];
      delta.resize(a.size());
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        delta(i) = back(i) * (1.0 - a(i) * a(i));  // tanh'
      }
    }
  }
}

MlpQuantileSelector mlp_train(const std::vector<AnnTrainingRecord>& records,
                              const std::vector<int>& hidden_sizes,
                              const MlpTrainConfig& cfg) {
  if (records.size() < 50) {
    throw std::invalid_argument("mlp_train: need at least 50 records");
  }
  const int in_dim = static_cast<int>(records.front().features.size());
  for (const auto& r : records) {
    if (r.features.size() != in_dim) {
      throw std::invalid_argument("mlp_train: inconsistent feature dimension");
    }
  }
  std::vector<int> sizes;
  sizes.push_back(in_dim);
  for (int h : hidden_sizes) sizes.push_back(h);
  sizes.push_back(1);

  RngStream rng(cfg.seed);
  MlpQuantileSelector m = make_mlp(sizes, rng);

  const size_t n = records.size();
  size_t n_val = std::max<size_t>(1, static_cast<size_t>(
                                         cfg.validation_fraction * n));
  size_t n_train = n - n_val;  // validation = chronological tail

  auto val_loss = [&](const MlpQuantileSelector& net) {
    double s = 0.0;
    for (size_t i = n_train; i < n; ++i) {
      double e = mlp_forward(net, records[i].features) -
                 records[i].target_level;
      s += e * e;
    }
    return s / static_cast<double>(n_val);
  };

  MlpQuantileSelector best = m;
  double best_val = val_loss(m);

  std::vector<size_t> idx(n_train);
  for (size_t i = 0; i < n_train; ++i) idx[i] = i;

  std::vector<Eigen::MatrixXd> vel_w;
  std::vector<Eigen::VectorXd> vel_b;
  for (size_t l = 0; l < m.weights.size(); ++l) {
    vel_w.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(),
                                          m.weights[l].cols()));
    vel_b.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
  }
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with the stream's integers
    for (size_t i = n_train; i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
    }
    double train_loss = 0.0;
    for (size_t b0 = 0; b0 < n_train; b0 += cfg.batch_size) {
      size_t b1 = std::min(b0 + cfg.batch_size, n_train);
      std::vector<Eigen::MatrixXd> acc_w;
      std::vector<Eigen::VectorXd> acc_b;
      for (size_t l = 0; l < m.weights.size(); ++l) {
        acc_w.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(),
                                              m.weights[l].cols()));
        acc_b.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
      }
      for (size_t i = b0; i < b1; ++i) {
        const auto& r = records[idx[i]];
        mlp_gradients(m, r.features, r.target_level, gw, gb);
        for (size_t l = 0; l < m.weights.size(); ++l) {
          acc_w[l] += gw[l];
          acc_b[l] += gb[l];
        }
        double e = mlp_forward(m, r.features) - r.target_level;
        train_loss += e * e;
      }
      double inv = 1.0 / static_cast<double>(b1 - b0);
      for (size_t l = 0; l < m.weights.size(); ++l) {
        vel_w[l] = cfg.momentum * vel_w[l] -
                   cfg.learning_rate * inv * acc_w[l];
        vel_b[l] = cfg.momentum * vel_b[l] -
                   cfg.learning_rate * inv * acc_b[l];
        m.weights[l] += vel_w[l];
        m.biases[l] += vel_b[l];
      }
    }
    if (!std::isfinite(train_loss)) {
      throw std::runtime_error("mlp_train: training diverged at epoch " +
                               std::to_string(epoch));
    }
    double v = val_loss(m);
    if (v < best_val) {
      best_val = v;
      best = m;
    }
  }
  return best;
}

double ann_point_forecast(const MlpQuantileSelector& m,
                          const Eigen::VectorXd& features,
                          const ProbForecast& f, int series) {
  double level = mlp_forward(m, features);
  const int n = f.n();
  level = std::clamp(level, 1.0 / (n + 1.0), n / (n + 1.0));
  std::vector<double> col(f.samples.col(series).data(),
                          f.samples.col(series).data() + n);
  return empirical_quantile(std::move(col), level);
}

}  // namespace stcop
