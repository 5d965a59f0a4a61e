#include "stcop/ts_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stcop/numerics.hpp"

namespace stcop {

std::string variant_name(StVariant v) {
  switch (v) {
    case StVariant::tem_t:
      return "tem_t";
    case StVariant::stem_gaussian:
      return "stem_gaussian";
    case StVariant::stem_t:
      return "stem_t";
    case StVariant::stem_dvine:
      return "stem_dvine";
  }
  return "unknown";
}

StVariant variant_from_name(const std::string& name) {
  if (name == "tem_t") return StVariant::tem_t;
  if (name == "stem_gaussian") return StVariant::stem_gaussian;
  if (name == "stem_t") return StVariant::stem_t;
  if (name == "stem_dvine") return StVariant::stem_dvine;
  throw std::invalid_argument("unknown model variant: " + name);
}

Eigen::VectorXd point_mean(const ProbForecast& f) {
  return f.samples.colwise().mean();
}

namespace {

double silverman_bandwidth(std::span<const double> x) {
  const size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  return 1.06 * std::sqrt(var) * std::pow(static_cast<double>(n), -0.2);
}

// KDE evaluated at each sample point; neighbors beyond 6 bandwidths are
// negligible, so a sorted sliding window keeps this close to linear.
double kde_argmax_at_samples(std::vector<double> x) {
  const size_t n = x.size();
  std::sort(x.begin(), x.end());
  if (x.back() - x.front() < 1e-300) return x.front();
  double bw = silverman_bandwidth(x);
  if (!(bw > 0.0)) return x.front();
  const double cut = 6.0 * bw;
  double best = x.front();
  double best_f = -1.0;
  size_t lo = 0;
  for (size_t i = 0; i < n; ++i) {
    while (x[i] - x[lo] > cut) ++lo;
    double f = 0.0;
    for (size_t j = lo; j < n && x[j] - x[i] <= cut; ++j) {
      double z = (x[j] - x[i]) / bw;
      f += std::exp(-0.5 * z * z);
    }
    if (f > best_f) {
      best_f = f;
      best = x[i];
    }
  }
  return best;
}

}  // namespace

Eigen::VectorXd point_mode(const ProbForecast& f) {
  if (f.n() < 2) throw std::invalid_argument("point_mode: need >= 2 samples");
  Eigen::VectorXd out(f.d());
  for (int j = 0; j < f.d(); ++j) {
    std::vector<double> col(f.samples.col(j).data(),
                            f.samples.col(j).data() + f.n());
    out(j) = kde_argmax_at_samples(std::move(col));
  }
  return out;
}

double empirical_quantile(std::vector<double> values, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::domain_error("empirical_quantile: level must be in (0,1)");
  }
  if (values.empty()) {
    throw std::invalid_argument("empirical_quantile: empty sample");
  }
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  double pos = level * static_cast<double>(n - 1);
  size_t j = static_cast<size_t>(pos);
  if (j >= n - 1) return values.back();
  double frac = pos - static_cast<double>(j);
  return values[j] + frac * (values[j + 1] - values[j]);
}

Eigen::VectorXd point_quantile(const ProbForecast& f, double level) {
  Eigen::VectorXd out(f.d());
  for (int j = 0; j < f.d(); ++j) {
    std::vector<double> col(f.samples.col(j).data(),
                            f.samples.col(j).data() + f.n());
    out(j) = empirical_quantile(std::move(col), level);
  }
  return out;
}

int kde_mode_count(std::span<const double> samples, int grid,
                   double rel_threshold) {
  if (samples.size() < 3) return samples.empty() ? 0 : 1;
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  double lo = x.front(), hi = x.back();
  if (hi - lo < 1e-300) return 1;
  double bw = silverman_bandwidth(x);
  std::vector<double> f(grid, 0.0);
  const double step = (hi - lo) / (grid - 1);
  const double cut = 6.0 * bw;
  size_t start = 0;
  for (int g = 0; g < grid; ++g) {
    double t = lo + g * step;
    while (start < x.size() && t - x[start] > cut) ++start;
    double s = 0.0;
    for (size_t j = start; j < x.size() && x[j] - t <= cut; ++j) {
      double z = (x[j] - t) / bw;
      s += std::exp(-0.5 * z * z);
    }
    f[g] = s;
  }
  double peak = *std::max_element(f.begin(), f.end());
  double floor = rel_threshold * peak;
  int count = 0;
  for (int g = 0; g < grid; ++g) {
    bool left_ok = (g == 0) ? true : f[g] > f[g - 1];
    bool right_ok = (g == grid - 1) ? true : f[g] > f[g + 1];
    if (left_ok && right_ok && f[g] >= floor) ++count;
  }
  return count;
}

std::vector<int> vine_fit_order(const std::vector<int>& series_path) {
  const int d = static_cast<int>(series_path.size());
  std::vector<int> order;
  order.reserve(2 * d);
  for (int i = 0; i < d; ++i) order.push_back(d + series_path[i]);  // lags
  for (int i = d - 1; i >= 0; --i) order.push_back(series_path[i]);
  return order;
}

std::vector<int> default_vine_fit_order(int d) {
  std::vector<int> path(d);
  for (int i = 0; i < d; ++i) path[i] = i;
  return vine_fit_order(path);
}

SpatioTemporalModel fit_st_model(const Eigen::MatrixXd& data, StVariant variant,
                                 const std::vector<std::string>& series_names,
                                 const std::vector<CopulaFamily>& candidates,
                                 const std::vector<int>& series_path) {
  const auto t_len = data.rows();
  const int d = static_cast<int>(data.cols());
  if (t_len < 100) {
    throw std::invalid_argument("fit_st_model: need at least 100 observations");
  }
  if (d < 1) throw std::invalid_argument("fit_st_model: need at least 1 series");
  if (variant == StVariant::tem_t && d != 1) {
    throw std::invalid_argument("fit_st_model: tem_t is univariate (d = 1)");
  }
  if (!series_names.empty() &&
      static_cast<int>(series_names.size()) != d) {
    throw std::invalid_argument("fit_st_model: series_names size mismatch");
  }

  SpatioTemporalModel model;
  model.variant = variant;
  model.d = d;
  model.series_names = series_names;

  for (int j = 0; j < d; ++j) {
    model.marginals.push_back(
        EmpiricalMarginal::fit(std::span(data.col(j).data(),
                                         static_cast<size_t>(t_len))));
  }

  // stacked pseudo-observations: row t holds (u_t, u_{t-1})
  Eigen::MatrixXd stacked(t_len - 1, 2 * d);
  for (Eigen::Index t = 1; t < t_len; ++t) {
    for (int j = 0; j < d; ++j) {
      stacked(t - 1, j) = model.marginals[j].pit(data(t, j));
      stacked(t - 1, d + j) = model.marginals[j].pit(data(t - 1, j));
    }
  }

  switch (variant) {
    case StVariant::tem_t:
    case StVariant::stem_t: {
      EllipticalFit fit = fit_elliptical(CopulaFamily::t, stacked);
      model.elliptical = fit.copula;
      model.loglik = fit.loglik;
      break;
    }
    case StVariant::stem_gaussian: {
      EllipticalFit fit = fit_elliptical(CopulaFamily::gaussian, stacked);
      model.elliptical = fit.copula;
      model.loglik = fit.loglik;
      break;
    }
    case StVariant::stem_dvine: {
      std::vector<int> order = series_path.empty()
                                   ? default_vine_fit_order(d)
                                   : vine_fit_order(series_path);
      DVineModel vine = fit_dvine(stacked, order, candidates);
      model.loglik = vine.loglik;
      model.vine = std::move(vine);
      break;
    }
  }
  return model;
}

ProbForecast forecast_distribution(const SpatioTemporalModel& model,
                                   const Eigen::VectorXd& x_prev, int n,
                                   RngStream& rng,
                                   const std::string& origin_time) {
  if (!model.fitted()) {
    throw std::logic_error("forecast_distribution: model not fitted");
  }
  const int d = model.d;
  if (x_prev.size() != d) {
    throw std::invalid_argument("forecast_distribution: x_prev size mismatch");
  }
  if (n < 1) throw std::invalid_argument("forecast_distribution: n must be >= 1");
  for (int j = 0; j < d; ++j) {
    if (!std::isfinite(x_prev(j))) {
      throw std::invalid_argument("forecast_distribution: non-finite x_prev");
    }
  }
  Eigen::VectorXd u_prev(d);
  for (int j = 0; j < d; ++j) u_prev(j) = model.marginals[j].pit(x_prev(j));

  ProbForecast f;
  f.origin_time = origin_time;
  f.samples.resize(n, d);

  if (model.elliptical) {
    // stacked layout already has the lagged block trailing
    Eigen::MatrixXd u = conditional_sample_elliptical(*model.elliptical,
                                                      u_prev, n, rng);
    for (int s = 0; s < n; ++s) {
      for (int j = 0; j < d; ++j) {
        f.samples(s, j) = model.marginals[j].quantile(clamp_unit(u(s, j)));
      }
    }
  } else {
    // vine slots 0..d-1 hold the lagged block, d..2d-1 the current block;
    // order[slot] names the stacked column each slot carries
    const auto& order = model.vine->order;
    Eigen::VectorXd prefix(d);
    for (int slot = 0; slot < d; ++slot) prefix(slot) = u_prev(order[slot] - d);
    Eigen::MatrixXd u = conditional_sample_dvine(*model.vine, prefix, n, rng);
    for (int s = 0; s < n; ++s) {
      for (int slot = d; slot < 2 * d; ++slot) {
        int series = order[slot];  // current-block column = series index
        f.samples(s, series) =
            model.marginals[series].quantile(clamp_unit(u(s, slot - d)));
      }
    }
  }
  return f;
}

}  // namespace stcop
