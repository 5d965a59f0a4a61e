#include "stcop/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "stcop/avt_garch.hpp"
#include "stcop/mlp.hpp"
#include "stcop/numerics.hpp"

namespace stcop {

void BacktestConfig::validate(int n_diffs) const {
  if (initial_window < 100) {
    throw std::invalid_argument("backtest: initial_window must be >= 100");
  }
  if (mc_samples < 100) {
    throw std::invalid_argument("backtest: mc_samples must be >= 100");
  }
  if (refit_every < 1) {
    throw std::invalid_argument("backtest: refit_every must be >= 1");
  }
  if (initial_window >= n_diffs) {
    throw std::invalid_argument(
        "backtest: initial_window leaves no forecast origins");
  }
  if (models.empty()) {
    throw std::invalid_argument("backtest: no models configured");
  }
  if (initial_window <= ann_window_lags) {
    throw std::invalid_argument("backtest: initial_window too small for lags");
  }
}

namespace {

class StModelDriver : public ForecastDriver {
 public:
  StModelDriver(StVariant variant, std::vector<int> series_path)
      : variant_(variant), series_path_(std::move(series_path)) {}

  std::string name() const override { return variant_name(variant_); }
  std::string label() const override {
    switch (variant_) {
      case StVariant::stem_dvine:
        return "S-Tem D-Vine";
      case StVariant::stem_t:
        return "S-Tem-t";
      case StVariant::stem_gaussian:
        return "S-Tem-gaussian";
      case StVariant::tem_t:
        return "Tem-t";
    }
    return "?";
  }
  bool wants_mode() const override {
    return variant_ == StVariant::stem_dvine;
  }
  bool wants_ann() const override {
    return variant_ == StVariant::stem_dvine || variant_ == StVariant::tem_t;
  }

  void fit(const Eigen::MatrixXd& window, const std::vector<std::string>& names,
           uint64_t /*seed*/) override {
    models_.clear();
    if (variant_ == StVariant::tem_t) {
      // univariate temporal model, one per series
      for (Eigen::Index j = 0; j < window.cols(); ++j) {
        models_.push_back(fit_st_model(window.col(j), variant_,
                                       {names[static_cast<size_t>(j)]}));
      }
    } else {
      models_.push_back(fit_st_model(window, variant_, names,
                                     kDefaultCandidates, series_path_));
    }
  }

  ProbForecast forecast(const Eigen::MatrixXd& window, int n,
                        RngStream& rng) override {
    if (models_.empty()) throw std::logic_error("driver not fitted");
    Eigen::VectorXd x_prev = window.row(window.rows() - 1).transpose();
    if (variant_ != StVariant::tem_t) {
      return forecast_distribution(models_[0], x_prev, n, rng);
    }
    ProbForecast f;
    f.samples.resize(n, window.cols());
    for (Eigen::Index j = 0; j < window.cols(); ++j) {
      Eigen::VectorXd xp(1);
      xp(0) = x_prev(j);
      ProbForecast fj = forecast_distribution(models_[j], xp, n, rng);
      f.samples.col(j) = fj.samples.col(0);
    }
    return f;
  }

 private:
  StVariant variant_;
  std::vector<int> series_path_;
  std::vector<SpatioTemporalModel> models_;
};

class GarchDriver : public ForecastDriver {
 public:
  std::string name() const override { return "avt_garch"; }
  std::string label() const override { return "AVT-GARCH (simplified)"; }

  void fit(const Eigen::MatrixXd& window, const std::vector<std::string>&,
           uint64_t /*seed*/) override {
    const int d = static_cast<int>(window.cols());
    bool warm = static_cast<int>(models_.size()) == d;
    std::vector<ArxAvtGarchModel> fitted(d);
    for (int j = 0; j < d; ++j) {
      Eigen::MatrixXd X = exog(window, j);
      const ArxAvtGarchModel* ws = warm ? &models_[j] : nullptr;
      fitted[j] = fit_arx_avtgarch(window.col(j), X, ws, warm ? 1 : 4);
    }
    models_ = std::move(fitted);
  }

  ProbForecast forecast(const Eigen::MatrixXd& window, int n,
                        RngStream& rng) override {
    const int d = static_cast<int>(window.cols());
    if (static_cast<int>(models_.size()) != d) {
      throw std::logic_error("driver not fitted");
    }
    const auto w = window.rows();
    ProbForecast f;
    f.samples.resize(n, d);
    for (int j = 0; j < d; ++j) {
      Eigen::MatrixXd X = exog(window, j);
      GarchFilterResult st = avtgarch_filter(models_[j], window.col(j), X);
      // regressors for the next step: the other series' latest differences
      Eigen::VectorXd x_now(d - 1);
      int c = 0;
      for (int k = 0; k < d; ++k) {
        if (k != j) x_now(c++) = window(w - 1, k);
      }
      ProbForecast fj = forecast_arx_avtgarch(
          models_[j], window(w - 1, j), x_now, st.sigma(w - 1), st.eps(w - 1),
          n, rng);
      f.samples.col(j) = fj.samples.col(0);
    }
    return f;
  }

 private:
  // X.row(t) holds the other series' differences at t-1 (aligned with y_t)
  static Eigen::MatrixXd exog(const Eigen::MatrixXd& window, int series) {
    const auto w = window.rows();
    const int d = static_cast<int>(window.cols());
    if (d == 1) return Eigen::MatrixXd();
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(w, d - 1);
    for (Eigen::Index t = 1; t < w; ++t) {
      int c = 0;
      for (int k = 0; k < d; ++k) {
        if (k != series) X(t, c++) = window(t - 1, k);
      }
    }
    return X;
  }

  std::vector<ArxAvtGarchModel> models_;
};

// per-(driver, series) quantile selector state
struct AnnState {
  bool trained = false;
  MlpQuantileSelector net;
  std::vector<double> targets;  // by record index within this driver
};

Eigen::VectorXd ann_features(const Eigen::MatrixXd& diffs, int origin,
                             const BacktestConfig& cfg,
                             const std::vector<double>& targets,
                             int record_idx) {
  const int d = static_cast<int>(diffs.cols());
  const int W = cfg.ann_window_lags;
  const int k = cfg.ann_level_lags;
  Eigen::VectorXd f(d * W + k);
  int p = 0;
  for (int j = 0; j < d; ++j) {
    for (int l = 1; l <= W; ++l) f(p++) = diffs(origin - l, j);
  }
  // most recent targets known at forecast time (one-step delay)
  for (int l = 1; l <= k; ++l) {
    int idx = record_idx - l;
    f(p++) = idx >= 0 ? targets[idx] : 0.5;
  }
  return f;
}

void standardize_lags(Eigen::VectorXd& f, const MlpQuantileSelector& net,
                      int n_lag_features) {
  for (int i = 0; i < n_lag_features; ++i) {
    f(i) = (f(i) - net.feat_mean(i)) / net.feat_sd(i);
  }
}

struct DriverOutput {
  std::vector<ForecastRecord> records;
  std::vector<std::string> footnotes;
  std::vector<SampleDump> dumps;
};

DriverOutput run_driver(const Dataset& data, const BacktestConfig& cfg,
                        ForecastDriver& driver) {
  const Eigen::MatrixXd& diffs = data.diffs;
  const int n_diffs = static_cast<int>(diffs.rows());
  const int d = data.d();
  const std::string model_id = driver.name();
  DriverOutput out;

  std::vector<AnnState> ann(d);
  const int n_lag_features = d * cfg.ann_window_lags;
  bool fitted = false;
  int record_count = 0;  // origins with records so far (this driver)

  std::vector<int> probes;
  if (cfg.lookahead_check) {
    probes = {cfg.initial_window,
              (cfg.initial_window + n_diffs - 1) / 2, n_diffs - 1};
  }

  auto train_ann = [&](int upto_records) {
    for (int j = 0; j < d; ++j) {
      std::vector<AnnTrainingRecord> recs;
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(n_lag_features);
      Eigen::VectorXd sd = Eigen::VectorXd::Ones(n_lag_features);
      std::vector<Eigen::VectorXd> feats;
      for (int r = 0; r < upto_records; ++r) {
        int origin = cfg.initial_window + r;
        feats.push_back(ann_features(diffs, origin, cfg, ann[j].targets, r));
        mean += feats.back().head(n_lag_features);
      }
      mean /= static_cast<double>(upto_records);
      Eigen::VectorXd var = Eigen::VectorXd::Zero(n_lag_features);
      for (const auto& f : feats) {
        var += (f.head(n_lag_features) - mean).cwiseAbs2();
      }
      var /= std::max(1.0, static_cast<double>(upto_records - 1));
      for (int i = 0; i < n_lag_features; ++i) {
        sd(i) = std::sqrt(std::max(var(i), 1e-24));
        if (sd(i) < 1e-12) sd(i) = 1.0;
      }
      for (int r = 0; r < upto_records; ++r) {
        Eigen::VectorXd f = feats[static_cast<size_t>(r)];
        for (int i = 0; i < n_lag_features; ++i) {
          f(i) = (f(i) - mean(i)) / sd(i);
        }
        recs.push_back({f, ann[j].targets[static_cast<size_t>(r)]});
      }
      MlpTrainConfig tc;
      tc.epochs = cfg.ann_epochs;
      tc.seed = substream_seed(cfg.seed, model_id + "/ann",
                               static_cast<uint64_t>(j));
      ann[j].net = mlp_train(recs, cfg.ann_hidden, tc);
      ann[j].net.window_lags = cfg.ann_window_lags;
      ann[j].net.level_lags = cfg.ann_level_lags;
      ann[j].net.feat_mean = mean;
      ann[j].net.feat_sd = sd;
      ann[j].trained = true;
    }
  };

  for (int t = cfg.initial_window; t < n_diffs; ++t) {
    const bool refit = !fitted ||
                       (t - cfg.initial_window) % cfg.refit_every == 0;
    Eigen::MatrixXd window = diffs.topRows(t);
    if (refit) {
      try {
        driver.fit(window, data.series_names,
                   substream_seed(cfg.seed, model_id + "/fit",
                                  static_cast<uint64_t>(t)));
        fitted = true;
      } catch (const std::exception& e) {
        out.footnotes.push_back(model_id + " fit failed at origin " +
                                std::to_string(t) + ": " + e.what());
        if (!fitted) continue;  // nothing to forecast with yet
      }
    }
    if (!fitted) continue;

    RngStream rng(substream_seed(cfg.seed, model_id + "/forecast",
                                 static_cast<uint64_t>(t)));
    ProbForecast f = driver.forecast(window, cfg.mc_samples, rng);
    f.origin_time = data.timestamps[t];  // date of the last observed level diff

    if (cfg.lookahead_check &&
        std::find(probes.begin(), probes.end(), t) != probes.end()) {
      // poison everything from the realization on; fits and forecasts must
      // not change by a single bit
      Eigen::MatrixXd poisoned = diffs;
      poisoned.bottomRows(n_diffs - t).setConstant(1e300);
      Eigen::MatrixXd pwindow = poisoned.topRows(t);
      driver.fit(pwindow, data.series_names,
                 substream_seed(cfg.seed, model_id + "/fit",
                                static_cast<uint64_t>(t)));
      RngStream prng(substream_seed(cfg.seed, model_id + "/forecast",
                                    static_cast<uint64_t>(t)));
      ProbForecast pf = driver.forecast(pwindow, cfg.mc_samples, prng);
      if (!(pf.samples.array() == f.samples.array()).all()) {
        throw std::runtime_error(model_id +
                                 ": forecast at origin " + std::to_string(t) +
                                 " depends on future data");
      }
      driver.fit(window, data.series_names,
                 substream_seed(cfg.seed, model_id + "/fit",
                                static_cast<uint64_t>(t)));
    }

    if (cfg.collect_samples) {
      out.dumps.push_back({model_id, t, f.samples});
    }

    const bool ann_ready = record_count >= cfg.ann_training_forecasts;
    if (driver.wants_ann() && !ann_ready) {
      // training block still filling up; nothing to do yet
    }
    if (driver.wants_ann() && record_count == cfg.ann_training_forecasts &&
        !ann[0].trained) {
      train_ann(cfg.ann_training_forecasts);
    }
    if (driver.wants_ann() && cfg.ann_refresh && ann[0].trained &&
        record_count > cfg.ann_training_forecasts &&
        (record_count - cfg.ann_training_forecasts) % cfg.ann_refresh_every ==
            0) {
      train_ann(record_count);
    }

    Eigen::VectorXd means = point_mean(f);
    Eigen::VectorXd modes;
    if (driver.wants_mode()) modes = point_mode(f);

    for (int j = 0; j < d; ++j) {
      ForecastRecord rec;
      rec.model = driver.label();
      rec.series = data.series_names[j];
      rec.origin_index = t;
      rec.origin_time = f.origin_time;
      rec.realized = diffs(t, j);
      std::vector<double> col(f.samples.col(j).data(),
                              f.samples.col(j).data() + f.n());
      rec.crps = crps_sample(col, rec.realized);
      rec.point_mean = means(j);
      if (driver.wants_mode()) {
        rec.has_mode = true;
        rec.point_mode = modes(j);
      }
      rec.in_rmse_window = ann_ready;
      if (driver.wants_ann() && ann[j].trained) {
        Eigen::VectorXd feat = ann_features(diffs, t, cfg, ann[j].targets,
                                            record_count);
        standardize_lags(feat, ann[j].net, n_lag_features);
        rec.ann_level = mlp_forward(ann[j].net, feat);
        rec.point_ann = ann_point_forecast(ann[j].net, feat, f, j);
        rec.has_ann = true;
      }
      out.records.push_back(std::move(rec));
      if (driver.wants_ann()) {
        ann[j].targets.push_back(
            optimal_quantile_target(f, j, diffs(t, j)));
      }
    }
    ++record_count;
  }
  return out;
}

}  // namespace

std::unique_ptr<ForecastDriver> make_driver(const std::string& name,
                                            const BacktestConfig& cfg) {
  if (name == "avt_garch") return std::make_unique<GarchDriver>();
  return std::make_unique<StModelDriver>(variant_from_name(name),
                                         cfg.vine_series_path);
}

BacktestResult expanding_backtest(
    const Dataset& data, const BacktestConfig& cfg,
    const std::vector<std::shared_ptr<ForecastDriver>>& drivers) {
  cfg.validate(static_cast<int>(data.diffs.rows()));
  std::vector<DriverOutput> outputs(drivers.size());
  if (cfg.parallel_models && drivers.size() > 1) {
    std::vector<std::future<DriverOutput>> futs;
    for (auto& drv : drivers) {
      futs.push_back(std::async(std::launch::async, [&data, &cfg, drv] {
        return run_driver(data, cfg, *drv);
      }));
    }
    for (size_t i = 0; i < futs.size(); ++i) outputs[i] = futs[i].get();
  } else {
    for (size_t i = 0; i < drivers.size(); ++i) {
      outputs[i] = run_driver(data, cfg, *drivers[i]);
    }
  }
  BacktestResult res;
  for (auto& o : outputs) {
    res.records.insert(res.records.end(), o.records.begin(), o.records.end());
    res.footnotes.insert(res.footnotes.end(), o.footnotes.begin(),
                         o.footnotes.end());
    res.sample_dumps.insert(res.sample_dumps.end(), o.dumps.begin(),
                            o.dumps.end());
  }
  if (res.records.empty()) {
    throw std::runtime_error("expanding_backtest: no records were produced");
  }
  res.report = aggregate_report(res.records);
  res.report.footnotes = res.footnotes;
  return res;
}

BacktestResult expanding_backtest(const Dataset& data,
                                  const BacktestConfig& cfg) {
  std::vector<std::shared_ptr<ForecastDriver>> drivers;
  for (const auto& name : cfg.models) {
    drivers.push_back(make_driver(name, cfg));
  }
  return expanding_backtest(data, cfg, drivers);
}

}  // namespace stcop
