#pragma once

#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "stcop/dataset.hpp"
#include "stcop/scoring.hpp"
#include "stcop/ts_model.hpp"

namespace stcop {

struct BacktestConfig {
  int initial_window = 1000;
  int refit_every = 1;
  int mc_samples = 1000;
  int ann_training_forecasts = 1000;
  std::vector<std::string> models = {"stem_dvine", "stem_t", "stem_gaussian",
                                     "tem_t", "avt_garch"};
  uint64_t seed = 1;

  // ANN quantile selector
  int ann_window_lags = 5;
  int ann_level_lags = 3;
  std::vector<int> ann_hidden = {32, 16};
  int ann_epochs = 200;
  bool ann_refresh = false;  // periodic retraining, off by default
  int ann_refresh_every = 250;

  std::vector<int> vine_series_path;  // current-block D-vine path order

  bool lookahead_check = false;  // poison-the-future instrumentation probes
  bool parallel_models = true;
  bool collect_samples = false;  // retain per-forecast sample matrices

  void validate(int n_diffs) const;
};

/// A model the backtest can drive. fit() sees the expanding window of
/// differenced observations up to (excluding) the forecast target; forecast()
/// may be called with windows extended past the last fit.
class ForecastDriver {
 public:
  virtual ~ForecastDriver() = default;
  virtual std::string name() const = 0;   // config identifier
  virtual std::string label() const = 0;  // report column label
  virtual bool wants_mode() const { return false; }
  virtual bool wants_ann() const { return false; }
  virtual void fit(const Eigen::MatrixXd& window,
                   const std::vector<std::string>& names, uint64_t seed) = 0;
  virtual ProbForecast forecast(const Eigen::MatrixXd& window, int n,
                                RngStream& rng) = 0;
};

// Drivers for the built-in model names: stem_dvine, stem_t, stem_gaussian,
// tem_t (one univariate model per series), avt_garch (one fit per series with
// the other series' lagged differences as regressors).
std::unique_ptr<ForecastDriver> make_driver(const std::string& name,
                                            const BacktestConfig& cfg);

struct SampleDump {
  std::string model;
  int origin_index;
  Eigen::MatrixXd samples;
};

struct BacktestResult {
  std::vector<ForecastRecord> records;
  ScoreReport report;
  std::vector<std::string> footnotes;
  std::vector<SampleDump> sample_dumps;
};

// Expanding-window study: for each origin t in [initial_window, N-1], models
// are refit every refit_every origins on diffs rows [0, t), forecast row t,
// and are scored by CRPS; point forecasts enter the RMSE window once the
// first ann_training_forecasts records have trained the quantile selector.
BacktestResult expanding_backtest(const Dataset& data,
                                  const BacktestConfig& cfg);
BacktestResult expanding_backtest(
    const Dataset& data, const BacktestConfig& cfg,
    const std::vector<std::shared_ptr<ForecastDriver>>& drivers);

}  // namespace stcop
