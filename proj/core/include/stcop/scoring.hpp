#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stcop {

// Sample CRPS: (1/n) sum |x_i - y| - 1/(2 n^2) sum_ij |x_i - x_j|, computed
// in O(n log n) from the sorted sample.
double crps_sample(std::span<const double> samples, double y);

double rmse(std::span<const double> preds, std::span<const double> actuals);

/// One forecast/realization event for a (model, series) pair at one origin.
struct ForecastRecord {
  std::string model;
  std::string series;
  int origin_index = 0;
  std::string origin_time;
  double realized = 0.0;
  double crps = 0.0;
  double point_mean = 0.0;
  bool has_mode = false;
  double point_mode = 0.0;
  bool has_ann = false;
  double point_ann = 0.0;
  double ann_level = 0.5;
  bool in_rmse_window = false;
};

struct ScoreCell {
  std::string model;
  std::string method;  // "crps" or a point-forecast method name
  std::string series;
  double value = 0.0;
  int n_forecasts = 0;
};

struct ScoreReport {
  std::vector<ScoreCell> crps;  // method = "crps"
  std::vector<ScoreCell> rmse;  // method in {"mean","mode","ann","point"}
  std::string crps_window;
  std::string rmse_window;
  std::vector<std::string> footnotes;
};

// Mean CRPS per (model, series) over all records; RMSE per (model, method,
// series) over records flagged in_rmse_window. Order-independent.
ScoreReport aggregate_report(const std::vector<ForecastRecord>& records);

// Table-shaped emission: rows = series, columns = models (CRPS table) or
// model/method pairs (RMSE table).
void write_report_csv(std::ostream& os, const ScoreReport& report);
void write_report_text(std::ostream& os, const ScoreReport& report);

}  // namespace stcop
