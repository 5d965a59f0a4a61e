#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace stcop {

/// Aligned multivariate price panel: levels (after imputation) and their first
/// differences. timestamps are strictly increasing ISO-8601 dates.
struct Dataset {
  std::vector<std::string> timestamps;  // size T
  Eigen::MatrixXd levels;               // T x d
  Eigen::MatrixXd diffs;                // (T-1) x d
  std::vector<std::string> series_names;

  int T() const { return static_cast<int>(levels.rows()); }
  int d() const { return static_cast<int>(levels.cols()); }
};

// Last observation carried forward; gaps are NaN. A leading gap is an error.
std::vector<double> locf_impute(const std::vector<double>& series);

// diffs[t] = levels[t+1] - levels[t].
Eigen::MatrixXd difference(const Eigen::MatrixXd& levels);

// Validates timestamps, imputes per column, differences. levels may contain
// NaN gaps.
Dataset make_dataset(std::vector<std::string> timestamps,
                     Eigen::MatrixXd levels,
                     std::vector<std::string> series_names);

// Wide CSV: header "date,name1,...", empty cells are gaps.
Dataset read_csv_wide(const std::string& path);

// Two-column CSVs (date,value), one file per series; rows are aligned on the
// union calendar before imputation.
Dataset read_csv_per_series(const std::vector<std::string>& paths,
                            const std::vector<std::string>& names);

void write_csv_wide(const std::string& path, const Dataset& ds);

}  // namespace stcop
