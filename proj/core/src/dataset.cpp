#include "stcop/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace stcop {

std::vector<double> locf_impute(const std::vector<double>& series) {
  if (series.empty()) {
    throw std::invalid_argument("locf_impute: empty series");
  }
  if (std::isnan(series.front())) {
    throw std::invalid_argument(
        "locf_impute: leading gap has no prior value to carry forward");
  }
  std::vector<double> out(series.size());
  double last = series.front();
  for (size_t i = 0; i < series.size(); ++i) {
    if (!std::isnan(series[i])) last = series[i];
    out[i] = last;
  }
  return out;
}

Eigen::MatrixXd difference(const Eigen::MatrixXd& levels) {
  if (levels.rows() < 2) {
    throw std::invalid_argument("difference: need at least 2 rows");
  }
  return levels.bottomRows(levels.rows() - 1) -
         levels.topRows(levels.rows() - 1);
}

Dataset make_dataset(std::vector<std::string> timestamps,
                     Eigen::MatrixXd levels,
                     std::vector<std::string> series_names) {
  const auto T = levels.rows();
  const auto d = levels.cols();
  if (static_cast<Eigen::Index>(timestamps.size()) != T) {
    throw std::invalid_argument("make_dataset: timestamp count mismatch");
  }
  for (size_t i = 1; i < timestamps.size(); ++i) {
    if (!(timestamps[i - 1] < timestamps[i])) {
      throw std::invalid_argument(
          "make_dataset: timestamps must be strictly increasing (ISO dates)");
    }
  }
  if (static_cast<Eigen::Index>(series_names.size()) != d) {
    throw std::invalid_argument("make_dataset: series name count mismatch");
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    std::vector<double> col(levels.col(j).data(), levels.col(j).data() + T);
    col = locf_impute(col);
    for (Eigen::Index t = 0; t < T; ++t) levels(t, j) = col[t];
  }
  Dataset ds;
  ds.timestamps = std::move(timestamps);
  ds.levels = std::move(levels);
  ds.diffs = difference(ds.levels);
  ds.series_names = std::move(series_names);
  return ds;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_cell(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::invalid_argument("CSV: cannot parse numeric cell '" + s + "'");
  }
  return v;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Dataset read_csv_wide(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty CSV " + path);
  }
  auto header = split_csv_line(strip_cr(line));
  if (header.size() < 2 || header[0] != "date") {
    throw std::runtime_error(path + ": expected header 'date,<series>...'");
  }
  std::vector<std::string> names(header.begin() + 1, header.end());
  std::vector<std::string> dates;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error(path + ": ragged row '" + line + "'");
    }
    dates.push_back(cells[0]);
    std::vector<double> vals;
    for (size_t j = 1; j < cells.size(); ++j) vals.push_back(parse_cell(cells[j]));
    rows.push_back(std::move(vals));
  }
  Eigen::MatrixXd levels(rows.size(), names.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < names.size(); ++j) levels(i, j) = rows[i][j];
  }
  return make_dataset(std::move(dates), std::move(levels), std::move(names));
}

Dataset read_csv_per_series(const std::vector<std::string>& paths,
                            const std::vector<std::string>& names) {
  if (paths.empty() || paths.size() != names.size()) {
    throw std::invalid_argument("read_csv_per_series: paths/names mismatch");
  }
  // union calendar, then per-series imputation
  std::map<std::string, std::vector<double>> calendar;
  std::vector<std::map<std::string, double>> per_series(paths.size());
  for (size_t k = 0; k < paths.size(); ++k) {
    std::ifstream in(paths[k]);
    if (!in) throw std::runtime_error("cannot open " + paths[k]);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      line = strip_cr(line);
      if (line.empty()) continue;
      auto cells = split_csv_line(line);
      if (cells.size() != 2) {
        throw std::runtime_error(paths[k] + ": expected 'date,value' rows");
      }
      per_series[k][cells[0]] = parse_cell(cells[1]);
      calendar[cells[0]];
    }
  }
  std::vector<std::string> dates;
  for (const auto& [d, unused] : calendar) dates.push_back(d);
  Eigen::MatrixXd levels(dates.size(), paths.size());
  for (size_t i = 0; i < dates.size(); ++i) {
    for (size_t k = 0; k < paths.size(); ++k) {
      auto it = per_series[k].find(dates[i]);
      levels(i, k) = it == per_series[k].end()
                         ? std::numeric_limits<double>::quiet_NaN()
                         : it->second;
    }
  }
  return make_dataset(std::move(dates), std::move(levels),
                      std::vector<std::string>(names));
}

void write_csv_wide(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "date";
  for (const auto& n : ds.series_names) out << "," << n;
  out << "\n";
  out.precision(17);
  for (int t = 0; t < ds.T(); ++t) {
    out << ds.timestamps[t];
    for (int j = 0; j < ds.d(); ++j) out << "," << ds.levels(t, j);
    out << "\n";
  }
}

}  // namespace stcop
