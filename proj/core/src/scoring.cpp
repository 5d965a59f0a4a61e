#include "stcop/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stcop {

double crps_sample(std::span<const double> samples, double y) {
  const size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("crps_sample: need >= 2 samples");
  if (!std::isfinite(y)) {
    throw std::domain_error("crps_sample: non-finite realization");
  }
  std::vector<double> x(samples.begin(), samples.end());
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw std::domain_error("crps_sample: non-finite sample");
    }
  }
  std::sort(x.begin(), x.end());
  double term1 = 0.0;
  double term2 = 0.0;
  for (size_t k = 0; k < n; ++k) {
    term1 += std::fabs(x[k] - y);
    // sum_{i<j}(x_j - x_i) = sum_k x_k (2k - n + 1) on the sorted sample
    term2 += x[k] * (2.0 * static_cast<double>(k) -
                     static_cast<double>(n) + 1.0);
  }
  double dn = static_cast<double>(n);
  return term1 / dn - term2 / (dn * dn);
}

double rmse(std::span<const double> preds, std::span<const double> actuals) {
  if (preds.size() != actuals.size() || preds.empty()) {
    throw std::invalid_argument("rmse: need equal nonempty series");
  }
  double s = 0.0;
  for (size_t i = 0; i < preds.size(); ++i) {
    double e = preds[i] - actuals[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(preds.size()));
}

namespace {

struct Accum {
  double sum = 0.0;
  int n = 0;
};

}  // namespace

ScoreReport aggregate_report(const std::vector<ForecastRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("aggregate_report: empty record stream");
  }
  std::map<std::pair<std::string, std::string>, Accum> crps_acc;
  std::map<std::tuple<std::string, std::string, std::string>, Accum> sq_acc;
  int crps_lo = records.front().origin_index, crps_hi = crps_lo;
  int rmse_lo = -1, rmse_hi = -1;
  for (const auto& r : records) {
    auto& a = crps_acc[{r.model, r.series}];
    a.sum += r.crps;
    a.n += 1;
    crps_lo = std::min(crps_lo, r.origin_index);
    crps_hi = std::max(crps_hi, r.origin_index);
    if (r.in_rmse_window) {
      if (rmse_lo < 0) rmse_lo = rmse_hi = r.origin_index;
      rmse_lo = std::min(rmse_lo, r.origin_index);
      rmse_hi = std::max(rmse_hi, r.origin_index);
      auto add = [&](const std::string& method, double pred) {
        auto& acc = sq_acc[{r.model, method, r.series}];
        double e = pred - r.realized;
        acc.sum += e * e;
        acc.n += 1;
      };
      add("mean", r.point_mean);
      if (r.has_mode) add("mode", r.point_mode);
      if (r.has_ann) add("ann", r.point_ann);
    }
  }
  ScoreReport rep;
  for (const auto& [key, acc] : crps_acc) {
    rep.crps.push_back({key.first, "crps", key.second, acc.sum / acc.n, acc.n});
  }
  for (const auto& [key, acc] : sq_acc) {
    rep.rmse.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                        std::sqrt(acc.sum / acc.n), acc.n});
  }
  rep.crps_window = "origins " + std::to_string(crps_lo) + ".." +
                    std::to_string(crps_hi);
  if (rmse_lo >= 0) {
    rep.rmse_window = "origins " + std::to_string(rmse_lo) + ".." +
                      std::to_string(rmse_hi);
  }
  return rep;
}

namespace {

std::vector<std::string> unique_series(const std::vector<ScoreCell>& cells) {
  std::vector<std::string> out;
  for (const auto& c : cells) {
    if (std::find(out.begin(), out.end(), c.series) == out.end()) {
      out.push_back(c.series);
    }
  }
  return out;
}

// paper-style column order: the D-vine first, then the benchmark, then the
// remaining models
int model_rank(const std::string& model) {
  if (model == "S-Tem D-Vine") return 0;
  if (model == "AVT-GARCH (simplified)") return 1;
  if (model == "Tem-t") return 2;
  if (model == "S-Tem-t") return 3;
  if (model == "S-Tem-gaussian") return 4;
  return 5;
}

int method_rank(const std::string& m) {
  if (m == "ann") return 0;
  if (m == "mean") return 1;
  if (m == "mode") return 2;
  return 3;
}

std::vector<std::pair<std::string, std::string>> column_keys(
    const std::vector<ScoreCell>& cells) {
  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto& c : cells) {
    std::pair<std::string, std::string> k{c.model, c.method};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      keys.push_back(k);
    }
  }
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    int ra = model_rank(a.first), rb = model_rank(b.first);
    if (ra != rb) return ra < rb;
    if (a.first != b.first) return a.first < b.first;
    int ma = method_rank(a.second), mb = method_rank(b.second);
    if (ma != mb) return ma < mb;
    return a.second < b.second;
  });
  return keys;
}

double lookup(const std::vector<ScoreCell>& cells, const std::string& model,
              const std::string& method, const std::string& series) {
  for (const auto& c : cells) {
    if (c.model == model && c.method == method && c.series == series) {
      return c.value;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void emit_table(std::ostream& os, const std::vector<ScoreCell>& cells,
                const std::string& title, bool csv, bool with_method) {
  if (cells.empty()) return;
  auto series = unique_series(cells);
  auto cols = column_keys(cells);
  const char sep = csv ? ',' : ' ';
  if (!csv) os << "# " << title << "\n";
  std::ostringstream header;
  header << (csv ? "series" : "series          ");
  for (const auto& [model, method] : cols) {
    std::string label = with_method && method != "crps"
                            ? model + " " + method
                            : model;
    if (csv) {
      header << sep << label;
    } else {
      header << sep << std::setw(26) << label;
    }
  }
  os << header.str() << "\n";
  for (const auto& s : series) {
    if (csv) {
      os << s;
    } else {
      os << std::left << std::setw(16) << s << std::right;
    }
    for (const auto& [model, method] : cols) {
      double v = lookup(cells, model, method, s);
      if (csv) {
        os << sep << std::setprecision(6) << v;
      } else {
        os << sep << std::setw(26) << std::fixed << std::setprecision(4) << v;
        os << std::defaultfloat;
      }
    }
    os << "\n";
  }
}

}  // namespace

void write_report_csv(std::ostream& os, const ScoreReport& report) {
  os << "table,crps," << report.crps_window << "\n";
  emit_table(os, report.crps, "", true, false);
  if (!report.rmse.empty()) {
    os << "table,rmse," << report.rmse_window << "\n";
    emit_table(os, report.rmse, "", true, true);
  }
  for (const auto& f : report.footnotes) os << "footnote," << f << "\n";
}

void write_report_text(std::ostream& os, const ScoreReport& report) {
  emit_table(os, report.crps,
             "Aggregated CRPS (" + report.crps_window + ")", false, false);
  if (!report.rmse.empty()) {
    os << "\n";
    emit_table(os, report.rmse,
               "Aggregated RMSE of point forecasts (" + report.rmse_window +
                   ")",
               false, true);
  }
  for (const auto& f : report.footnotes) os << "note: " << f << "\n";
}

}  // namespace stcop
