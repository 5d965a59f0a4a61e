#pragma once

#include <span>
#include <vector>

namespace stcop {

/// Nonparametric marginal distribution over a training sample. pit() maps data
/// to pseudo-observations in [1/(n+1), n/(n+1)] using midranks for ties and
/// linear interpolation between order statistics; quantile() is the
/// piecewise-linear inverse. Immutable after construction.
class EmpiricalMarginal {
 public:
  EmpiricalMarginal() = default;

  static EmpiricalMarginal fit(std::span<const double> sample);

  double pit(double x) const;
  double quantile(double u) const;

  int size() const { return n_; }
  const std::vector<double>& sorted_sample() const { return sorted_; }

  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

 private:
  int n_ = 0;
  std::vector<double> sorted_;
  // distinct values and their midranks (1-based positions in the sorted sample)
  std::vector<double> values_;
  std::vector<double> midranks_;
};

}  // namespace stcop
