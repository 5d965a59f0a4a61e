#include "stcop/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stcop {

EmpiricalMarginal EmpiricalMarginal::fit(std::span<const double> sample) {
  if (sample.size() < 2) {
    throw std::invalid_argument(
        "EmpiricalMarginal::fit: need at least 2 observations");
  }
  for (double x : sample) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(
          "EmpiricalMarginal::fit: non-finite observation");
    }
  }
  EmpiricalMarginal m;
  m.n_ = static_cast<int>(sample.size());
  m.sorted_.assign(sample.begin(), sample.end());
  std::sort(m.sorted_.begin(), m.sorted_.end());
  // collapse ties into (value, midrank) pairs
  for (int i = 0; i < m.n_;) {
    int j = i;
    while (j + 1 < m.n_ && m.sorted_[j + 1] == m.sorted_[i]) ++j;
    m.values_.push_back(m.sorted_[i]);
    m.midranks_.push_back(0.5 * ((i + 1) + (j + 1)));
    i = j + 1;
  }
  return m;
}

double EmpiricalMarginal::pit(double x) const {
  if (n_ == 0) throw std::logic_error("EmpiricalMarginal: not fitted");
  if (!std::isfinite(x)) {
    throw std::domain_error("EmpiricalMarginal::pit: non-finite input");
  }
  const double scale = 1.0 / (n_ + 1.0);
  if (x < values_.front()) return scale;
  if (x > values_.back()) return n_ * scale;
  auto it = std::lower_bound(values_.begin(), values_.end(), x);
  size_t j = static_cast<size_t>(it - values_.begin());
  if (values_[j] == x) return midranks_[j] * scale;
  // strictly between values_[j-1] and values_[j]
  double frac = (x - values_[j - 1]) / (values_[j] - values_[j - 1]);
  double r = midranks_[j - 1] + frac * (midranks_[j] - midranks_[j - 1]);
  return r * scale;
}

double EmpiricalMarginal::quantile(double u) const {
  if (n_ == 0) throw std::logic_error("EmpiricalMarginal: not fitted");
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("EmpiricalMarginal::quantile: u must be in (0,1)");
  }
  double t = u * (n_ + 1.0);
  if (t <= midranks_.front()) return values_.front();
  if (t >= midranks_.back()) return values_.back();
  auto it = std::lower_bound(midranks_.begin(), midranks_.end(), t);
  size_t j = static_cast<size_t>(it - midranks_.begin());
  if (midranks_[j] == t) return values_[j];
  double frac = (t - midranks_[j - 1]) / (midranks_[j] - midranks_[j - 1]);
  return values_[j - 1] + frac * (values_[j] - values_[j - 1]);
}

}  // namespace stcop
