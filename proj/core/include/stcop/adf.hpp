#pragma once

#include <span>

namespace stcop {

struct AdfResult {
  double statistic = 0.0;
  int lags = 0;
  double critical_value = 0.0;
  bool reject = false;  // unit root rejected at alpha = 0.01
};

// Augmented Dickey-Fuller test with constant, lag order by the Schwert rule
// floor(12 (T/100)^(1/4)), compared against the 1% asymptotic critical value
// -3.43. Needs length >= 50.
AdfResult adf_test(std::span<const double> series);

}  // namespace stcop
