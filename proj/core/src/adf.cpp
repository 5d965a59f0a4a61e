#include "stcop/adf.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace stcop {

AdfResult adf_test(std::span<const double> series) {
  const int T = static_cast<int>(series.size());
  if (T < 50) throw std::invalid_argument("adf_test: need length >= 50");
  const int p = static_cast<int>(
      std::floor(12.0 * std::pow(T / 100.0, 0.25)));
  // regression: dx_t = c + phi x_{t-1} + sum_i delta_i dx_{t-i} + e_t
  const int first = p + 1;  // first usable index for dx_t
  const int n = T - 1 - p;
  const int k = 2 + p;
  if (n <= k) throw std::invalid_argument("adf_test: series too short for lags");
  Eigen::MatrixXd Z(n, k);
  Eigen::VectorXd dy(n);
  auto dx = [&](int t) { return series[t] - series[t - 1]; };
  for (int r = 0; r < n; ++r) {
    int t = first + r;
    dy(r) = dx(t);
    Z(r, 0) = 1.0;
    Z(r, 1) = series[t - 1];
    for (int i = 1; i <= p; ++i) Z(r, 1 + i) = dx(t - i);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  if (qr.rank() < k) {
    throw std::runtime_error("adf_test: rank-deficient regression");
  }
  Eigen::VectorXd coef = qr.solve(dy);
  Eigen::VectorXd resid = dy - Z * coef;
  double s2 = resid.squaredNorm() / (n - k);
  Eigen::MatrixXd ztz_inv =
      (Z.transpose() * Z).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  double se = std::sqrt(s2 * ztz_inv(1, 1));
  AdfResult r;
  r.lags = p;
  r.statistic = coef(1) / se;
  r.critical_value = -3.43;  // 1% asymptotic, constant included
  r.reject = r.statistic < r.critical_value;
  return r;
}

}  // namespace stcop
