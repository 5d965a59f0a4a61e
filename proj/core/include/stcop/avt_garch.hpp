#pragma once

#include <Eigen/Dense>

#include "stcop/rng.hpp"
#include "stcop/ts_model.hpp"

namespace stcop {

/// AR(1)-X mean equation with absolute-value threshold GARCH(1,1) volatility
/// and Student-t innovations:
///   y_t = mu + phi y_{t-1} + beta_x' X_t + eps_t,  eps_t = sigma_t z_t
///   sigma_t = omega + alpha (|eps_{t-1}| - gamma eps_{t-1}) + beta sigma_{t-1}
/// Stationarity of the volatility recursion: alpha (1+|gamma|) + beta < 1.
struct ArxAvtGarchModel {
  double mu = 0.0;
  double phi = 0.0;
  Eigen::VectorXd beta_x;
  double omega = 1e-4;
  double alpha = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double nu_innov = 8.0;
  double loglik = 0.0;
  bool converged = true;

  void validate() const;
};

struct GarchFilterResult {
  Eigen::VectorXd sigma;  // sigma_t, t = 1..T-1 (index 0 unused)
  Eigen::VectorXd eps;    // residuals, eps_0 from the unconditional mean
  double loglik;
};

// Filters the volatility recursion over (y, X); X rows align with y.
GarchFilterResult avtgarch_filter(const ArxAvtGarchModel& m,
                                  const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& X);

// Quasi-ML fit with multi-start Nelder-Mead over the stationarity region.
// Needs >= 250 observations. warm_start, when given, becomes the first start.
ArxAvtGarchModel fit_arx_avtgarch(const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& X,
                                  const ArxAvtGarchModel* warm_start = nullptr,
                                  int extra_starts = 4);

// One-step-ahead probabilistic forecast from the filtered state.
ProbForecast forecast_arx_avtgarch(const ArxAvtGarchModel& m, double y_prev,
                                   const Eigen::VectorXd& x_now,
                                   double sigma_prev, double eps_prev, int n,
                                   RngStream& rng);

// Conditional mean of the one-step-ahead distribution (the point forecast).
double arx_avtgarch_mean(const ArxAvtGarchModel& m, double y_prev,
                         const Eigen::VectorXd& x_now);

// Simulates T observations (exogenous terms set to zero when X is empty).
Eigen::VectorXd simulate_arx_avtgarch(const ArxAvtGarchModel& m, int T,
                                      RngStream& rng,
                                      const Eigen::MatrixXd& X =
                                          Eigen::MatrixXd());

}  // namespace stcop
