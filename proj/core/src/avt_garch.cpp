#include "stcop/avt_garch.hpp"

#include <cmath>
#include <stdexcept>

#include "stcop/numerics.hpp"

namespace stcop {

void ArxAvtGarchModel::validate() const {
  if (!(omega > 0.0)) {
    throw std::domain_error("ArxAvtGarchModel: omega must be > 0");
  }
  if (alpha < 0.0 || beta < 0.0) {
    throw std::domain_error("ArxAvtGarchModel: alpha, beta must be >= 0");
  }
  if (!(gamma > -1.0 && gamma < 1.0)) {
    throw std::domain_error("ArxAvtGarchModel: gamma must be in (-1,1)");
  }
  if (!(alpha * (1.0 + std::fabs(gamma)) + beta < 1.0)) {
    throw std::domain_error("ArxAvtGarchModel: volatility recursion unstable");
  }
  if (!(nu_innov > 2.0)) {
    throw std::domain_error("ArxAvtGarchModel: nu_innov must be > 2");
  }
}

namespace {

double residual(const ArxAvtGarchModel& m, const Eigen::VectorXd& y,
                const Eigen::MatrixXd& X, Eigen::Index t) {
  double mean = m.mu + m.phi * y(t - 1);
  if (X.size() > 0) mean += m.beta_x.dot(X.row(t));
  return y(t) - mean;
}

}  // namespace

GarchFilterResult avtgarch_filter(const ArxAvtGarchModel& m,
                                  const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& X) {
  const auto T = y.size();
  if (T < 3) throw std::invalid_argument("avtgarch_filter: series too short");
  if (X.size() > 0 && X.rows() != T) {
    throw std::invalid_argument("avtgarch_filter: X rows must align with y");
  }
  GarchFilterResult r;
  r.sigma.setZero(T);
  r.eps.setZero(T);
  double mean_abs = 0.0;
  for (Eigen::Index t = 1; t < T; ++t) {
    r.eps(t) = residual(m, y, X, t);
    mean_abs += std::fabs(r.eps(t));
  }
  mean_abs /= static_cast<double>(T - 1);
  r.eps(0) = 0.0;
  // volatility recursion starts at the sample mean absolute residual
  double sigma_prev = std::max(mean_abs, 1e-8);
  double eps_prev = 0.0;
  double ll = 0.0;
  for (Eigen::Index t = 1; t < T; ++t) {
    double s = m.omega +
               m.alpha * (std::fabs(eps_prev) - m.gamma * eps_prev) +
               m.beta * sigma_prev;
    if (t == 1) s = sigma_prev;
    if (!(s > 1e-8)) s = 1e-8;
    r.sigma(t) = s;
    double z = r.eps(t) / s;
    ll += std::log(student_t_pdf(z, m.nu_innov)) - std::log(s);
    sigma_prev = s;
    eps_prev = r.eps(t);
  }
  r.loglik = ll;
  return r;
}

namespace {

// unconstrained parameterization for the optimizer
struct Packed {
  int n_exog;
  Eigen::VectorXd to_vector(const ArxAvtGarchModel& m) const {
    Eigen::VectorXd v(6 + n_exog + 1);
    v(0) = m.mu;
    v(1) = std::atanh(std::clamp(m.phi, -0.995, 0.995));
    for (int j = 0; j < n_exog; ++j) v(2 + j) = m.beta_x(j);
    int o = 2 + n_exog;
    v(o + 0) = std::log(m.omega);
    v(o + 1) = std::log(std::max(m.alpha, 1e-8));
    v(o + 2) = std::atanh(std::clamp(m.gamma, -0.995, 0.995));
    v(o + 3) = std::log(std::max(m.beta, 1e-8));
    v(o + 4) = std::log(m.nu_innov - 2.0);
    return v;
  }
  ArxAvtGarchModel from_vector(const Eigen::VectorXd& v) const {
    ArxAvtGarchModel m;
    m.mu = v(0);
    m.phi = std::tanh(v(1));
    m.beta_x.resize(n_exog);
    for (int j = 0; j < n_exog; ++j) m.beta_x(j) = v(2 + j);
    int o = 2 + n_exog;
    m.omega = std::exp(std::clamp(v(o + 0), -30.0, 30.0));
    m.alpha = std::exp(std::clamp(v(o + 1), -30.0, 5.0));
    m.gamma = std::tanh(v(o + 2));
    m.beta = std::exp(std::clamp(v(o + 3), -30.0, 5.0));
    m.nu_innov = 2.0 + std::exp(std::clamp(v(o + 4), -6.0, 6.0));
    return m;
  }
};

}  // namespace

ArxAvtGarchModel fit_arx_avtgarch(const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& X,
                                  const ArxAvtGarchModel* warm_start,
                                  int extra_starts) {
  const auto T = y.size();
  if (T < 250) {
    throw std::invalid_argument("fit_arx_avtgarch: need >= 250 observations");
  }
  const int n_exog = X.size() > 0 ? static_cast<int>(X.cols()) : 0;
  if (X.size() > 0 && X.rows() != T) {
    throw std::invalid_argument("fit_arx_avtgarch: X rows must align with y");
  }
  Packed pk{n_exog};

  auto negll = [&](const Eigen::VectorXd& v) {
    ArxAvtGarchModel m = pk.from_vector(v);
    if (m.alpha * (1.0 + std::fabs(m.gamma)) + m.beta >= 0.999) {
      return 1e12;  // keep the search inside the stationarity region
    }
    double ll = avtgarch_filter(m, y, X).loglik;
    if (!std::isfinite(ll)) return 1e12;
    return -ll;
  };

  // moment-based start: OLS for the mean equation, residual scale for omega
  ArxAvtGarchModel start;
  {
    Eigen::MatrixXd Z(T - 1, 2 + n_exog);
    Eigen::VectorXd rhs(T - 1);
    for (Eigen::Index t = 1; t < T; ++t) {
      Z(t - 1, 0) = 1.0;
      Z(t - 1, 1) = y(t - 1);
      for (int j = 0; j < n_exog; ++j) Z(t - 1, 2 + j) = X(t, j);
      rhs(t - 1) = y(t);
    }
    Eigen::VectorXd coef = Z.colPivHouseholderQr().solve(rhs);
    start.mu = coef(0);
    start.phi = std::clamp(coef(1), -0.95, 0.95);
    start.beta_x = coef.tail(n_exog);
    double mad = (rhs - Z * coef).cwiseAbs().mean();
    start.omega = std::max(0.2 * mad, 1e-6);
    start.alpha = 0.10;
    start.gamma = 0.0;
    start.beta = 0.80;
    start.nu_innov = 8.0;
  }

  std::vector<Eigen::VectorXd> starts;
  if (warm_start != nullptr) starts.push_back(pk.to_vector(*warm_start));
  starts.push_back(pk.to_vector(start));
  RngStream rng(substream_seed(0x5ca1ab1eULL, "garch-starts"));
  for (int s = 0; s < extra_starts; ++s) {
    Eigen::VectorXd v = pk.to_vector(start);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v(i) += 0.4 * (rng.uniform() - 0.5);
    }
    starts.push_back(v);
  }

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_v;
  for (const auto& v0 : starts) {
    auto r = nelder_mead_minimize(negll, v0, 0.2, 800, 1e-10);
    if (r.fx < best) {
      best = r.fx;
      best_v = r.x;
    }
  }
  ArxAvtGarchModel fitted = pk.from_vector(best_v);
  fitted.loglik = -best;
  fitted.converged = true;
  double persist = fitted.alpha * (1.0 + std::fabs(fitted.gamma)) + fitted.beta;
  if (persist >= 1.0) {
    double scale = 0.995 / persist;
    fitted.alpha *= scale;
    fitted.beta *= scale;
    fitted.converged = false;
    fitted.loglik = -negll(pk.to_vector(fitted));
  }
  return fitted;
}

ProbForecast forecast_arx_avtgarch(const ArxAvtGarchModel& m, double y_prev,
                                   const Eigen::VectorXd& x_now,
                                   double sigma_prev, double eps_prev, int n,
                                   RngStream& rng) {
  double s = m.omega + m.alpha * (std::fabs(eps_prev) - m.gamma * eps_prev) +
             m.beta * sigma_prev;
  if (!(s > 0.0)) s = 1e-8;
  double mean = m.mu + m.phi * y_prev;
  if (x_now.size() > 0) mean += m.beta_x.dot(x_now);
  ProbForecast f;
  f.samples.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    f.samples(i, 0) = mean + s * rng.student_t(m.nu_innov);
  }
  return f;
}

double arx_avtgarch_mean(const ArxAvtGarchModel& m, double y_prev,
                         const Eigen::VectorXd& x_now) {
  double mean = m.mu + m.phi * y_prev;
  if (x_now.size() > 0) mean += m.beta_x.dot(x_now);
  return mean;
}

Eigen::VectorXd simulate_arx_avtgarch(const ArxAvtGarchModel& m, int T,
                                      RngStream& rng,
                                      const Eigen::MatrixXd& X) {
  m.validate();
  if (T < 2) throw std::invalid_argument("simulate_arx_avtgarch: T too small");
  Eigen::VectorXd y(T);
  double sigma_prev = m.omega / (1.0 - m.alpha * (1.0 + std::fabs(m.gamma)) -
                                 m.beta);
  double eps_prev = 0.0;
  y(0) = m.mu / (1.0 - m.phi);
  for (int t = 1; t < T; ++t) {
    double s = m.omega +
               m.alpha * (std::fabs(eps_prev) - m.gamma * eps_prev) +
               m.beta * sigma_prev;
    double eps = s * rng.student_t(m.nu_innov);
    double mean = m.mu + m.phi * y(t - 1);
    if (X.size() > 0) mean += m.beta_x.dot(X.row(t));
    y(t) = mean + eps;
    sigma_prev = s;
    eps_prev = eps;
  }
  return y;
}

}  // namespace stcop
