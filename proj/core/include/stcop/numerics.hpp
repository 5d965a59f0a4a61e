#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace stcop {

/// Thrown by cholesky_factor when a leading minor is not positive definite.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  NotPositiveDefiniteError(int pivot, const std::string& what)
      : std::runtime_error(what), pivot_(pivot) {}
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

double std_normal_pdf(double x);
double std_normal_cdf(double x);

// Inverse standard normal CDF. Rational approximation (Acklam) polished by a
// Halley step on erfc, good to ~1e-15 over (0,1).
double std_normal_quantile(double p);

// Regularized incomplete beta I_x(a, b), evaluated by the Lentz continued
// fraction with the usual symmetry switch.
double regularized_incomplete_beta(double a, double b, double x);

double student_t_pdf(double x, double nu);
double student_t_cdf(double x, double nu);

// Inverse Student-t CDF. Closed forms for nu in {1, 2, 4}, otherwise a
// Cornish-Fisher style initial guess refined by safeguarded Newton on the CDF.
double student_t_quantile(double p, double nu);

/// Lower-triangular L with L*L^T = m. Throws NotPositiveDefiniteError naming
/// the failing pivot when m is not SPD, std::invalid_argument when m is not
/// square symmetric.
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& m);

// Repairs a symmetric matrix into a valid correlation matrix: eigenvalues
// clipped at 1e-6, then renormalized to unit diagonal.
Eigen::MatrixXd make_correlation_spd(const Eigen::MatrixXd& m);

/// Symmetric positive definite matrix with its Cholesky factor cached at
/// construction. Immutable once built.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Eigen::MatrixXd& entries);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& entries() const { return m_; }
  const Eigen::MatrixXd& factor() const { return l_; }

  double log_det() const;
  // Solves entries * x = b through the cached factor.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  // v^T * entries^{-1} * v.
  double quad_form_inv(const Eigen::VectorXd& v) const;

 private:
  Eigen::MatrixXd m_;
  Eigen::MatrixXd l_;
};

struct BrentResult {
  double x;
  double fx;
};

// Minimizes a unimodal f over [lo, hi] (Brent: golden section + parabolic
// interpolation).
BrentResult brent_minimize(const std::function<double(double)>& f, double lo,
                           double hi, double xtol = 1e-10, int max_iter = 200);

struct NelderMeadResult {
  Eigen::VectorXd x;
  double fx;
  int evals;
};

NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, double step, int max_iter = 2000,
    double ftol = 1e-10);

// Solves f(x) = target for strictly increasing f on [lo, hi] by bisection with
// secant acceleration. Throws std::runtime_error if max_iter is exhausted
// before the bracket shrinks below xtol.
template <class F>
double invert_monotone_increasing(F&& f, double target, double lo, double hi,
                                  double xtol = 1e-13, int max_iter = 200) {
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (flo > 0.0) return lo;
  if (fhi < 0.0) return hi;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    if (hi - lo < xtol) return 0.5 * (lo + hi);
    // secant proposal, fall back to bisection when outside or degenerate
    double denom = fhi - flo;
    double xs = (denom != 0.0) ? lo - flo * (hi - lo) / denom : x;
    double xm = 0.5 * (lo + hi);
    x = (xs > lo && xs < hi) ? 0.5 * (xs + xm) : xm;
    double fx = f(x) - target;
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  throw std::runtime_error("invert_monotone_increasing: no convergence after " +
                           std::to_string(max_iter) + " iterations");
}

inline double clamp_unit(double u) {
  const double eps = 1e-10;
  if (u < eps) return eps;
  if (u > 1.0 - eps) return 1.0 - eps;
  return u;
}

}  // namespace stcop
