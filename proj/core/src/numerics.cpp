#include "stcop/numerics.hpp"

#include <algorithm>
#include <limits>

namespace stcop {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kSqrt2Pi = 2.5066282746310005024157653;
constexpr double kInvSqrt2 = 0.7071067811865475244008444;

}  // namespace

double std_normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) {
    throw std::domain_error("std_normal_cdf: non-finite input");
  }
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("std_normal_quantile: p must be in (0,1)");
  }
  // Acklam's rational approximation, |rel err| < 1.15e-9.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step; exp(x^2/2) overflows past |x| ~ 38 where the rational
  // tail branch is already as accurate as the CDF itself.
  if (std::fabs(x) < 37.0) {
    double e = 0.5 * std::erfc(-x * kInvSqrt2) - p;
    double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return x;
}

namespace {

// Lentz continued fraction for the incomplete beta (Numerical Recipes form).
double beta_cf(double a, double b, double x) {
  const double fpmin = 1e-300;
  const double eps = 3e-15;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw std::domain_error("regularized_incomplete_beta: a, b must be > 0");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double lfront = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                  a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(lfront);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_pdf(double x, double nu) {
  if (!(nu > 0.0)) throw std::domain_error("student_t_pdf: nu must be > 0");
  double lg = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
              0.5 * std::log(nu * M_PI) -
              0.5 * (nu + 1.0) * std::log1p(x * x / nu);
  return std::exp(lg);
}

double student_t_cdf(double x, double nu) {
  if (!(nu > 0.0)) throw std::domain_error("student_t_cdf: nu must be > 0");
  if (std::isnan(x)) throw std::domain_error("student_t_cdf: NaN input");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  if (x == 0.0) return 0.5;
  // Large nu: normal limit with the first 1/nu correction, error O(nu^-2).
  if (nu > 2e4) {
    double z = x * (1.0 - 0.25 / nu) / std::sqrt(1.0 + 0.5 * x * x / nu);
    return std_normal_cdf(z);
  }
  double w = nu / (nu + x * x);
  double p = 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, w);
  return x > 0 ? 1.0 - p : p;
}

double student_t_quantile(double p, double nu) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("student_t_quantile: p must be in (0,1)");
  }
  if (!(nu > 0.0)) {
    throw std::domain_error("student_t_quantile: nu must be > 0");
  }
  if (p == 0.5) return 0.0;
  if (nu == 1.0) return std::tan(M_PI * (p - 0.5));
  if (nu == 2.0) {
    double s = 2.0 * p - 1.0;
    return s * std::sqrt(2.0 / (1.0 - s * s));
  }
  if (nu == 4.0) {
    double alpha = 4.0 * p * (1.0 - p);
    double sa = std::sqrt(alpha);
    double q = std::cos(std::acos(sa) / 3.0) / sa;
    double x = 2.0 * std::sqrt(q - 1.0);
    return p < 0.5 ? -x : x;
  }
  // Cornish-Fisher style start from the normal quantile.
  double z = std_normal_quantile(p);
  double z3 = z * z * z;
  double z5 = z3 * z * z;
  double x = z + (z3 + z) / (4.0 * nu) +
             (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * nu * nu);
  // Bracket the root, expanding outward if the start is off.
  double step = std::max(0.5, 0.25 * std::fabs(x));
  double lo = x - step;
  double hi = x + step;
  for (int k = 0; k < 200 && student_t_cdf(lo, nu) > p; ++k) {
    lo -= step;
    step *= 2.0;
  }
  step = std::max(0.5, 0.25 * std::fabs(x));
  for (int k = 0; k < 200 && student_t_cdf(hi, nu) < p; ++k) {
    hi += step;
    step *= 2.0;
  }
  x = std::clamp(x, lo, hi);
  // Safeguarded Newton on the CDF.
  for (int it = 0; it < 60; ++it) {
    double f = student_t_cdf(x, nu) - p;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double deriv = student_t_pdf(x, nu);
    double xn = (deriv > 0.0) ? x - f / deriv : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::fabs(xn - x) < 1e-13 * (1.0 + std::fabs(x))) return xn;
    x = xn;
  }
  return x;
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  if (n != m.cols()) {
    throw std::invalid_argument("cholesky_factor: matrix must be square");
  }
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw std::invalid_argument("cholesky_factor: matrix must be symmetric");
  }
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0)) {
      throw NotPositiveDefiniteError(
          static_cast<int>(j),
          "cholesky_factor: non-positive pivot at index " + std::to_string(j));
    }
    l(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Eigen::MatrixXd make_correlation_spd(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(1e-6);
  Eigen::MatrixXd repaired =
      es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
  Eigen::VectorXd d = repaired.diagonal().cwiseSqrt().cwiseInverse();
  repaired = d.asDiagonal() * repaired * d.asDiagonal();
  repaired.diagonal().setOnes();
  // keep exact symmetry after the scaling
  return 0.5 * (repaired + repaired.transpose());
}

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& entries)
    : m_(entries), l_(cholesky_factor(entries)) {}

double SpdMatrix::log_det() const {
  return 2.0 * l_.diagonal().array().log().sum();
}

Eigen::VectorXd SpdMatrix::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd y = l_.triangularView<Eigen::Lower>().solve(b);
  return l_.transpose().triangularView<Eigen::Upper>().solve(y);
}

double SpdMatrix::quad_form_inv(const Eigen::VectorXd& v) const {
  return l_.triangularView<Eigen::Lower>().solve(v).squaredNorm();
}

BrentResult brent_minimize(const std::function<double(double)>& f, double lo,
                           double hi, double xtol, int max_iter) {
  const double golden = 0.3819660112501051;
  double a = lo, b = hi;
  double x = a + golden * (b - a);
  double w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    double xm = 0.5 * (a + b);
    double tol1 = xtol * std::fabs(x) + 1e-12;
    double tol2 = 2.0 * tol1;
    if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool use_golden = true;
    if (std::fabs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double pp = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) pp = -pp;
      q = std::fabs(q);
      double etemp = e;
      e = d;
      if (std::fabs(pp) < std::fabs(0.5 * q * etemp) && pp > q * (a - x) &&
          pp < q * (b - x)) {
        d = pp / q;
        double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm >= x) ? tol1 : -tol1;
        use_golden = false;
      }
    }
    if (use_golden) {
      e = (x >= xm) ? a - x : b - x;
      d = golden * e;
    }
    double u = (std::fabs(d) >= tol1) ? x + d : x + ((d >= 0) ? tol1 : -tol1);
    double fu = f(u);
    if (fu <= fx) {
      if (u >= x) {
        a = x;
      } else {
        b = x;
      }
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x) {
        a = u;
      } else {
        b = u;
      }
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx};
}

NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, double step, int max_iter, double ftol) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 1; i <= n; ++i) pts[i](i - 1) += step;
  int evals = 0;
  for (int i = 0; i <= n; ++i) {
    fs[i] = f(pts[i]);
    ++evals;
  }
  auto order = [&] {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Eigen::VectorXd> np(n + 1);
    std::vector<double> nf(n + 1);
    for (int i = 0; i <= n; ++i) {
      np[i] = pts[idx[i]];
      nf[i] = fs[idx[i]];
    }
    pts.swap(np);
    fs.swap(nf);
  };
  order();
  for (int it = 0; it < max_iter; ++it) {
    if (std::fabs(fs[n] - fs[0]) <
        ftol * (std::fabs(fs[0]) + std::fabs(fs[n]) + 1e-12)) {
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= n;
    Eigen::VectorXd xr = centroid + (centroid - pts[n]);
    double fr = f(xr);
    ++evals;
    if (fr < fs[0]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[n]);
      double fe = f(xe);
      ++evals;
      if (fe < fr) {
        pts[n] = xe;
        fs[n] = fe;
      } else {
        pts[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      pts[n] = xr;
      fs[n] = fr;
    } else {
      Eigen::VectorXd xc = centroid + 0.5 * (pts[n] - centroid);
      double fc = f(xc);
      ++evals;
      if (fc < fs[n]) {
        pts[n] = xc;
        fs[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          fs[i] = f(pts[i]);
          ++evals;
        }
      }
    }
    order();
  }
  return {pts[0], fs[0], evals};
}

}  // namespace stcop
