#include "stcop/pair_copula.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stcop/numerics.hpp"

namespace stcop {

std::string family_name(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::independence:
      return "independence";
    case CopulaFamily::gaussian:
      return "gaussian";
    case CopulaFamily::t:
      return "t";
    case CopulaFamily::clayton:
      return "clayton";
    case CopulaFamily::gumbel:
      return "gumbel";
  }
  return "unknown";
}

CopulaFamily family_from_name(const std::string& name) {
  if (name == "independence") return CopulaFamily::independence;
  if (name == "gaussian") return CopulaFamily::gaussian;
  if (name == "t") return CopulaFamily::t;
  if (name == "clayton") return CopulaFamily::clayton;
  if (name == "gumbel") return CopulaFamily::gumbel;
  throw std::invalid_argument("unknown copula family: " + name);
}

PairCopula PairCopula::gaussian(double rho) {
  PairCopula c{CopulaFamily::gaussian, rho, 0.0, 0.0};
  c.validate();
  return c;
}

PairCopula PairCopula::student_t(double rho, double nu) {
  PairCopula c{CopulaFamily::t, rho, nu, 0.0};
  c.validate();
  return c;
}

PairCopula PairCopula::clayton(double theta) {
  PairCopula c{CopulaFamily::clayton, 0.0, 0.0, theta};
  c.validate();
  return c;
}

PairCopula PairCopula::gumbel(double theta) {
  PairCopula c{CopulaFamily::gumbel, 0.0, 0.0, theta};
  c.validate();
  return c;
}

int PairCopula::n_params() const {
  switch (family) {
    case CopulaFamily::independence:
      return 0;
    case CopulaFamily::t:
      return 2;
    default:
      return 1;
  }
}

void PairCopula::validate() const {
  switch (family) {
    case CopulaFamily::independence:
      return;
    case CopulaFamily::gaussian:
      if (!(rho > -1.0 && rho < 1.0)) {
        throw std::domain_error("gaussian copula: rho must be in (-1,1)");
      }
      return;
    case CopulaFamily::t:
      if (!(rho > -1.0 && rho < 1.0)) {
        throw std::domain_error("t copula: rho must be in (-1,1)");
      }
      if (!(nu > 1.0)) {
        throw std::domain_error("t copula: nu must be > 1");
      }
      return;
    case CopulaFamily::clayton:
      if (!(theta > 0.0)) {
        throw std::domain_error("clayton copula: theta must be > 0");
      }
      return;
    case CopulaFamily::gumbel:
      if (!(theta >= 1.0)) {
        throw std::domain_error("gumbel copula: theta must be >= 1");
      }
      return;
  }
}

namespace {

// log(u^-theta + v^-theta - 1), evaluated in log space so large theta with
// boundary-clamped u does not overflow.
double clayton_log_s(double theta, double u, double v) {
  double a = -theta * std::log(u);
  double b = -theta * std::log(v);
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a) - std::exp(-a));
}

double gaussian_log_density(double rho, double x, double y) {
  double r2 = rho * rho;
  double omr2 = 1.0 - r2;
  return -0.5 * std::log(omr2) -
         (r2 * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * omr2);
}

double t_log_density(double rho, double nu, double x, double y) {
  double omr2 = 1.0 - rho * rho;
  double lg = std::lgamma(0.5 * (nu + 2.0)) + std::lgamma(0.5 * nu) -
              2.0 * std::lgamma(0.5 * (nu + 1.0));
  double q = (x * x + y * y - 2.0 * rho * x * y) / (nu * omr2);
  return lg - 0.5 * std::log(omr2) +
         0.5 * (nu + 1.0) * (std::log1p(x * x / nu) + std::log1p(y * y / nu)) -
         0.5 * (nu + 2.0) * std::log1p(q);
}

}  // namespace

double pair_log_density(const PairCopula& c, double u, double v) {
  c.validate();
  u = clamp_unit(u);
  v = clamp_unit(v);
  switch (c.family) {
    case CopulaFamily::independence:
      return 0.0;
    case CopulaFamily::gaussian:
      return gaussian_log_density(c.rho, std_normal_quantile(u),
                                  std_normal_quantile(v));
    case CopulaFamily::t:
      return t_log_density(c.rho, c.nu, student_t_quantile(u, c.nu),
                           student_t_quantile(v, c.nu));
    case CopulaFamily::clayton: {
      double th = c.theta;
      return std::log1p(th) - (1.0 + th) * (std::log(u) + std::log(v)) -
             (2.0 + 1.0 / th) * clayton_log_s(th, u, v);
    }
    case CopulaFamily::gumbel: {
      double th = c.theta;
      double lx = -std::log(u);
      double ly = -std::log(v);
      double s = std::pow(lx, th) + std::pow(ly, th);
      double s1t = std::pow(s, 1.0 / th);
      return -s1t + (th - 1.0) * (std::log(lx) + std::log(ly)) - std::log(u) -
             std::log(v) + (1.0 / th - 2.0) * std::log(s) +
             std::log(s1t + th - 1.0);
    }
  }
  return 0.0;
}

double pair_density(const PairCopula& c, double u, double v) {
  return std::exp(pair_log_density(c, u, v));
}

double h_function(const PairCopula& c, double u, double v) {
  c.validate();
  u = clamp_unit(u);
  v = clamp_unit(v);
  switch (c.family) {
    case CopulaFamily::independence:
      return u;
    case CopulaFamily::gaussian: {
      double x = std_normal_quantile(u);
      double y = std_normal_quantile(v);
      return std_normal_cdf((x - c.rho * y) / std::sqrt(1.0 - c.rho * c.rho));
    }
    case CopulaFamily::t: {
      double x = student_t_quantile(u, c.nu);
      double y = student_t_quantile(v, c.nu);
      double scale =
          std::sqrt((c.nu + y * y) * (1.0 - c.rho * c.rho) / (c.nu + 1.0));
      return student_t_cdf((x - c.rho * y) / scale, c.nu + 1.0);
    }
    case CopulaFamily::clayton: {
      double th = c.theta;
      double lh = -(th + 1.0) * std::log(v) -
                  (1.0 + 1.0 / th) * clayton_log_s(th, u, v);
      return std::min(std::exp(lh), 1.0);
    }
    case CopulaFamily::gumbel: {
      double th = c.theta;
      double lx = -std::log(u);
      double ly = -std::log(v);
      double s = std::pow(lx, th) + std::pow(ly, th);
      double lh = -std::pow(s, 1.0 / th) + (th - 1.0) * std::log(ly) +
                  (1.0 / th - 1.0) * std::log(s) - std::log(v);
      return std::min(std::exp(lh), 1.0);
    }
  }
  return u;
}

double h_inverse_numeric(const PairCopula& c, double p, double v) {
  c.validate();
  p = clamp_unit(p);
  v = clamp_unit(v);
  const double lo = 1e-10;
  const double hi = 1.0 - 1e-10;
  return invert_monotone_increasing(
      [&](double u) { return h_function(c, u, v); }, p, lo, hi, 1e-14, 300);
}

double h_inverse(const PairCopula& c, double p, double v) {
  c.validate();
  p = clamp_unit(p);
  v = clamp_unit(v);
  switch (c.family) {
    case CopulaFamily::independence:
      return p;
    case CopulaFamily::gaussian: {
      double y = std_normal_quantile(v);
      double x = std::sqrt(1.0 - c.rho * c.rho) * std_normal_quantile(p) +
                 c.rho * y;
      return clamp_unit(std_normal_cdf(x));
    }
    case CopulaFamily::t: {
      double y = student_t_quantile(v, c.nu);
      double scale =
          std::sqrt((c.nu + y * y) * (1.0 - c.rho * c.rho) / (c.nu + 1.0));
      double x = student_t_quantile(p, c.nu + 1.0) * scale + c.rho * y;
      return clamp_unit(student_t_cdf(x, c.nu));
    }
    case CopulaFamily::clayton: {
      double th = c.theta;
      // log of t := (p v^(th+1))^(-th/(th+1))
      double lt = -th / (th + 1.0) * std::log(p) - th * std::log(v);
      double lb = -th * std::log(v);
      // u^-th = t - v^-th + 1, assembled in log space (lt >= lb always)
      double lsu = lt + std::log1p(-std::exp(lb - lt) + std::exp(-lt));
      return clamp_unit(std::exp(-lsu / th));
    }
    case CopulaFamily::gumbel:
      return h_inverse_numeric(c, p, v);
  }
  return p;
}

namespace {

// adaptive Simpson on [a,b]
double simpson(const std::function<double(double)>& f, double a, double fa,
               double m, double fm, double b, double fb, double whole,
               double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, fa, m, fm, b, fb, whole, tol, 40);
}

}  // namespace

double pair_cdf(const PairCopula& c, double u, double v) {
  c.validate();
  u = clamp_unit(u);
  v = clamp_unit(v);
  switch (c.family) {
    case CopulaFamily::independence:
      return u * v;
    case CopulaFamily::clayton:
      return std::exp(-clayton_log_s(c.theta, u, v) / c.theta);
    case CopulaFamily::gumbel: {
      double s = std::pow(-std::log(u), c.theta) +
                 std::pow(-std::log(v), c.theta);
      return std::exp(-std::pow(s, 1.0 / c.theta));
    }
    default:
      // C(u,v) = int_0^v h(u|w) dw
      return integrate([&](double w) { return h_function(c, u, w); }, 1e-12,
                       v, 1e-11);
  }
}

Eigen::MatrixX2d sample_pair(const PairCopula& c, int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_pair: n must be >= 1");
  Eigen::MatrixX2d out(n, 2);
  for (int i = 0; i < n; ++i) {
    double v = rng.uniform();
    double p = rng.uniform();
    out(i, 0) = h_inverse(c, p, v);
    out(i, 1) = v;
  }
  return out;
}

double theoretical_kendall_tau(const PairCopula& c) {
  switch (c.family) {
    case CopulaFamily::independence:
      return 0.0;
    case CopulaFamily::gaussian:
    case CopulaFamily::t:
      return 2.0 / M_PI * std::asin(c.rho);
    case CopulaFamily::clayton:
      return c.theta / (c.theta + 2.0);
    case CopulaFamily::gumbel:
      return 1.0 - 1.0 / c.theta;
  }
  return 0.0;
}

PairCopula kendall_tau_invert(CopulaFamily family, double tau) {
  if (!(tau > -1.0 && tau < 1.0)) {
    throw std::domain_error("kendall_tau_invert: tau must be in (-1,1) for " +
                            family_name(family));
  }
  switch (family) {
    case CopulaFamily::independence:
      return PairCopula::independence();
    case CopulaFamily::gaussian:
      return PairCopula::gaussian(std::sin(0.5 * M_PI * tau));
    case CopulaFamily::t:
      return PairCopula::student_t(std::sin(0.5 * M_PI * tau), 4.0);
    case CopulaFamily::clayton:
      if (tau < 0.0) {
        throw std::domain_error("kendall_tau_invert: clayton needs tau >= 0");
      }
      return PairCopula::clayton(std::max(2.0 * tau / (1.0 - tau), 1e-8));
    case CopulaFamily::gumbel:
      if (tau < 0.0) {
        throw std::domain_error("kendall_tau_invert: gumbel needs tau >= 0");
      }
      return PairCopula::gumbel(std::max(1.0 / (1.0 - tau), 1.0));
  }
  return PairCopula::independence();
}

namespace {

// merge sort counting strict inversions
long long merge_count(std::vector<double>& a, std::vector<double>& buf,
                      size_t lo, size_t hi) {
  if (hi - lo < 2) return 0;
  size_t mid = lo + (hi - lo) / 2;
  long long cnt = merge_count(a, buf, lo, mid) + merge_count(a, buf, mid, hi);
  size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (a[j] < a[i]) {
      cnt += static_cast<long long>(mid - i);
      buf[k++] = a[j++];
    } else {
      buf[k++] = a[i++];
    }
  }
  while (i < mid) buf[k++] = a[i++];
  while (j < hi) buf[k++] = a[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, a.begin() + lo);
  return cnt;
}

long long tie_pairs(const std::vector<double>& sorted) {
  long long total = 0;
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    long long t = static_cast<long long>(j - i + 1);
    total += t * (t - 1) / 2;
    i = j + 1;
  }
  return total;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  if (y.size() != n || n < 2) {
    throw std::invalid_argument("kendall_tau: need two equal series, n >= 2");
  }
  // Knight's O(n log n) algorithm with tie corrections (tau-b).
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });
  long long n1 = 0, n3 = 0;
  {
    size_t i = 0;
    while (i < n) {
      size_t j = i;
      while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
      long long t = static_cast<long long>(j - i + 1);
      n1 += t * (t - 1) / 2;
      size_t a = i;
      while (a <= j) {
        size_t b = a;
        while (b + 1 <= j && y[idx[b + 1]] == y[idx[a]]) ++b;
        long long tt = static_cast<long long>(b - a + 1);
        n3 += tt * (tt - 1) / 2;
        a = b + 1;
      }
      i = j + 1;
    }
  }
  std::vector<double> ys(n);
  for (size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
  std::vector<double> buf(n);
  long long swaps = merge_count(ys, buf, 0, n);
  long long n2 = tie_pairs(ys);
  long long n0 = static_cast<long long>(n) * (n - 1) / 2;
  double pq = static_cast<double>(n0 - n1 - n2 + n3 - 2 * swaps);
  double denom = std::sqrt(static_cast<double>(n0 - n1)) *
                 std::sqrt(static_cast<double>(n0 - n2));
  return denom > 0.0 ? pq / denom : 0.0;
}

namespace {

void check_pseudo_obs(const Eigen::Ref<const Eigen::MatrixX2d>& data) {
  if (data.rows() < 30) {
    throw std::invalid_argument("fit_pair_mle: need at least 30 pairs");
  }
  if (!((data.array() > 0.0).all() && (data.array() < 1.0).all())) {
    throw std::invalid_argument(
        "fit_pair_mle: pseudo-observations must be strictly inside (0,1)");
  }
}

double sample_tau(const Eigen::Ref<const Eigen::MatrixX2d>& data) {
  return kendall_tau(std::span(data.col(0).data(), data.rows()),
                     std::span(data.col(1).data(), data.rows()));
}

}  // namespace

PairFitResult fit_pair_mle(CopulaFamily family,
                           const Eigen::Ref<const Eigen::MatrixX2d>& data) {
  check_pseudo_obs(data);
  const auto n = data.rows();
  if (family == CopulaFamily::independence) {
    return {PairCopula::independence(), 0.0, true};
  }
  double tau = sample_tau(data);

  if (family == CopulaFamily::gaussian || family == CopulaFamily::t) {
    double rho0 =
        std::clamp(std::sin(0.5 * M_PI * tau), -0.99, 0.99);
    if (family == CopulaFamily::gaussian) {
      Eigen::VectorXd x(n), y(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = std_normal_quantile(clamp_unit(data(i, 0)));
        y(i) = std_normal_quantile(clamp_unit(data(i, 1)));
      }
      auto negll = [&](double rho) {
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          ll += gaussian_log_density(rho, x(i), y(i));
        }
        return -ll;
      };
      double ll0 = -negll(rho0);
      auto r = brent_minimize(negll, -0.999, 0.999, 1e-10);
      if (-r.fx < ll0) {
        return {PairCopula::gaussian(rho0), ll0, false};
      }
      return {PairCopula::gaussian(r.x), -r.fx, true};
    }
    // t-copula: profile nu over the grid, refine rho per grid point
    double best_ll = -std::numeric_limits<double>::infinity();
    double best_rho = rho0, best_nu = kTNuGrid[0];
    double start_ll = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd x(n), y(n);
    for (double nu : kTNuGrid) {
      for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = student_t_quantile(clamp_unit(data(i, 0)), nu);
        y(i) = student_t_quantile(clamp_unit(data(i, 1)), nu);
      }
      auto negll = [&](double rho) {
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          ll += t_log_density(rho, nu, x(i), y(i));
        }
        return -ll;
      };
      start_ll = std::max(start_ll, -negll(rho0));
      auto r = brent_minimize(negll, -0.999, 0.999, 1e-10);
      if (-r.fx > best_ll) {
        best_ll = -r.fx;
        best_rho = r.x;
        best_nu = nu;
      }
    }
    if (best_ll < start_ll) {
      return {PairCopula::student_t(rho0, 4.0), start_ll, false};
    }
    return {PairCopula::student_t(best_rho, best_nu), best_ll, true};
  }

  // one-parameter archimedean families
  const bool is_clayton = family == CopulaFamily::clayton;
  double lo = is_clayton ? 1e-3 : 1.0;
  double hi = is_clayton ? 28.0 : 17.0;
  double theta0 = is_clayton
                      ? std::clamp(2.0 * std::max(tau, 0.005) /
                                       (1.0 - std::max(tau, 0.005)),
                                   lo, hi)
                      : std::clamp(1.0 / (1.0 - std::max(tau, 0.0)), lo, hi);
  auto make = [&](double th) {
    return is_clayton ? PairCopula::clayton(th) : PairCopula::gumbel(th);
  };
  auto negll = [&](double th) {
    PairCopula c = make(th);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      ll += pair_log_density(c, data(i, 0), data(i, 1));
    }
    return -ll;
  };
  double ll0 = -negll(theta0);
  auto r = brent_minimize(negll, lo, hi, 1e-9);
  if (-r.fx < ll0) {
    return {make(theta0), ll0, false};
  }
  return {make(r.x), -r.fx, true};
}

PairFitResult select_pair_family(
    const Eigen::Ref<const Eigen::MatrixX2d>& data,
    const std::vector<CopulaFamily>& candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("select_pair_family: empty candidate set");
  }
  check_pseudo_obs(data);
  double tau = sample_tau(data);
  bool any = false;
  PairFitResult best;
  double best_aic = std::numeric_limits<double>::infinity();
  for (CopulaFamily f : candidates) {
    // no rotated variants: archimedean candidates cannot express negative
    // dependence and are skipped for it
    if (tau < 0.0 &&
        (f == CopulaFamily::clayton || f == CopulaFamily::gumbel)) {
      continue;
    }
    try {
      PairFitResult r = fit_pair_mle(f, data);
      double aic = 2.0 * r.copula.n_params() - 2.0 * r.loglik;
      if (aic < best_aic) {
        best_aic = aic;
        best = r;
        any = true;
      }
    } catch (const std::exception&) {
      // candidate failed to fit, try the rest
    }
  }
  if (!any) {
    throw std::runtime_error("select_pair_family: all candidate fits failed");
  }
  return best;
}

}  // namespace stcop
