#include "stcop/elliptical.hpp"

#include <cmath>
#include <stdexcept>

namespace stcop {

EllipticalCopula::EllipticalCopula(CopulaFamily family,
                                   const Eigen::MatrixXd& correlation,
                                   double nu)
    : family_(family), sigma_(correlation), nu_(nu) {
  if (family != CopulaFamily::gaussian && family != CopulaFamily::t) {
    throw std::invalid_argument(
        "EllipticalCopula: family must be gaussian or t");
  }
  for (int i = 0; i < sigma_.dim(); ++i) {
    if (std::fabs(correlation(i, i) - 1.0) > 1e-10) {
      throw std::invalid_argument(
          "EllipticalCopula: correlation matrix needs a unit diagonal");
    }
  }
  if (family == CopulaFamily::t && !(nu > 1.0)) {
    throw std::domain_error("EllipticalCopula: t copula needs nu > 1");
  }
}

namespace {

Eigen::VectorXd to_latent(const EllipticalCopula& c, const Eigen::VectorXd& u) {
  Eigen::VectorXd z(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double ui = clamp_unit(u(i));
    z(i) = c.family() == CopulaFamily::gaussian
               ? std_normal_quantile(ui)
               : student_t_quantile(ui, c.nu());
  }
  return z;
}

double from_latent(const EllipticalCopula& c, double z) {
  return c.family() == CopulaFamily::gaussian ? std_normal_cdf(z)
                                              : student_t_cdf(z, c.nu());
}

}  // namespace

double elliptical_log_density(const EllipticalCopula& c,
                              const Eigen::VectorXd& u) {
  const int d = c.dim();
  if (u.size() != d) {
    throw std::invalid_argument("elliptical_log_density: dimension mismatch");
  }
  Eigen::VectorXd z = to_latent(c, u);
  double quad = c.sigma().quad_form_inv(z);
  if (c.family() == CopulaFamily::gaussian) {
    return -0.5 * c.sigma().log_det() - 0.5 * (quad - z.squaredNorm());
  }
  const double nu = c.nu();
  double ll = std::lgamma(0.5 * (nu + d)) +
              (d - 1.0) * std::lgamma(0.5 * nu) -
              d * std::lgamma(0.5 * (nu + 1.0)) - 0.5 * c.sigma().log_det() -
              0.5 * (nu + d) * std::log1p(quad / nu);
  for (int i = 0; i < d; ++i) {
    ll += 0.5 * (nu + 1.0) * std::log1p(z(i) * z(i) / nu);
  }
  return ll;
}

double elliptical_density(const EllipticalCopula& c, const Eigen::VectorXd& u) {
  return std::exp(elliptical_log_density(c, u));
}

Eigen::MatrixXd sample_elliptical(const EllipticalCopula& c, int n,
                                  RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_elliptical: n must be >= 1");
  const int d = c.dim();
  const Eigen::MatrixXd& l = c.sigma().factor();
  Eigen::MatrixXd out(n, d);
  Eigen::VectorXd w(d);
  for (int s = 0; s < n; ++s) {
    for (int i = 0; i < d; ++i) w(i) = rng.normal();
    Eigen::VectorXd z = l * w;
    if (c.family() == CopulaFamily::t) {
      double g = rng.chi_square(c.nu());
      z *= std::sqrt(c.nu() / g);
    }
    for (int i = 0; i < d; ++i) out(s, i) = clamp_unit(from_latent(c, z(i)));
  }
  return out;
}

Eigen::MatrixXd conditional_sample_elliptical(const EllipticalCopula& c,
                                              const Eigen::VectorXd& cond,
                                              int n, RngStream& rng) {
  const int d = c.dim();
  const int k = static_cast<int>(cond.size());
  if (k < 1 || k >= d) {
    throw std::invalid_argument(
        "conditional_sample_elliptical: need 1 <= k < dim");
  }
  const int q = d - k;
  const Eigen::MatrixXd& sig = c.sigma().entries();
  Eigen::MatrixXd s11 = sig.topLeftCorner(q, q);
  Eigen::MatrixXd s12 = sig.topRightCorner(q, k);
  Eigen::MatrixXd s22 = sig.bottomRightCorner(k, k);

  Eigen::VectorXd z2(k);
  for (int i = 0; i < k; ++i) {
    double ui = clamp_unit(cond(i));
    z2(i) = c.family() == CopulaFamily::gaussian
                ? std_normal_quantile(ui)
                : student_t_quantile(ui, c.nu());
  }

  Eigen::MatrixXd l22;
  try {
    l22 = cholesky_factor(s22);
  } catch (const NotPositiveDefiniteError&) {
    throw std::runtime_error(
        "conditional_sample_elliptical: singular conditioning block");
  }
  auto solve22 = [&](const Eigen::MatrixXd& b) {
    Eigen::MatrixXd y = l22.triangularView<Eigen::Lower>().solve(b);
    return l22.transpose().triangularView<Eigen::Upper>().solve(y).eval();
  };
  Eigen::VectorXd a = solve22(z2);              // Sigma22^-1 z2
  Eigen::VectorXd mu = s12 * a;                 // conditional location
  Eigen::MatrixXd schur = s11 - s12 * solve22(s12.transpose());
  schur = 0.5 * (schur + schur.transpose());

  double scale = 1.0;
  double df = 0.0;
  if (c.family() == CopulaFamily::t) {
    df = c.nu() + k;
    scale = (c.nu() + z2.dot(a)) / df;
    schur *= scale;
  }
  Eigen::MatrixXd lc = cholesky_factor(schur);

  Eigen::MatrixXd out(n, q);
  Eigen::VectorXd w(q);
  for (int s = 0; s < n; ++s) {
    for (int i = 0; i < q; ++i) w(i) = rng.normal();
    Eigen::VectorXd z1 = lc * w;
    if (c.family() == CopulaFamily::t) {
      double g = rng.chi_square(df);
      z1 *= std::sqrt(df / g);
    }
    z1 += mu;
    // map back with the original nu so the margins match the full copula
    for (int i = 0; i < q; ++i) out(s, i) = clamp_unit(from_latent(c, z1(i)));
  }
  return out;
}

EllipticalCopula permute_elliptical(const EllipticalCopula& c,
                                    const std::vector<int>& perm) {
  const int d = c.dim();
  if (static_cast<int>(perm.size()) != d) {
    throw std::invalid_argument("permute_elliptical: bad permutation size");
  }
  Eigen::MatrixXd s(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      s(i, j) = c.sigma().entries()(perm[i], perm[j]);
    }
  }
  return EllipticalCopula(c.family(), s, c.nu());
}

EllipticalFit fit_elliptical(CopulaFamily family, const Eigen::MatrixXd& data) {
  const auto n = data.rows();
  const int d = static_cast<int>(data.cols());
  if (d < 2) throw std::invalid_argument("fit_elliptical: need dim >= 2");
  if (n < 20 * d) {
    throw std::invalid_argument("fit_elliptical: need at least 20*dim rows");
  }
  Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      double tau = kendall_tau(std::span(data.col(i).data(), n),
                               std::span(data.col(j).data(), n));
      rho(i, j) = rho(j, i) = std::sin(0.5 * M_PI * tau);
    }
  }
  Eigen::MatrixXd corr = make_correlation_spd(rho);

  auto loglik = [&](const EllipticalCopula& c) {
    double ll = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      ll += elliptical_log_density(c, data.row(r).transpose());
    }
    return ll;
  };

  if (family == CopulaFamily::gaussian) {
    EllipticalCopula c(CopulaFamily::gaussian, corr);
    return {c, loglik(c)};
  }
  if (family != CopulaFamily::t) {
    throw std::invalid_argument("fit_elliptical: family must be gaussian or t");
  }
  double best_ll = -std::numeric_limits<double>::infinity();
  double best_nu = kTNuGrid[0];
  for (double nu : kTNuGrid) {
    EllipticalCopula c(CopulaFamily::t, corr, nu);
    double ll = loglik(c);
    if (ll > best_ll) {
      best_ll = ll;
      best_nu = nu;
    }
  }
  return {EllipticalCopula(CopulaFamily::t, corr, best_nu), best_ll};
}

}  // namespace stcop
