#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "stcop/rng.hpp"

namespace stcop {

enum class CopulaFamily { independence, gaussian, t, clayton, gumbel };

std::string family_name(CopulaFamily f);
CopulaFamily family_from_name(const std::string& name);

/// One bivariate copula: a family tag plus its parameters.
///   gaussian: rho in (-1,1)
///   t:        rho in (-1,1), nu > 1
///   clayton:  theta > 0
///   gumbel:   theta >= 1
struct PairCopula {
  CopulaFamily family = CopulaFamily::independence;
  double rho = 0.0;
  double nu = 0.0;
  double theta = 0.0;

  static PairCopula independence() { return {}; }
  static PairCopula gaussian(double rho);
  static PairCopula student_t(double rho, double nu);
  static PairCopula clayton(double theta);
  static PairCopula gumbel(double theta);

  int n_params() const;
  void validate() const;  // throws std::domain_error on out-of-domain params
};

// Profile-likelihood grid for the t-copula degrees of freedom.
inline constexpr std::array<double, 10> kTNuGrid = {2,  3,  4,  5,  6,
                                                    8, 10, 15, 20, 30};

double pair_log_density(const PairCopula& c, double u, double v);
double pair_density(const PairCopula& c, double u, double v);

// Conditional CDF h(u|v) = dC(u,v)/dv. All supported families are
// exchangeable, so conditioning on the first argument is h(v|u) with the same
// formula.
double h_function(const PairCopula& c, double u, double v);

// Inverse of h in its first argument; closed form where the family has one.
double h_inverse(const PairCopula& c, double p, double v);

// Generic bracketed root-finder fallback, exposed so the closed forms can be
// cross-checked against it.
double h_inverse_numeric(const PairCopula& c, double p, double v);

// C(u,v) for independence/clayton/gumbel (closed forms); gaussian and t are
// integrated numerically from the h-function.
double pair_cdf(const PairCopula& c, double u, double v);

// n pairs drawn by the conditional-distribution method (v, then u = h^{-1}).
Eigen::MatrixX2d sample_pair(const PairCopula& c, int n, RngStream& rng);

double theoretical_kendall_tau(const PairCopula& c);

// Starting parameters from a Kendall's tau estimate:
// gaussian/t: rho = sin(pi tau / 2); clayton: theta = 2 tau/(1-tau);
// gumbel: theta = 1/(1-tau). Throws when tau is outside the family's range.
PairCopula kendall_tau_invert(CopulaFamily family, double tau);

// Sample Kendall's tau (tau-b), O(n log n) via Knight's algorithm.
double kendall_tau(std::span<const double> x, std::span<const double> y);

struct PairFitResult {
  PairCopula copula;
  double loglik = 0.0;
  bool converged = true;
};

// Maximum likelihood for one family on pseudo-observation pairs (n x 2,
// entries strictly inside (0,1), at least 30 rows). One-parameter families use
// Brent around the tau-inversion start; the t-copula profiles nu over
// kTNuGrid with rho refined per grid point.
PairFitResult fit_pair_mle(CopulaFamily family,
                           const Eigen::Ref<const Eigen::MatrixX2d>& data);

// Fits every candidate and returns the AIC minimizer. Clayton/gumbel are
// skipped when the sample tau is negative (no rotations).
PairFitResult select_pair_family(
    const Eigen::Ref<const Eigen::MatrixX2d>& data,
    const std::vector<CopulaFamily>& candidates);

inline const std::vector<CopulaFamily> kDefaultCandidates = {
    CopulaFamily::independence, CopulaFamily::gaussian, CopulaFamily::t,
    CopulaFamily::clayton, CopulaFamily::gumbel};

}  // namespace stcop
