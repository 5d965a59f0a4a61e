#pragma once

#include <Eigen/Dense>

#include <vector>

#include "stcop/numerics.hpp"
#include "stcop/pair_copula.hpp"
#include "stcop/rng.hpp"

namespace stcop {

/// Gaussian or Student-t copula in arbitrary dimension, parameterized by a
/// correlation matrix (and nu for t). Immutable after construction.
class EllipticalCopula {
 public:
  EllipticalCopula(CopulaFamily family, const Eigen::MatrixXd& correlation,
                   double nu = 0.0);

  CopulaFamily family() const { return family_; }
  int dim() const { return sigma_.dim(); }
  double nu() const { return nu_; }
  const SpdMatrix& sigma() const { return sigma_; }

 private:
  CopulaFamily family_;
  SpdMatrix sigma_;
  double nu_;
};

double elliptical_log_density(const EllipticalCopula& c,
                              const Eigen::VectorXd& u);
double elliptical_density(const EllipticalCopula& c, const Eigen::VectorXd& u);

// n pseudo-observation vectors (rows).
Eigen::MatrixXd sample_elliptical(const EllipticalCopula& c, int n,
                                  RngStream& rng);

// Samples the leading dim-k block conditional on the trailing k coordinates
// held at cond. Callers permute the correlation matrix so their conditioning
// variables sit at the back.
Eigen::MatrixXd conditional_sample_elliptical(const EllipticalCopula& c,
                                              const Eigen::VectorXd& cond,
                                              int n, RngStream& rng);

// Same correlation with rows/columns rearranged: perm[i] is the old index of
// new coordinate i.
EllipticalCopula permute_elliptical(const EllipticalCopula& c,
                                    const std::vector<int>& perm);

struct EllipticalFit {
  EllipticalCopula copula;
  double loglik;
};

// Sigma from pairwise Kendall-tau inversion (repaired to SPD); for the t
// family nu then maximizes the profile likelihood over kTNuGrid.
EllipticalFit fit_elliptical(CopulaFamily family, const Eigen::MatrixXd& data);

}  // namespace stcop
