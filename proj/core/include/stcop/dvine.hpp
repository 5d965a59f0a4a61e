#pragma once

#include <Eigen/Dense>

#include <vector>

#include "stcop/pair_copula.hpp"
#include "stcop/rng.hpp"

namespace stcop {

/// D-vine copula over m variables. Slot s of the vine holds data column
/// order[s]; tree j (1-based) has m-j edges, edge (j, i) coupling slots
/// (i, i+j) given the slots strictly between them. pairs[j-1][i-1] stores the
/// fitted pair copula of edge (j, i).
struct DVineModel {
  std::vector<int> order;
  std::vector<std::vector<PairCopula>> pairs;
  double loglik = 0.0;

  int dim() const { return static_cast<int>(order.size()); }
  const PairCopula& edge(int tree, int pos) const {
    return pairs[tree - 1][pos - 1];
  }
};

// Sequential (tree-by-tree) estimation: per-edge family selection by AIC on
// the h-propagated pseudo-observations. data columns are indexed by order;
// needs >= 100 rows.
DVineModel fit_dvine(const Eigen::MatrixXd& data, const std::vector<int>& order,
                     const std::vector<CopulaFamily>& candidates =
                         kDefaultCandidates);

// Density at one point given in slot coordinates (u[s] belongs to slot s).
double dvine_log_density(const DVineModel& model, const Eigen::VectorXd& u);
double dvine_density(const DVineModel& model, const Eigen::VectorXd& u);

// n joint draws, columns in slot order (inverse-h cascade).
Eigen::MatrixXd sample_dvine(const DVineModel& model, int n, RngStream& rng);

// Draws of slots k..m-1 given slots 0..k-1 pinned at prefix. The pinned
// coordinates' h-propagated states are recomputed deterministically; the free
// coordinates come from the same inverse-h cascade as sample_dvine.
Eigen::MatrixXd conditional_sample_dvine(const DVineModel& model,
                                         const Eigen::VectorXd& prefix, int n,
                                         RngStream& rng);

}  // namespace stcop
