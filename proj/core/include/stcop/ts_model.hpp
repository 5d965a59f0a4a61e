#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "stcop/dvine.hpp"
#include "stcop/elliptical.hpp"
#include "stcop/marginal.hpp"
#include "stcop/rng.hpp"

namespace stcop {

enum class StVariant { tem_t, stem_gaussian, stem_t, stem_dvine };

std::string variant_name(StVariant v);
StVariant variant_from_name(const std::string& name);

/// Monte-Carlo probabilistic forecast for one origin: n sample vectors in data
/// units, one column per series.
struct ProbForecast {
  std::string origin_time;
  Eigen::MatrixXd samples;  // n x d

  int n() const { return static_cast<int>(samples.rows()); }
  int d() const { return static_cast<int>(samples.cols()); }
};

Eigen::VectorXd point_mean(const ProbForecast& f);

// Per series: gaussian KDE over the samples (Silverman bandwidth
// 1.06 sd n^(-1/5)) evaluated at each sample point, argmax sample returned.
Eigen::VectorXd point_mode(const ProbForecast& f);

// Per-series empirical quantile, linear interpolation between order
// statistics.
Eigen::VectorXd point_quantile(const ProbForecast& f, double level);

double empirical_quantile(std::vector<double> values, double level);

// Number of KDE local maxima on a 512-point grid over the sample range,
// ignoring peaks below 10% of the global maximum.
int kde_mode_count(std::span<const double> samples, int grid = 512,
                   double rel_threshold = 0.1);

/// One of the copula-based forecasting models: d nonparametric marginals
/// (shared between the lagged and unlagged blocks) plus a 2d-dimensional
/// copula over (X_t, X_{t-1}).
struct SpatioTemporalModel {
  StVariant variant = StVariant::stem_gaussian;
  int d = 0;
  std::vector<std::string> series_names;
  std::vector<EmpiricalMarginal> marginals;
  std::optional<EllipticalCopula> elliptical;
  std::optional<DVineModel> vine;
  double loglik = 0.0;

  bool fitted() const { return d > 0; }
};

// Fit order over the stacked 2d columns for a current-block path order
// s_0 - s_1 - ... - s_{d-1} (series indices): the path
// s_0 .. s_{d-1} - s_{d-1} lag .. s_0 lag is reversed so the lagged block is
// the vine prefix, which conditional sampling needs.
std::vector<int> vine_fit_order(const std::vector<int>& series_path);
std::vector<int> default_vine_fit_order(int d);

// Fits marginals on the full window, stacks (u_t, u_{t-1}) pseudo-observations
// and fits the variant's 2d-dimensional copula. tem_t requires d = 1.
// series_path, when nonempty, sets the D-vine current-block path order.
SpatioTemporalModel fit_st_model(const Eigen::MatrixXd& data, StVariant variant,
                                 const std::vector<std::string>& series_names,
                                 const std::vector<CopulaFamily>& candidates =
                                     kDefaultCandidates,
                                 const std::vector<int>& series_path = {});

// One-step-ahead conditional Monte-Carlo forecast: pit(x_prev) -> conditional
// copula draws of the unlagged block -> marginal quantile transform.
ProbForecast forecast_distribution(const SpatioTemporalModel& model,
                                   const Eigen::VectorXd& x_prev, int n,
                                   RngStream& rng,
                                   const std::string& origin_time = "");

}  // namespace stcop
