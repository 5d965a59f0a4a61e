#pragma once

#include <string>
#include <vector>

#include "stcop/avt_garch.hpp"
#include "stcop/dataset.hpp"

namespace stcop {

/// Generating model for synthetic panels. Copula kinds iterate the one-step
/// conditional sampler of a stationary Markov(1) chain on pseudo-observations
/// and map through gaussian-style marginals; "arx_garch" simulates independent
/// AVT-GARCH series; "model" iterates a fitted model loaded from model_file.
struct SynthSpec {
  std::string kind = "stem_t";  // stem_t|stem_gaussian|tem_t|arx_garch|model
  int T = 1000;                 // observations (levels)
  int d = 1;
  uint64_t seed = 1;
  double rho_cross = 0.3;  // within-time cross correlation
  double rho_lag = 0.4;    // correlation with the lagged block
  double nu = 4.0;         // t copula degrees of freedom
  std::vector<double> marginal_sd;  // per series, defaults to 1
  std::vector<double> init_price;   // defaults to 100
  std::string start_date = "2010-03-16";
  std::vector<std::string> series_names;

  // Asymmetric regime twist: when the previous pseudo-observation of a listed
  // series is in a tail, the next draw keeps the lower branch with probability
  // mode_bias (0.5 = symmetric, i.e. off).
  std::vector<int> mode_bias_series;
  double mode_bias = 0.5;
  double tail_threshold = 0.05;

  ArxAvtGarchModel garch;  // kind == "arx_garch"
  std::string model_file;  // kind == "model"
};

Dataset synth_generate(const SynthSpec& spec);

// ISO date helpers (plain day arithmetic, no timezones).
std::string iso_date_offset(const std::string& iso, int days);

}  // namespace stcop
