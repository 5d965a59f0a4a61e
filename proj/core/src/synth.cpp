#include "stcop/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "stcop/numerics.hpp"
#include "stcop/serialize.hpp"

namespace stcop {

namespace {

// days-from-civil / civil-from-days (Howard Hinnant's algorithms)
long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  long era = (y >= 0 ? y : y - 399) / 400;
  unsigned yoe = static_cast<unsigned>(y - era * 400);
  unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

void civil_from_days(long z, int& y, int& m, int& d) {
  z += 719468;
  long era = (z >= 0 ? z : z - 146096) / 146097;
  unsigned doe = static_cast<unsigned>(z - era * 146097);
  unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y += m <= 2;
}

}  // namespace

std::string iso_date_offset(const std::string& iso, int days) {
  int y, m, d;
  if (std::sscanf(iso.c_str(), "%d-%d-%d", &y, &m, &d) != 3) {
    throw std::invalid_argument("iso_date_offset: expected YYYY-MM-DD, got '" +
                                iso + "'");
  }
  long z = days_from_civil(y, m, d) + days;
  civil_from_days(z, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

namespace {

Eigen::MatrixXd chain_correlation(int d, double rho_cross, double rho_lag) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Constant(d, d, rho_cross);
  r.diagonal().setOnes();
  Eigen::MatrixXd sigma(2 * d, 2 * d);
  sigma.topLeftCorner(d, d) = r;
  sigma.bottomRightCorner(d, d) = r;
  sigma.topRightCorner(d, d) = rho_lag * r;
  sigma.bottomLeftCorner(d, d) = rho_lag * r;
  return sigma;
}

void apply_mode_bias(const SynthSpec& spec, const Eigen::VectorXd& u_prev,
                     Eigen::VectorXd& u_next, RngStream& rng) {
  if (spec.mode_bias == 0.5 || spec.mode_bias_series.empty()) return;
  for (int i : spec.mode_bias_series) {
    if (u_prev(i) <= spec.tail_threshold ||
        u_prev(i) >= 1.0 - spec.tail_threshold) {
      bool lower = rng.uniform() < spec.mode_bias;
      double u = u_next(i);
      u_next(i) = lower ? std::min(u, 1.0 - u) : std::max(u, 1.0 - u);
    }
  }
}

}  // namespace

Dataset synth_generate(const SynthSpec& spec) {
  if (spec.T < 3) throw std::invalid_argument("synth_generate: T too small");
  if (spec.d < 1) throw std::invalid_argument("synth_generate: d must be >= 1");
  const int d = spec.d;
  std::vector<double> sd = spec.marginal_sd;
  if (sd.empty()) sd.assign(d, 1.0);
  std::vector<double> p0 = spec.init_price;
  if (p0.empty()) p0.assign(d, 100.0);
  if (static_cast<int>(sd.size()) != d || static_cast<int>(p0.size()) != d) {
    throw std::invalid_argument("synth_generate: per-series parameter sizes");
  }
  std::vector<std::string> names = spec.series_names;
  if (names.empty()) {
    for (int i = 0; i < d; ++i) names.push_back("series" + std::to_string(i));
  }

  RngStream rng(substream_seed(spec.seed, "synth"));
  const int n_diffs = spec.T - 1;
  Eigen::MatrixXd diffs(n_diffs, d);

  if (spec.kind == "arx_garch") {
    for (int j = 0; j < d; ++j) {
      RngStream srng(substream_seed(spec.seed, "synth-garch", j));
      Eigen::VectorXd y = simulate_arx_avtgarch(spec.garch, n_diffs, srng);
      diffs.col(j) = y * sd[j];
    }
  } else if (spec.kind == "model") {
    SpatioTemporalModel model = load_st_model(spec.model_file);
    if (model.d != d) {
      throw std::invalid_argument(
          "synth_generate: model dimension does not match spec.d");
    }
    Eigen::VectorXd x_prev(d);
    for (int j = 0; j < d; ++j) x_prev(j) = model.marginals[j].quantile(0.5);
    const int burn = 200;
    for (int t = -burn; t < n_diffs; ++t) {
      ProbForecast f = forecast_distribution(model, x_prev, 1, rng);
      x_prev = f.samples.row(0).transpose();
      if (t >= 0) diffs.row(t) = x_prev.transpose();
    }
  } else {
    CopulaFamily fam;
    if (spec.kind == "stem_gaussian") {
      fam = CopulaFamily::gaussian;
    } else if (spec.kind == "stem_t" || spec.kind == "tem_t") {
      fam = CopulaFamily::t;
    } else {
      throw std::invalid_argument("synth_generate: unknown kind '" +
                                  spec.kind + "'");
    }
    if (spec.kind == "tem_t" && d != 1) {
      throw std::invalid_argument("synth_generate: tem_t needs d = 1");
    }
    Eigen::MatrixXd sigma = chain_correlation(d, spec.rho_cross, spec.rho_lag);
    EllipticalCopula cop(fam, make_correlation_spd(sigma),
                         fam == CopulaFamily::t ? spec.nu : 0.0);
    Eigen::VectorXd u_prev = Eigen::VectorXd::Constant(d, 0.5);
    const int burn = 200;
    for (int t = -burn; t < n_diffs; ++t) {
      Eigen::VectorXd u =
          conditional_sample_elliptical(cop, u_prev, 1, rng).row(0);
      apply_mode_bias(spec, u_prev, u, rng);
      if (t >= 0) {
        for (int j = 0; j < d; ++j) {
          diffs(t, j) = sd[j] * std_normal_quantile(clamp_unit(u(j)));
        }
      }
      u_prev = u;
    }
  }

  Eigen::MatrixXd levels(spec.T, d);
  for (int j = 0; j < d; ++j) {
    levels(0, j) = p0[j];
    for (int t = 0; t < n_diffs; ++t) {
      levels(t + 1, j) = levels(t, j) + diffs(t, j);
    }
  }
  std::vector<std::string> dates(spec.T);
  for (int t = 0; t < spec.T; ++t) {
    dates[t] = iso_date_offset(spec.start_date, t);
  }
  return make_dataset(std::move(dates), std::move(levels), std::move(names));
}

}  // namespace stcop
