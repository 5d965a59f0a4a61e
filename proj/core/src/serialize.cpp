#include "stcop/serialize.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace stcop {

using nlohmann::json;

namespace {

json pair_to_json(const PairCopula& c) {
  json j;
  j["family"] = family_name(c.family);
  switch (c.family) {
    case CopulaFamily::gaussian:
      j["rho"] = c.rho;
      break;
    case CopulaFamily::t:
      j["rho"] = c.rho;
      j["nu"] = c.nu;
      break;
    case CopulaFamily::clayton:
    case CopulaFamily::gumbel:
      j["theta"] = c.theta;
      break;
    case CopulaFamily::independence:
      break;
  }
  return j;
}

PairCopula pair_from_json(const json& j) {
  PairCopula c;
  c.family = family_from_name(j.at("family").get<std::string>());
  c.rho = j.value("rho", 0.0);
  c.nu = j.value("nu", 0.0);
  c.theta = j.value("theta", 0.0);
  c.validate();
  return c;
}

json dvine_to_json_obj(const DVineModel& m) {
  json j;
  j["order"] = m.order;
  j["loglik"] = m.loglik;
  json trees = json::array();
  for (const auto& tree : m.pairs) {
    json edges = json::array();
    for (const auto& e : tree) edges.push_back(pair_to_json(e));
    trees.push_back(edges);
  }
  j["trees"] = trees;
  return j;
}

DVineModel dvine_from_json_obj(const json& j) {
  DVineModel m;
  m.order = j.at("order").get<std::vector<int>>();
  m.loglik = j.value("loglik", 0.0);
  for (const auto& tree : j.at("trees")) {
    std::vector<PairCopula> edges;
    for (const auto& e : tree) edges.push_back(pair_from_json(e));
    m.pairs.push_back(std::move(edges));
  }
  const int mm = m.dim();
  if (static_cast<int>(m.pairs.size()) != mm - 1) {
    throw std::runtime_error("dvine document: wrong tree count");
  }
  for (int t = 1; t <= mm - 1; ++t) {
    if (static_cast<int>(m.pairs[t - 1].size()) != mm - t) {
      throw std::runtime_error("dvine document: wrong edge count in tree " +
                               std::to_string(t));
    }
  }
  return m;
}

}  // namespace

std::string dvine_to_json(const DVineModel& model) {
  return dvine_to_json_obj(model).dump(2);
}

DVineModel dvine_from_json(const std::string& text) {
  return dvine_from_json_obj(json::parse(text));
}

std::string st_model_to_json(const SpatioTemporalModel& model) {
  json j;
  j["variant"] = variant_name(model.variant);
  j["d"] = model.d;
  j["series_names"] = model.series_names;
  j["loglik"] = model.loglik;
  json margs = json::array();
  for (const auto& m : model.marginals) margs.push_back(m.sorted_sample());
  j["marginals"] = margs;
  if (model.elliptical) {
    json e;
    e["family"] = family_name(model.elliptical->family());
    e["nu"] = model.elliptical->nu();
    const auto& s = model.elliptical->sigma().entries();
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      rows.emplace_back(s.row(i).data(), s.row(i).data() + s.cols());
    }
    e["sigma"] = rows;
    j["elliptical"] = e;
  }
  if (model.vine) j["vine"] = dvine_to_json_obj(*model.vine);
  return j.dump(2);
}

SpatioTemporalModel st_model_from_json(const std::string& text) {
  json j = json::parse(text);
  SpatioTemporalModel m;
  m.variant = variant_from_name(j.at("variant").get<std::string>());
  m.d = j.at("d").get<int>();
  m.series_names = j.value("series_names", std::vector<std::string>{});
  m.loglik = j.value("loglik", 0.0);
  for (const auto& arr : j.at("marginals")) {
    std::vector<double> sample = arr.get<std::vector<double>>();
    m.marginals.push_back(EmpiricalMarginal::fit(sample));
  }
  if (j.contains("elliptical")) {
    const auto& e = j["elliptical"];
    auto rows = e.at("sigma").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd s(rows.size(), rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      for (size_t k = 0; k < rows.size(); ++k) s(i, k) = rows[i][k];
    }
    m.elliptical = EllipticalCopula(
        family_from_name(e.at("family").get<std::string>()), s,
        e.value("nu", 0.0));
  }
  if (j.contains("vine")) m.vine = dvine_from_json_obj(j["vine"]);
  if (static_cast<int>(m.marginals.size()) != m.d) {
    throw std::runtime_error("model document: marginal count mismatch");
  }
  return m;
}

void save_st_model(const std::string& path, const SpatioTemporalModel& model) {
  write_text_file(path, st_model_to_json(model));
}

SpatioTemporalModel load_st_model(const std::string& path) {
  return st_model_from_json(read_text_file(path));
}

SynthSpec synth_spec_from_json(const std::string& text) {
  json j = json::parse(text);
  SynthSpec s;
  s.kind = j.value("kind", s.kind);
  s.T = j.value("T", s.T);
  s.d = j.value("d", s.d);
  s.seed = j.value("seed", s.seed);
  s.rho_cross = j.value("rho_cross", s.rho_cross);
  s.rho_lag = j.value("rho_lag", s.rho_lag);
  s.nu = j.value("nu", s.nu);
  s.marginal_sd = j.value("marginal_sd", s.marginal_sd);
  s.init_price = j.value("init_price", s.init_price);
  s.start_date = j.value("start_date", s.start_date);
  s.series_names = j.value("series_names", s.series_names);
  s.mode_bias_series = j.value("mode_bias_series", s.mode_bias_series);
  s.mode_bias = j.value("mode_bias", s.mode_bias);
  s.tail_threshold = j.value("tail_threshold", s.tail_threshold);
  s.model_file = j.value("model_file", s.model_file);
  if (j.contains("garch")) {
    const auto& g = j["garch"];
    s.garch.mu = g.value("mu", s.garch.mu);
    s.garch.phi = g.value("phi", s.garch.phi);
    s.garch.omega = g.value("omega", s.garch.omega);
    s.garch.alpha = g.value("alpha", s.garch.alpha);
    s.garch.gamma = g.value("gamma", s.garch.gamma);
    s.garch.beta = g.value("beta", s.garch.beta);
    s.garch.nu_innov = g.value("nu_innov", s.garch.nu_innov);
  }
  return s;
}

std::string synth_spec_to_json(const SynthSpec& s) {
  json j;
  j["kind"] = s.kind;
  j["T"] = s.T;
  j["d"] = s.d;
  j["seed"] = s.seed;
  j["rho_cross"] = s.rho_cross;
  j["rho_lag"] = s.rho_lag;
  j["nu"] = s.nu;
  if (!s.marginal_sd.empty()) j["marginal_sd"] = s.marginal_sd;
  if (!s.init_price.empty()) j["init_price"] = s.init_price;
  j["start_date"] = s.start_date;
  if (!s.series_names.empty()) j["series_names"] = s.series_names;
  if (!s.mode_bias_series.empty()) {
    j["mode_bias_series"] = s.mode_bias_series;
    j["mode_bias"] = s.mode_bias;
    j["tail_threshold"] = s.tail_threshold;
  }
  if (!s.model_file.empty()) j["model_file"] = s.model_file;
  if (s.kind == "arx_garch") {
    json g;
    g["mu"] = s.garch.mu;
    g["phi"] = s.garch.phi;
    g["omega"] = s.garch.omega;
    g["alpha"] = s.garch.alpha;
    g["gamma"] = s.garch.gamma;
    g["beta"] = s.garch.beta;
    g["nu_innov"] = s.garch.nu_innov;
    j["garch"] = g;
  }
  return j.dump(2);
}

BacktestConfig backtest_config_from_json(const std::string& text) {
  json j = json::parse(text);
  BacktestConfig c;
  c.initial_window = j.value("initial_window", c.initial_window);
  c.refit_every = j.value("refit_every", c.refit_every);
  c.mc_samples = j.value("mc_samples", c.mc_samples);
  c.ann_training_forecasts =
      j.value("ann_training_forecasts", c.ann_training_forecasts);
  c.models = j.value("models", c.models);
  c.seed = j.value("seed", c.seed);
  c.ann_window_lags = j.value("ann_window_lags", c.ann_window_lags);
  c.ann_level_lags = j.value("ann_level_lags", c.ann_level_lags);
  c.ann_hidden = j.value("ann_hidden", c.ann_hidden);
  c.ann_epochs = j.value("ann_epochs", c.ann_epochs);
  c.ann_refresh = j.value("ann_refresh", c.ann_refresh);
  c.ann_refresh_every = j.value("ann_refresh_every", c.ann_refresh_every);
  c.vine_series_path = j.value("vine_series_path", c.vine_series_path);
  c.lookahead_check = j.value("lookahead_check", c.lookahead_check);
  c.parallel_models = j.value("parallel_models", c.parallel_models);
  c.collect_samples = j.value("collect_samples", c.collect_samples);
  return c;
}

std::string backtest_config_to_json(const BacktestConfig& c) {
  json j;
  j["initial_window"] = c.initial_window;
  j["refit_every"] = c.refit_every;
  j["mc_samples"] = c.mc_samples;
  j["ann_training_forecasts"] = c.ann_training_forecasts;
  j["models"] = c.models;
  j["seed"] = c.seed;
  j["ann_window_lags"] = c.ann_window_lags;
  j["ann_level_lags"] = c.ann_level_lags;
  j["ann_hidden"] = c.ann_hidden;
  j["ann_epochs"] = c.ann_epochs;
  j["ann_refresh"] = c.ann_refresh;
  j["ann_refresh_every"] = c.ann_refresh_every;
  if (!c.vine_series_path.empty()) j["vine_series_path"] = c.vine_series_path;
  j["lookahead_check"] = c.lookahead_check;
  j["parallel_models"] = c.parallel_models;
  j["collect_samples"] = c.collect_samples;
  return j.dump(2);
}

void save_mlp(const std::string& path, const MlpQuantileSelector& m) {
  std::ostringstream os;
  os.precision(17);
  os << "mlp " << m.layer_sizes.size();
  for (int s : m.layer_sizes) os << " " << s;
  os << " " << m.window_lags << " " << m.level_lags << "\n";
  auto dump_vec = [&](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      os << v(i) << (i + 1 == v.size() ? "" : " ");
    }
    os << "\n";
  };
  dump_vec(m.feat_mean);
  dump_vec(m.feat_sd);
  for (size_t l = 0; l < m.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < m.weights[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < m.weights[l].cols(); ++j) {
        os << m.weights[l](i, j)
           << (j + 1 == m.weights[l].cols() ? "" : " ");
      }
      os << "\n";
    }
    dump_vec(m.biases[l]);
  }
  write_text_file(path, os.str());
}

MlpQuantileSelector load_mlp(const std::string& path) {
  std::istringstream is(read_text_file(path));
  std::string tag;
  size_t n_layers;
  is >> tag >> n_layers;
  if (tag != "mlp") throw std::runtime_error(path + ": not an mlp document");
  MlpQuantileSelector m;
  m.layer_sizes.resize(n_layers);
  for (auto& s : m.layer_sizes) is >> s;
  is >> m.window_lags >> m.level_lags;
  auto read_vec = [&](Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) is >> v(i);
    return v;
  };
  m.feat_mean = read_vec(m.layer_sizes[0]);
  m.feat_sd = read_vec(m.layer_sizes[0]);
  for (size_t l = 1; l < n_layers; ++l) {
    Eigen::MatrixXd w(m.layer_sizes[l], m.layer_sizes[l - 1]);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) is >> w(i, j);
    }
    m.weights.push_back(w);
    m.biases.push_back(read_vec(m.layer_sizes[l]));
  }
  if (!is) throw std::runtime_error(path + ": truncated mlp document");
  return m;
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, p);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc()) throw std::runtime_error("bad number: " + s);
  return v;
}

}  // namespace

void write_record_log(std::ostream& os,
                      const std::vector<ForecastRecord>& records) {
  os << "model,series,origin_index,origin_time,realized,crps,point_mean,"
        "point_mode,point_ann,ann_level,in_rmse_window\n";
  for (const auto& r : records) {
    os << r.model << ',' << r.series << ',' << r.origin_index << ','
       << r.origin_time << ',' << fmt_double(r.realized) << ','
       << fmt_double(r.crps) << ',' << fmt_double(r.point_mean) << ','
       << (r.has_mode ? fmt_double(r.point_mode) : std::string()) << ','
       << (r.has_ann ? fmt_double(r.point_ann) : std::string()) << ','
       << (r.has_ann ? fmt_double(r.ann_level) : std::string()) << ','
       << (r.in_rmse_window ? 1 : 0) << '\n';
  }
}

std::vector<ForecastRecord> read_record_log(std::istream& is) {
  std::vector<ForecastRecord> out;
  std::string line;
  if (!std::getline(is, line)) {
    throw std::runtime_error("record log: missing header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cur;
    while (std::getline(ss, cur, ',')) cells.push_back(cur);
    while (cells.size() < 11) cells.push_back("");
    ForecastRecord r;
    r.model = cells[0];
    r.series = cells[1];
    r.origin_index = static_cast<int>(parse_double(cells[2]));
    r.origin_time = cells[3];
    r.realized = parse_double(cells[4]);
    r.crps = parse_double(cells[5]);
    r.point_mean = parse_double(cells[6]);
    if (!cells[7].empty()) {
      r.has_mode = true;
      r.point_mode = parse_double(cells[7]);
    }
    if (!cells[8].empty()) {
      r.has_ann = true;
      r.point_ann = parse_double(cells[8]);
      r.ann_level = parse_double(cells[9]);
    }
    r.in_rmse_window = cells[10] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

}  // namespace stcop
