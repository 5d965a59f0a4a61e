#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stcop/backtest.hpp"
#include "stcop/mlp.hpp"
#include "stcop/synth.hpp"
#include "stcop/ts_model.hpp"

namespace stcop {

// D-vine model document: order, per-edge family and parameters, loglik.
std::string dvine_to_json(const DVineModel& model);
DVineModel dvine_from_json(const std::string& text);

// Full model document: the vine format extended with marginal sample vectors
// (and the elliptical parameterization for those variants).
std::string st_model_to_json(const SpatioTemporalModel& model);
SpatioTemporalModel st_model_from_json(const std::string& text);
void save_st_model(const std::string& path, const SpatioTemporalModel& model);
SpatioTemporalModel load_st_model(const std::string& path);

SynthSpec synth_spec_from_json(const std::string& text);
std::string synth_spec_to_json(const SynthSpec& spec);

BacktestConfig backtest_config_from_json(const std::string& text);
std::string backtest_config_to_json(const BacktestConfig& cfg);

// Flat numeric weight document with a layer-size header line.
void save_mlp(const std::string& path, const MlpQuantileSelector& m);
MlpQuantileSelector load_mlp(const std::string& path);

// Record log: one CSV row per (model, series, origin); numbers are written
// with shortest round-trip formatting so identical runs produce identical
// bytes.
void write_record_log(std::ostream& os,
                      const std::vector<ForecastRecord>& records);
std::vector<ForecastRecord> read_record_log(std::istream& is);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace stcop
