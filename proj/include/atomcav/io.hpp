// io.hpp - config ingestion and artifact serialization
//
// Configs are flat JSON with strictly known keys; PhysicalParams rejects
// unknown and missing fields by name. CSV artifacts carry the run meta as a
// single "# meta <json>" comment line followed by a mandatory header row;
// JSON artifacts embed the same meta object. Identical config + tool version
// produces byte-identical output.
#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "atomcav/common.hpp"
#include "atomcav/lindblad.hpp"
#include "atomcav/model.hpp"
#include "atomcav/sweep.hpp"

namespace atomcav::io {

using json = nlohmann::json;

json params_to_json(const model::PhysicalParams& p);
/// Strict: exactly the PhysicalParams field names, nothing else.
model::PhysicalParams params_from_json(const json& j);

struct AxisSpec {
  double min = 0, max = 0;
  int count = 0;
  std::string scale = "linear";        // linear | log
  std::optional<Eigen::VectorXd> list; // explicit values win over min/max/count
  Eigen::VectorXd materialize() const;
};

struct DetuningsSpec {
  std::string mode = "given";  // given | critical
  double shift_xzp = 0.0;      // derive as if the trap center sat at x0 + shift
};

struct OutputSpec {
  std::string path;
  std::string format = "csv";  // csv | json
};

struct RunConfig {
  model::PhysicalParams params;
  int n_phonon = 0;  // 0 = subcommand default
  int n_cavity = 3;
  double dt = 0.0;
  double conv_tol = 0.01;
  double conv_window = 0.0;
  double t_max = 0.0;
  double rel_tol = 1e-8;
  std::string integrator = "rk45";  // rk4 | rk45
  DetuningsSpec detunings;
  std::map<std::string, AxisSpec> axes;
  std::optional<Eigen::VectorXd> times;
  std::string engine = "scatter";  // scatter | lindblad | both
  int workers = 0;
  OutputSpec output;

  lindblad::SimConfig sim_config(int default_nphonon) const;
  /// Params with the detunings policy applied.
  model::PhysicalParams resolved_params() const;
};

RunConfig config_from_json(const json& j);
RunConfig load_config(const std::string& path);
json config_to_json(const RunConfig& cfg);

/// "start:stop:count" in us, inclusive endpoints.
Eigen::VectorXd parse_times(const std::string& spec);

json meta_json(const RunConfig& resolved_config, const json& overrides);

void write_csv(std::ostream& os, const sweep::SweepResult& result, const json& meta);
json result_to_json(const sweep::SweepResult& result, const json& meta);

/// Writes according to output.format, creating parent directories.
void write_artifact(const std::string& path, const std::string& format,
                    const sweep::SweepResult& result, const json& meta);

}  // namespace atomcav::io
