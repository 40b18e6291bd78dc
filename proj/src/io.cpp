#include "atomcav/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace atomcav::io {

namespace {

const std::vector<std::string> kParamKeys = {
    "g0",  "gamma",   "kappa1", "kappa2", "delta",       "delta0",
    "omega_m", "eta", "kx0",    "eps",    "kT_over_wm"};

void require_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
  if (!j.is_object()) throw InvalidParams(std::string(where) + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key))
      throw InvalidParams(std::string(where) + ": unknown key \"" + key + "\"");
  }
}

double number_at(const json& j, const std::string& key, const char* where) {
  if (!j.contains(key))
    throw InvalidParams(std::string(where) + ": missing key \"" + key + "\"");
  if (!j.at(key).is_number())
    throw InvalidParams(std::string(where) + ": key \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json params_to_json(const model::PhysicalParams& p) {
  return json{{"g0", p.g0},         {"gamma", p.gamma},
              {"kappa1", p.kappa1}, {"kappa2", p.kappa2},
              {"delta", p.delta},   {"delta0", p.delta0},
              {"omega_m", p.omega_m}, {"eta", p.eta},
              {"kx0", p.kx0},       {"eps", p.eps},
              {"kT_over_wm", p.kT_over_wm}};
}

model::PhysicalParams params_from_json(const json& j) {
  require_keys(j, std::set<std::string>(kParamKeys.begin(), kParamKeys.end()), "params");
  model::PhysicalParams p;
  p.g0 = number_at(j, "g0", "params");
  p.gamma = number_at(j, "gamma", "params");
  p.kappa1 = number_at(j, "kappa1", "params");
  p.kappa2 = number_at(j, "kappa2", "params");
  p.delta = number_at(j, "delta", "params");
  p.delta0 = number_at(j, "delta0", "params");
  p.omega_m = number_at(j, "omega_m", "params");
  p.eta = number_at(j, "eta", "params");
  p.kx0 = number_at(j, "kx0", "params");
  p.eps = number_at(j, "eps", "params");
  p.kT_over_wm = number_at(j, "kT_over_wm", "params");
  model::validate(p);
  return p;
}

Eigen::VectorXd AxisSpec::materialize() const {
  if (list) {
    if (list->size() < 1) throw InvalidParams("axis: explicit values must be nonempty");
    return *list;
  }
  if (count < 2) throw InvalidParams("axis: count must be >= 2");
  if (!(min < max)) throw InvalidParams("axis: min must be < max");
  if (scale == "linear") return sweep::linspace(min, max, count);
  if (scale == "log") return sweep::logspace(min, max, count);
  throw InvalidParams("axis: scale must be linear or log");
}

lindblad::SimConfig RunConfig::sim_config(int default_nphonon) const {
  lindblad::SimConfig cfg;
  cfg.dims.n_cavity = n_cavity;
  cfg.dims.n_phonon = n_phonon > 0 ? n_phonon : default_nphonon;
  cfg.dt = dt;
  cfg.conv_tol = conv_tol;
  cfg.conv_window = conv_window;
  cfg.t_max = t_max;
  cfg.rel_tol = rel_tol;
  cfg.integrator = integrator == "rk4" ? lindblad::SimConfig::Integrator::fixed_rk4
                                       : lindblad::SimConfig::Integrator::adaptive_rk45;
  return cfg;
}

model::PhysicalParams RunConfig::resolved_params() const {
  if (detunings.mode == "given") return params;
  return model::with_critical_detunings(params, detunings.shift_xzp);
}

RunConfig config_from_json(const json& j) {
  require_keys(j,
               {"schema", "params", "sim", "detunings", "axes", "times", "engine",
                "workers", "output"},
               "config");
  if (j.contains("schema") && j.at("schema") != 1)
    throw InvalidParams("config: unsupported schema (expected 1)");
  if (!j.contains("params")) throw InvalidParams("config: missing \"params\"");
  RunConfig cfg;
  cfg.params = params_from_json(j.at("params"));

  if (j.contains("sim")) {
    const json& s = j.at("sim");
    require_keys(s,
                 {"n_phonon", "n_cavity", "dt", "conv_tol", "conv_window", "t_max",
                  "rel_tol", "integrator"},
                 "sim");
    if (s.contains("n_phonon")) cfg.n_phonon = s.at("n_phonon").get<int>();
    if (s.contains("n_cavity")) cfg.n_cavity = s.at("n_cavity").get<int>();
    if (s.contains("dt")) cfg.dt = number_at(s, "dt", "sim");
    if (s.contains("conv_tol")) cfg.conv_tol = number_at(s, "conv_tol", "sim");
    if (s.contains("conv_window")) cfg.conv_window = number_at(s, "conv_window", "sim");
    if (s.contains("t_max")) cfg.t_max = number_at(s, "t_max", "sim");
    if (s.contains("rel_tol")) cfg.rel_tol = number_at(s, "rel_tol", "sim");
    if (s.contains("integrator")) {
      cfg.integrator = s.at("integrator").get<std::string>();
      if (cfg.integrator != "rk4" && cfg.integrator != "rk45")
        throw InvalidParams("sim: integrator must be rk4 or rk45");
    }
    if (cfg.n_phonon < 0 || cfg.n_cavity < 1)
      throw InvalidParams("sim: invalid truncation");
  }

  if (j.contains("detunings")) {
    const json& d = j.at("detunings");
    require_keys(d, {"mode", "shift_xzp"}, "detunings");
    if (d.contains("mode")) cfg.detunings.mode = d.at("mode").get<std::string>();
    if (cfg.detunings.mode != "given" && cfg.detunings.mode != "critical")
      throw InvalidParams("detunings: mode must be given or critical");
    if (d.contains("shift_xzp"))
      cfg.detunings.shift_xzp = number_at(d, "shift_xzp", "detunings");
  }

  if (j.contains("axes")) {
    if (!j.at("axes").is_object()) throw InvalidParams("axes: expected an object");
    for (const auto& [name, spec] : j.at("axes").items()) {
      require_keys(spec, {"min", "max", "count", "scale", "values"}, "axis");
      AxisSpec axis;
      if (spec.contains("values")) {
        if (!spec.at("values").is_array())
          throw InvalidParams("axis: values must be an array");
        Eigen::VectorXd v(spec.at("values").size());
        int i = 0;
        for (const auto& x : spec.at("values")) v(i++) = x.get<double>();
        axis.list = v;
      } else {
        axis.min = number_at(spec, "min", "axis");
        axis.max = number_at(spec, "max", "axis");
        axis.count = int(number_at(spec, "count", "axis"));
        if (spec.contains("scale")) axis.scale = spec.at("scale").get<std::string>();
        axis.materialize();  // validate now
      }
      cfg.axes.emplace(name, std::move(axis));
    }
  }

  if (j.contains("times")) {
    if (j.at("times").is_string()) {
      cfg.times = parse_times(j.at("times").get<std::string>());
    } else if (j.at("times").is_array()) {
      Eigen::VectorXd t(j.at("times").size());
      int i = 0;
      for (const auto& x : j.at("times")) t(i++) = x.get<double>();
      cfg.times = t;
    } else {
      throw InvalidParams("times: expected \"start:stop:count\" or an array");
    }
  }

  if (j.contains("engine")) {
    cfg.engine = j.at("engine").get<std::string>();
    if (cfg.engine != "scatter" && cfg.engine != "lindblad" && cfg.engine != "both")
      throw InvalidParams("engine: must be scatter, lindblad or both");
  }
  if (j.contains("workers")) {
    cfg.workers = j.at("workers").get<int>();
    if (cfg.workers < 0) throw InvalidParams("workers: must be >= 0");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    require_keys(o, {"path", "format"}, "output");
    if (o.contains("path")) cfg.output.path = o.at("path").get<std::string>();
    if (o.contains("format")) cfg.output.format = o.at("format").get<std::string>();
    if (cfg.output.format != "csv" && cfg.output.format != "json")
      throw InvalidParams("output: format must be csv or json");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParams("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidParams("config: JSON parse error: " + std::string(e.what()));
  }
  return config_from_json(j);
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["schema"] = 1;
  j["params"] = params_to_json(cfg.params);
  j["sim"] = {{"n_phonon", cfg.n_phonon}, {"n_cavity", cfg.n_cavity},
              {"dt", cfg.dt},             {"conv_tol", cfg.conv_tol},
              {"conv_window", cfg.conv_window}, {"t_max", cfg.t_max},
              {"rel_tol", cfg.rel_tol},   {"integrator", cfg.integrator}};
  j["detunings"] = {{"mode", cfg.detunings.mode}, {"shift_xzp", cfg.detunings.shift_xzp}};
  if (!cfg.axes.empty()) {
    json axes = json::object();
    for (const auto& [name, spec] : cfg.axes) {
      json a;
      if (spec.list) {
        a["values"] = std::vector<double>(spec.list->data(), spec.list->data() + spec.list->size());
      } else {
        a = {{"min", spec.min}, {"max", spec.max}, {"count", spec.count}, {"scale", spec.scale}};
      }
      axes[name] = a;
    }
    j["axes"] = axes;
  }
  if (cfg.times)
    j["times"] = std::vector<double>(cfg.times->data(), cfg.times->data() + cfg.times->size());
  j["engine"] = cfg.engine;
  j["workers"] = cfg.workers;
  j["output"] = {{"path", cfg.output.path}, {"format", cfg.output.format}};
  return j;
}

Eigen::VectorXd parse_times(const std::string& spec) {
  double start = 0, stop = 0;
  int count = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &start, &stop, &count) != 3)
    throw InvalidParams("times: expected start:stop:count, got \"" + spec + "\"");
  if (count < 2 || !(stop > start))
    throw InvalidParams("times: need count >= 2 and stop > start");
  return Eigen::VectorXd::LinSpaced(count, start, stop);
}

json meta_json(const RunConfig& resolved_config, const json& overrides) {
  json meta;
  meta["schema"] = 1;
  meta["tool_version"] = kVersion;
  meta["engine"] = resolved_config.engine;
  meta["params"] = params_to_json(resolved_config.resolved_params());
  meta["truncations"] = {{"n_phonon", resolved_config.n_phonon},
                         {"n_cavity", resolved_config.n_cavity}};
  meta["config"] = config_to_json(resolved_config);
  if (!overrides.empty()) meta["overrides"] = overrides;
  return meta;
}

void write_csv(std::ostream& os, const sweep::SweepResult& result, const json& meta) {
  os << "# meta " << meta.dump() << "\n";
  const int npts = result.points();
  std::vector<int> sizes;
  for (const auto& a : result.axes) sizes.push_back(int(a.values.size()));

  bool first = true;
  for (const auto& a : result.axes) {
    os << (first ? "" : ",") << a.name;
    first = false;
  }
  for (const auto& [name, grid] : result.values) {
    (void)grid;
    os << (first ? "" : ",") << name;
    first = false;
  }
  os << ",status\n";

  for (int idx = 0; idx < npts; ++idx) {
    int rem = idx;
    std::vector<int> sub(sizes.size());
    for (int d = int(sizes.size()) - 1; d >= 0; --d) {
      sub[d] = rem % sizes[d];
      rem /= sizes[d];
    }
    first = true;
    for (size_t d = 0; d < sizes.size(); ++d) {
      os << (first ? "" : ",") << format_double(result.axes[d].values(sub[d]));
      first = false;
    }
    for (const auto& [name, grid] : result.values) {
      (void)name;
      os << (first ? "" : ",") << format_double(grid(idx));
      first = false;
    }
    os << "," << (idx < int(result.status.size()) ? result.status[idx] : "") << "\n";
  }
}

json result_to_json(const sweep::SweepResult& result, const json& meta) {
  json j;
  j["schema"] = 1;
  j["meta"] = meta;
  json axes = json::array();
  for (const auto& a : result.axes) {
    axes.push_back({{"name", a.name},
                    {"values", std::vector<double>(a.values.data(),
                                                   a.values.data() + a.values.size())}});
  }
  j["axes"] = axes;
  json values = json::object();
  for (const auto& [name, grid] : result.values)
    values[name] = std::vector<double>(grid.data(), grid.data() + grid.size());
  j["values"] = values;
  if (!result.extras.empty()) {
    json extras = json::object();
    for (const auto& [name, vec] : result.extras)
      extras[name] = std::vector<double>(vec.data(), vec.data() + vec.size());
    j["extras"] = extras;
  }
  j["status"] = result.status;
  return j;
}

void write_artifact(const std::string& path, const std::string& format,
                    const sweep::SweepResult& result, const json& meta) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open output path " + path);
  if (format == "json") {
    out << result_to_json(result, meta).dump(2) << "\n";
  } else {
    write_csv(out, result, meta);
  }
}

}  // namespace atomcav::io
