// atomcav - single-atom cavity optomechanics toolkit
//
// Subcommands reproduce the standard observables of the scattering-matrix
// and master-equation engines and persist them with full run metadata.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "atomcav/io.hpp"
#include "atomcav/lindblad.hpp"
#include "atomcav/qops.hpp"
#include "atomcav/scatter.hpp"
#include "atomcav/sweep.hpp"

using namespace atomcav;
using io::json;
using io::RunConfig;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::string format;
  std::string engine;
  std::string times;
  int workers = -1;
  int nphonon = -1;
  int ncavity = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_times = false) {
  cmd->add_option("--config", flags.config_path, "run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out, "output path (overrides config)");
  cmd->add_option("--format", flags.format, "csv|json (overrides config)");
  cmd->add_option("--workers", flags.workers, "worker threads (0 = all)");
  cmd->add_option("--nphonon", flags.nphonon, "phonon truncation override");
  cmd->add_option("--ncavity", flags.ncavity, "photon-level override");
  cmd->add_option("--engine", flags.engine, "scatter|lindblad|both (overrides config)");
  if (with_times) cmd->add_option("--times", flags.times, "start:stop:count in us");
}

// Applies flag overrides onto the config and records them for the meta block.
json apply_overrides(RunConfig& cfg, const CommonFlags& flags) {
  json overrides = json::object();
  if (!flags.out.empty()) {
    cfg.output.path = flags.out;
    overrides["out"] = flags.out;
  }
  if (!flags.format.empty()) {
    cfg.output.format = flags.format;
    overrides["format"] = flags.format;
  }
  if (flags.workers >= 0) {
    cfg.workers = flags.workers;
    overrides["workers"] = flags.workers;
  }
  if (flags.nphonon >= 0) {
    cfg.n_phonon = flags.nphonon;
    overrides["nphonon"] = flags.nphonon;
  }
  if (flags.ncavity >= 0) {
    cfg.n_cavity = flags.ncavity;
    overrides["ncavity"] = flags.ncavity;
  }
  if (!flags.engine.empty()) {
    cfg.engine = flags.engine;
    overrides["engine"] = flags.engine;
  }
  if (!flags.times.empty()) {
    cfg.times = io::parse_times(flags.times);
    overrides["times"] = flags.times;
  }
  return overrides;
}

void emit(const RunConfig& cfg, const sweep::SweepResult& result, json meta) {
  if (cfg.output.path.empty()) {
    io::write_csv(std::cout, result, meta);
  } else {
    io::write_artifact(cfg.output.path, cfg.output.format, result, meta);
  }
  int failed = 0;
  for (size_t i = 0; i < result.status.size(); ++i) {
    if (!result.status[i].empty()) {
      ++failed;
      std::cerr << "point " << i << ": " << result.status[i] << "\n";
    }
  }
  if (failed > 0) {
    std::cerr << failed << " of " << result.status.size()
              << " grid points failed; partial results preserved\n";
    std::exit(2);
  }
}

sweep::Options sweep_options(const RunConfig& cfg) {
  sweep::Options opts;
  opts.workers = cfg.workers;
  opts.n_phonon = cfg.n_phonon;
  opts.n_cavity = cfg.n_cavity;
  opts.engine = cfg.engine;
  return opts;
}

Eigen::VectorXd axis_or(const RunConfig& cfg, const std::string& name,
                        const Eigen::VectorXd& fallback) {
  auto it = cfg.axes.find(name);
  if (it == cfg.axes.end()) return fallback;
  return it->second.materialize();
}

void print_warnings(const WarningList& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int run_derive(const RunConfig& cfg, const json& overrides) {
  const model::PhysicalParams p = cfg.resolved_params();
  const model::Derived d = model::derive(p);
  json out;
  out["meta"] = io::meta_json(cfg, overrides);
  out["derived"] = {{"kappa", d.kappa},           {"coop", d.coop},
                    {"coop_in", d.coop_in},       {"gx0", d.gx0},
                    {"omega_r", d.omega_r},       {"beta_max", d.beta_max},
                    {"n_bar", d.n_bar},           {"xT_over_xzp", d.xT_over_xzp},
                    {"eta_eff", d.eta_eff}};
  if (p.kappa1 > p.kappa2) {
    const model::OptimalDetunings od = model::optimal_detunings(p);
    out["critical"] = {{"delta_star", od.delta_star}, {"delta0_star", od.delta0_star}};
  }
  print_warnings(d.warnings);
  if (cfg.output.path.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::ofstream f(cfg.output.path);
    f << out.dump(2) << "\n";
  }
  return 0;
}

int run_amps(const RunConfig& cfg, const json& overrides) {
  const model::PhysicalParams p = cfg.resolved_params();
  const Eigen::VectorXd xs = axis_or(cfg, "x", sweep::linspace(-8.0, 8.0, 321));
  const int n = int(xs.size());
  sweep::SweepResult res;
  res.axes = {{"x_over_xzp", xs}};
  res.base_params = p;
  res.engine = "scatter";
  res.status.assign(n, "");
  Eigen::VectorXd re_r(n), im_r(n), re_t(n), im_t(n), re_a(n), im_a(n), refl(n);
  for (int i = 0; i < n; ++i) {
    const scatter::ChannelAmplitudes a = scatter::amplitudes_at(p, xs(i));
    re_r(i) = a.s_r.real();
    im_r(i) = a.s_r.imag();
    re_t(i) = a.s_t.real();
    im_t(i) = a.s_t.imag();
    re_a(i) = a.s_a.real();
    im_a(i) = a.s_a.imag();
    refl(i) = std::norm(a.s_r);
  }
  res.values = {{"re_s_r", re_r}, {"im_s_r", im_r}, {"re_s_t", re_t}, {"im_s_t", im_t},
                {"re_s_a", re_a}, {"im_s_a", im_a}, {"R", refl}};
  emit(cfg, res, io::meta_json(cfg, overrides));
  return 0;
}

int run_heating_map(const RunConfig& cfg, const json& overrides) {
  const model::PhysicalParams p = cfg.resolved_params();
  const model::OptimalDetunings od = model::optimal_detunings(p);
  const Eigen::VectorXd delta_axis =
      axis_or(cfg, "delta", sweep::logspace(od.delta_star / 10, od.delta_star * 10, 50));
  const Eigen::VectorXd delta0_axis =
      axis_or(cfg, "delta0", sweep::logspace(od.delta0_star / 10, od.delta0_star * 10, 50));
  sweep::SweepResult res = sweep::heating_map(p, delta_axis, delta0_axis, sweep_options(cfg));
  emit(cfg, res, io::meta_json(cfg, overrides));
  return 0;
}

int run_heating_scaling(const RunConfig& cfg, const json& overrides) {
  const model::PhysicalParams p = cfg.resolved_params();
  int n_points = 25;
  auto it = cfg.axes.find("coop_in");
  if (it != cfg.axes.end() && it->second.count >= 2) n_points = it->second.count;
  sweep::SweepResult res = sweep::heating_scaling(p, n_points, sweep_options(cfg));
  // attach the scaling fit when both windows are populated
  try {
    const sweep::ScalingFit fit =
        sweep::scaling_fit(res.axes[0].values, res.grid("J_over_eta2"), p.eta);
    Eigen::VectorXd f(3);
    f << fit.slope_weak, fit.slope_strong, fit.crossover_coop_in;
    res.extras.emplace_back("scaling_fit", f);
  } catch (const FitError& e) {
    std::cerr << "warning: " << e.what() << "\n";
  }
  emit(cfg, res, io::meta_json(cfg, overrides));
  return 0;
}

int run_g2_trace(const RunConfig& cfg, const json& overrides) {
  const model::PhysicalParams p = cfg.resolved_params();
  if (!cfg.times) throw InvalidParams("g2-trace: times required (config or --times)");
  const Eigen::VectorXd times = *cfg.times;
  const int n = cfg.n_phonon > 0 ? cfg.n_phonon : (p.kT_over_wm > 0 ? 150 : 50);

  sweep::SweepResult res;
  res.axes = {{"t", times}};
  res.base_params = p;
  res.n_phonon = n;
  res.engine = cfg.engine;
  res.status.assign(times.size(), "");
  json meta = io::meta_json(cfg, overrides);

  WarningList warnings;
  if (cfg.engine == "scatter" || cfg.engine == "both") {
    const qops::MotionalState state = p.kT_over_wm > 0
                                          ? qops::thermal_density(n, p.kT_over_wm, &warnings)
                                          : qops::MotionalState::ground(n);
    res.values.emplace_back("g2", scatter::g2_trajectory(p, state, times, n, &warnings));
  }
  if (cfg.engine == "lindblad" || cfg.engine == "both") {
    lindblad::ConvergenceReport report;
    res.values.emplace_back("g2_me",
                            lindblad::me_g2(p, cfg.sim_config(50), times, &report));
    meta["convergence_reports"] = json::array({{{"converged", report.converged},
                                                {"t_final", report.t_final},
                                                {"dt", report.dt},
                                                {"variation", report.variation},
                                                {"integrator", report.integrator}}});
  }
  print_warnings(warnings);
  emit(cfg, res, meta);
  return 0;
}

int run_g2_map(const RunConfig& cfg, const json& overrides) {
  const model::PhysicalParams p = cfg.resolved_params();
  const Eigen::VectorXd eta_axis = axis_or(cfg, "eta", sweep::logspace(0.01, 0.3, 40));
  const Eigen::VectorXd ratio_axis =
      axis_or(cfg, "kappa_ratio", sweep::logspace(0.1, 10.0, 40));
  sweep::SweepResult res = sweep::g2_map(p, eta_axis, ratio_axis, sweep_options(cfg));
  emit(cfg, res, io::meta_json(cfg, overrides));
  return 0;
}

int run_thermal_heating(const RunConfig& cfg, const json& overrides) {
  const model::PhysicalParams p = cfg.resolved_params();
  Eigen::VectorXd kts(3);
  kts << 0.01, 1.0, 3.0;
  const Eigen::VectorXd kT_axis = axis_or(cfg, "kT_over_wm", kts);
  int n_points = 25;
  auto it = cfg.axes.find("coop_in");
  if (it != cfg.axes.end() && it->second.count >= 2) n_points = it->second.count;

  sweep::SweepResult combined;
  combined.base_params = p;
  combined.engine = "scatter";
  Eigen::VectorXd coop_axis;
  std::vector<double> j_all;
  std::vector<std::string> status_all;
  Eigen::VectorXd fit_cross(kT_axis.size()), xt_cross(kT_axis.size());
  for (int k = 0; k < kT_axis.size(); ++k) {
    model::PhysicalParams q = p;
    q.kT_over_wm = kT_axis(k);
    sweep::SweepResult one = sweep::heating_scaling(q, n_points, sweep_options(cfg));
    coop_axis = one.axes[0].values;
    const Eigen::VectorXd& j = one.grid("J_over_eta2");
    for (int i = 0; i < j.size(); ++i) {
      j_all.push_back(j(i));
      status_all.push_back(one.status[i]);
    }
    try {
      fit_cross(k) = sweep::scaling_fit(coop_axis, j, p.eta).crossover_coop_in;
    } catch (const FitError&) {
      fit_cross(k) = std::nan("");
    }
    const double nbar = model::derive(q).n_bar;
    xt_cross(k) = 2.0 / (p.eta * p.eta * (2.0 * nbar + 1.0));
  }
  combined.axes = {{"kT_over_wm", kT_axis}, {"coop_in", coop_axis}};
  combined.values.emplace_back(
      "J_over_eta2", Eigen::Map<Eigen::VectorXd>(j_all.data(), Eigen::Index(j_all.size())));
  combined.status = status_all;
  combined.extras.emplace_back("crossover_fit", fit_cross);
  combined.extras.emplace_back("crossover_xT", xt_cross);
  emit(cfg, combined, io::meta_json(cfg, overrides));
  return 0;
}

int run_thermal_g2_map(const RunConfig& cfg, const json& overrides) {
  model::PhysicalParams p = cfg.resolved_params();
  const double g = model::coupling_g(p, 0.0);
  const double d0c = g * g / p.delta;
  const Eigen::VectorXd delta0_axis =
      axis_or(cfg, "delta0", sweep::linspace(0.55 * d0c, 1.5 * d0c, 48));
  Eigen::VectorXd kts(6);
  kts << 0.5, 1.0, 2.0, 4.0, 7.5, 12.0;
  const Eigen::VectorXd kT_axis = axis_or(cfg, "kT_over_wm", kts);
  sweep::SweepResult res =
      sweep::thermal_g2_map(p, delta0_axis, kT_axis, sweep_options(cfg));
  emit(cfg, res, io::meta_json(cfg, overrides));
  return 0;
}

int run_me_validate(const RunConfig& cfg, const json& overrides) {
  model::PhysicalParams p = cfg.resolved_params();
  // rescaled-mechanics validation mode: omega_m = dressed linewidth / 50
  const double linewidth = model::dressed_resonance(p, 0.0).linewidth;
  p.omega_m = linewidth / 50.0;
  Eigen::VectorXd times;
  if (cfg.times) {
    times = *cfg.times;
  } else {
    times = sweep::linspace(0.0, M_PI / p.omega_m, 161);
  }
  const int n_me = cfg.n_phonon > 0 ? cfg.n_phonon : 24;

  sweep::SweepResult res;
  res.axes = {{"t", times}};
  res.base_params = p;
  res.n_phonon = n_me;
  res.n_cavity = cfg.n_cavity;
  res.engine = "both";
  res.status.assign(times.size(), "");

  const int n_scatter = std::max(50, n_me);
  res.values.emplace_back(
      "g2", scatter::g2_trajectory(p, qops::MotionalState::ground(n_scatter), times,
                                   n_scatter));
  lindblad::ConvergenceReport report;
  res.values.emplace_back("g2_me", lindblad::me_g2(p, cfg.sim_config(n_me), times, &report));

  json meta = io::meta_json(cfg, overrides);
  meta["rescaled_omega_m"] = p.omega_m;
  meta["convergence_reports"] = json::array({{{"converged", report.converged},
                                              {"t_final", report.t_final},
                                              {"dt", report.dt},
                                              {"variation", report.variation},
                                              {"integrator", report.integrator}}});
  emit(cfg, res, meta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-atom cavity optomechanics simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, const json&);
    bool with_times;
  };
  const Sub subs[] = {
      {"derive", "derived quantities and the critical operating point", run_derive, false},
      {"amps", "channel amplitudes along a position grid", run_amps, false},
      {"heating-map", "per-photon heating over (delta, delta0)", run_heating_map, false},
      {"heating-scaling", "heating vs intrinsic cooperativity", run_heating_scaling, false},
      {"g2-trace", "g2(t) after a reflected photon", run_g2_trace, true},
      {"g2-map", "g2(0) and full-period swing over (eta, kappa1/kappa2)", run_g2_map, false},
      {"thermal-heating", "heating scaling at several temperatures", run_thermal_heating,
       false},
      {"thermal-g2-map", "g2(pi/omega_m) over drive detuning and temperature",
       run_thermal_g2_map, false},
      {"me-validate", "dual-engine g2 comparison at rescaled omega_m", run_me_validate, true},
  };

  std::vector<CommonFlags> flags(std::size(subs));
  for (size_t i = 0; i < std::size(subs); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    add_common(cmd, flags[i], subs[i].with_times);
  }

  CLI11_PARSE(app, argc, argv);

  for (size_t i = 0; i < std::size(subs); ++i) {
    CLI::App* cmd = app.get_subcommand(subs[i].name);
    if (!cmd->parsed()) continue;
    try {
      RunConfig cfg = io::load_config(flags[i].config_path);
      const json overrides = apply_overrides(cfg, flags[i]);
      return subs[i].fn(cfg, overrides);
    } catch (const InvalidParams& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const InvalidDimension& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const Error& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return 2;
    }
  }
  return 1;
}
