#include "atomcav/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "atomcav/lindblad.hpp"
#include "atomcav/qops.hpp"
#include "atomcav/scatter.hpp"

namespace atomcav::sweep {

Eigen::VectorXd linspace(double lo, double hi, int count) {
  if (count < 2) throw InvalidParams("linspace: count must be >= 2");
  return Eigen::VectorXd::LinSpaced(count, lo, hi);
}

Eigen::VectorXd logspace(double lo, double hi, int count) {
  if (count < 2) throw InvalidParams("logspace: count must be >= 2");
  if (!(lo > 0 && hi > 0)) throw InvalidParams("logspace: bounds must be positive");
  Eigen::VectorXd out(count);
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out(i) = lo * std::exp(step * i);
  return out;
}

int SweepResult::points() const {
  int n = 1;
  for (const auto& a : axes) n *= int(a.values.size());
  return n;
}

const Eigen::VectorXd& SweepResult::grid(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw Error("SweepResult: no grid named " + name);
}

const Eigen::VectorXd& SweepResult::extra(const std::string& name) const {
  for (const auto& [k, v] : extras)
    if (k == name) return v;
  throw Error("SweepResult: no extra named " + name);
}

namespace detail {

int resolve_workers(int workers) {
  if (workers > 0) return workers;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  const int w = resolve_workers(workers);
  if (w <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(w)
  for (int i = 0; i < n; ++i) fn(i);
#else
  for (int i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace detail

int default_phonons(const PhysicalParams& p, int floor_n) {
  const double coop_in = p.g0 * p.g0 / (p.kappa2 * p.gamma);
  const double zeta = p.eta * std::sqrt(coop_in / 2.0);
  const double need = 8.0 * zeta * zeta + 12.0 * zeta + 16.0;
  return std::max(floor_n, int(std::ceil(need)));
}

double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double rel_tol, int max_iter) {
  if (!(hi > lo)) throw InvalidParams("golden_section: bad bracket");
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > rel_tol * (std::abs(a) + std::abs(b)) / 2.0;
       ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x0, double scale, double rel_tol,
                          int max_iter) {
  const int n = int(x0.size());
  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 1; i <= n; ++i) xs[i](i - 1) += scale;
  for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);

  auto order = [&] {
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (fs[j] < fs[i]) {
          std::swap(fs[i], fs[j]);
          std::swap(xs[i], xs[j]);
        }
  };

  SimplexResult result;
  for (int it = 0; it < max_iter; ++it) {
    order();
    const double spread = std::abs(fs[n] - fs[0]);
    if (spread <= rel_tol * (std::abs(fs[0]) + 1e-300)) {
      result.x = xs[0];
      result.f = fs[0];
      result.converged = true;
      return result;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += xs[i];
    centroid /= double(n);

    Eigen::VectorXd xr = centroid + (centroid - xs[n]);
    const double fr = f(xr);
    if (fr < fs[0]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[n]);
      const double fe = f(xe);
      if (fe < fr) {
        xs[n] = xe;
        fs[n] = fe;
      } else {
        xs[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      xs[n] = xr;
      fs[n] = fr;
    } else {
      Eigen::VectorXd xc = centroid + 0.5 * (xs[n] - centroid);
      const double fc = f(xc);
      if (fc < fs[n]) {
        xs[n] = xc;
        fs[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = f(xs[i]);
        }
      }
    }
  }
  order();
  result.x = xs[0];
  result.f = fs[0];
  result.converged = false;
  return result;
}

namespace {

// g2(0) for the ground state from the channel response on the cached grid:
// needs only the amplitudes at the nodes and the ground-state node weights.
double ground_g2_zero(const PhysicalParams& p, const qops::PositionGrid& grid,
                      const Eigen::VectorXd& weights) {
  const int n = grid.size();
  Eigen::VectorXd refl(n);
  for (int i = 0; i < n; ++i)
    refl(i) = std::norm(scatter::amplitudes_at(p, grid.values(i)).s_r);
  return scatter::g2_zero_from_profile(refl, weights);
}

double reflectance_at_center(const PhysicalParams& p) {
  return std::norm(scatter::amplitudes_at(p, 0.0).s_r);
}

PhysicalParams slave_delta0(PhysicalParams p, double delta) {
  const double g = model::coupling_g(p, 0.0);
  p.delta = delta;
  p.delta0 = g * g / delta;
  return p;
}

// Coarse log-scan followed by golden-section refinement between the scan
// neighbors of the best sample.
double scan_and_refine(const std::function<double(double)>& f, double lo, double hi,
                       double rel_tol) {
  const int coarse = 25;
  Eigen::VectorXd grid = logspace(lo, hi, coarse);
  int best = 0;
  double fbest = f(grid(0));
  for (int i = 1; i < coarse; ++i) {
    const double v = f(grid(i));
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  const double a = grid(std::max(0, best - 1));
  const double b = grid(std::min(coarse - 1, best + 1));
  return golden_section(f, a, b, rel_tol);
}

}  // namespace

double zero_reflectance_detuning(const PhysicalParams& p, DetuningObjective objective,
                                 const Options& opts) {
  model::validate(p);
  if (p.kappa1 > p.kappa2) return model::optimal_detunings(p).delta_star;
  const double g = std::abs(model::coupling_g(p, 0.0));
  if (g <= 0) throw InvalidParams("zero_reflectance_detuning: g(x0) vanishes");
  const double kappa = p.kappa1 + p.kappa2;
  const double ref = g * std::sqrt(kappa / p.gamma);
  const double lo = ref / 30.0, hi = ref * 30.0;
  if (objective == DetuningObjective::reflectance_min) {
    auto f = [&](double delta) { return reflectance_at_center(slave_delta0(p, delta)); };
    return scan_and_refine(f, lo, hi, 1e-6);
  }
  const int n = opts.n_phonon > 0 ? opts.n_phonon : 50;
  qops::PositionGrid grid = qops::position_grid(n);
  Eigen::VectorXd weights = grid.transform.row(0).transpose().cwiseAbs2();
  auto f = [&](double delta) {
    return -ground_g2_zero(slave_delta0(p, delta), grid, weights);
  };
  return scan_and_refine(f, lo, hi, 1e-6);
}

SweepResult heating_map(const PhysicalParams& p, const Eigen::VectorXd& delta_axis,
                        const Eigen::VectorXd& delta0_axis, const Options& opts) {
  model::validate(p);
  const int n = opts.n_phonon > 0 ? opts.n_phonon : 50;
  const int nd = int(delta_axis.size()), nd0 = int(delta0_axis.size());
  SweepResult res;
  res.axes = {{"delta", delta_axis}, {"delta0", delta0_axis}};
  res.base_params = p;
  res.n_phonon = n;
  res.engine = "scatter";
  res.status.assign(nd * nd0, "");
  Eigen::VectorXd j_grid = Eigen::VectorXd::Constant(nd * nd0, std::nan(""));

  const qops::MotionalState state =
      p.kT_over_wm > 0 ? qops::thermal_density(n, p.kT_over_wm) : qops::MotionalState::ground(n);

  detail::parallel_for(nd * nd0, opts.workers, [&](int idx) {
    const int i = idx / nd0, k = idx % nd0;
    PhysicalParams q = p;
    q.delta = delta_axis(i);
    q.delta0 = delta0_axis(k);
    try {
      const scatter::Heating h = scatter::heating_per_photon(q, state, n);
      j_grid(idx) = h.J / (p.eta * p.eta);
    } catch (const Error& e) {
      res.status[idx] = e.what();
    }
  });
  res.values.emplace_back("J_over_eta2", std::move(j_grid));

  Eigen::VectorXd dressed(nd);
  const double g = model::coupling_g(p, 0.0);
  for (int i = 0; i < nd; ++i) dressed(i) = g * g / delta_axis(i);
  res.extras.emplace_back("delta0_dressed", std::move(dressed));
  if (p.kappa1 > p.kappa2) {
    const model::OptimalDetunings od = model::optimal_detunings(p);
    Eigen::VectorXd marker(2);
    marker << od.delta_star, od.delta0_star;
    res.extras.emplace_back("critical_marker", std::move(marker));
  }
  return res;
}

OptimumJ maximize_heating(const PhysicalParams& p, const Options& opts) {
  model::validate(p);
  const int n = opts.n_phonon > 0 ? default_phonons(p, opts.n_phonon)
                                  : default_phonons(p, 50);
  const qops::MotionalState state =
      p.kT_over_wm > 0 ? qops::thermal_density(n, p.kT_over_wm) : qops::MotionalState::ground(n);

  auto objective = [&](const Eigen::VectorXd& x) {
    PhysicalParams q = p;
    q.delta = std::exp(x(0));
    q.delta0 = std::exp(x(1));
    try {
      return -scatter::heating_per_photon(q, state, n).J;
    } catch (const Error&) {
      return 1e300;  // outside the valid region
    }
  };

  double seed_delta, seed_delta0;
  if (p.kappa1 > p.kappa2) {
    const model::OptimalDetunings od = model::optimal_detunings(p);
    seed_delta = od.delta_star;
    seed_delta0 = od.delta0_star;
  } else {
    const double g = std::abs(model::coupling_g(p, 0.0));
    seed_delta = g * std::sqrt((p.kappa1 + p.kappa2) / p.gamma);
    seed_delta0 = g * g / seed_delta;
  }

  const double shifts[5][2] = {{0, 0}, {0.2, 0.2}, {-0.2, 0.2}, {0.2, -0.2}, {-0.2, -0.2}};
  OptimumJ best;
  best.J = -1e300;
  bool any_converged = false;
  for (const auto& s : shifts) {
    Eigen::VectorXd x0(2);
    x0 << std::log(seed_delta) + s[0], std::log(seed_delta0) + s[1];
    SimplexResult r = nelder_mead(objective, x0, 0.15, 1e-3, 400);
    any_converged = any_converged || r.converged;
    if (-r.f > best.J) {
      best.J = -r.f;
      best.delta = std::exp(r.x(0));
      best.delta0 = std::exp(r.x(1));
    }
  }
  best.converged = any_converged;
  return best;
}

SweepResult g2_map(const PhysicalParams& p, const Eigen::VectorXd& eta_axis,
                   const Eigen::VectorXd& ratio_axis, const Options& opts) {
  model::validate(p);
  const int n = opts.n_phonon > 0 ? opts.n_phonon : 50;
  const int ne = int(eta_axis.size()), nr = int(ratio_axis.size());
  const int npts = ne * nr;
  SweepResult res;
  res.axes = {{"eta", eta_axis}, {"kappa_ratio", ratio_axis}};
  res.base_params = p;
  res.n_phonon = n;
  res.engine = "scatter";
  res.status.assign(npts, "");
  Eigen::VectorXd g2_0 = Eigen::VectorXd::Constant(npts, std::nan(""));
  Eigen::VectorXd dg2 = Eigen::VectorXd::Constant(npts, std::nan(""));
  Eigen::VectorXd ell = Eigen::VectorXd::Constant(npts, std::nan(""));
  Eigen::VectorXd r0 = Eigen::VectorXd::Constant(npts, std::nan(""));
  Eigen::VectorXd contour = Eigen::VectorXd::Constant(npts, std::nan(""));

  const int samples = std::max(opts.time_samples, 64);
  detail::parallel_for(npts, opts.workers, [&](int idx) {
    const int ie = idx / nr, ir = idx % nr;
    PhysicalParams q = p;
    q.eta = eta_axis(ie);
    q.kappa1 = ratio_axis(ir) * p.kappa2;
    try {
      const double delta = zero_reflectance_detuning(q, DetuningObjective::g2_max, opts);
      q = slave_delta0(q, delta);
      const qops::MotionalState ground = qops::MotionalState::ground(n);
      Eigen::VectorXd times(samples);
      const double period = 2.0 * M_PI / q.omega_m;
      for (int k = 0; k < samples; ++k) times(k) = period * k / samples;
      const Eigen::VectorXd traj = scatter::g2_trajectory(q, ground, times, n);
      g2_0(idx) = traj(0);
      dg2(idx) = traj.maxCoeff() - traj.minCoeff();
      r0(idx) = reflectance_at_center(q);
      try {
        ell(idx) = model::effective_length(q);
        contour(idx) = ell(idx) * (1.0 + r0(idx));
      } catch (const NotAMinimum&) {
        // leave ell/contour masked; g2 values stand
      }
    } catch (const Error& e) {
      res.status[idx] = e.what();
    }
  });
  res.values.emplace_back("g2_0", std::move(g2_0));
  res.values.emplace_back("delta_g2", std::move(dg2));
  res.values.emplace_back("ell_over_xzp", std::move(ell));
  res.values.emplace_back("R0", std::move(r0));
  res.values.emplace_back("ell_contour", std::move(contour));
  return res;
}

SweepResult thermal_g2_map(const PhysicalParams& p, const Eigen::VectorXd& delta0_axis,
                           const Eigen::VectorXd& kT_axis, const Options& opts) {
  model::validate(p);
  if (p.delta == 0) throw InvalidParams("thermal_g2_map: delta must be set");
  const int n = opts.n_phonon > 0 ? opts.n_phonon : 150;
  const int nd0 = int(delta0_axis.size()), nt = int(kT_axis.size());
  const int npts = nd0 * nt;
  SweepResult res;
  res.axes = {{"delta0", delta0_axis}, {"kT_over_wm", kT_axis}};
  res.base_params = p;
  res.n_phonon = n;
  res.engine = "scatter";
  res.status.assign(npts, "");
  Eigen::VectorXd g2_half = Eigen::VectorXd::Constant(npts, std::nan(""));

  detail::parallel_for(npts, opts.workers, [&](int idx) {
    const int i0 = idx / nt, it = idx % nt;
    PhysicalParams q = p;
    q.delta0 = delta0_axis(i0);
    q.kT_over_wm = kT_axis(it);
    try {
      WarningList warnings;
      const qops::MotionalState state = qops::thermal_density(n, q.kT_over_wm, &warnings);
      if (!warnings.empty()) throw TruncationError(warnings.front());
      Eigen::VectorXd t(1);
      t << M_PI / q.omega_m;
      g2_half(idx) = scatter::g2_trajectory(q, state, t, n)(0);
    } catch (const Error& e) {
      res.status[idx] = e.what();
    }
  });
  res.values.emplace_back("g2_pi", std::move(g2_half));

  // reference curves: drive resonant with the dressed state at x0 and x0 +- x_T
  Eigen::VectorXd center(1), plus(nt), minus(nt);
  const double g0x = model::coupling_g(p, 0.0);
  center(0) = g0x * g0x / p.delta;
  for (int it = 0; it < nt; ++it) {
    PhysicalParams q = p;
    q.kT_over_wm = kT_axis(it);
    const double xt = model::derive(q).xT_over_xzp;
    const double gp = model::coupling_g(p, xt);
    const double gm = model::coupling_g(p, -xt);
    plus(it) = gp * gp / p.delta;
    minus(it) = gm * gm / p.delta;
  }
  res.extras.emplace_back("delta0_center", std::move(center));
  res.extras.emplace_back("delta0_plus_xT", std::move(plus));
  res.extras.emplace_back("delta0_minus_xT", std::move(minus));
  return res;
}

SweepResult heating_scaling(const PhysicalParams& p, int n_points, const Options& opts) {
  model::validate(p);
  if (n_points < 2) throw InvalidParams("heating_scaling: need at least 2 points");
  const double eta2 = p.eta * p.eta;
  Eigen::VectorXd coop_axis = logspace(1e-3 / eta2, 1e3 / eta2, n_points);
  SweepResult res;
  res.axes = {{"coop_in", coop_axis}};
  res.base_params = p;
  res.engine = opts.engine;
  res.n_cavity = opts.n_cavity;
  res.status.assign(n_points, "");
  Eigen::VectorXd j_grid = Eigen::VectorXd::Constant(n_points, std::nan(""));
  Eigen::VectorXd j_me = Eigen::VectorXd::Constant(n_points, std::nan(""));
  Eigen::VectorXd n_used = Eigen::VectorXd::Constant(n_points, 0.0);

  const bool run_scatter = opts.engine != "lindblad";
  const bool run_me = opts.engine == "lindblad" || opts.engine == "both";
  const int floor_n = opts.n_phonon > 0 ? opts.n_phonon : (p.kT_over_wm > 0 ? 150 : 50);

  detail::parallel_for(n_points, opts.workers, [&](int i) {
    PhysicalParams q = p;
    q.g0 = std::sqrt(coop_axis(i) * p.kappa2 * p.gamma);
    try {
      q = model::with_critical_detunings(q);
      if (run_scatter) {
        const int n = default_phonons(q, floor_n);
        n_used(i) = n;
        const qops::MotionalState state = q.kT_over_wm > 0
                                              ? qops::thermal_density(n, q.kT_over_wm)
                                              : qops::MotionalState::ground(n);
        j_grid(i) = scatter::heating_per_photon(q, state, n).J / eta2;
      }
      if (run_me && coop_axis(i) <= opts.me_max_coop_in) {
        lindblad::SimConfig cfg;
        cfg.dims = {opts.n_cavity, floor_n};
        cfg.integrator = lindblad::SimConfig::Integrator::adaptive_rk45;
        const lindblad::HeatingResult h = lindblad::me_heating(q, cfg);
        if (!h.report.converged)
          throw Error("master-equation steady state did not converge");
        j_me(i) = (h.J_r + h.J_t + h.J_a) / eta2;
      }
    } catch (const Error& e) {
      res.status[i] = e.what();
    }
  });
  res.values.emplace_back("J_over_eta2", std::move(j_grid));
  res.values.emplace_back("J_me_over_eta2", std::move(j_me));
  res.values.emplace_back("n_phonon_used", std::move(n_used));
  return res;
}

ScalingFit scaling_fit(const Eigen::VectorXd& coop_in, const Eigen::VectorXd& J, double eta) {
  if (coop_in.size() != J.size()) throw InvalidParams("scaling_fit: size mismatch");
  const double eta2 = eta * eta;
  auto fit_window = [&](double lo, double hi, double& slope, double& intercept) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (Eigen::Index i = 0; i < coop_in.size(); ++i) {
      const double mark = eta2 * coop_in(i);
      if (mark >= lo && mark <= hi && std::isfinite(J(i)) && J(i) > 0) {
        const double x = std::log(coop_in(i)), y = std::log(J(i));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
      }
    }
    if (count < 4)
      throw FitError("scaling_fit: fewer than 4 usable points in a scaling window");
    const double denom = count * sxx - sx * sx;
    slope = (count * sxy - sx * sy) / denom;
    intercept = (sy - slope * sx) / count;
  };
  ScalingFit fit;
  double b_weak = 0, b_strong = 0;
  fit_window(0.0, 0.1, fit.slope_weak, b_weak);
  fit_window(10.0, 1e300, fit.slope_strong, b_strong);
  fit.crossover_coop_in =
      std::exp((b_strong - b_weak) / (fit.slope_weak - fit.slope_strong));
  return fit;
}

}  // namespace atomcav::sweep
