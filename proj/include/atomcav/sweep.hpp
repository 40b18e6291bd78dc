// sweep.hpp - parameter scans, optimizers, scaling fits
//
// Grid points are independent work items dispatched over an OpenMP pool;
// workers = 1 runs the identical serial reference loop, and results are
// written by point index so the output is bit-identical either way.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "atomcav/common.hpp"
#include "atomcav/model.hpp"

namespace atomcav::sweep {

using model::PhysicalParams;

Eigen::VectorXd linspace(double lo, double hi, int count);
Eigen::VectorXd logspace(double lo, double hi, int count);

struct Axis {
  std::string name;
  Eigen::VectorXd values;
};

struct SweepResult {
  std::vector<Axis> axes;  // first axis varies slowest in the grids
  std::vector<std::pair<std::string, Eigen::VectorXd>> values;   // per-point grids
  std::vector<std::pair<std::string, Eigen::VectorXd>> extras;   // auxiliary curves/scalars
  std::vector<std::string> status;  // per point, empty = ok, else the failure
  PhysicalParams base_params;
  int n_phonon = 0;
  int n_cavity = 0;
  std::string engine;
  std::string revision = kVersion;

  int points() const;
  const Eigen::VectorXd& grid(const std::string& name) const;
  const Eigen::VectorXd& extra(const std::string& name) const;
};

struct Options {
  int workers = 0;    // 0: all hardware threads
  int n_phonon = 0;   // 0: operation default
  int n_cavity = 3;   // master-equation runs only
  std::string engine = "scatter";  // scatter | lindblad | both
  double me_max_coop_in = 25.0;    // skip master-equation points above this
  int time_samples = 64;           // per mechanical period
};

/// Fig. "heating vs detunings": grid of J/eta^2 over (delta, delta0), with the
/// dressed-resonance curve delta0 = g^2(x0)/delta and the critical-coupling
/// marker attached as extras.
SweepResult heating_map(const PhysicalParams& p, const Eigen::VectorXd& delta_axis,
                        const Eigen::VectorXd& delta0_axis, const Options& opts = {});

struct OptimumJ {
  double delta = 0, delta0 = 0, J = 0;
  bool converged = false;
};
/// Simplex search of J over (delta, delta0), seeded at the critical-coupling
/// point plus four perturbed restarts; returns the best point found.
OptimumJ maximize_heating(const PhysicalParams& p, const Options& opts = {});

enum class DetuningObjective { reflectance_min, g2_max };
/// Operating atom-cavity detuning: the closed form when kappa1 > kappa2,
/// otherwise a bracketed scalar optimization (delta0 re-slaved to the dressed
/// resonance at every trial).
double zero_reflectance_detuning(const PhysicalParams& p,
                                 DetuningObjective objective = DetuningObjective::g2_max,
                                 const Options& opts = {});

/// g2(0) and the full-period swing max_t g2 - min_t g2 over (eta, kappa1/kappa2),
/// with ell, R0 and ell(1+R0) recorded per point.
SweepResult g2_map(const PhysicalParams& p, const Eigen::VectorXd& eta_axis,
                   const Eigen::VectorXd& ratio_axis, const Options& opts = {});

/// g2(pi/omega_m) over (drive detuning, temperature) at fixed eta and delta,
/// with the dressed-resonance reference curves for x0 and x0 +- x_T.
SweepResult thermal_g2_map(const PhysicalParams& p, const Eigen::VectorXd& delta0_axis,
                           const Eigen::VectorXd& kT_axis, const Options& opts = {});

/// g0 sweep over C_in in [1e-3, 1e3]/eta^2 at the per-point critical
/// detunings; scatter heating always, master-equation heating up to
/// me_max_coop_in when engine is "lindblad" or "both".
SweepResult heating_scaling(const PhysicalParams& p, int n_points = 25,
                            const Options& opts = {});

struct ScalingFit {
  double slope_weak = 0;
  double slope_strong = 0;
  double crossover_coop_in = 0;
};
/// Log-log slopes of J(C_in) restricted to eta^2 C_in < 0.1 and > 10, and the
/// intersection of the two fitted lines. Throws FitError below 4 points per window.
ScalingFit scaling_fit(const Eigen::VectorXd& coop_in, const Eigen::VectorXd& J, double eta);

/// Truncation adequate for the conditional states of a heating evaluation at
/// the critical point; grows with zeta = eta sqrt(C_in / 2).
int default_phonons(const PhysicalParams& p, int floor_n);

// Optimizer primitives (contract-tested directly).
double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double rel_tol, int max_iter = 200);
struct SimplexResult {
  Eigen::VectorXd x;
  double f = 0;
  bool converged = false;
};
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x0, double scale, double rel_tol,
                          int max_iter = 400);

namespace detail {
/// OpenMP-backed index loop; workers = 1 is the serial reference path.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);
int resolve_workers(int workers);
}  // namespace detail

}  // namespace atomcav::sweep
