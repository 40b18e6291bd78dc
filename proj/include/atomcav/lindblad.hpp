// lindblad.hpp - full open-system engine
//
// Assembles the driven Jaynes-Cummings Hamiltonian with quantized motion,
// applies the Liouvillian matrix-free (the dim^2 x dim^2 superoperator is
// never formed), evolves to the steady state under a cavity-population
// convergence rule, and extracts input-output heating rates and the
// jump-conditioned g2(t) by the regression protocol. Serves as the
// validation oracle for the scattering-matrix engine.
#pragma once

#include <Eigen/Dense>
#include <string>

#include "atomcav/common.hpp"
#include "atomcav/model.hpp"
#include "atomcav/qops.hpp"

namespace atomcav::lindblad {

using model::PhysicalParams;
using qops::Dims;
using qops::Matrix;
using qops::Vector;

struct SimConfig {
  Dims dims{3, 50};
  double dt = 0.0;           // 0 resolves to 0.02/kappa (also the adaptive seed)
  double conv_tol = 0.01;    // relative cavity-population variation threshold
  double conv_window = 0.0;  // 0 resolves to 10 / dressed linewidth at x0 (us)
  double t_max = 0.0;        // 0 resolves to 20 * conv_window (us)
  enum class Integrator { fixed_rk4, adaptive_rk45 };
  Integrator integrator = Integrator::fixed_rk4;
  double rel_tol = 1e-8;  // adaptive error control
  bool recoil = true;     // spontaneous jump dressed by exp(-i k_c x); test knob
};

struct Resolved {
  double dt, conv_window, t_max;
};
Resolved resolve(const PhysicalParams& p, const SimConfig& cfg);

/// Full-space Hamiltonian in the Fock basis:
/// H = -(delta+delta0) a^dag a - delta0 sigma^dag sigma
///     + g(x)(sigma a^dag + h.c.) - i eps (a^dag - a) + omega_m b^dag b.
Matrix hamiltonian(const PhysicalParams& p, const Dims& dims);

/// One-shot d rho / dt in the Fock basis.
Matrix liouvillian_apply(const PhysicalParams& p, const Dims& dims, const Matrix& rho);

struct ConvergenceReport {
  bool converged = false;
  double t_final = 0.0;
  double dt = 0.0;         // last (accepted) step
  double variation = 0.0;  // cavity-population variation over the last window
  std::string integrator;
};

struct SteadyStateResult {
  Matrix rho;  // Fock basis, symmetrized
  ConvergenceReport report;
};
/// Evolves |0_c, down> <x| thermal motion until the relative variation of
/// <a^dag a> over conv_window drops below conv_tol (or t_max, flagged).
SteadyStateResult steady_state(const PhysicalParams& p, const SimConfig& cfg);

struct HeatingResult {
  double J_r, J_t, J_a;
  ConvergenceReport report;
};
/// Input-output heating per incoming photon:
/// J_{r,t} = kappa_{1,2} tr(b^dag b a rho a^dag) / (eps^2/kappa1),
/// J_a     = gamma tr(b^dag b L rho L^dag) / (eps^2/kappa1), L the recoil-dressed jump.
HeatingResult me_heating(const PhysicalParams& p, const SimConfig& cfg);

/// Regression protocol with jump operator c = eps/sqrt(kappa1) + sqrt(kappa1) a:
/// g2(t) = tr(c^dag c E_t[c rho_ss c^dag]) / tr(c^dag c rho_ss)^2.
Eigen::VectorXd me_g2(const PhysicalParams& p, const SimConfig& cfg,
                      const Eigen::VectorXd& times, ConvergenceReport* report = nullptr);

}  // namespace atomcav::lindblad
