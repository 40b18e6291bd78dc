// model.hpp - physical parameters, derived quantities, operating-point formulas
//
// Unit convention: every rate and detuning is an angular frequency in MHz,
// times are in us, positions in units of x_zp.
#pragma once

#include "atomcav/common.hpp"

namespace atomcav::model {

struct PhysicalParams {
  double g0 = 0;          // vacuum Rabi coupling (MHz)
  double gamma = 0;       // atomic linewidth (MHz)
  double kappa1 = 0;      // detected-port cavity decay (MHz)
  double kappa2 = 0;      // undetected cavity decay (MHz)
  double delta = 0;       // atom-cavity detuning omega_0 - omega_c (MHz)
  double delta0 = 0;      // laser-atom detuning omega_l - omega_0 (MHz)
  double omega_m = 0;     // trap frequency (MHz)
  double eta = 0;         // Lamb-Dicke parameter k_c * x_zp
  double kx0 = 0;         // trap-center phase k_c * x0 (rad)
  double eps = 0;         // drive amplitude (MHz^1/2); input flux = eps^2/kappa1 per us
  double kT_over_wm = 0;  // k_B T / omega_m
};

/// Throws InvalidParams naming the violated invariant.
void validate(const PhysicalParams& p);

struct Derived {
  double kappa = 0;        // kappa1 + kappa2
  double coop = 0;         // C = g0^2/(kappa*gamma)
  double coop_in = 0;      // C_in = g0^2/(kappa2*gamma)
  double gx0 = 0;          // g(x0) = g0 sin(kx0)
  double omega_r = 0;      // recoil energy eta^2 * omega_m
  double beta_max = 0;     // eta sqrt(C)/sqrt(2)
  double n_bar = 0;        // thermal phonon number
  double xT_over_xzp = 1;  // sqrt(2 n_bar + 1)
  double eta_eff = 0;      // eta * x_T/x_zp
  WarningList warnings;    // regime warnings (unresolved-sideband violations)
};
Derived derive(const PhysicalParams& p);

/// g(x) = g0 sin(kx0 + eta * x/x_zp)
double coupling_g(const PhysicalParams& p, double x_over_xzp);

struct DressedResonance {
  double shift;      // g^2(x)/delta (MHz)
  double linewidth;  // gamma + kappa g^2(x)/delta^2 (MHz)
};
DressedResonance dressed_resonance(const PhysicalParams& p, double x_over_xzp);

struct OptimalDetunings {
  double delta0_star;
  double delta_star;
};
/// delta_star = g(x0) sqrt((kappa1-kappa2)/gamma), delta0_star = g^2(x0)/delta_star.
/// Throws NoCriticalCoupling when kappa1 <= kappa2.
OptimalDetunings optimal_detunings(const PhysicalParams& p);

/// beta = g0^2 eta / (delta * dressed linewidth at x0)
double coupling_parameter_beta(const PhysicalParams& p);

/// ell/x_zp = sqrt(2 / R''(x0)) by Richardson-refined central differences of
/// the reflectance profile. Throws NotAMinimum when R''(x0) <= 0.
double effective_length(const PhysicalParams& p);

/// Copy of p with (delta, delta0) set to the critical-coupling values derived
/// as if the trap center sat at x0 + shift_xzp * x_zp.
PhysicalParams with_critical_detunings(PhysicalParams p, double shift_xzp = 0.0);

}  // namespace atomcav::model
