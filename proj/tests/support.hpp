// support.hpp - shared fixtures and oracles for the test suites
#pragma once

#include <cmath>

#include "atomcav/model.hpp"

namespace testsup {

using atomcav::model::PhysicalParams;

// Canonical experimental parameter set used throughout the figures:
// g0 = 730 MHz, gamma = 6 MHz, kappa2 = 3.9 GHz, kappa1 = 2 kappa2,
// omega_m = 160 kHz, eta = 0.24, trap center a quarter period from the node.
inline PhysicalParams baseline() {
  PhysicalParams p;
  p.g0 = 730.0;
  p.gamma = 6.0;
  p.kappa2 = 3900.0;
  p.kappa1 = 7800.0;
  p.omega_m = 0.16;
  p.eta = 0.24;
  p.kx0 = M_PI / 4.0;
  p.eps = std::sqrt(0.01 * p.kappa1);  // input flux 0.01 photons per us
  p.kT_over_wm = 0.0;
  p.delta = 1.0;  // placeholder; tests set detunings explicitly
  p.delta0 = 0.0;
  return p;
}

// Small-eta configuration with kappa1/kappa2 = 1.6 used for the conditional
// dynamics and g2 revival studies.
inline PhysicalParams small_eta_16() {
  PhysicalParams p = baseline();
  p.eta = 0.05;
  p.kappa1 = 1.6 * p.kappa2;
  return p;
}

// Detunings that put the zero of the exact reflection amplitude at x0, found
// by solving Re D = Im D - kappa1 = 0 in closed form. This is the operating
// point the critical-coupling formulas approximate; some response properties
// (odd-order symmetry, the linearized amplitudes) hold exactly only here.
inline PhysicalParams with_exact_zero_detunings(PhysicalParams p) {
  const double g = atomcav::model::coupling_g(p, 0.0);
  const double g2 = g * g;
  const double pole = g2 * p.gamma / (p.kappa1 - p.kappa2);  // delta0^2 + gamma^2/4
  const double delta0 = std::sqrt(pole - p.gamma * p.gamma / 4.0);
  p.delta0 = delta0;
  p.delta = g2 * delta0 / pole - delta0;
  return p;
}

// The mirrored zero at (-delta0, -delta): amplitudes there are the complex
// conjugates of the positive branch, and the printed linear-order expansion
// signs are native to this branch.
inline PhysicalParams with_mirrored_zero_detunings(PhysicalParams p) {
  p = with_exact_zero_detunings(p);
  p.delta0 = -p.delta0;
  p.delta = -p.delta;
  return p;
}

}  // namespace testsup
