// scatter.hpp - scattering-matrix engine
//
// Channel amplitudes of a single input photon at fixed atomic position, their
// operator-valued lift onto the truncated motional space (diagonal in the
// position eigenbasis of b + b^dag), conditional states, per-photon heating
// and the trap-evolution approximation to the reflected-photon g2(t).
// Detection is not frequency-resolving; output photon frequency is traced
// over throughout.
#pragma once

#include <Eigen/Dense>

#include "atomcav/common.hpp"
#include "atomcav/model.hpp"
#include "atomcav/qops.hpp"

namespace atomcav::scatter {

using model::PhysicalParams;
using qops::Matrix;
using qops::MotionalState;
using qops::Vector;

struct ChannelAmplitudes {
  Complex s_r;  // reflection into the detected port
  Complex s_t;  // transmission / cavity loss
  Complex s_a;  // atomic spontaneous emission (carries the recoil phase)
  double norm() const { return std::norm(s_r) + std::norm(s_t) + std::norm(s_a); }
};

/// Channel amplitudes for an atom fixed at x0 + x_over_xzp * x_zp.
ChannelAmplitudes amplitudes_at(const PhysicalParams& p, double x_over_xzp);

/// Linear-order amplitudes around x0, valid at the critical operating point
/// with kappa1 = 2 kappa2, C_in >> 1 and |dx| << ell.
ChannelAmplitudes linearized_amplitudes(const PhysicalParams& p, double dx_over_xzp);

struct ScatterOperators {
  Matrix S_r, S_t, S_a;
  qops::PositionGrid grid;
};
/// S_alpha = U diag(s_alpha(x_i)) U^dag on the n_phonon-level motional space.
ScatterOperators scatter_operators(const PhysicalParams& p, int n_phonon,
                                   WarningList* warnings = nullptr);

/// R(x) = |s_r(x)|^2 per grid point.
Eigen::VectorXd reflectance_profile(const PhysicalParams& p, const Eigen::VectorXd& xs);

struct Conditional {
  MotionalState state;
  double probability;
};
/// Normalized post-detection state S psi / ||S psi|| (or S rho S^dag / tr) with
/// the detection probability. Throws ImpossibleEvent below 1e-14 probability.
Conditional conditional_state(const Matrix& S, const MotionalState& state);

struct Heating {
  double J_r, J_t, J_a;  // probability-weighted phonon numbers per channel
  double J;              // J_r + J_t + J_a - <n>_initial
};
/// Average phonons added by one scattered photon. Escalates to
/// TruncationError when any conditional state puts > 1e-4 in the top level.
Heating heating_per_photon(const PhysicalParams& p, const MotionalState& state,
                           int n_phonon, WarningList* warnings = nullptr);

/// Free evolution in the trap: Fock amplitude n picks up exp(-i n omega_m t).
MotionalState trap_evolve(const MotionalState& state, double t, double omega_m);

/// g2(t) = tr(S_r^dag S_r sigma(t)) / Rbar with sigma(t) the trap-evolved
/// reflection-conditioned state and Rbar the initial mean reflectance.
/// Throws UndefinedCorrelator when Rbar < 1e-12.
Eigen::VectorXd g2_trajectory(const PhysicalParams& p, const MotionalState& state,
                              const Eigen::VectorXd& times, int n_phonon,
                              WarningList* warnings = nullptr);

/// <R^2>/<R>^2 of a sampled response against a position density; the t = 0
/// correlator of an arbitrary reflectance profile.
double g2_zero_from_profile(const Eigen::VectorXd& reflectance,
                            const Eigen::VectorXd& weight);

}  // namespace atomcav::scatter
