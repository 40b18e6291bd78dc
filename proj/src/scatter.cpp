#include "atomcav/scatter.hpp"

#include <cmath>
#include <string>

namespace atomcav::scatter {

namespace {
constexpr Complex kI{0.0, 1.0};
}

ChannelAmplitudes amplitudes_at(const PhysicalParams& p, double x_over_xzp) {
  const double g = model::coupling_g(p, x_over_xzp);
  const double kappa = p.kappa1 + p.kappa2;
  const Complex atom_pole = p.delta0 + kI * (p.gamma / 2.0);
  const Complex denom = p.delta0 + p.delta + kI * (kappa / 2.0) - g * g / atom_pole;
  const double kcx = p.kx0 + p.eta * x_over_xzp;
  ChannelAmplitudes amps;
  amps.s_r = 1.0 - kI * p.kappa1 / denom;
  amps.s_t = -kI * std::sqrt(p.kappa1 * p.kappa2) / denom;
  amps.s_a = -kI * std::sqrt(p.kappa1 * p.gamma) / denom * g * std::exp(kI * kcx) / atom_pole;
  return amps;
}

ChannelAmplitudes linearized_amplitudes(const PhysicalParams& p, double dx_over_xzp) {
  const double coop_in = p.g0 * p.g0 / (p.kappa2 * p.gamma);
  const double slope = p.eta * std::sqrt(coop_in) / std::sqrt(2.0);
  const Complex phase = kI * slope * dx_over_xzp;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  ChannelAmplitudes amps;
  amps.s_r = -phase;
  amps.s_t = -inv_sqrt2 * (1.0 + phase);
  amps.s_a = inv_sqrt2 * (1.0 + kI * (slope + p.eta) * dx_over_xzp);
  return amps;
}

namespace {

struct ChannelsOnGrid {
  qops::PositionGrid grid;
  Matrix u;               // complex copy of the (real orthogonal) transform
  Vector s_r, s_t, s_a;   // amplitudes at the grid nodes
  Eigen::VectorXd refl;   // |s_r|^2 at the nodes
};

ChannelsOnGrid channels_on_grid(const PhysicalParams& p, int n_phonon) {
  model::validate(p);
  ChannelsOnGrid c;
  c.grid = qops::position_grid(n_phonon);
  c.u = c.grid.transform.cast<Complex>();
  c.s_r.resize(n_phonon);
  c.s_t.resize(n_phonon);
  c.s_a.resize(n_phonon);
  c.refl.resize(n_phonon);
  for (int i = 0; i < n_phonon; ++i) {
    const ChannelAmplitudes a = amplitudes_at(p, c.grid.values(i));
    c.s_r(i) = a.s_r;
    c.s_t(i) = a.s_t;
    c.s_a(i) = a.s_a;
    c.refl(i) = std::norm(a.s_r);
  }
  return c;
}

Matrix lift(const Matrix& u, const Vector& diag) {
  return u * diag.asDiagonal() * u.transpose();
}

}  // namespace

ScatterOperators scatter_operators(const PhysicalParams& p, int n_phonon,
                                   WarningList* warnings) {
  if (n_phonon < 1) throw InvalidDimension("scatter_operators: n_phonon must be >= 1");
  (void)warnings;
  ChannelsOnGrid c = channels_on_grid(p, n_phonon);
  ScatterOperators ops;
  ops.S_r = lift(c.u, c.s_r);
  ops.S_t = lift(c.u, c.s_t);
  ops.S_a = lift(c.u, c.s_a);
  ops.grid = std::move(c.grid);
  return ops;
}

Eigen::VectorXd reflectance_profile(const PhysicalParams& p, const Eigen::VectorXd& xs) {
  model::validate(p);
  Eigen::VectorXd r(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) r(i) = std::norm(amplitudes_at(p, xs(i)).s_r);
  return r;
}

Conditional conditional_state(const Matrix& S, const MotionalState& state) {
  if (S.rows() != S.cols() || S.rows() != state.dim())
    throw InvalidDimension("conditional_state: operator/state dimension mismatch");
  if (state.is_pure()) {
    Vector phi = S * state.psi;
    const double prob = phi.squaredNorm();
    if (prob < 1e-14)
      throw ImpossibleEvent("conditional_state: outcome probability " + std::to_string(prob) +
                            " below 1e-14");
    return {MotionalState::pure(phi / std::sqrt(prob)), prob};
  }
  Matrix cond = S * state.rho * S.adjoint();
  const double prob = cond.trace().real();
  if (prob < 1e-14)
    throw ImpossibleEvent("conditional_state: outcome probability " + std::to_string(prob) +
                          " below 1e-14");
  cond /= prob;
  cond = ((cond + cond.adjoint()) / 2.0).eval();
  return {MotionalState::mixed(std::move(cond)), prob};
}

namespace {

// Unnormalized channel outcome vectors in the Fock basis for each initial
// pure component, without forming the n x n channel operators.
struct ChannelApply {
  const ChannelsOnGrid& ch;
  Vector apply(const Vector& psi_fock, const Vector& amps) const {
    return ch.u * (amps.array() * (ch.u.transpose() * psi_fock).array()).matrix();
  }
};

struct ChannelAccumulator {
  double weighted_phonons = 0;  // sum_k w_k <phi_k| n |phi_k>
  double probability = 0;       // sum_k w_k ||phi_k||^2
  double top_level = 0;         // sum_k w_k |phi_k(n-1)|^2

  void add(const Vector& phi, double weight) {
    const int n = int(phi.size());
    double en = 0;
    for (int m = 1; m < n; ++m) en += m * std::norm(phi(m));
    weighted_phonons += weight * en;
    probability += weight * phi.squaredNorm();
    top_level += weight * std::norm(phi(n - 1));
  }
  double conditional_top() const {
    return probability > 1e-300 ? top_level / probability : 0.0;
  }
};

}  // namespace

Heating heating_per_photon(const PhysicalParams& p, const MotionalState& state,
                           int n_phonon, WarningList* warnings) {
  if (state.dim() != n_phonon)
    throw InvalidDimension("heating_per_photon: state dimension must equal n_phonon");
  qops::check_truncation(state, warnings, "heating_per_photon");
  ChannelsOnGrid ch = channels_on_grid(p, n_phonon);
  ChannelApply apply{ch};

  ChannelAccumulator acc[3];
  const Vector* amps[3] = {&ch.s_r, &ch.s_t, &ch.s_a};
  double initial_phonons = 0;

  auto absorb = [&](const Vector& psi, double weight) {
    for (int a = 0; a < 3; ++a) acc[a].add(apply.apply(psi, *amps[a]), weight);
    for (int m = 1; m < n_phonon; ++m) initial_phonons += weight * m * std::norm(psi(m));
  };

  if (state.is_pure()) {
    absorb(state.psi, 1.0);
  } else {
    // Thermal and other Fock-diagonal densities decompose into basis vectors;
    // anything else goes through its eigenbasis.
    double offdiag = 0;
    for (int i = 0; i < n_phonon; ++i)
      for (int j = i + 1; j < n_phonon; ++j)
        offdiag = std::max(offdiag, std::abs(state.rho(i, j)));
    if (offdiag < 1e-14) {
      const Eigen::VectorXd pops = state.rho.diagonal().real();
      const double pmax = pops.maxCoeff();
      for (int k = 0; k < n_phonon; ++k) {
        if (pops(k) <= pmax * 1e-16) continue;
        Vector basis = Vector::Zero(n_phonon);
        basis(k) = 1.0;
        absorb(basis, pops(k));
      }
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> es(state.rho);
      for (int k = 0; k < n_phonon; ++k) {
        const double w = es.eigenvalues()(k);
        if (w <= 1e-16) continue;
        absorb(es.eigenvectors().col(k), w);
      }
    }
  }

  const char* names[3] = {"reflection", "transmission", "spontaneous"};
  for (int a = 0; a < 3; ++a) {
    const double top = acc[a].conditional_top();
    if (top > 1e-4)
      throw TruncationError(std::string("heating_per_photon: ") + names[a] +
                            "-conditioned state puts " + std::to_string(top) +
                            " in the top Fock level (limit 1e-4); raise n_phonon");
    if (top > 1e-6)
      warn(warnings, std::string("heating_per_photon: ") + names[a] +
                         "-conditioned top-level population " + std::to_string(top));
  }

  Heating h{acc[0].weighted_phonons, acc[1].weighted_phonons, acc[2].weighted_phonons, 0.0};
  h.J = h.J_r + h.J_t + h.J_a - initial_phonons;
  return h;
}

MotionalState trap_evolve(const MotionalState& state, double t, double omega_m) {
  const int n = state.dim();
  if (state.is_pure()) {
    Vector psi = state.psi;
    for (int m = 0; m < n; ++m) psi(m) *= std::exp(-kI * (omega_m * t * m));
    return MotionalState::pure(std::move(psi), true);
  }
  Matrix rho = state.rho;
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) rho(m, k) *= std::exp(-kI * (omega_m * t * (m - k)));
  return MotionalState::mixed(std::move(rho));
}

Eigen::VectorXd g2_trajectory(const PhysicalParams& p, const MotionalState& state,
                              const Eigen::VectorXd& times, int n_phonon,
                              WarningList* warnings) {
  if (state.dim() != n_phonon)
    throw InvalidDimension("g2_trajectory: state dimension must equal n_phonon");
  qops::check_truncation(state, warnings, "g2_trajectory");
  ChannelsOnGrid ch = channels_on_grid(p, n_phonon);
  const Matrix& u = ch.u;

  // Mean reflectance of the initial state (the g2 normalization).
  Eigen::VectorXd density(n_phonon);
  if (state.is_pure()) {
    density = (u.transpose() * state.psi).cwiseAbs2();
  } else {
    density = (u.transpose() * state.rho * u).diagonal().real();
  }
  const double rbar = density.dot(ch.refl);
  if (rbar < 1e-12)
    throw UndefinedCorrelator("g2_trajectory: mean reflectance " + std::to_string(rbar) +
                              " below 1e-12");

  // Reflectance operator in the Fock basis (real symmetric).
  const Eigen::MatrixXd refl_fock =
      ch.grid.transform * ch.refl.asDiagonal() * ch.grid.transform.transpose();

  // Fock-basis matrix D with tr(R sigma(t)) = sum_{m,n} D(m,n) e^{-i w (m-n) t};
  // collapse to per-offset sums so each time costs O(n).
  Matrix d(n_phonon, n_phonon);
  if (state.is_pure()) {
    Vector phi = u * (ch.s_r.array() * (u.transpose() * state.psi).array()).matrix();
    phi /= std::sqrt(rbar);  // normalized conditional state
    d = (phi * phi.adjoint()).cwiseProduct(refl_fock.transpose().cast<Complex>());
  } else {
    Matrix rho_pos = u.transpose() * state.rho * u;
    Matrix cond_pos =
        ch.s_r.asDiagonal() * rho_pos * ch.s_r.conjugate().asDiagonal() / rbar;
    Matrix cond_fock = u * cond_pos * u.transpose();
    d = cond_fock.cwiseProduct(refl_fock.transpose().cast<Complex>());
  }
  Vector offset(2 * n_phonon - 1);  // index k <-> m - n = k - (n_phonon - 1)
  offset.setZero();
  for (int m = 0; m < n_phonon; ++m)
    for (int n = 0; n < n_phonon; ++n) offset(m - n + n_phonon - 1) += d(m, n);

  Eigen::VectorXd g2(times.size());
  for (Eigen::Index it = 0; it < times.size(); ++it) {
    Complex val = 0;
    for (int k = 0; k < 2 * n_phonon - 1; ++k) {
      const double mn = k - (n_phonon - 1);
      val += offset(k) * std::exp(-kI * (p.omega_m * times(it) * mn));
    }
    g2(it) = std::max(val.real(), 0.0) / rbar;
  }
  return g2;
}

double g2_zero_from_profile(const Eigen::VectorXd& reflectance,
                            const Eigen::VectorXd& weight) {
  if (reflectance.size() != weight.size() || reflectance.size() == 0)
    throw InvalidDimension("g2_zero_from_profile: size mismatch");
  const double wsum = weight.sum();
  const double mean = reflectance.dot(weight) / wsum;
  const double second = reflectance.cwiseAbs2().dot(weight) / wsum;
  if (mean < 1e-12)
    throw UndefinedCorrelator("g2_zero_from_profile: mean reflectance below 1e-12");
  return second / (mean * mean);
}

}  // namespace atomcav::scatter
