#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "atomcav/scatter.hpp"
#include "support.hpp"

using namespace atomcav;
using namespace atomcav::scatter;
using qops::Matrix;
using qops::MotionalState;
using qops::Vector;
using testsup::baseline;
using testsup::small_eta_16;
using testsup::with_exact_zero_detunings;

namespace {

// Gauss-Hermite nodes/weights for weight exp(-t^2) via the Jacobi matrix,
// independent of the library's position_grid construction.
void gauss_hermite(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(k / 2.0);
    j(k - 1, k) = b;
    j(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  nodes = es.eigenvalues();
  weights.resize(n);
  const double mu0 = std::sqrt(M_PI);
  for (int i = 0; i < n; ++i)
    weights(i) = mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
}

// Ground-state average of f(x/x_zp): the density is a Gaussian with unit
// variance in x/x_zp, so substitute u = sqrt(2) t against exp(-t^2)/sqrt(pi).
template <typename F>
double ground_state_average(F f, int nodes_n = 200) {
  Eigen::VectorXd t, w;
  gauss_hermite(nodes_n, t, w);
  double acc = 0;
  for (int i = 0; i < nodes_n; ++i) acc += w(i) / std::sqrt(M_PI) * f(std::sqrt(2.0) * t(i));
  return acc;
}

model::PhysicalParams random_params(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  model::PhysicalParams p;
  p.g0 = std::pow(10.0, 1.0 + 3.0 * u(rng));
  p.gamma = std::pow(10.0, 0.0 + 2.0 * u(rng));
  p.kappa1 = std::pow(10.0, 2.0 + 2.0 * u(rng));
  p.kappa2 = std::pow(10.0, 2.0 + 2.0 * u(rng));
  p.delta = (u(rng) < 0.5 ? -1.0 : 1.0) * std::pow(10.0, 2.0 + 3.0 * u(rng));
  p.delta0 = (u(rng) < 0.5 ? -1.0 : 1.0) * std::pow(10.0, 0.0 + 2.0 * u(rng));
  p.omega_m = 0.16;
  p.eta = 0.01 + 0.4 * u(rng);
  p.kx0 = u(rng) * M_PI;
  p.eps = 1.0;
  return p;
}

}  // namespace

TEST_CASE("critically coupled empty cavity") {
  model::PhysicalParams p = baseline();
  p.kx0 = 0.0;  // node: g(x) = 0
  p.kappa1 = p.kappa2 = 3900.0;
  p.delta = 700.0;
  p.delta0 = -700.0;  // delta + delta0 = 0
  ChannelAmplitudes a = amplitudes_at(p, 0.0);
  CHECK(std::abs(a.s_r) < 1e-14);
  CHECK(std::abs(a.s_t - Complex(-1.0, 0.0)) < 1e-14);
  CHECK(std::abs(a.s_a) < 1e-14);
}

TEST_CASE("channel norm is conserved for random parameter draws") {
  std::mt19937 rng(20240817);
  for (int i = 0; i < 1000; ++i) {
    model::PhysicalParams p = random_params(rng);
    std::uniform_real_distribution<double> x(-6.0, 6.0);
    ChannelAmplitudes a = amplitudes_at(p, x(rng));
    CHECK(std::abs(a.norm() - 1.0) < 1e-9);
  }
}

// Known red: the closed-form operating point leaves a ~1.6e-3 residual
// reflectance; the exact zero sits ~1% away in (delta0, delta). Kept as
// stated; see README.
TEST_CASE("baseline reflectance at the closed-form operating point (known red)") {
  model::PhysicalParams p = model::with_critical_detunings(baseline());
  const double r0 = std::norm(amplitudes_at(p, 0.0).s_r);
  CHECK_MESSAGE(r0 < 1e-10, "R(x0) = ", r0, " at the closed-form detunings");
}

TEST_CASE("linearized amplitudes") {
  SUBCASE("on-center values") {
    model::PhysicalParams p = model::with_critical_detunings(baseline());
    ChannelAmplitudes a = linearized_amplitudes(p, 0.0);
    CHECK(std::abs(a.s_r) == 0.0);
    CHECK(std::norm(a.s_t) == doctest::Approx(0.5));
    CHECK(std::norm(a.s_a) == doctest::Approx(0.5));
  }

  SUBCASE("matches the full formula near the exact zero") {
    // The expansion assumes the reflectance zero sits exactly at x0 and its
    // printed signs belong to the mirrored branch (delta, delta0 < 0); the
    // spontaneous channel also omits the constant recoil phase e^{i k_c x0}.
    // Its subleading corrections scale as 1/(2 sqrt(C_in)) (15% at the
    // baseline C_in = 23), so compare in a regime that satisfies the
    // C_in >> 1 premise.
    model::PhysicalParams p = baseline();
    p.g0 *= 4.0;  // C_in = 364
    p = testsup::with_mirrored_zero_detunings(p);
    const double ell = model::effective_length(p);
    const double dx = 0.01 * ell;
    ChannelAmplitudes lin = linearized_amplitudes(p, dx);
    ChannelAmplitudes full = amplitudes_at(p, dx);
    const Complex recoil_const = std::exp(Complex(0, p.kx0));
    CHECK(std::abs(lin.s_r - full.s_r) / std::abs(full.s_r) < 0.05);
    CHECK(std::abs(lin.s_t - full.s_t) / std::abs(full.s_t) < 0.05);
    CHECK(std::abs(lin.s_a - full.s_a / recoil_const) / std::abs(full.s_a) < 0.05);
  }

  SUBCASE("perfect reflectance far outside the dip") {
    // needs the dip narrow against the sine period: raise the coupling
    model::PhysicalParams p = small_eta_16();
    p.g0 *= 4.0;  // C_in = 364
    p = model::with_critical_detunings(p);
    const double ell = model::effective_length(p);
    ChannelAmplitudes far = amplitudes_at(p, 6.0 * ell);
    CHECK(std::abs(far.s_r) > 0.9);
    CHECK(std::abs(far.s_t) < 0.35);
    CHECK(std::abs(far.s_a) < 0.35);
    ChannelAmplitudes farther = amplitudes_at(p, 10.0 * ell);
    CHECK(std::abs(farther.s_r) > std::abs(far.s_r));
  }
}

TEST_CASE("scatter operators") {
  SUBCASE("channel completeness on the motional space") {
    model::PhysicalParams p = model::with_critical_detunings(small_eta_16());
    ScatterOperators ops = scatter_operators(p, 40);
    Matrix total = ops.S_r.adjoint() * ops.S_r + ops.S_t.adjoint() * ops.S_t +
                   ops.S_a.adjoint() * ops.S_a;
    CHECK((total - Matrix::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("position-independent response collapses to a scalar") {
    model::PhysicalParams p = baseline();
    p.g0 = 1e-12;
    p.delta = 5000.0;
    p.delta0 = 30.0;
    ScatterOperators ops = scatter_operators(p, 12);
    const Complex s0 = amplitudes_at(p, 0.0).s_r;
    CHECK((ops.S_r - s0 * Matrix::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("recoil-only limit of the spontaneous channel") {
    // At the antinode with small eta the coupling is constant over the state
    // support and s_a(x) reduces to a fixed scalar times e^{i k_c x}.
    model::PhysicalParams p = baseline();
    p.kx0 = M_PI / 2.0;
    p.eta = 0.01;
    p.delta = 5000.0;
    p.delta0 = 20.0;
    ScatterOperators ops = scatter_operators(p, 16);
    const Complex scale = amplitudes_at(p, 0.0).s_a * std::exp(Complex(0, -p.kx0));
    Matrix l = qops::ladder_lowering(16);
    Matrix recoil = qops::hermitian_function(
        (l + l.adjoint()).eval(),
        [&p](double u) { return std::exp(Complex(0, p.kx0 + p.eta * u)); });
    CHECK((ops.S_a - scale * recoil).cwiseAbs().maxCoeff() < 0.02 * std::abs(scale));
  }

  SUBCASE("mean reflectance agrees with 200-node quadrature") {
    model::PhysicalParams p = model::with_critical_detunings(small_eta_16());
    ScatterOperators ops = scatter_operators(p, 60);
    MotionalState ground = MotionalState::ground(60);
    const double engine =
        qops::expectation((ops.S_r.adjoint() * ops.S_r).eval(), ground).real();
    const double quad = ground_state_average(
        [&p](double u) { return std::norm(amplitudes_at(p, u).s_r); });
    CHECK(engine > 0.0);
    CHECK(engine < 1.0);
    CHECK(std::abs(engine - quad) < 1e-6);
  }
}

TEST_CASE("reflectance profile") {
  model::PhysicalParams p = model::with_critical_detunings(baseline());
  const double ell = model::effective_length(p);

  SUBCASE("bounded by the passive limits") {
    Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(301, -10.0, 10.0);
    Eigen::VectorXd r = reflectance_profile(p, xs);
    CHECK(r.minCoeff() >= 0.0);
    CHECK(r.maxCoeff() <= 1.0 + 1e-12);
  }

  SUBCASE("curvature length describes the minimum") {
    // Probed at the refined zero. The sine geometry of g(x) contributes an
    // odd cubic term of a few % at 0.1 ell, so the pointwise quadratic match
    // is tested close in and the +-averaged (even) part out to 0.1 ell; the
    // saturation correction -(dx/ell)^4 is exactly -1% at that boundary.
    model::PhysicalParams q = with_exact_zero_detunings(baseline());
    const double lq = model::effective_length(q);
    auto refl = [&q](double x) { return std::norm(amplitudes_at(q, x).s_r); };
    const double r0 = refl(0.0);
    for (double f : {0.01, 0.02, 0.025}) {
      const double model_r = r0 + f * f;
      CHECK(std::abs(refl(f * lq) - model_r) < 0.01 * model_r);
      CHECK(std::abs(refl(-f * lq) - model_r) < 0.01 * model_r);
    }
    for (double f : {0.05, 0.1}) {
      const double model_r = r0 + f * f;
      const double even = 0.5 * (refl(f * lq) + refl(-f * lq));
      CHECK(std::abs(even - model_r) < 0.011 * model_r);
    }
    // half reflectance one effective length out
    CHECK(refl(lq) > 0.35);
    CHECK(refl(lq) < 0.65);
    CHECK(refl(-lq) > 0.35);
    CHECK(refl(-lq) < 0.65);
  }

  SUBCASE("odd-order symmetry at the refined zero") {
    // With the zero exactly at x0 the linear term vanishes and the asymmetry
    // is cubic; at the closed-form detunings the residual makes it linear.
    model::PhysicalParams q = with_exact_zero_detunings(baseline());
    const double lq = model::effective_length(q);
    std::vector<double> deltas = {0.01 * lq, 0.005 * lq, 0.0025 * lq};
    std::vector<double> asym;
    for (double d : deltas) {
      Eigen::VectorXd xs(2);
      xs << d, -d;
      Eigen::VectorXd r = reflectance_profile(q, xs);
      asym.push_back(std::abs(r(0) - r(1)));
    }
    // halving delta should shrink the asymmetry ~8x; demand at least 6x
    CHECK(asym[0] / asym[1] > 6.0);
    CHECK(asym[1] / asym[2] > 6.0);
  }
}

TEST_CASE("conditional state") {
  SUBCASE("identity leaves the state untouched") {
    MotionalState ground = MotionalState::ground(10);
    Conditional c = conditional_state(Matrix::Identity(10, 10), ground);
    CHECK(c.probability == doctest::Approx(1.0));
    CHECK((c.state.psi - ground.psi).norm() < 1e-14);
  }

  SUBCASE("channel probabilities sum to one") {
    model::PhysicalParams p = model::with_critical_detunings(small_eta_16());
    ScatterOperators ops = scatter_operators(p, 40);

    MotionalState ground = MotionalState::ground(40);
    double total = conditional_state(ops.S_r, ground).probability +
                   conditional_state(ops.S_t, ground).probability +
                   conditional_state(ops.S_a, ground).probability;
    CHECK(std::abs(total - 1.0) < 1e-9);

    MotionalState th = qops::thermal_density(40, 1.3);
    total = conditional_state(ops.S_r, th).probability +
            conditional_state(ops.S_t, th).probability +
            conditional_state(ops.S_a, th).probability;
    CHECK(std::abs(total - 1.0) < 1e-9);
  }

  SUBCASE("a central hole is imprinted on reflection") {
    // quantified at the refined zero; the closed-form residual reflectance
    // partially fills the hole (density ratio 14% there vs 7% here)
    model::PhysicalParams p = with_exact_zero_detunings(small_eta_16());
    const int n = 60;
    ScatterOperators ops = scatter_operators(p, n);
    Conditional c = conditional_state(ops.S_r, MotionalState::ground(n));
    // position density of the conditional state
    Eigen::VectorXd dens =
        (ops.grid.transform.cast<Complex>().transpose() * c.state.psi).cwiseAbs2();
    // density nearest x0 against the profile maximum
    int i0 = 0;
    ops.grid.values.cwiseAbs().minCoeff(&i0);
    CHECK(dens(i0) < 0.1 * dens.maxCoeff());
  }

  SUBCASE("impossible events are rejected") {
    MotionalState ground = MotionalState::ground(6);
    CHECK_THROWS_AS(conditional_state(Matrix::Zero(6, 6), ground), ImpossibleEvent);
  }
}

TEST_CASE("heating per photon") {
  SUBCASE("vanishing coupling removes every channel's heating") {
    model::PhysicalParams p = baseline();
    p.g0 = 1e-12;
    p.delta = 5000.0;
    p.delta0 = 30.0;
    const int n = 30;
    Heating h = heating_per_photon(p, MotionalState::ground(n), n);
    CHECK(h.J_r < 1e-20);
    CHECK(h.J_t < 1e-20);
    CHECK(h.J_a < 1e-20);
    CHECK(h.J <= p.eta * p.eta + 1e-10);
  }

  SUBCASE("flat-coupling limit leaves only bare recoil") {
    // At the antinode with small eta the response is position-independent to
    // O(eta^2 u^2): reflection and transmission add no phonons and the
    // spontaneous channel heats by exactly eta^2 per event.
    model::PhysicalParams p = baseline();
    p.kx0 = M_PI / 2.0;
    p.eta = 0.02;
    p.delta = 5000.0;
    p.delta0 = p.g0 * p.g0 / p.delta;
    const int n = 40;
    Heating h = heating_per_photon(p, MotionalState::ground(n), n);
    ScatterOperators ops = scatter_operators(p, n);
    const double p_a =
        conditional_state(ops.S_a, MotionalState::ground(n)).probability;
    CHECK(h.J_r < 0.05 * h.J_a);
    CHECK(h.J_t < 0.05 * h.J_a);
    CHECK(h.J_a == doctest::Approx(p_a * p.eta * p.eta).epsilon(2e-3));
    CHECK(h.J <= p.eta * p.eta + 1e-10);
  }

  SUBCASE("baseline heating magnitude J ~ 10 eta^2") {
    model::PhysicalParams p = model::with_critical_detunings(baseline());
    const int n = 60;
    Heating h = heating_per_photon(p, MotionalState::ground(n), n);
    const double ratio = h.J / (p.eta * p.eta);
    CHECK(ratio > 7.0);
    CHECK(ratio < 13.0);
  }

  SUBCASE("reflection heats twice as much as transmission at kappa1 = 2 kappa2") {
    model::PhysicalParams p = model::with_critical_detunings(baseline());
    const int n = 60;
    Heating h = heating_per_photon(p, MotionalState::ground(n), n);
    CHECK(h.J_r / h.J_t == doctest::Approx(2.0).epsilon(0.10));
  }

  SUBCASE("heating against an independent position-space quadrature") {
    // J_alpha = (1/4) Int [ u^2 |f|^2 + 4 |f'|^2 - 2 |f|^2 ] du with
    // f = s_alpha(u) psi0(u) on a dense grid (derivative by central
    // differences). Checks the Fock-space route end to end.
    model::PhysicalParams p = model::with_critical_detunings(baseline());
    const int n = 80;
    Heating h = heating_per_photon(p, MotionalState::ground(n), n);

    const double du = 1e-3;
    const int m = int(24.0 / du);
    auto psi0 = [](double u) {
      return std::pow(2.0 * M_PI, -0.25) * std::exp(-u * u / 4.0);
    };
    double j[3] = {0, 0, 0};
    std::vector<Complex> f(m + 1);
    for (int ch = 0; ch < 3; ++ch) {
      for (int i = 0; i <= m; ++i) {
        const double u = -12.0 + i * du;
        ChannelAmplitudes a = amplitudes_at(p, u);
        const Complex s = ch == 0 ? a.s_r : (ch == 1 ? a.s_t : a.s_a);
        f[i] = s * psi0(u);
      }
      double acc = 0;
      for (int i = 1; i < m; ++i) {
        const double u = -12.0 + i * du;
        const Complex fp = (f[i + 1] - f[i - 1]) / (2.0 * du);
        acc += (u * u * std::norm(f[i]) + 4.0 * std::norm(fp) - 2.0 * std::norm(f[i])) * du;
      }
      j[ch] = acc / 4.0;
    }
    CHECK(h.J_r == doctest::Approx(j[0]).epsilon(1e-4));
    CHECK(h.J_t == doctest::Approx(j[1]).epsilon(1e-4));
    CHECK(h.J_a == doctest::Approx(j[2]).epsilon(1e-4));
  }

  SUBCASE("thermal subtraction removes the initial phonons") {
    model::PhysicalParams p = model::with_critical_detunings(baseline());
    const int n = 150;
    MotionalState th = qops::thermal_density(n, 1.0);
    Heating h = heating_per_photon(p, th, n);
    const double nbar = qops::expectation(qops::number_operator(n), th).real();
    CHECK(h.J == doctest::Approx(h.J_r + h.J_t + h.J_a - nbar).epsilon(1e-12));
  }

  SUBCASE("inadequate truncation escalates") {
    model::PhysicalParams p = model::with_critical_detunings(baseline());
    p.g0 = std::sqrt(4000.0 * p.kappa2 * p.gamma);  // C_in = 4000, zeta^2 ~ 115
    p = model::with_critical_detunings(p);
    CHECK_THROWS_AS(heating_per_photon(p, MotionalState::ground(40), 40),
                    TruncationError);
  }
}

TEST_CASE("trap evolution") {
  const int n = 12;
  SUBCASE("Fock states only pick up a phase") {
    Vector v = Vector::Zero(n);
    v(5) = 1.0;
    MotionalState s = MotionalState::pure(v);
    MotionalState out = trap_evolve(s, 0.77, 0.16);
    CHECK(std::abs(std::abs(out.psi(5)) - 1.0) < 1e-14);
    CHECK(out.psi.cwiseAbs2().sum() == doctest::Approx(1.0));
  }

  SUBCASE("full period returns the state exactly") {
    std::mt19937 rng(5);
    std::normal_distribution<double> dist;
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(dist(rng), dist(rng));
    v /= v.norm();
    MotionalState s = MotionalState::pure(v);
    const double wm = 0.16;
    MotionalState out = trap_evolve(s, 2.0 * M_PI / wm, wm);
    CHECK((out.psi - s.psi).cwiseAbs().maxCoeff() < 1e-12);

    Matrix rho = v * v.adjoint();
    MotionalState sm = MotionalState::mixed(rho);
    MotionalState outm = trap_evolve(sm, 2.0 * M_PI / wm, wm);
    CHECK((outm.rho - rho).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("even-support states revive at half period") {
    Vector v = Vector::Zero(n);
    v(0) = std::sqrt(0.5);
    v(2) = std::sqrt(0.3);
    v(4) = std::sqrt(0.2);
    MotionalState s = MotionalState::pure(v);
    const double wm = 0.16;
    MotionalState out = trap_evolve(s, M_PI / wm, wm);
    const Complex overlap = s.psi.dot(out.psi);
    CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-12);
  }
}

TEST_CASE("g2 trajectory") {
  SUBCASE("position-independent response gives a flat correlator") {
    model::PhysicalParams p = baseline();
    p.g0 = 1e-9;
    p.delta = 5000.0;
    p.delta0 = 30.0;
    Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(9, 0.0, 39.27);
    Eigen::VectorXd g2 = g2_trajectory(p, MotionalState::ground(30), times, 30);
    for (int i = 0; i < g2.size(); ++i) CHECK(g2(i) == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("symmetric dip configuration: bunching with pi/omega_m revivals") {
    // The correlator is pi/omega-periodic and revives to its t = 0 value at
    // k pi/omega. (The local maxima themselves trail each revival by ~0.2 T:
    // near a simple reflectance zero the conditional state is |1>-like with
    // a -i-phased |0>,|2> admixture, so the extrema sit a quarter period
    // after the revivals. Acceptance criterion 7 records the literal
    // maxima-placement reading against this.)
    model::PhysicalParams p = with_exact_zero_detunings(small_eta_16());
    const int n = 60;
    const double wm = p.omega_m;
    Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(257, 0.0, 2.0 * M_PI / wm);
    Eigen::VectorXd g2 = g2_trajectory(p, MotionalState::ground(n), times, n);
    CHECK(g2(0) > 1.0);
    // revival: half-period value returns to the initial one
    CHECK(g2(128) == doctest::Approx(g2(0)).epsilon(0.02));
    // pi/omega periodicity across the whole trace
    double worst = 0;
    for (int i = 0; i < 128; ++i)
      worst = std::max(worst, std::abs(g2(i) - g2(i + 128)) / g2(i));
    CHECK(worst < 0.10);
    // and the oscillation is genuinely present
    CHECK(g2.maxCoeff() - g2.minCoeff() > 0.1);
  }

  SUBCASE("side dip configuration: antibunching at half period, 2pi/omega_m period") {
    model::PhysicalParams p = model::with_critical_detunings(small_eta_16(), 1.0);
    const int n = 60;
    const double wm = p.omega_m;
    Eigen::VectorXd times(3);
    times << 0.0, M_PI / wm, 2.0 * M_PI / wm;
    Eigen::VectorXd g2 = g2_trajectory(p, MotionalState::ground(n), times, n);
    CHECK(g2(0) > 1.0);
    CHECK(g2(1) < 1.0);
    CHECK(g2(2) == doctest::Approx(g2(0)).epsilon(1e-9));
  }

  SUBCASE("pure and position-dephased states share g2(0)") {
    model::PhysicalParams p = model::with_critical_detunings(small_eta_16());
    const int n = 40;
    // a mildly excited pure state
    Vector v = Vector::Zero(n);
    v(0) = std::sqrt(0.7);
    v(1) = std::sqrt(0.2);
    v(2) = std::sqrt(0.1);
    MotionalState pure = MotionalState::pure(v);
    // dephased partner with the identical position density
    qops::PositionGrid grid = qops::position_grid(n);
    Matrix u = grid.transform.cast<Complex>();
    Eigen::VectorXd w = (u.transpose() * v).cwiseAbs2();
    Matrix rho_pos = Matrix::Zero(n, n);
    rho_pos.diagonal() = w.cast<Complex>();
    Matrix rho = u * rho_pos * u.transpose();
    rho = ((rho + rho.adjoint()) / 2.0).eval();
    MotionalState mixed = MotionalState::mixed(rho);

    Eigen::VectorXd t0(1);
    t0 << 0.0;
    const double a = g2_trajectory(p, pure, t0, n)(0);
    const double b = g2_trajectory(p, mixed, t0, n)(0);
    CHECK(std::abs(a - b) < 1e-8);
  }

  SUBCASE("vanishing mean reflectance is rejected") {
    model::PhysicalParams p = with_exact_zero_detunings(baseline());
    Eigen::VectorXd t0(1);
    t0 << 0.0;
    // single-node grid sits exactly on the reflectance zero
    CHECK_THROWS_AS(g2_trajectory(p, MotionalState::ground(1), t0, 1),
                    UndefinedCorrelator);
  }
}

TEST_CASE("step-function toy model for g2(0)") {
  // R(x) = 1 - (1-R0) for |x| < ell, uniform density over |x| < x_zp:
  // g2(0) = [1 - lambda(1-R0^2)] / [1 - lambda(1-R0)]^2 analytically.
  auto toy = [](double r0, double lambda, int m) {
    Eigen::VectorXd r(m), w(m);
    for (int i = 0; i < m; ++i) {
      const double x = -1.0 + (2.0 * i + 1.0) / m;  // midpoints over [-1, 1]
      r(i) = std::abs(x) < lambda ? r0 : 1.0;
      w(i) = 1.0;
    }
    return g2_zero_from_profile(r, w);
  };
  auto analytic = [](double r0, double lambda) {
    const double num = 1.0 - lambda * (1.0 - r0 * r0);
    const double den = 1.0 - lambda * (1.0 - r0);
    return num / (den * den);
  };
  CHECK(std::abs(toy(0.0, 0.5, 200000) - 2.0) < 1e-3);
  CHECK(std::abs(analytic(0.0, 0.5) - 2.0) == 0.0);
  for (double r0 : {0.0, 0.2, 0.6}) {
    for (double lambda : {0.25, 0.5, 0.8}) {
      CHECK(std::abs(toy(r0, lambda, 200000) - analytic(r0, lambda)) < 1e-3);
    }
  }
}
