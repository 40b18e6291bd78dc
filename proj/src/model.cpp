#include "atomcav/model.hpp"

#include <cmath>
#include <string>

#include "atomcav/scatter.hpp"

namespace atomcav::model {

void validate(const PhysicalParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0))
      throw InvalidParams(std::string(name) + " must be > 0 (got " + std::to_string(v) + ")");
  };
  positive(p.g0, "g0");
  positive(p.gamma, "gamma");
  positive(p.kappa1, "kappa1");
  positive(p.kappa2, "kappa2");
  positive(p.omega_m, "omega_m");
  positive(p.eta, "eta");
  if (p.eps < 0) throw InvalidParams("eps must be >= 0 (got " + std::to_string(p.eps) + ")");
  if (p.kT_over_wm < 0)
    throw InvalidParams("kT_over_wm must be >= 0 (got " + std::to_string(p.kT_over_wm) + ")");
  if (!std::isfinite(p.delta) || !std::isfinite(p.delta0))
    throw InvalidParams("delta and delta0 must be finite");
}

double coupling_g(const PhysicalParams& p, double x_over_xzp) {
  return p.g0 * std::sin(p.kx0 + p.eta * x_over_xzp);
}

static double thermal_n_bar(double kT_over_wm) {
  if (kT_over_wm <= 0) return 0.0;
  const double x = 1.0 / kT_over_wm;
  if (x > 700) return 0.0;
  return 1.0 / std::expm1(x);
}

Derived derive(const PhysicalParams& p) {
  validate(p);
  Derived d;
  d.kappa = p.kappa1 + p.kappa2;
  d.coop = p.g0 * p.g0 / (d.kappa * p.gamma);
  d.coop_in = p.g0 * p.g0 / (p.kappa2 * p.gamma);
  d.gx0 = coupling_g(p, 0.0);
  d.omega_r = p.eta * p.eta * p.omega_m;
  d.beta_max = p.eta * std::sqrt(d.coop / 2.0);
  d.n_bar = thermal_n_bar(p.kT_over_wm);
  d.xT_over_xzp = std::sqrt(2.0 * d.n_bar + 1.0);
  d.eta_eff = p.eta * d.xT_over_xzp;
  if (p.omega_m >= p.gamma / 10.0)
    d.warnings.push_back("regime: omega_m >= gamma/10, unresolved-sideband assumption degraded");
  if (p.omega_m >= d.kappa / 10.0)
    d.warnings.push_back("regime: omega_m >= kappa/10, unresolved-sideband assumption degraded");
  return d;
}

DressedResonance dressed_resonance(const PhysicalParams& p, double x_over_xzp) {
  validate(p);
  if (p.delta == 0.0) throw DivideByZero("dressed_resonance: delta must be nonzero");
  const double g = coupling_g(p, x_over_xzp);
  const double kappa = p.kappa1 + p.kappa2;
  return {g * g / p.delta, p.gamma + kappa * g * g / (p.delta * p.delta)};
}

OptimalDetunings optimal_detunings(const PhysicalParams& p) {
  validate(p);
  if (p.kappa1 <= p.kappa2)
    throw NoCriticalCoupling(
        "optimal_detunings: kappa1 <= kappa2 leaves no real critical-coupling detuning; "
        "fall back to zero_reflectance_detuning's minimization mode");
  const double gx0 = coupling_g(p, 0.0);
  const double delta_star = gx0 * std::sqrt((p.kappa1 - p.kappa2) / p.gamma);
  return {gx0 * gx0 / delta_star, delta_star};
}

double coupling_parameter_beta(const PhysicalParams& p) {
  const DressedResonance dr = dressed_resonance(p, 0.0);
  return p.g0 * p.g0 * p.eta / (p.delta * dr.linewidth);
}

double effective_length(const PhysicalParams& p) {
  validate(p);
  auto reflectance = [&p](double x) {
    const Complex s = scatter::amplitudes_at(p, x).s_r;
    return std::norm(s);
  };
  // Central second difference with one Richardson refinement, h in x_zp units.
  const double h = 1e-3;
  const double r0 = reflectance(0.0);
  auto second = [&](double step) {
    return (reflectance(step) + reflectance(-step) - 2.0 * r0) / (step * step);
  };
  const double coarse = second(h);
  const double fine = second(h / 2.0);
  const double curvature = (4.0 * fine - coarse) / 3.0;
  if (!(curvature > 0))
    throw NotAMinimum("effective_length: reflectance curvature at x0 is not positive (" +
                      std::to_string(curvature) + "); parameters do not realize a minimum");
  return std::sqrt(2.0 / curvature);
}

PhysicalParams with_critical_detunings(PhysicalParams p, double shift_xzp) {
  PhysicalParams probe = p;
  probe.kx0 = p.kx0 + p.eta * shift_xzp;
  const OptimalDetunings od = optimal_detunings(probe);
  p.delta = od.delta_star;
  p.delta0 = od.delta0_star;
  return p;
}

}  // namespace atomcav::model
