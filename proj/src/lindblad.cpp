#include "atomcav/lindblad.hpp"

#include <cmath>
#include <deque>
#include <string>

namespace atomcav::lindblad {

namespace {

constexpr Complex kI{0.0, 1.0};

void validate_config(const PhysicalParams& p, const SimConfig& cfg) {
  model::validate(p);
  qops::validate(cfg.dims);
  if (cfg.dt < 0) throw InvalidParams("SimConfig: dt must be >= 0");
  if (!(cfg.conv_tol > 0 && cfg.conv_tol < 1))
    throw InvalidParams("SimConfig: conv_tol must lie in (0, 1)");
  if (cfg.conv_window < 0 || cfg.t_max < 0)
    throw InvalidParams("SimConfig: conv_window and t_max must be >= 0");
  if (cfg.rel_tol <= 0) throw InvalidParams("SimConfig: rel_tol must be > 0");
}

// Position-basis workhorse. The motional factor is kept in the eigenbasis of
// b + b^dag, where g(x) and the recoil phase are diagonal and only the trap
// term omega_m b^dag b is dense. Row index r = (c*2 + s)*n_m + i.
class Engine {
 public:
  Engine(const PhysicalParams& p, const Dims& dims, bool recoil)
      : p_(p), dims_(dims), n_m_(dims.n_phonon), n_c_(dims.n_cavity), d_(dims.total()) {
    grid_ = qops::position_grid(n_m_);
    u_ = grid_.transform.cast<Complex>();
    n_pos_real_ = grid_.transform.transpose() *
                  Eigen::VectorXd::LinSpaced(n_m_, 0.0, double(n_m_ - 1)).asDiagonal() *
                  grid_.transform;
    n_pos_ = n_pos_real_.cast<Complex>();

    g_nodes_.resize(n_m_);
    v_nodes_.resize(n_m_);
    for (int i = 0; i < n_m_; ++i) {
      const double kcx = p.kx0 + p.eta * grid_.values(i);
      g_nodes_(i) = p.g0 * std::sin(kcx);
      v_nodes_(i) = recoil ? std::exp(-kI * kcx) : Complex(1.0, 0.0);
    }

    base_diag_.resize(d_);
    g_tiled_.resize(d_);
    cnum_.resize(d_);
    evec_.resize(d_);
    for (int c = 0; c < n_c_; ++c)
      for (int s = 0; s < 2; ++s)
        for (int i = 0; i < n_m_; ++i) {
          const int r = (c * 2 + s) * n_m_ + i;
          base_diag_(r) = -(p.delta + p.delta0) * c - p.delta0 * s;
          g_tiled_(r) = g_nodes_(i);
          cnum_(r) = double(c);
          evec_(r) = double(s);
        }
    kappa_ = p.kappa1 + p.kappa2;
    hx_.resize(d_, d_);
    tmp_.resize(d_, d_);
  }

  int dim() const { return d_; }
  int blk(int c, int s) const { return (c * 2 + s) * n_m_; }
  int cblk(int c) const { return c * 2 * n_m_; }

  // out = L(x)
  void apply(const Matrix& x, Matrix& out) {
    // H x
    hx_ = base_diag_.asDiagonal() * x;
    left_drive(x, hx_);
    left_jc(x, hx_);
    for (int k = 0; k < 2 * n_c_; ++k)
      hx_.middleRows(k * n_m_, n_m_).noalias() +=
          p_.omega_m * (n_pos_ * x.middleRows(k * n_m_, n_m_));
    out = -kI * hx_;

    // x H
    hx_ = x * base_diag_.asDiagonal();
    right_drive(x, hx_);
    right_jc(x, hx_);
    for (int k = 0; k < 2 * n_c_; ++k)
      hx_.middleCols(k * n_m_, n_m_).noalias() +=
          p_.omega_m * (x.middleCols(k * n_m_, n_m_) * n_pos_);
    out += kI * hx_;

    // kappa D[a]
    const int b2 = 2 * n_m_;
    for (int c = 0; c + 1 < n_c_; ++c)
      for (int cp = 0; cp + 1 < n_c_; ++cp)
        out.block(cblk(c), cblk(cp), b2, b2) +=
            kappa_ * std::sqrt(double((c + 1) * (cp + 1))) *
            x.block(cblk(c + 1), cblk(cp + 1), b2, b2);
    out -= (kappa_ / 2.0) * (cnum_.asDiagonal() * x).eval();
    out -= (kappa_ / 2.0) * (x * cnum_.asDiagonal()).eval();

    // gamma D[sigma (x) recoil phase]
    for (int c = 0; c < n_c_; ++c)
      for (int cp = 0; cp < n_c_; ++cp)
        out.block(blk(c, 0), blk(cp, 0), n_m_, n_m_) +=
            p_.gamma * (v_nodes_.asDiagonal() * x.block(blk(c, 1), blk(cp, 1), n_m_, n_m_) *
                        v_nodes_.conjugate().asDiagonal());
    out -= (p_.gamma / 2.0) * (evec_.asDiagonal() * x).eval();
    out -= (p_.gamma / 2.0) * (x * evec_.asDiagonal()).eval();
  }

  Matrix to_position(const Matrix& rho_fock) const {
    Matrix out(d_, d_);
    const int blocks = 2 * n_c_;
    Matrix half(d_, d_);
    for (int k = 0; k < blocks; ++k)
      half.middleRows(k * n_m_, n_m_).noalias() =
          u_.adjoint() * rho_fock.middleRows(k * n_m_, n_m_);
    for (int k = 0; k < blocks; ++k)
      out.middleCols(k * n_m_, n_m_).noalias() =
          half.middleCols(k * n_m_, n_m_) * u_;
    return out;
  }

  Matrix to_fock(const Matrix& rho_pos) const {
    Matrix out(d_, d_);
    const int blocks = 2 * n_c_;
    Matrix half(d_, d_);
    for (int k = 0; k < blocks; ++k)
      half.middleRows(k * n_m_, n_m_).noalias() =
          u_ * rho_pos.middleRows(k * n_m_, n_m_);
    for (int k = 0; k < blocks; ++k)
      out.middleCols(k * n_m_, n_m_).noalias() =
          half.middleCols(k * n_m_, n_m_) * u_.adjoint();
    return out;
  }

  Matrix initial_state(WarningList* warnings) const {
    Matrix rho = Matrix::Zero(d_, d_);
    Matrix motion(n_m_, n_m_);
    if (p_.kT_over_wm == 0.0) {
      Eigen::VectorXd col = grid_.transform.row(0).transpose();
      motion = (col * col.transpose()).cast<Complex>();
    } else {
      qops::MotionalState th = qops::thermal_density(n_m_, p_.kT_over_wm, warnings);
      motion = u_.adjoint() * th.rho * u_;
    }
    rho.block(blk(0, 0), blk(0, 0), n_m_, n_m_) = motion;
    return rho;
  }

  double cavity_population(const Matrix& rho) const {
    double acc = 0;
    for (int r = 0; r < d_; ++r) acc += cnum_(r).real() * rho(r, r).real();
    return acc;
  }

  double phonon_weighted_trace(const Matrix& rho) const {
    // tr(N_b rho) over the full space
    double acc = 0;
    for (int k = 0; k < 2 * n_c_; ++k)
      acc += n_pos_real_
                 .cwiseProduct(rho.block(k * n_m_, k * n_m_, n_m_, n_m_).real().transpose())
                 .sum();
    return acc;
  }

  Matrix cavity_jump(const Matrix& rho) const {  // a rho a^dag
    Matrix out = Matrix::Zero(d_, d_);
    const int b2 = 2 * n_m_;
    for (int c = 0; c + 1 < n_c_; ++c)
      for (int cp = 0; cp + 1 < n_c_; ++cp)
        out.block(cblk(c), cblk(cp), b2, b2) =
            std::sqrt(double((c + 1) * (cp + 1))) *
            rho.block(cblk(c + 1), cblk(cp + 1), b2, b2);
    return out;
  }

  Matrix atom_jump(const Matrix& rho) const {  // L rho L^dag, L = sigma (x) phase
    Matrix out = Matrix::Zero(d_, d_);
    for (int c = 0; c < n_c_; ++c)
      for (int cp = 0; cp < n_c_; ++cp)
        out.block(blk(c, 0), blk(cp, 0), n_m_, n_m_) =
            v_nodes_.asDiagonal() * rho.block(blk(c, 1), blk(cp, 1), n_m_, n_m_) *
            v_nodes_.conjugate().asDiagonal();
    return out;
  }

  Complex cavity_amplitude(const Matrix& rho) const {  // tr(a rho)
    Complex acc = 0;
    for (int c = 0; c + 1 < n_c_; ++c)
      for (int s = 0; s < 2; ++s)
        for (int i = 0; i < n_m_; ++i) {
          const int r = blk(c, s) + i;
          const int rp = blk(c + 1, s) + i;
          acc += std::sqrt(double(c + 1)) * rho(rp, r);
        }
    return acc;
  }

  // rho_c = c rho c^dag with c = alpha + sqrt(kappa1) a, alpha = eps/sqrt(kappa1)
  Matrix conditioned(const Matrix& rho) const {
    const double alpha = p_.eps / std::sqrt(p_.kappa1);
    const double sk = std::sqrt(p_.kappa1);
    Matrix arho = Matrix::Zero(d_, d_);
    const int b2 = 2 * n_m_;
    for (int c = 0; c + 1 < n_c_; ++c)
      arho.middleRows(cblk(c), b2) =
          std::sqrt(double(c + 1)) * rho.middleRows(cblk(c + 1), b2);
    Matrix out = alpha * alpha * rho + alpha * sk * (arho + arho.adjoint());
    out += p_.kappa1 * cavity_jump(rho);
    return out;
  }

  double reflected_flux(const Matrix& rho) const {  // tr(c^dag c rho)
    const double alpha = p_.eps / std::sqrt(p_.kappa1);
    const double trace = rho.trace().real();
    const Complex a_amp = cavity_amplitude(rho);
    return alpha * alpha * trace + 2.0 * alpha * std::sqrt(p_.kappa1) * a_amp.real() +
           p_.kappa1 * cavity_population(rho);
  }

 private:
  void left_drive(const Matrix& x, Matrix& acc) const {
    const int b2 = 2 * n_m_;
    for (int c = 1; c < n_c_; ++c) {
      const Complex up = -kI * p_.eps * std::sqrt(double(c));
      acc.middleRows(cblk(c), b2) += up * x.middleRows(cblk(c - 1), b2);
      acc.middleRows(cblk(c - 1), b2) -= up * x.middleRows(cblk(c), b2);
    }
  }
  void right_drive(const Matrix& x, Matrix& acc) const {
    const int b2 = 2 * n_m_;
    for (int c = 1; c < n_c_; ++c) {
      const Complex up = -kI * p_.eps * std::sqrt(double(c));
      acc.middleCols(cblk(c - 1), b2) += up * x.middleCols(cblk(c), b2);
      acc.middleCols(cblk(c), b2) -= up * x.middleCols(cblk(c - 1), b2);
    }
  }
  void left_jc(const Matrix& x, Matrix& acc) {
    tmp_ = g_tiled_.asDiagonal() * x;
    for (int c = 1; c < n_c_; ++c) {
      const double root = std::sqrt(double(c));
      acc.middleRows(blk(c - 1, 1), n_m_) += root * tmp_.middleRows(blk(c, 0), n_m_);
      acc.middleRows(blk(c, 0), n_m_) += root * tmp_.middleRows(blk(c - 1, 1), n_m_);
    }
  }
  void right_jc(const Matrix& x, Matrix& acc) {
    tmp_ = x * g_tiled_.asDiagonal();
    for (int c = 1; c < n_c_; ++c) {
      const double root = std::sqrt(double(c));
      acc.middleCols(blk(c - 1, 1), n_m_) += root * tmp_.middleCols(blk(c, 0), n_m_);
      acc.middleCols(blk(c, 0), n_m_) += root * tmp_.middleCols(blk(c - 1, 1), n_m_);
    }
  }

  PhysicalParams p_;
  Dims dims_;
  int n_m_, n_c_, d_;
  double kappa_ = 0;
  qops::PositionGrid grid_;
  Matrix u_;
  Eigen::MatrixXd n_pos_real_;
  Matrix n_pos_;
  Eigen::VectorXd g_nodes_;
  Vector v_nodes_;
  Vector base_diag_, g_tiled_, cnum_, evec_;
  Matrix hx_, tmp_;

 public:
  const qops::PositionGrid& grid() const { return grid_; }
};

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                          e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
};

class Integrator {
 public:
  Integrator(Engine& eng, const SimConfig& cfg, double dt0)
      : eng_(eng), adaptive_(cfg.integrator == SimConfig::Integrator::adaptive_rk45),
        rel_tol_(cfg.rel_tol), dt_(dt0) {
    const int d = eng.dim();
    for (auto* m : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_})
      m->resize(d, d);
    fsal_valid_ = false;
  }

  double dt() const { return dt_; }

  // One accepted step from t; returns the step actually taken.
  double step(Matrix& y, double t, double t_limit) {
    if (!adaptive_) {
      const double h = std::min(dt_, t_limit - t);
      rk4(y, h);
      return h;
    }
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double h = std::min(dt_, t_limit - t);
      const double err = dopri_attempt(y, h);
      if (err <= 1.0) {
        y.swap(ytmp_);
        k1_.swap(k7_);  // FSAL: k1 now holds f(y)
        fsal_valid_ = true;
        const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        dt_ = h * std::clamp(grow, 0.3, 2.0);
        return h;
      }
      fsal_valid_ = false;
      dt_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      if (dt_ < 1e-18) throw Error("adaptive integrator: step size underflow");
    }
    throw Error("adaptive integrator: repeated step rejection");
  }

 private:
  void rk4(Matrix& y, double h) {
    eng_.apply(y, k1_);
    ytmp_ = y + (h / 2) * k1_;
    eng_.apply(ytmp_, k2_);
    ytmp_ = y + (h / 2) * k2_;
    eng_.apply(ytmp_, k3_);
    ytmp_ = y + h * k3_;
    eng_.apply(ytmp_, k4_);
    y += (h / 6) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

  // Returns the scaled error norm; candidate state lands in ytmp_, k7_ = f(ytmp_).
  double dopri_attempt(const Matrix& y, double h) {
    using T = Dopri5;
    if (!fsal_valid_) eng_.apply(y, k1_);
    ytmp_ = y + (h * T::a21) * k1_;
    eng_.apply(ytmp_, k2_);
    ytmp_ = y + h * (T::a31 * k1_ + T::a32 * k2_);
    eng_.apply(ytmp_, k3_);
    ytmp_ = y + h * (T::a41 * k1_ + T::a42 * k2_ + T::a43 * k3_);
    eng_.apply(ytmp_, k4_);
    ytmp_ = y + h * (T::a51 * k1_ + T::a52 * k2_ + T::a53 * k3_ + T::a54 * k4_);
    eng_.apply(ytmp_, k5_);
    ytmp_ = y + h * (T::a61 * k1_ + T::a62 * k2_ + T::a63 * k3_ + T::a64 * k4_ + T::a65 * k5_);
    eng_.apply(ytmp_, k6_);
    ytmp_ = y + h * (T::b1 * k1_ + T::b3 * k3_ + T::b4 * k4_ + T::b5 * k5_ + T::b6 * k6_);
    eng_.apply(ytmp_, k7_);
    const double scale_y = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
    const double atol = 1e-13 * scale_y;
    double err = 0;
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        const Complex e = h * (T::e1 * k1_(i, j) + T::e3 * k3_(i, j) + T::e4 * k4_(i, j) +
                               T::e5 * k5_(i, j) + T::e6 * k6_(i, j) + T::e7 * k7_(i, j));
        const double sc = atol + rel_tol_ * std::max(std::abs(y(i, j)), std::abs(ytmp_(i, j)));
        err = std::max(err, std::abs(e) / sc);
      }
    return err;
  }

  Engine& eng_;
  bool adaptive_;
  double rel_tol_;
  double dt_;
  bool fsal_valid_;
  Matrix k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_;
};

double default_window(const PhysicalParams& p) {
  double linewidth = p.gamma;
  if (p.delta != 0.0) {
    const double g = model::coupling_g(p, 0.0);
    linewidth = p.gamma + (p.kappa1 + p.kappa2) * g * g / (p.delta * p.delta);
  }
  return 10.0 / linewidth;
}

struct SteadyOutcome {
  Matrix rho_pos;
  ConvergenceReport report;
};

SteadyOutcome run_steady(Engine& eng, const PhysicalParams& p, const SimConfig& cfg,
                         const Resolved& res) {
  SteadyOutcome out;
  out.rho_pos = eng.initial_state(nullptr);
  out.report.integrator =
      cfg.integrator == SimConfig::Integrator::adaptive_rk45 ? "rk45-adaptive" : "rk4-fixed";
  out.report.dt = res.dt;
  if (p.eps == 0.0) {
    out.report.converged = true;
    return out;
  }

  Integrator stepper(eng, cfg, res.dt);
  std::deque<std::pair<double, double>> samples;  // (t, cavity population)
  samples.emplace_back(0.0, eng.cavity_population(out.rho_pos));
  double t = 0.0;
  while (t < res.t_max) {
    const double h = stepper.step(out.rho_pos, t, res.t_max);
    t += h;
    samples.emplace_back(t, eng.cavity_population(out.rho_pos));
    while (!samples.empty() && samples.front().first < t - res.conv_window)
      samples.pop_front();
    if (samples.size() >= 4 && samples.front().first <= t - res.conv_window * 0.999) {
      double lo = samples.front().second, hi = lo, mean = 0;
      for (const auto& [ts, v] : samples) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        mean += v;
      }
      mean /= double(samples.size());
      out.report.variation = (hi - lo) / std::max(std::abs(mean), 1e-300);
      if (out.report.variation < cfg.conv_tol) {
        out.report.converged = true;
        out.report.t_final = t;
        out.report.dt = stepper.dt();
        return out;
      }
    }
  }
  out.report.converged = false;
  out.report.t_final = t;
  out.report.dt = stepper.dt();
  return out;
}

}  // namespace

Resolved resolve(const PhysicalParams& p, const SimConfig& cfg) {
  validate_config(p, cfg);
  Resolved r;
  r.dt = cfg.dt > 0 ? cfg.dt : 0.02 / (p.kappa1 + p.kappa2);
  r.conv_window = cfg.conv_window > 0 ? cfg.conv_window : default_window(p);
  r.t_max = cfg.t_max > 0 ? cfg.t_max : 20.0 * r.conv_window;
  if (!(r.t_max > r.conv_window))
    throw InvalidParams("SimConfig: t_max must exceed conv_window");
  return r;
}

Matrix hamiltonian(const PhysicalParams& p, const Dims& dims) {
  model::validate(p);
  qops::validate(dims);
  using qops::Factor;
  const Matrix a = qops::ladder_lowering(dims.n_cavity);
  const Matrix b = qops::ladder_lowering(dims.n_phonon);
  Matrix sigma = Matrix::Zero(2, 2);
  sigma(0, 1) = 1.0;  // |down><up|
  const Matrix x_op = b + b.adjoint();
  const Matrix g_of_x = qops::hermitian_function(
      x_op, [&p](double u) { return Complex(p.g0 * std::sin(p.kx0 + p.eta * u), 0.0); });

  Matrix h = qops::tensor({{Factor::cavity, (-(p.delta + p.delta0) *
                                             qops::number_operator(dims.n_cavity))
                                                .eval()}},
                          dims);
  h += qops::tensor({{Factor::atom, (-p.delta0 * (sigma.adjoint() * sigma)).eval()}}, dims);
  const Matrix jc = qops::tensor(
      {{Factor::cavity, a.adjoint().eval()}, {Factor::atom, sigma}, {Factor::motion, g_of_x}},
      dims);
  h += jc + jc.adjoint();
  const Matrix drive = (-kI * p.eps * (a.adjoint() - a)).eval();
  h += qops::tensor({{Factor::cavity, drive}}, dims);
  h += qops::tensor({{Factor::motion, (p.omega_m * qops::number_operator(dims.n_phonon)).eval()}},
                    dims);
  return h;
}

Matrix liouvillian_apply(const PhysicalParams& p, const Dims& dims, const Matrix& rho) {
  model::validate(p);
  qops::validate(dims);
  if (rho.rows() != dims.total() || rho.cols() != dims.total())
    throw InvalidDimension("liouvillian_apply: state dimension mismatch");
  Engine eng(p, dims, true);
  Matrix pos = eng.to_position(rho);
  Matrix out(dims.total(), dims.total());
  eng.apply(pos, out);
  return eng.to_fock(out);
}

SteadyStateResult steady_state(const PhysicalParams& p, const SimConfig& cfg) {
  const Resolved res = resolve(p, cfg);
  Engine eng(p, cfg.dims, cfg.recoil);
  SteadyOutcome out = run_steady(eng, p, cfg, res);
  Matrix rho = eng.to_fock(out.rho_pos);
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  return {std::move(rho), out.report};
}

HeatingResult me_heating(const PhysicalParams& p, const SimConfig& cfg) {
  if (p.eps <= 0) throw InvalidParams("me_heating: eps must be > 0");
  const Resolved res = resolve(p, cfg);
  Engine eng(p, cfg.dims, cfg.recoil);
  SteadyOutcome out = run_steady(eng, p, cfg, res);
  const double flux = p.eps * p.eps / p.kappa1;
  HeatingResult h;
  const double cavity_weighted = eng.phonon_weighted_trace(eng.cavity_jump(out.rho_pos));
  h.J_r = p.kappa1 * cavity_weighted / flux;
  h.J_t = p.kappa2 * cavity_weighted / flux;
  h.J_a = p.gamma * eng.phonon_weighted_trace(eng.atom_jump(out.rho_pos)) / flux;
  h.report = out.report;
  return h;
}

Eigen::VectorXd me_g2(const PhysicalParams& p, const SimConfig& cfg,
                      const Eigen::VectorXd& times, ConvergenceReport* report) {
  if (times.size() == 0) return {};
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (times(i) < 0) throw InvalidParams("me_g2: times must be >= 0");
    if (i > 0 && times(i) < times(i - 1))
      throw InvalidParams("me_g2: times must be nondecreasing");
  }
  const Resolved res = resolve(p, cfg);
  Engine eng(p, cfg.dims, cfg.recoil);
  SteadyOutcome out = run_steady(eng, p, cfg, res);
  if (report) *report = out.report;

  const double flux_ss = eng.reflected_flux(out.rho_pos);
  if (flux_ss < 1e-14)
    throw UndefinedCorrelator("me_g2: steady reflected flux " + std::to_string(flux_ss) +
                              " below 1e-14");
  Matrix conditioned = eng.conditioned(out.rho_pos);
  const double weight = conditioned.trace().real();
  if (weight < 1e-14)
    throw UndefinedCorrelator("me_g2: conditioned state weight below 1e-14");
  conditioned /= weight;

  Integrator stepper(eng, cfg, res.dt);
  Eigen::VectorXd g2(times.size());
  double t = 0.0;
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    while (t < times(k) * (1.0 - 1e-12) && times(k) - t > 1e-15) {
      t += stepper.step(conditioned, t, times(k));
    }
    g2(k) = eng.reflected_flux(conditioned) * weight / (flux_ss * flux_ss);
  }
  return g2;
}

}  // namespace atomcav::lindblad
