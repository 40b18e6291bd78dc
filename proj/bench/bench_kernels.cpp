// bench_kernels - serial vs OpenMP sweep kernels and the Liouvillian applier
#include <chrono>
#include <cstdio>

#include "atomcav/lindblad.hpp"
#include "atomcav/model.hpp"
#include "atomcav/sweep.hpp"

using namespace atomcav;
namespace chrono = std::chrono;

namespace {

model::PhysicalParams baseline() {
  model::PhysicalParams p;
  p.g0 = 730.0;
  p.gamma = 6.0;
  p.kappa2 = 3900.0;
  p.kappa1 = 7800.0;
  p.omega_m = 0.16;
  p.eta = 0.24;
  p.kx0 = M_PI / 4.0;
  p.eps = std::sqrt(0.01 * 7800.0);
  return model::with_critical_detunings(p);
}

double seconds_since(chrono::steady_clock::time_point t0) {
  return chrono::duration<double>(chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  const model::PhysicalParams p = baseline();

  // sweep kernel: heating map, serial reference vs parallel
  Eigen::VectorXd dax = sweep::logspace(p.delta / 8, p.delta * 8, 48);
  Eigen::VectorXd d0ax = sweep::logspace(p.delta0 / 8, p.delta0 * 8, 48);
  sweep::Options serial;
  serial.workers = 1;
  serial.n_phonon = 50;
  sweep::Options parallel = serial;
  parallel.workers = 0;  // all threads

  auto t0 = chrono::steady_clock::now();
  sweep::SweepResult a = sweep::heating_map(p, dax, d0ax, serial);
  const double t_serial = seconds_since(t0);

  t0 = chrono::steady_clock::now();
  sweep::SweepResult b = sweep::heating_map(p, dax, d0ax, parallel);
  const double t_parallel = seconds_since(t0);

  double max_diff = 0;
  for (int i = 0; i < a.grid("J_over_eta2").size(); ++i)
    max_diff = std::max(max_diff, std::abs(a.grid("J_over_eta2")(i) -
                                           b.grid("J_over_eta2")(i)));

  std::printf("heating_map 48x48 (n_phonon 50)\n");
  std::printf("  serial   : %8.3f s\n", t_serial);
  std::printf("  parallel : %8.3f s  (workers=%d)\n", t_parallel,
              sweep::detail::resolve_workers(0));
  std::printf("  speedup  : %8.2fx   max |diff| = %.3e\n", t_serial / t_parallel, max_diff);

  // Liouvillian applier at the validation truncation
  lindblad::SimConfig cfg;
  cfg.dims = {3, 50};
  const int d = cfg.dims.total();
  qops::Matrix rho = qops::Matrix::Zero(d, d);
  rho(0, 0) = 1.0;
  auto warm = lindblad::liouvillian_apply(p, cfg.dims, rho);  // includes setup
  (void)warm;

  const int reps = 20;
  t0 = chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) {
    rho(0, 0) = 1.0 + 1e-6 * r;  // defeat any caching
    auto out = lindblad::liouvillian_apply(p, cfg.dims, rho);
    (void)out;
  }
  const double t_app = seconds_since(t0) / reps;
  std::printf("liouvillian_apply dim=%d (one-shot incl. basis transforms): %7.2f ms\n", d,
              1e3 * t_app);
  return 0;
}
