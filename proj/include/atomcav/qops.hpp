// qops.hpp - truncated-Fock-space operator algebra
//
// Factor ordering is fixed globally as cavity (x) atom (x) motion; every
// embedding asserts against it. Truncation adequacy rule: operations that
// consume a MotionalState warn when the top two Fock levels hold more than
// 1e-6 of the population.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "atomcav/common.hpp"

namespace atomcav::qops {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct Dims {
  int n_cavity = 3;  // photon levels = max photon number + 1
  int n_phonon = 50;
  static constexpr int n_atom = 2;
  int total() const { return n_cavity * n_atom * n_phonon; }
};
void validate(const Dims& dims);

enum class Factor { cavity = 0, atom = 1, motion = 2 };

/// <m|L|n> = sqrt(n) for m = n-1, else 0.
Matrix ladder_lowering(int n_levels);
Matrix number_operator(int n_levels);

/// Embeds factor-local operators into the full space, identity on unlisted
/// factors. Each factor may appear at most once.
Matrix tensor(const std::vector<std::pair<Factor, Matrix>>& ops, const Dims& dims);

/// Relative max-norm Hermiticity check.
bool is_hermitian(const Matrix& a, double tol = 1e-12);

/// U f(lambda) U^dag for Hermitian input; throws ContractViolation otherwise.
Matrix hermitian_function(const Matrix& op, const std::function<Complex(double)>& f);

// Eigen-decomposition of b + b^dag in the truncated Fock basis. values are
// the position nodes in units of x_zp (ascending); transform columns are the
// orthonormal eigenvectors, sign-fixed so the first nonzero Fock component of
// each column is positive. These are exactly Gauss-Hermite nodes (scaled by
// sqrt(2)) and transform.row(0).^2 the matching weights.
struct PositionGrid {
  Eigen::VectorXd values;
  Eigen::MatrixXd transform;
  int size() const { return int(values.size()); }
};
PositionGrid position_grid(int n_phonon);

// Pure vector or density matrix on the truncated phonon space (Fock basis).
struct MotionalState {
  Vector psi;  // pure state when non-empty
  Matrix rho;  // mixed state otherwise

  static MotionalState pure(Vector v, bool allow_unnormalized = false);
  static MotionalState mixed(Matrix m);
  static MotionalState ground(int n_phonon);

  bool is_pure() const { return psi.size() > 0; }
  int dim() const { return is_pure() ? int(psi.size()) : int(rho.rows()); }
  /// Total population of the top `levels` Fock levels.
  double top_population(int levels = 2) const;
  /// Diagonal of the density in the Fock basis.
  Eigen::VectorXd populations() const;
};

Complex expectation(const Matrix& op, const MotionalState& state);

/// Thermal Fock populations ~ exp(-n / kT_over_wm), normalized over the
/// truncated space; kT_over_wm = 0 gives the pure ground state.
MotionalState thermal_density(int n_phonon, double kT_over_wm,
                              WarningList* warnings = nullptr);

void check_truncation(const MotionalState& state, WarningList* warnings,
                      const char* where);

}  // namespace atomcav::qops
