#include "atomcav/qops.hpp"

#include <cmath>
#include <string>

namespace atomcav::qops {

void validate(const Dims& dims) {
  if (dims.n_cavity < 1) throw InvalidDimension("n_cavity must be >= 1");
  if (dims.n_phonon < 1) throw InvalidDimension("n_phonon must be >= 1");
}

Matrix ladder_lowering(int n_levels) {
  if (n_levels < 1) throw InvalidDimension("ladder_lowering: n_levels must be >= 1");
  Matrix l = Matrix::Zero(n_levels, n_levels);
  for (int n = 1; n < n_levels; ++n) l(n - 1, n) = std::sqrt(double(n));
  return l;
}

Matrix number_operator(int n_levels) {
  if (n_levels < 1) throw InvalidDimension("number_operator: n_levels must be >= 1");
  Matrix n = Matrix::Zero(n_levels, n_levels);
  for (int k = 0; k < n_levels; ++k) n(k, k) = double(k);
  return n;
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

int factor_dim(Factor f, const Dims& d) {
  switch (f) {
    case Factor::cavity: return d.n_cavity;
    case Factor::atom: return Dims::n_atom;
    case Factor::motion: return d.n_phonon;
  }
  throw InvalidDimension("unknown factor");
}

}  // namespace

Matrix tensor(const std::vector<std::pair<Factor, Matrix>>& ops, const Dims& dims) {
  validate(dims);
  const Factor order[3] = {Factor::cavity, Factor::atom, Factor::motion};
  Matrix factors[3];
  bool seen[3] = {false, false, false};
  for (const auto& [f, op] : ops) {
    const int idx = int(f);
    if (seen[idx]) throw InvalidDimension("tensor: factor listed twice");
    const int d = factor_dim(f, dims);
    if (op.rows() != d || op.cols() != d)
      throw InvalidDimension("tensor: operator dimension " + std::to_string(op.rows()) +
                             " does not match factor dimension " + std::to_string(d));
    factors[idx] = op;
    seen[idx] = true;
  }
  for (int i = 0; i < 3; ++i)
    if (!seen[i]) factors[i] = Matrix::Identity(factor_dim(order[i], dims), factor_dim(order[i], dims));
  return kron(factors[0], kron(factors[1], factors[2]));
}

bool is_hermitian(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() < tol * scale;
}

Matrix hermitian_function(const Matrix& op, const std::function<Complex(double)>& f) {
  if (op.rows() != op.cols()) throw InvalidDimension("hermitian_function: matrix not square");
  if (!is_hermitian(op))
    throw ContractViolation("hermitian_function: input is not Hermitian to 1e-12 relative");
  Eigen::SelfAdjointEigenSolver<Matrix> es(op);
  if (es.info() != Eigen::Success)
    throw Error("hermitian_function: eigendecomposition failed");
  Vector fl(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < fl.size(); ++i) fl(i) = f(es.eigenvalues()(i));
  return es.eigenvectors() * fl.asDiagonal() * es.eigenvectors().adjoint();
}

PositionGrid position_grid(int n_phonon) {
  if (n_phonon < 1) throw InvalidDimension("position_grid: n_phonon must be >= 1");
  // b + b^dag is real symmetric tridiagonal with zero diagonal and
  // subdiagonal sqrt(k); this is the Jacobi matrix route to Gauss-Hermite.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n_phonon);
  Eigen::VectorXd sub(std::max(n_phonon - 1, 0));
  for (int k = 1; k < n_phonon; ++k) sub(k - 1) = std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw Error("position_grid: tridiagonal solve failed");
  PositionGrid grid{es.eigenvalues(), es.eigenvectors()};
  for (int j = 0; j < n_phonon; ++j) {
    int lead = 0;
    while (lead < n_phonon && std::abs(grid.transform(lead, j)) < 1e-300) ++lead;
    if (lead < n_phonon && grid.transform(lead, j) < 0.0) grid.transform.col(j) *= -1.0;
  }
  return grid;
}

MotionalState MotionalState::pure(Vector v, bool allow_unnormalized) {
  if (v.size() < 1) throw InvalidDimension("MotionalState: empty vector");
  if (!allow_unnormalized && std::abs(v.norm() - 1.0) > 1e-10)
    throw ContractViolation("MotionalState: pure state norm deviates from 1 by more than 1e-10");
  MotionalState s;
  s.psi = std::move(v);
  return s;
}

MotionalState MotionalState::mixed(Matrix m) {
  if (m.rows() < 1 || m.rows() != m.cols())
    throw InvalidDimension("MotionalState: density matrix not square");
  if (!is_hermitian(m, 1e-10))
    throw ContractViolation("MotionalState: density matrix not Hermitian");
  if (std::abs(m.trace().real() - 1.0) > 1e-10 || std::abs(m.trace().imag()) > 1e-10)
    throw ContractViolation("MotionalState: density matrix trace deviates from 1");
  MotionalState s;
  s.rho = std::move(m);
  return s;
}

MotionalState MotionalState::ground(int n_phonon) {
  if (n_phonon < 1) throw InvalidDimension("MotionalState: n_phonon must be >= 1");
  Vector v = Vector::Zero(n_phonon);
  v(0) = 1.0;
  return pure(std::move(v));
}

Eigen::VectorXd MotionalState::populations() const {
  if (is_pure()) return psi.cwiseAbs2();
  return rho.diagonal().real();
}

double MotionalState::top_population(int levels) const {
  const int n = dim();
  const int take = std::min(levels, n);
  return populations().tail(take).sum();
}

Complex expectation(const Matrix& op, const MotionalState& state) {
  if (op.rows() != op.cols()) throw InvalidDimension("expectation: operator not square");
  if (op.rows() != state.dim())
    throw InvalidDimension("expectation: operator/state dimension mismatch");
  if (state.is_pure()) return state.psi.dot(op * state.psi);
  // tr(A rho) without forming the product
  return (op.transpose().cwiseProduct(state.rho)).sum();
}

MotionalState thermal_density(int n_phonon, double kT_over_wm, WarningList* warnings) {
  if (n_phonon < 1) throw InvalidDimension("thermal_density: n_phonon must be >= 1");
  if (kT_over_wm < 0) throw InvalidParams("thermal_density: kT_over_wm must be >= 0");
  if (kT_over_wm == 0.0) return MotionalState::ground(n_phonon);
  Eigen::VectorXd p(n_phonon);
  for (int n = 0; n < n_phonon; ++n) p(n) = std::exp(-double(n) / kT_over_wm);
  p /= p.sum();
  if (p(n_phonon - 1) > 1e-6)
    warn(warnings, "thermal_density: top-level population " + std::to_string(p(n_phonon - 1)) +
                       " exceeds 1e-6; truncation " + std::to_string(n_phonon) + " inadequate");
  Matrix rho = Matrix::Zero(n_phonon, n_phonon);
  rho.diagonal() = p.cast<Complex>();
  return MotionalState::mixed(std::move(rho));
}

void check_truncation(const MotionalState& state, WarningList* warnings, const char* where) {
  const double top2 = state.top_population(2);
  if (top2 > 1e-6)
    warn(warnings, std::string(where) + ": top-two-level population " + std::to_string(top2) +
                       " exceeds 1e-6; result may be truncation-limited");
}

}  // namespace atomcav::qops
