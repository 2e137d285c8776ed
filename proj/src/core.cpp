#include "fockwalk/core.hpp"

#include <cmath>
#include <sstream>

namespace fockwalk {

TruncationFault::TruncationFault(int step, double leak)
    : Error([&] {
        std::ostringstream os;
        os << "truncation fault at step " << step << ": P(n >= n_max - 2) = " << leak;
        return os.str();
      }()),
      step_(step),
      leak_(leak) {}

SystemSpace SystemSpace::with_n_max(int n_max) {
  SystemSpace s{n_max + 1};
  s.validate();
  return s;
}

void SystemSpace::validate() const {
  if (fock_dim < 2) throw DimensionError("fock_dim must be at least 2");
}

bool all_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

ValidationReport inspect_density(const CMatrix& m) {
  ValidationReport r;
  r.square = m.rows() == m.cols() && m.rows() > 0;
  r.finite = all_finite(m);
  if (!r.square || !r.finite) return r;
  r.hermitian_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
  r.trace_error = std::abs(m.trace() - cplx(1.0, 0.0));
  const CMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  return r;
}

bool ValidationReport::ok(const Tolerance& tol) const {
  return square && finite && hermitian_error <= tol.hermitian && trace_error <= tol.trace &&
         min_eigenvalue >= tol.min_eigenvalue;
}

std::string ValidationReport::describe() const {
  std::ostringstream os;
  if (!square) return "matrix is not square";
  if (!finite) return "matrix has non-finite entries";
  os << "hermitian error " << hermitian_error << ", trace error " << trace_error
     << ", min eigenvalue " << min_eigenvalue;
  return os.str();
}

DensityMatrix::DensityMatrix(CMatrix mat, const Tolerance& tol) : mat_(std::move(mat)) {
  const auto report = inspect_density(mat_);
  if (!report.ok(tol)) throw ValidationError("invalid density matrix: " + report.describe());
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  const CVector v = psi / psi.norm();
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> probabilities) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(probabilities.size()),
                            static_cast<Eigen::Index>(probabilities.size()));
  for (std::size_t i = 0; i < probabilities.size(); ++i) m(i, i) = probabilities[i];
  return DensityMatrix(std::move(m));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix partial_trace_coin(const CMatrix& rho, const SystemSpace& space) {
  const int f = space.fock_dim;
  if (rho.rows() != space.dim() || rho.cols() != space.dim())
    throw DimensionError("partial_trace_coin: operator is not on coin (x) Fock");
  return rho.block(0, 0, f, f) + rho.block(f, f, f, f);
}

DensityMatrix partial_trace_coin(const DensityMatrix& rho, const SystemSpace& space) {
  return DensityMatrix(partial_trace_coin(rho.mat(), space));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& target) {
  if (rho.dim() != target.dim()) throw DimensionError("fidelity: dimension mismatch");
  // Tr[AB] = sum_ij A_ij B_ji
  const cplx tr = (rho.mat().array() * target.mat().transpose().array()).sum();
  return tr.real();
}

std::vector<double> fock_populations(const CMatrix& rho, const SystemSpace& space) {
  const int f = space.fock_dim;
  std::vector<double> p(static_cast<std::size_t>(f));
  for (int n = 0; n < f; ++n) p[n] = rho(n, n).real() + rho(f + n, f + n).real();
  return p;
}

double coin_excited_population(const CMatrix& rho, const SystemSpace& space) {
  double s = 0.0;
  for (int n = 0; n < space.fock_dim; ++n) s += rho(n, n).real();
  return s;
}

namespace ops {

CMatrix identity(int dim) { return CMatrix::Identity(dim, dim); }

CMatrix annihilation(int fock_dim) {
  CMatrix a = CMatrix::Zero(fock_dim, fock_dim);
  for (int n = 1; n < fock_dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix creation(int fock_dim) { return annihilation(fock_dim).adjoint(); }

CMatrix number(int fock_dim) {
  CMatrix m = CMatrix::Zero(fock_dim, fock_dim);
  for (int n = 0; n < fock_dim; ++n) m(n, n) = static_cast<double>(n);
  return m;
}

CMatrix fock_projector(int fock_dim, int n) {
  if (n < 0 || n >= fock_dim) throw DimensionError("fock_projector: level outside ladder");
  CMatrix m = CMatrix::Zero(fock_dim, fock_dim);
  m(n, n) = 1.0;
  return m;
}

Coin2 sigma_minus() {
  Coin2 m = Coin2::Zero();
  m(kGround, kExcited) = 1.0;
  return m;
}

Coin2 sigma_plus() { return sigma_minus().adjoint(); }

Coin2 sigma_x() { return sigma_minus() + sigma_plus(); }

Coin2 sigma_z() {
  Coin2 m = Coin2::Zero();
  m(kExcited, kExcited) = 1.0;
  m(kGround, kGround) = -1.0;
  return m;
}

Coin2 coin_projector(int coin) {
  Coin2 m = Coin2::Zero();
  m(coin, coin) = 1.0;
  return m;
}

CMatrix on_coin(const Coin2& op, const SystemSpace& space) {
  return kron(CMatrix(op), identity(space.fock_dim));
}

CMatrix on_fock(const CMatrix& op, const SystemSpace& space) {
  if (op.rows() != space.fock_dim || op.cols() != space.fock_dim)
    throw DimensionError("on_fock: operator does not match Fock dimension");
  return kron(identity(2), op);
}

CVector basis_state(const SystemSpace& space, int coin, int n) {
  CVector v = CVector::Zero(space.dim());
  v(space.index(coin, n)) = 1.0;
  return v;
}

}  // namespace ops

DensityMatrix product_state(const SystemSpace& space, int coin, const DensityMatrix& walker) {
  if (walker.dim() != space.fock_dim) throw DimensionError("product_state: walker dimension mismatch");
  return DensityMatrix(kron(CMatrix(ops::coin_projector(coin)), walker.mat()));
}

}  // namespace fockwalk
