#include "fockwalk/lindblad.hpp"

#include <cmath>

namespace fockwalk {

Lindbladian::Lindbladian(CMatrix hamiltonian, std::vector<Collapse> collapses)
    : hamiltonian_(std::move(hamiltonian)), collapses_(std::move(collapses)) {
  const auto d = hamiltonian_.rows();
  if (d == 0 || hamiltonian_.cols() != d) throw DimensionError("Lindbladian: Hamiltonian must be square");
  if (!all_finite(hamiltonian_)) throw ValidationError("Lindbladian: non-finite Hamiltonian");
  if ((hamiltonian_ - hamiltonian_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("Lindbladian: Hamiltonian is not Hermitian");
  for (const auto& c : collapses_) {
    if (c.op.rows() != d || c.op.cols() != d) throw DimensionError("Lindbladian: collapse operator dimension mismatch");
    if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) throw ValidationError("Lindbladian: rates must be non-negative");
    if (!all_finite(c.op)) throw ValidationError("Lindbladian: non-finite collapse operator");
  }
}

CMatrix Lindbladian::apply(const CMatrix& rho) const {
  const cplx minus_i(0.0, -1.0);
  CMatrix out = minus_i * (hamiltonian_ * rho - rho * hamiltonian_);
  for (const auto& c : collapses_) {
    if (c.rate == 0.0) continue;
    const CMatrix cdc = c.op.adjoint() * c.op;
    out += c.rate * (c.op * rho * c.op.adjoint() - 0.5 * (cdc * rho + rho * cdc));
  }
  return out;
}

CMatrix SystemHamiltonian::matrix(const SystemSpace& space) const {
  const CMatrix a = ops::on_fock(ops::annihilation(space.fock_dim), space);
  const CMatrix sm = ops::on_coin(ops::sigma_minus(), space);
  const CMatrix ad = a.adjoint();
  return -(delta_g + delta_s) * (ad * a) + g * (ad * sm + sm.adjoint() * a);
}

CMatrix liouvillian_matrix(const Lindbladian& l) {
  const int d = l.dim();
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix& h = l.hamiltonian();
  const cplx minus_i(0.0, -1.0);
  CMatrix out = minus_i * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& c : l.collapses()) {
    if (c.rate == 0.0) continue;
    const CMatrix cdc = c.op.adjoint() * c.op;
    out += c.rate * (kron(c.op.conjugate(), c.op) - 0.5 * (kron(id, cdc) + kron(cdc.transpose(), id)));
  }
  return out;
}

namespace {

CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

CMatrix unvec(const CVector& v, int d) { return Eigen::Map<const CMatrix>(v.data(), d, d); }

}  // namespace

LindbladPropagator::LindbladPropagator(const Lindbladian& l, double t) : dim_(l.dim()), t_(t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("propagation time must be non-negative");
  map_ = expm(liouvillian_matrix(l) * t);
}

CMatrix LindbladPropagator::apply(const CMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw DimensionError("propagator: state dimension mismatch");
  return unvec(map_ * vec(rho), dim_);
}

DensityMatrix LindbladPropagator::apply(const DensityMatrix& rho) const {
  CMatrix out = apply(rho.mat());
  const auto report = inspect_density(out);
  if (!report.ok()) throw ValidationError("unstable Lindblad propagation: " + report.describe());
  return DensityMatrix(std::move(out));
}

DensityMatrix propagate(const Lindbladian& l, const DensityMatrix& rho, double t) {
  if (rho.dim() != l.dim()) throw DimensionError("propagate: state dimension mismatch");
  if (t == 0.0) return rho;
  return LindbladPropagator(l, t).apply(rho);
}

CMatrix rk4_propagate(const Lindbladian& l, const CMatrix& rho, double t, int steps) {
  if (steps < 1) throw ValidationError("rk4_propagate: steps must be positive");
  const double h = t / steps;
  CMatrix r = rho;
  for (int i = 0; i < steps; ++i) {
    const CMatrix k1 = l.apply(r);
    const CMatrix k2 = l.apply(r + 0.5 * h * k1);
    const CMatrix k3 = l.apply(r + 0.5 * h * k2);
    const CMatrix k4 = l.apply(r + h * k3);
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return r;
}

}  // namespace fockwalk
