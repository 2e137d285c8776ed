#pragma once

// Lindblad generators and exact propagation.
//
// d rho/dt = -i[H, rho] + sum_j r_j (C_j rho C_j^dag - 1/2 {C_j^dag C_j, rho})
//
// Superoperators act on vec(rho) with column stacking, vec(A X B) = (B^T (x) A) vec(X),
// which is also Eigen's native (column-major) storage order.

#include <vector>

#include "fockwalk/core.hpp"

namespace fockwalk {

struct Collapse {
  CMatrix op;
  double rate = 0.0;
};

class Lindbladian {
 public:
  Lindbladian(CMatrix hamiltonian, std::vector<Collapse> collapses = {});

  const CMatrix& hamiltonian() const noexcept { return hamiltonian_; }
  const std::vector<Collapse>& collapses() const noexcept { return collapses_; }
  int dim() const noexcept { return static_cast<int>(hamiltonian_.rows()); }

  // Right-hand side of the master equation evaluated on rho.
  CMatrix apply(const CMatrix& rho) const;

 private:
  CMatrix hamiltonian_;
  std::vector<Collapse> collapses_;
};

// H_s = -(delta_g + delta_s) a^dag a + g (a^dag sigma_- + sigma_+ a), hbar = 1.
struct SystemHamiltonian {
  double delta_g = 0.0;
  double delta_s = 0.0;
  double g = 0.0;

  CMatrix matrix(const SystemSpace& space) const;
};

CMatrix liouvillian_matrix(const Lindbladian& l);

DensityMatrix propagate(const Lindbladian& l, const DensityMatrix& rho, double t);

// exp(L t) precomputed once; apply() is a single matrix-vector product.
// Immutable after construction, so concurrent apply() calls are safe.
class LindbladPropagator {
 public:
  LindbladPropagator(const Lindbladian& l, double t);

  double time() const noexcept { return t_; }
  int dim() const noexcept { return dim_; }
  const CMatrix& superoperator() const noexcept { return map_; }

  CMatrix apply(const CMatrix& rho) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

 private:
  int dim_;
  double t_;
  CMatrix map_;
};

// Fixed-step classical RK4 on the master equation. Cross-check only.
CMatrix rk4_propagate(const Lindbladian& l, const CMatrix& rho, double t, int steps);

}  // namespace fockwalk
