#pragma once

#include <random>

#include "fockwalk/core.hpp"

namespace testing_support {

using fockwalk::CMatrix;
using fockwalk::cplx;

inline CMatrix random_complex(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

inline CMatrix random_density(std::mt19937_64& rng, int dim, int rank = -1) {
  const CMatrix g = random_complex(rng, dim, rank < 0 ? dim : rank);
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int dim) {
  const CMatrix g = random_complex(rng, dim, dim);
  return (g + g.adjoint()) / 2.0;
}

inline CMatrix random_unitary(std::mt19937_64& rng, int dim) {
  Eigen::HouseholderQR<CMatrix> qr(random_complex(rng, dim, dim));
  return qr.householderQ() * CMatrix::Identity(dim, dim);
}

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// exp(-i t H) for Hermitian H through its eigendecomposition.
inline CMatrix unitary_by_eigen(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Eigen::VectorXcd phases = (es.eigenvalues().cast<cplx>() * cplx(0.0, -t)).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace testing_support
