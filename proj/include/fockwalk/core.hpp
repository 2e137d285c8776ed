#pragma once

// Dense complex-matrix kernel shared by the walk, Lindblad and protocol layers.
//
// Basis convention for the joint coin (x) Fock space: the coin index is the
// slow index, |e> = 0 and |g> = 1, so basis state |c, n> sits at c * fock_dim + n.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fockwalk {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Coin2 = Eigen::Matrix2cd;

inline constexpr int kExcited = 0;
inline constexpr int kGround = 1;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Raised when population reaches the top of the truncated Fock ladder.
class TruncationFault : public Error {
 public:
  TruncationFault(int step, double leak);
  int step() const noexcept { return step_; }
  double leak() const noexcept { return leak_; }

 private:
  int step_;
  double leak_;
};

struct SystemSpace {
  int fock_dim = 2;

  static SystemSpace with_n_max(int n_max);

  int n_max() const noexcept { return fock_dim - 1; }
  int dim() const noexcept { return 2 * fock_dim; }
  int index(int coin, int n) const noexcept { return coin * fock_dim + n; }
  void validate() const;
};

struct Tolerance {
  double hermitian = 1e-10;
  double trace = 1e-10;
  double min_eigenvalue = -1e-10;
};

// Hermitian, unit-trace, positive semidefinite operator. Construction validates.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix mat, const Tolerance& tol = {});

  static DensityMatrix pure(const CVector& psi);
  static DensityMatrix diagonal(std::span<const double> probabilities);

  int dim() const noexcept { return static_cast<int>(mat_.rows()); }
  const CMatrix& mat() const noexcept { return mat_; }

 private:
  CMatrix mat_;
};

struct ValidationReport {
  double hermitian_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  bool finite = true;
  bool square = true;

  bool ok(const Tolerance& tol = {}) const;
  std::string describe() const;
};

ValidationReport inspect_density(const CMatrix& m);

bool all_finite(const CMatrix& m);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Coin trace of an operator on coin (x) Fock, returning the Fock block sum.
CMatrix partial_trace_coin(const CMatrix& rho, const SystemSpace& space);
DensityMatrix partial_trace_coin(const DensityMatrix& rho, const SystemSpace& space);

CMatrix expm(const CMatrix& m);

// Tr[rho * target], real part. Throws on dimension mismatch.
double fidelity(const DensityMatrix& rho, const DensityMatrix& target);

// Diagonal of the walker marginal, computed without forming the partial trace.
std::vector<double> fock_populations(const CMatrix& rho, const SystemSpace& space);
double coin_excited_population(const CMatrix& rho, const SystemSpace& space);

namespace ops {

CMatrix identity(int dim);
CMatrix annihilation(int fock_dim);
CMatrix creation(int fock_dim);
CMatrix number(int fock_dim);
CMatrix fock_projector(int fock_dim, int n);

Coin2 sigma_minus();  // |g><e|
Coin2 sigma_plus();
Coin2 sigma_x();
Coin2 sigma_z();  // |e><e| - |g><g|
Coin2 coin_projector(int coin);

CMatrix on_coin(const Coin2& op, const SystemSpace& space);
CMatrix on_fock(const CMatrix& op, const SystemSpace& space);

CVector basis_state(const SystemSpace& space, int coin, int n);

}  // namespace ops

DensityMatrix product_state(const SystemSpace& space, int coin, const DensityMatrix& walker);

}  // namespace fockwalk
