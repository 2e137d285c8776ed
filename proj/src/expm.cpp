// Matrix exponential by scaling and squaring with diagonal Pade approximants
// (Higham, "The scaling and squaring method for the matrix exponential
// revisited", SIAM J. Matrix Anal. Appl. 26, 2005).

#include <array>
#include <cmath>

#include "fockwalk/core.hpp"

namespace fockwalk {
namespace {

double one_norm(const CMatrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Builds U (odd part) and V (even part) so that exp(A) ~ (V - U)^{-1} (V + U).
template <std::size_t N>
void pade_low(const CMatrix& a, const std::array<double, N>& b, CMatrix& u, CMatrix& v) {
  const auto n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  CMatrix pow = id;
  CMatrix odd = CMatrix::Zero(n, n);
  CMatrix even = CMatrix::Zero(n, n);
  for (std::size_t k = 0; k < N; k += 2) {
    even += b[k] * pow;
    odd += b[k + 1] * pow;
    if (k + 2 < N) pow = pow * a2;
  }
  u.noalias() = a * odd;
  v = std::move(even);
}

void pade13(const CMatrix& a, CMatrix& u, CMatrix& v) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  const auto n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  CMatrix tmp = b[13] * a6 + b[11] * a4 + b[9] * a2;
  CMatrix odd = a6 * tmp;
  odd += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  u.noalias() = a * odd;
  tmp = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v.noalias() = a6 * tmp;
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace

CMatrix expm(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("expm: matrix is not square");
  if (!all_finite(m)) throw ValidationError("expm: non-finite input");
  const auto n = m.rows();
  if (n == 0) return m;

  static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                               25200.0,    1512.0,    56.0,      1.0};
  static constexpr std::array<double, 10> b9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                                302702400.0,   30270240.0,   2162160.0,
                                                110880.0,      3960.0,       90.0,
                                                1.0};
  static constexpr double theta3 = 1.495585217958292e-2;
  static constexpr double theta5 = 2.539398330063230e-1;
  static constexpr double theta7 = 9.504178996162932e-1;
  static constexpr double theta9 = 2.097847961257068e0;
  static constexpr double theta13 = 5.371920351148152e0;

  const double norm = one_norm(m);
  CMatrix u, v;
  int squarings = 0;
  if (norm <= theta3) {
    pade_low(m, b3, u, v);
  } else if (norm <= theta5) {
    pade_low(m, b5, u, v);
  } else if (norm <= theta7) {
    pade_low(m, b7, u, v);
  } else if (norm <= theta9) {
    pade_low(m, b9, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
    const CMatrix scaled = m / std::ldexp(1.0, squarings);
    pade13(scaled, u, v);
  }

  CMatrix result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace fockwalk
