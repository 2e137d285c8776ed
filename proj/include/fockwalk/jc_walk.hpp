#pragma once

// Jaynes-Cummings quantum random walk on the Fock half-line.
//
// One step of the damped walk is Ad X o (E_SE (x) id) o Ad U_JC: a resonant JC
// pulse of duration tau, amplitude damping of the coin with reset parameter
// eta, then a pi flip of the coin. With g*tau*sqrt(n_T + 1) = k*pi the emission
// amplitude out of |e, n_T> vanishes and the walker accumulates at n_T.

#include <array>
#include <vector>

#include "fockwalk/core.hpp"

namespace fockwalk {

struct JCParams {
  double g = 1.0;
  double tau = 0.0;

  // Rabi angle of the {|e,n>, |g,n+1>} doublet.
  double angle(int n) const noexcept;
  void validate() const;
};

// Exact resonant JC propagator exp(-i H_JC tau) on a truncated ladder.
// |g,0> is invariant; the top state |e,n_max> has no partner inside the
// truncation and is left unchanged.
CMatrix jc_unitary(const JCParams& params, const SystemSpace& space);

// sin^2(g tau sqrt(n+1)): probability that an excited coin deposits a photon on |n>.
double emit_probability(const JCParams& params, int n);

class CoinChannel {
 public:
  explicit CoinChannel(double eta);

  double eta() const noexcept { return eta_; }
  const std::array<Coin2, 2>& kraus() const noexcept { return kraus_; }

  Coin2 apply(const Coin2& rho) const;
  // E_SE (x) id on a coin (x) Fock operator.
  CMatrix apply(const CMatrix& rho, const SystemSpace& space) const;
  double completeness_error() const;

 private:
  double eta_;
  std::array<Coin2, 2> kraus_;
};

CoinChannel coin_damping(double eta);

Coin2 coin_flip();      // exp(-i pi sigma_x / 2) = -i sigma_x
Coin2 coin_hadamard();  // (sigma_x + sigma_z) / sqrt(2)

class WalkVariant {
 public:
  enum class Kind { UnitaryHadamard, UnitaryFlip, Damped };

  static WalkVariant unitary_hadamard() { return WalkVariant(Kind::UnitaryHadamard, 1.0); }
  static WalkVariant unitary_flip() { return WalkVariant(Kind::UnitaryFlip, 1.0); }
  static WalkVariant damped(double eta = 0.0);

  Kind kind() const noexcept { return kind_; }
  double eta() const noexcept { return eta_; }

 private:
  WalkVariant(Kind kind, double eta) : kind_(kind), eta_(eta) {}
  Kind kind_;
  double eta_;
};

DensityMatrix walk_step(const DensityMatrix& rho, const WalkVariant& variant, const JCParams& params);

// cos(theta_N) rho cos(theta_N) + a^dag S(N) rho S(N) a with S(N) = sin(theta_N)/sqrt(N+1),
// using the same top-edge convention as jc_unitary.
DensityMatrix reduced_walker_map(const DensityMatrix& rho_w, const JCParams& params);

// k*pi / (g sqrt(n_T + 1))
double trapping_time(double g, int n_target, int k = 1);

// Fock distributions after 0..steps applications of walk_step. Throws
// TruncationFault if P(n >= n_max - 2) reaches 1e-6.
std::vector<std::vector<double>> run_walk(const WalkVariant& variant, const JCParams& params, int steps,
                                          const DensityMatrix& initial);

inline constexpr double kTruncationThreshold = 1e-6;

// P(n >= n_max - 2) for a Fock distribution.
double truncation_leak(std::span<const double> populations);

}  // namespace fockwalk
