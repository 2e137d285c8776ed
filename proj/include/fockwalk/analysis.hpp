#pragma once

// Stationary fidelity budget of the trapped Fock state.
//
// In steady state the loss out of |n_T> (cavity decay over the reset window plus
// the residual ground-state population e^{-M} moving down) balances pumping from
// |n_T - 1>, whose population is alpha (1 - F):
//
//   F (1 - e^{-n_T r M}) + e^{-M} s2 = alpha (1 - F) s2,   s2 = sin^2(pi sqrt(n_T / (n_T + 1)))
//
// with r = gamma_c / gamma_q and reset window t = M / gamma_q. Dropping the
// cavity term to first order and setting s2 -> pi^2 / (4 n_T^2) gives the closed form
//
//   F = pi^2 (alpha - e^{-M}) / (pi^2 alpha + 4 M n_T^3 r).

#include <optional>
#include <span>
#include <vector>

#include "fockwalk/protocol.hpp"

namespace fockwalk {

struct BudgetParams {
  int n_target = 1;
  double wait_multiple = 5.0;  // M
  double alpha = 0.5;
  double rate_ratio = 1e-5;    // gamma_c / gamma_q

  void validate() const;
};

double analytic_fidelity(const BudgetParams& b);

// e^{-M}: coin population left excited after a reset window of M lifetimes,
// which the flip turns into ground-state population.
double residual_ground_population(double wait_multiple);

// sin^2(pi sqrt(n_T) / sqrt(n_T + 1)), the pump and drain probability next to the trap.
double neighbour_transfer(int n_target);

// Signed residual of the balance relation; zero iff (F, b) satisfies it exactly.
double balance_residual(double fidelity, const BudgetParams& b);

// Exact solution of the balance relation for F.
double balance_fidelity(const BudgetParams& b);

struct StationaryPoint {
  int n_target = 0;
  int step = 0;
  double fidelity = 0.0;
  double below_population = 0.0;  // P(n_T - 1)
};

class NotStationaryError : public Error {
 public:
  using Error::Error;
};

// State at stabilization_step + 10. Throws NotStationaryError if the run never settles.
StationaryPoint stationary_point(std::span<const StepRecord> records, int n_target);

struct AlphaEstimate {
  double mean = 0.0;
  double spread = 0.0;  // sample standard deviation over points
  std::vector<double> per_point;
};

// Mean of P(n_T - 1) / (1 - F) over at least three stationary points.
AlphaEstimate estimate_alpha(std::span<const StationaryPoint> points);

struct FidelityCurveRow {
  int n_target = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double alpha = 0.0;
  int stationary_step = 0;
};

// Numerical stationary fidelity against the closed form for each target.
// `base` supplies every protocol parameter except n_T and n_max.
std::vector<FidelityCurveRow> fidelity_curve(const ProtocolParams& base, std::span<const int> n_targets,
                                             double alpha, double wait_multiple, double rate_ratio);

}  // namespace fockwalk
