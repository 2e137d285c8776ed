#pragma once

// Noisy cavity-QED realization of the damped JC walk.
//
// Each step: resonant JC pulse of duration tau_T (1 + dtau), a STED-assisted
// decay phase of length tau_gamma (coin reset at gamma_sted, cavity loss at
// gamma_c, cavity detuned by delta_g), then a coin flip exp(-i pi (1 + dx) sigma_x / 2).
// All rates are in units of the bare emitter decay rate gamma, times in 1/gamma.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fockwalk/core.hpp"
#include "fockwalk/lindblad.hpp"

namespace fockwalk {

enum class JcPhaseModel {
  Unitary,   // exact resonant JC evolution, no loss during the pulse
  Lindblad,  // pulse propagated with sigma_- at gamma and a at gamma_c
};

enum class DecayCoupling {
  Off,       // JC coupling fully switched off while the coin resets
  Detuned,   // coupling kept, cavity detuned by delta_g (dense Liouvillian)
};

struct ProtocolParams {
  double g = 30.0;
  double delta_g = 300.0;
  double gamma = 1.0;
  double gamma_c = 0.1;
  double gamma_sted = 1e4;
  double sigma_n = 0.0;
  int n_target = 6;
  int k = 1;
  std::optional<int> n_max;         // default: default_n_max()
  int steps = 150;
  int trajectories = 200;
  std::uint64_t seed = 1;
  std::optional<double> tau_gamma;  // default: 5 / gamma_sted
  JcPhaseModel jc_phase = JcPhaseModel::Unitary;
  DecayCoupling decay_coupling = DecayCoupling::Off;
  int threads = 1;

  // n_T + 10 without timing noise. With noise the leaked population climbs to
  // the next trapping levels (n + 1 = 4 (n_T + 1), 9 (n_T + 1)), so the ladder
  // is extended past the second of them.
  int default_n_max() const noexcept;
  int resolved_n_max() const noexcept { return n_max.value_or(default_n_max()); }
  double decay_time() const noexcept { return tau_gamma.value_or(5.0 / gamma_sted); }
  double trapping_time() const;
  int effective_trajectories() const noexcept { return sigma_n == 0.0 ? 1 : trajectories; }
  SystemSpace space() const { return SystemSpace::with_n_max(resolved_n_max()); }

  // Copy with every optional filled in.
  ProtocolParams resolved() const;
  void validate() const;
};

struct NoiseDraws {
  double delta_tau = 0.0;
  double delta_x = 0.0;
};

struct StepRecord {
  int step = 0;
  double fidelity = 0.0;
  double fidelity_std = 0.0;
  std::vector<double> populations;
  double coin_excited = 0.0;
  double leak = 0.0;             // P(n > n_T)
  double truncation_leak = 0.0;  // P(n >= n_max - 2)
};

CMatrix noisy_jc_unitary(const ProtocolParams& p, double delta_tau);

Coin2 flip_operator(double delta_x);

// Exact decay phase for DecayCoupling::Off: amplitude damping of the coin,
// amplitude damping of the cavity and the free detuning rotation, which all
// commute. Equivalent to exponentiating the full Liouvillian but O(dim^2).
class FactorizedDecay {
 public:
  FactorizedDecay(const SystemSpace& space, double coin_rate, double cavity_rate, double detuning, double t);

  void apply(CMatrix& rho) const;
  int loss_orders() const noexcept { return static_cast<int>(weights_.size()); }

 private:
  SystemSpace space_;
  double coin_survival_;
  // weights_[k][n] = sqrt(C(n+k, k) p^n (1-p)^k): amplitude for |n+k> -> |n>.
  std::vector<std::vector<double>> weights_;
  CMatrix phases_;
};

// Propagates a single trajectory. Immutable after construction.
class ProtocolEngine {
 public:
  explicit ProtocolEngine(const ProtocolParams& params);

  const ProtocolParams& params() const noexcept { return params_; }
  const SystemSpace& space() const noexcept { return space_; }

  void jc_phase(CMatrix& rho, double delta_tau) const;
  void decay_phase(CMatrix& rho) const;
  void flip(CMatrix& rho, double delta_x) const;
  void step(CMatrix& rho, const NoiseDraws& draws) const;

  // Lindbladian of the decay phase as used by the dense route.
  Lindbladian decay_lindbladian() const;

 private:
  ProtocolParams params_;
  SystemSpace space_;
  double tau_t_;
  std::optional<FactorizedDecay> factorized_;
  std::shared_ptr<const LindbladPropagator> dense_decay_;
  std::shared_ptr<const LindbladPropagator> lossy_jc_;
};

DensityMatrix initial_state(const SystemSpace& space);

DensityMatrix protocol_step(const DensityMatrix& rho, const ProtocolParams& p, const NoiseDraws& draws);

StepRecord make_record(const CMatrix& rho, const SystemSpace& space, int n_target, int step);

// Per-step records 0..steps from rho_0 = |e><e| (x) |0><0|, averaging the
// density matrix over trajectories. Bitwise deterministic in (params, seed)
// regardless of params.threads.
std::vector<StepRecord> run_protocol(const ProtocolParams& p);

// Normal draws for trajectory `index`, independent of every other trajectory.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t index, double sigma);
  NoiseDraws next();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  bool active_;
};

// First step s from which every 11-sample window [s', s' + window] (s' >= s)
// has fidelity range below `tolerance`. Empty if the run never settles.
std::optional<int> stabilization_step(std::span<const double> fidelities, int window = 10,
                                      double tolerance = 0.005);
std::optional<int> stabilization_step(std::span<const StepRecord> records, int window = 10,
                                      double tolerance = 0.005);

}  // namespace fockwalk
