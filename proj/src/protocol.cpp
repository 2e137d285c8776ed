#include "fockwalk/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "fockwalk/jc_walk.hpp"

namespace fockwalk {
namespace {

// Largest joint dimension for which the dense Liouvillian route is allowed.
constexpr int kDenseDimLimit = 40;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double clamp_duration_factor(double delta_tau) { return std::max(0.0, 1.0 + delta_tau); }

// Left-multiply rows by the 2x2 doublet rotation [[c, -is], [-is, c]] on (e, g) index pairs
// and right-multiply columns by its adjoint.
void conjugate_doublet(CMatrix& rho, int e, int g, double c, double s) {
  const cplx mis(0.0, -s);
  const auto re = rho.row(e).eval();
  const auto rg = rho.row(g).eval();
  rho.row(e) = c * re + mis * rg;
  rho.row(g) = mis * re + c * rg;
  const auto ce = rho.col(e).eval();
  const auto cg = rho.col(g).eval();
  const cplx pis(0.0, s);
  rho.col(e) = c * ce + pis * cg;
  rho.col(g) = pis * ce + c * cg;
}

}  // namespace

int ProtocolParams::default_n_max() const noexcept {
  if (sigma_n == 0.0) return n_target + 10;
  return 9 * (n_target + 1) + 4;
}

double ProtocolParams::trapping_time() const { return fockwalk::trapping_time(g, n_target, k); }

ProtocolParams ProtocolParams::resolved() const {
  ProtocolParams r = *this;
  r.n_max = resolved_n_max();
  r.tau_gamma = decay_time();
  return r;
}

void ProtocolParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!(g > 0.0) || !finite(g)) throw ValidationError("g must be positive");
  if (!finite(delta_g)) throw ValidationError("delta_g must be finite");
  if (!(gamma > 0.0) || !finite(gamma)) throw ValidationError("gamma must be positive");
  if (!(gamma_sted >= gamma) || !finite(gamma_sted)) throw ValidationError("gamma_sted must be >= gamma");
  if (!(gamma_c >= 0.0) || !finite(gamma_c)) throw ValidationError("gamma_c must be non-negative");
  if (!(sigma_n >= 0.0) || !finite(sigma_n)) throw ValidationError("sigma_n must be non-negative");
  if (n_target < 0) throw ValidationError("n_T must be non-negative");
  if (k < 1) throw ValidationError("k must be at least 1");
  if (resolved_n_max() < n_target + 4) throw ValidationError("n_max must be at least n_T + 4");
  if (steps < 0) throw ValidationError("steps must be non-negative");
  if (trajectories < 1) throw ValidationError("trajectories must be at least 1");
  if (!(decay_time() > 0.0) || !finite(decay_time())) throw ValidationError("tau_gamma must be positive");
  if (threads < 1) throw ValidationError("threads must be at least 1");
  const int dim = 2 * (resolved_n_max() + 1);
  const bool dense = jc_phase == JcPhaseModel::Lindblad || decay_coupling == DecayCoupling::Detuned;
  if (dense && dim > kDenseDimLimit)
    throw ValidationError("dense Liouvillian modes need n_max <= " + std::to_string(kDenseDimLimit / 2 - 1));
  if (jc_phase == JcPhaseModel::Lindblad && sigma_n != 0.0)
    throw ValidationError("the lossy JC phase model is only available without timing noise");
}

CMatrix noisy_jc_unitary(const ProtocolParams& p, double delta_tau) {
  p.validate();
  const JCParams jc{p.g, p.trapping_time() * clamp_duration_factor(delta_tau)};
  return jc_unitary(jc, p.space());
}

Coin2 flip_operator(double delta_x) {
  const double phi = std::numbers::pi * (1.0 + delta_x) / 2.0;
  return std::cos(phi) * Coin2::Identity() + cplx(0.0, -std::sin(phi)) * ops::sigma_x();
}

FactorizedDecay::FactorizedDecay(const SystemSpace& space, double coin_rate, double cavity_rate, double detuning,
                                 double t)
    : space_(space), coin_survival_(std::exp(-coin_rate * t)) {
  const int f = space.fock_dim;
  const double p = std::exp(-cavity_rate * t);
  const double log_p = -cavity_rate * t;
  const double log_q = cavity_rate > 0.0 ? std::log(-std::expm1(-cavity_rate * t)) : -INFINITY;
  weights_.push_back(std::vector<double>(static_cast<std::size_t>(f)));
  for (int n = 0; n < f; ++n) weights_[0][n] = std::exp(0.5 * n * log_p);
  if (cavity_rate > 0.0) {
    constexpr double kNegligible = 1e-22;
    for (int k = 1; k < f; ++k) {
      std::vector<double> w(static_cast<std::size_t>(f - k));
      double largest = 0.0;
      for (int n = 0; n + k < f; ++n) {
        const double log_binom = std::lgamma(n + k + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n + 1.0);
        const double w2 = std::exp(log_binom + n * log_p + k * log_q);
        w[n] = std::sqrt(w2);
        largest = std::max(largest, w2);
      }
      // Terms decay monotonically once past the mean number of lost photons.
      if (largest < kNegligible && k > (f - 1) * (1.0 - p)) break;
      weights_.push_back(std::move(w));
    }
  }
  phases_.resize(f, f);
  for (int m = 0; m < f; ++m)
    for (int n = 0; n < f; ++n) phases_(n, m) = std::polar(1.0, detuning * t * (n - m));
}

void FactorizedDecay::apply(CMatrix& rho) const {
  const int f = space_.fock_dim;
  auto block = [&](int c, int d) { return rho.block(c * f, d * f, f, f); };
  // Coin reset: ee -> eta ee, gg += (1 - eta) ee, coherences scale by sqrt(eta).
  const double eta = coin_survival_;
  block(kGround, kGround) += (1.0 - eta) * block(kExcited, kExcited);
  block(kExcited, kExcited) *= eta;
  block(kExcited, kGround) *= std::sqrt(eta);
  block(kGround, kExcited) *= std::sqrt(eta);

  const bool lossless = weights_.size() == 1 && weights_[0].back() == 1.0;
  for (int c = 0; c < 2; ++c)
    for (int d = 0; d < 2; ++d) {
      auto b = block(c, d);
      if (!lossless) {
        CMatrix out = CMatrix::Zero(f, f);
        for (std::size_t k = 0; k < weights_.size(); ++k) {
          const auto& w = weights_[k];
          const int len = f - static_cast<int>(k);
          const Eigen::Map<const Eigen::VectorXd> wv(w.data(), len);
          out.topLeftCorner(len, len).array() +=
              (wv * wv.transpose()).cast<cplx>().array() * b.bottomRightCorner(len, len).array();
        }
        b = out;
      }
      b.array() *= phases_.array();
    }
}

ProtocolEngine::ProtocolEngine(const ProtocolParams& params) : params_(params.resolved()) {
  params_.validate();
  space_ = params_.space();
  tau_t_ = params_.trapping_time();
  if (params_.decay_coupling == DecayCoupling::Off) {
    factorized_.emplace(space_, params_.gamma_sted, params_.gamma_c, params_.delta_g, params_.decay_time());
  } else {
    dense_decay_ = std::make_shared<const LindbladPropagator>(decay_lindbladian(), params_.decay_time());
  }
  if (params_.jc_phase == JcPhaseModel::Lindblad) {
    const SystemHamiltonian h{params_.delta_g, -params_.delta_g, params_.g};
    Lindbladian l(h.matrix(space_),
                  {Collapse{ops::on_coin(ops::sigma_minus(), space_), params_.gamma},
                   Collapse{ops::on_fock(ops::annihilation(space_.fock_dim), space_), params_.gamma_c}});
    lossy_jc_ = std::make_shared<const LindbladPropagator>(l, tau_t_);
  }
}

Lindbladian ProtocolEngine::decay_lindbladian() const {
  // Stark shift off: cavity detuned by delta_g.
  const SystemHamiltonian h{params_.delta_g, 0.0,
                            params_.decay_coupling == DecayCoupling::Detuned ? params_.g : 0.0};
  return Lindbladian(h.matrix(space_),
                     {Collapse{ops::on_fock(ops::annihilation(space_.fock_dim), space_), params_.gamma_c},
                      Collapse{ops::on_coin(ops::sigma_minus(), space_), params_.gamma_sted}});
}

void ProtocolEngine::jc_phase(CMatrix& rho, double delta_tau) const {
  if (lossy_jc_) {
    rho = lossy_jc_->apply(rho);
    return;
  }
  const int f = space_.fock_dim;
  const double scale = params_.g * tau_t_ * clamp_duration_factor(delta_tau);
  for (int n = 0; n + 1 < f; ++n) {
    const double th = scale * std::sqrt(n + 1.0);
    conjugate_doublet(rho, space_.index(kExcited, n), space_.index(kGround, n + 1), std::cos(th), std::sin(th));
  }
}

void ProtocolEngine::decay_phase(CMatrix& rho) const {
  if (factorized_) {
    factorized_->apply(rho);
  } else {
    rho = dense_decay_->apply(rho);
  }
}

void ProtocolEngine::flip(CMatrix& rho, double delta_x) const {
  const int f = space_.fock_dim;
  const Coin2 x = flip_operator(delta_x);
  CMatrix out(rho.rows(), rho.cols());
  for (int c = 0; c < 2; ++c)
    for (int d = 0; d < 2; ++d) {
      auto o = out.block(c * f, d * f, f, f);
      o.setZero();
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const cplx w = x(c, a) * std::conj(x(d, b));
          if (w != cplx(0.0)) o += w * rho.block(a * f, b * f, f, f);
        }
    }
  rho = std::move(out);
}

void ProtocolEngine::step(CMatrix& rho, const NoiseDraws& draws) const {
  jc_phase(rho, draws.delta_tau);
  decay_phase(rho);
  flip(rho, draws.delta_x);
}

DensityMatrix initial_state(const SystemSpace& space) {
  CMatrix rho = CMatrix::Zero(space.dim(), space.dim());
  rho(space.index(kExcited, 0), space.index(kExcited, 0)) = 1.0;
  return DensityMatrix(std::move(rho));
}

StepRecord make_record(const CMatrix& rho, const SystemSpace& space, int n_target, int step) {
  StepRecord r;
  r.step = step;
  r.populations = fock_populations(rho, space);
  r.fidelity = n_target < space.fock_dim ? r.populations[n_target] : 0.0;
  for (int n = n_target + 1; n < space.fock_dim; ++n) r.leak += r.populations[n];
  r.truncation_leak = truncation_leak(r.populations);
  r.coin_excited = coin_excited_population(rho, space);
  return r;
}

DensityMatrix protocol_step(const DensityMatrix& rho, const ProtocolParams& p, const NoiseDraws& draws) {
  const ProtocolEngine engine(p);
  if (rho.dim() != engine.space().dim()) throw DimensionError("protocol_step: state dimension mismatch");
  CMatrix out = rho.mat();
  engine.step(out, draws);
  const double leak = truncation_leak(fock_populations(out, engine.space()));
  if (leak >= kTruncationThreshold) throw TruncationFault(1, leak);
  return DensityMatrix(std::move(out));
}

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t index, double sigma)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL))),
      normal_(0.0, sigma > 0.0 ? sigma : 1.0),
      active_(sigma > 0.0) {}

NoiseDraws NoiseStream::next() {
  if (!active_) return {};
  NoiseDraws d;
  d.delta_tau = normal_(engine_);
  d.delta_x = normal_(engine_);
  return d;
}

namespace {

// Pairwise summation over a fixed index tree: the result depends only on the
// inputs, never on how the trajectories were scheduled.
CMatrix pairwise_sum(const std::vector<CMatrix>& xs, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return xs[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  CMatrix left = pairwise_sum(xs, lo, mid);
  left += pairwise_sum(xs, mid, hi);
  return left;
}

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(1, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      const int lo = count * t / threads;
      const int hi = count * (t + 1) / threads;
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
}

}  // namespace

std::vector<StepRecord> run_protocol(const ProtocolParams& params) {
  const ProtocolEngine engine(params);
  const ProtocolParams& p = engine.params();
  const SystemSpace& space = engine.space();
  const int count = p.effective_trajectories();

  const CMatrix rho0 = initial_state(space).mat();
  std::vector<CMatrix> states(static_cast<std::size_t>(count), rho0);
  std::vector<NoiseStream> noise;
  noise.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) noise.emplace_back(p.seed, static_cast<std::uint64_t>(t), p.sigma_n);
  std::vector<double> target_pop(static_cast<std::size_t>(count));

  std::vector<StepRecord> records;
  records.reserve(static_cast<std::size_t>(p.steps) + 1);
  records.push_back(make_record(rho0, space, p.n_target, 0));

  for (int step = 1; step <= p.steps; ++step) {
    parallel_for(count, p.threads, [&](int t) {
      engine.step(states[t], noise[t].next());
      const int f = space.fock_dim;
      target_pop[t] = states[t](p.n_target, p.n_target).real() + states[t](f + p.n_target, f + p.n_target).real();
    });
    CMatrix avg = pairwise_sum(states, 0, states.size());
    avg /= static_cast<double>(count);

    StepRecord rec = make_record(avg, space, p.n_target, step);
    if (count > 1) {
      double ss = 0.0;
      for (double x : target_pop) ss += (x - rec.fidelity) * (x - rec.fidelity);
      rec.fidelity_std = std::sqrt(ss / (count - 1));
    }
    if (rec.truncation_leak >= kTruncationThreshold) throw TruncationFault(step, rec.truncation_leak);
    const auto report = inspect_density(avg);
    if (!report.ok())
      throw ValidationError("averaged state invalid at step " + std::to_string(step) + ": " + report.describe());
    records.push_back(std::move(rec));
  }
  return records;
}

std::optional<int> stabilization_step(std::span<const double> fidelities, int window, double tolerance) {
  const int n = static_cast<int>(fidelities.size());
  if (n == 0) return std::nullopt;
  if (n <= window) {
    const auto [lo, hi] = std::minmax_element(fidelities.begin(), fidelities.end());
    return (*hi - *lo < tolerance) ? std::optional<int>(0) : std::nullopt;
  }
  std::optional<int> first;
  for (int s = n - 1 - window; s >= 0; --s) {
    const auto span = fidelities.subspan(static_cast<std::size_t>(s), static_cast<std::size_t>(window) + 1);
    const auto [lo, hi] = std::minmax_element(span.begin(), span.end());
    if (*hi - *lo >= tolerance) break;
    first = s;
  }
  return first;
}

std::optional<int> stabilization_step(std::span<const StepRecord> records, int window, double tolerance) {
  std::vector<double> f;
  f.reserve(records.size());
  for (const auto& r : records) f.push_back(r.fidelity);
  auto s = stabilization_step(std::span<const double>(f), window, tolerance);
  if (s && !records.empty()) return records[static_cast<std::size_t>(*s)].step;
  return s;
}

}  // namespace fockwalk
