#include "fockwalk/jc_walk.hpp"

#include <cmath>
#include <numbers>

namespace fockwalk {

double JCParams::angle(int n) const noexcept { return g * tau * std::sqrt(static_cast<double>(n) + 1.0); }

void JCParams::validate() const {
  if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("JC coupling g must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("JC duration tau must be non-negative");
}

CMatrix jc_unitary(const JCParams& params, const SystemSpace& space) {
  params.validate();
  space.validate();
  const int f = space.fock_dim;
  const cplx minus_i(0.0, -1.0);
  CMatrix u = CMatrix::Zero(space.dim(), space.dim());
  u(space.index(kGround, 0), space.index(kGround, 0)) = 1.0;
  for (int n = 0; n + 1 < f; ++n) {
    const double th = params.angle(n);
    const int e = space.index(kExcited, n);
    const int g = space.index(kGround, n + 1);
    u(e, e) = std::cos(th);
    u(g, g) = std::cos(th);
    u(e, g) = minus_i * std::sin(th);
    u(g, e) = minus_i * std::sin(th);
  }
  const int top = space.index(kExcited, f - 1);
  u(top, top) = 1.0;
  return u;
}

double emit_probability(const JCParams& params, int n) {
  if (n < 0) throw ValidationError("emit_probability: negative photon number");
  const double s = std::sin(params.angle(n));
  return s * s;
}

CoinChannel::CoinChannel(double eta) : eta_(eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("coin damping eta must lie in [0, 1]");
  kraus_[0] = ops::coin_projector(kGround) + std::sqrt(eta) * ops::coin_projector(kExcited);
  kraus_[1] = std::sqrt(1.0 - eta) * ops::sigma_minus();
}

Coin2 CoinChannel::apply(const Coin2& rho) const {
  Coin2 out = Coin2::Zero();
  for (const auto& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

CMatrix CoinChannel::apply(const CMatrix& rho, const SystemSpace& space) const {
  if (rho.rows() != space.dim() || rho.cols() != space.dim())
    throw DimensionError("coin channel: operator is not on coin (x) Fock");
  const int f = space.fock_dim;
  // Blockwise: out_{cd} = sum_k sum_{ab} K_ca rho_ab conj(K_db)
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus_)
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 2; ++d)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const cplx w = k(c, a) * std::conj(k(d, b));
            if (w != cplx(0.0)) out.block(c * f, d * f, f, f) += w * rho.block(a * f, b * f, f, f);
          }
  return out;
}

double CoinChannel::completeness_error() const {
  Coin2 s = Coin2::Zero();
  for (const auto& k : kraus_) s += k.adjoint() * k;
  return (s - Coin2::Identity()).cwiseAbs().maxCoeff();
}

CoinChannel coin_damping(double eta) { return CoinChannel(eta); }

Coin2 coin_flip() { return cplx(0.0, -1.0) * ops::sigma_x(); }

Coin2 coin_hadamard() { return (ops::sigma_x() + ops::sigma_z()) / std::numbers::sqrt2; }

WalkVariant WalkVariant::damped(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("damped walk requires eta in [0, 1]");
  return WalkVariant(Kind::Damped, eta);
}

namespace {

SystemSpace space_for(const DensityMatrix& rho) {
  if (rho.dim() % 2 != 0 || rho.dim() < 4)
    throw DimensionError("walk state must live on coin (x) Fock with fock_dim >= 2");
  return SystemSpace{rho.dim() / 2};
}

}  // namespace

DensityMatrix walk_step(const DensityMatrix& rho, const WalkVariant& variant, const JCParams& params) {
  const SystemSpace space = space_for(rho);
  const CMatrix u = jc_unitary(params, space);
  CMatrix out = u * rho.mat() * u.adjoint();
  Coin2 coin_op;
  switch (variant.kind()) {
    case WalkVariant::Kind::UnitaryHadamard:
      coin_op = coin_hadamard();
      break;
    case WalkVariant::Kind::UnitaryFlip:
      coin_op = coin_flip();
      break;
    case WalkVariant::Kind::Damped:
      out = coin_damping(variant.eta()).apply(out, space);
      coin_op = coin_flip();
      break;
  }
  const CMatrix c = ops::on_coin(coin_op, space);
  return DensityMatrix(c * out * c.adjoint());
}

DensityMatrix reduced_walker_map(const DensityMatrix& rho_w, const JCParams& params) {
  params.validate();
  const int f = rho_w.dim();
  if (f < 2) throw DimensionError("reduced_walker_map: Fock dimension must be at least 2");
  CMatrix cos_n = CMatrix::Zero(f, f);
  CMatrix raise = CMatrix::Zero(f, f);  // a^dag sin(theta_N)/sqrt(N+1)
  for (int n = 0; n + 1 < f; ++n) {
    cos_n(n, n) = std::cos(params.angle(n));
    raise(n + 1, n) = std::sin(params.angle(n));
  }
  cos_n(f - 1, f - 1) = 1.0;
  const CMatrix& r = rho_w.mat();
  return DensityMatrix(cos_n * r * cos_n + raise * r * raise.adjoint());
}

double trapping_time(double g, int n_target, int k) {
  if (!(g > 0.0)) throw ValidationError("trapping_time: g must be positive");
  if (n_target < 0) throw ValidationError("trapping_time: n_T must be non-negative");
  if (k < 1) throw ValidationError("trapping_time: k must be at least 1");
  return k * std::numbers::pi / (g * std::sqrt(n_target + 1.0));
}

double truncation_leak(std::span<const double> populations) {
  double s = 0.0;
  const std::size_t from = populations.size() >= 3 ? populations.size() - 3 : 0;
  for (std::size_t n = from; n < populations.size(); ++n) s += populations[n];
  return s;
}

std::vector<std::vector<double>> run_walk(const WalkVariant& variant, const JCParams& params, int steps,
                                          const DensityMatrix& initial) {
  if (steps < 0) throw ValidationError("run_walk: steps must be non-negative");
  const SystemSpace space = space_for(initial);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  DensityMatrix rho = initial;
  for (int m = 0;; ++m) {
    auto pops = fock_populations(rho.mat(), space);
    const double leak = truncation_leak(pops);
    if (leak >= kTruncationThreshold) throw TruncationFault(m, leak);
    out.push_back(std::move(pops));
    if (m == steps) break;
    rho = walk_step(rho, variant, params);
  }
  return out;
}

}  // namespace fockwalk
