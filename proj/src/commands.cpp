#include "fockwalk/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "fockwalk/analysis.hpp"
#include "fockwalk/jc_walk.hpp"
#include "fockwalk/lindblad.hpp"
#include "fockwalk/protocol.hpp"

namespace fockwalk {

std::string format_number(double value, bool integer) {
  char buf[64];
  std::to_chars_result res;
  if (integer) {
    res = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(std::llround(value)));
  } else {
    res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 16);
  }
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c].name;
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c], table.columns[c].integer);
    out << '\n';
  }
}

nlohmann::ordered_json table_to_json(const Table& table) {
  nlohmann::ordered_json cols = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      if (table.columns[c].integer) arr.push_back(std::llround(row[c]));
      else arr.push_back(row[c]);
    }
    cols[table.columns[c].name] = std::move(arr);
  }
  return cols;
}

void write_result(const RunConfig& config, const CommandResult& result, std::ostream& stdout_stream) {
  auto emit = [&](std::ostream& out, bool sibling_summary) {
    if (config.format == OutputFormat::Json) {
      nlohmann::ordered_json j;
      j["columns"] = table_to_json(result.table);
      j["summary"] = result.summary;
      out << j.dump(2) << '\n';
    } else {
      write_csv(out, result.table);
      if (!sibling_summary) out << result.summary.dump() << '\n';
    }
  };
  if (!config.output_path) {
    emit(stdout_stream, false);
    return;
  }
  std::ofstream out(*config.output_path, std::ios::binary);
  if (!out) throw Error("cannot open output file '" + *config.output_path + "'");
  emit(out, true);
  if (!out) throw Error("failed writing '" + *config.output_path + "'");
  if (config.format == OutputFormat::Csv) {
    const std::string path = *config.output_path + ".summary.json";
    std::ofstream s(path, std::ios::binary);
    if (!s) throw Error("cannot open summary file '" + path + "'");
    s << result.summary.dump(2) << '\n';
  }
}

CommandResult cmd_walk(const RunConfig& config) {
  const WalkSettings& w = config.walk;
  WalkVariant variant = WalkVariant::damped(w.eta);
  if (w.variant == "hadamard") variant = WalkVariant::unitary_hadamard();
  else if (w.variant == "flip") variant = WalkVariant::unitary_flip();
  else if (w.variant != "damped") throw ConfigError("invalid variant '" + w.variant + "'");

  const JCParams params{w.g, w.resolved_tau()};
  const SystemSpace space = SystemSpace::with_n_max(w.resolved_n_max());
  const DensityMatrix vacuum = DensityMatrix(ops::fock_projector(space.fock_dim, 0));
  const auto dists = run_walk(variant, params, w.steps, product_state(space, kExcited, vacuum));

  CommandResult r;
  r.table.columns = {{"step", true}, {"n", true}, {"probability", false}};
  double max_above = 0.0;
  for (std::size_t m = 0; m < dists.size(); ++m) {
    double above = 0.0;
    for (std::size_t n = 0; n < dists[m].size(); ++n) {
      r.table.rows.push_back({static_cast<double>(m), static_cast<double>(n), dists[m][n]});
      if (static_cast<int>(n) > w.n_target) above += dists[m][n];
    }
    max_above = std::max(max_above, above);
  }
  const auto& last = dists.back();
  r.summary["config"] = config_to_json(config);
  r.summary["final_target_population"] = w.n_target < static_cast<int>(last.size()) ? last[w.n_target] : 0.0;
  r.summary["max_population_above_target"] = max_above;
  r.summary["final_distribution"] = last;
  return r;
}

CommandResult cmd_protocol(const RunConfig& config) {
  const ProtocolParams p = config.protocol.resolved();
  const auto records = run_protocol(p);

  CommandResult r;
  r.table.columns = {{"step", true}, {"fidelity", false}, {"fidelity_std", false}, {"leak", false}, {"coin_excited", false}};
  for (int n = 0; n <= *p.n_max; ++n) r.table.columns.push_back({"p" + std::to_string(n), false});
  double peak = -1.0;
  int peak_step = 0;
  double max_trunc = 0.0;
  for (const auto& rec : records) {
    std::vector<double> row = {static_cast<double>(rec.step), rec.fidelity, rec.fidelity_std, rec.leak, rec.coin_excited};
    row.insert(row.end(), rec.populations.begin(), rec.populations.end());
    r.table.rows.push_back(std::move(row));
    if (rec.fidelity > peak) {
      peak = rec.fidelity;
      peak_step = rec.step;
    }
    max_trunc = std::max(max_trunc, rec.truncation_leak);
  }

  auto& s = r.summary;
  s["config"] = config_to_json(config);
  s["trajectories_used"] = p.effective_trajectories();
  s["trapping_time"] = p.trapping_time();
  s["peak_fidelity"] = peak;
  s["peak_step"] = peak_step;
  const auto stab = stabilization_step(records);
  if (stab) {
    s["stabilization_step"] = *stab;
    const auto& st = records[static_cast<std::size_t>(std::min<int>(*stab + 10, static_cast<int>(records.size()) - 1))];
    s["stationary_fidelity"] = st.fidelity;
  } else {
    s["stabilization_step"] = nullptr;
    s["stationary_fidelity"] = nullptr;
  }
  constexpr int kSnapshotStep = 73;
  s["snapshot_step"] = kSnapshotStep;
  if (p.steps >= kSnapshotStep) s["snapshot_populations"] = records[kSnapshotStep].populations;
  else s["snapshot_populations"] = nullptr;
  s["final_fidelity"] = records.back().fidelity;
  s["final_leak"] = records.back().leak;
  s["max_truncation_leak"] = max_trunc;
  return r;
}

CommandResult cmd_fidelity_curve(const RunConfig& config) {
  const auto& c = config.curve;
  if (c.n_targets.empty()) throw ConfigError("no targets");
  const auto rows = fidelity_curve(config.protocol, c.n_targets, c.alpha, c.wait_multiple, c.rate_ratio);

  CommandResult r;
  r.table.columns = {{"n_T", true}, {"F_analytic", false}, {"F_numeric", false}, {"alpha_estimate", false}};
  std::vector<StationaryPoint> points;
  for (const auto& row : rows) {
    r.table.rows.push_back({static_cast<double>(row.n_target), row.analytic, row.numeric, row.alpha});
    points.push_back({row.n_target, row.stationary_step, row.numeric, row.alpha * (1.0 - row.numeric)});
  }
  r.summary["config"] = config_to_json(config);
  if (points.size() >= 3) {
    const auto est = estimate_alpha(points);
    r.summary["alpha_mean"] = est.mean;
    r.summary["alpha_spread"] = est.spread;
  } else {
    r.summary["alpha_mean"] = nullptr;
    r.summary["alpha_spread"] = nullptr;
  }
  auto steps = nlohmann::ordered_json::array();
  for (const auto& row : rows) steps.push_back(row.stationary_step);
  r.summary["stationary_steps"] = steps;
  return r;
}

namespace {

CMatrix random_density(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = cplx(n(rng), n(rng));
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

PropertyCheck check(std::string name, double value, double limit) {
  std::ostringstream os;
  os << "max deviation " << value << " (limit " << limit << ")";
  return {std::move(name), value <= limit, os.str()};
}

template <typename Fn>
PropertyCheck guarded(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

std::vector<PropertyCheck> cmd_validate() {
  std::vector<PropertyCheck> out;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  out.push_back(guarded("kraus-completeness", [&] {
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) worst = std::max(worst, coin_damping(i / 20.0).completeness_error());
    return check("kraus-completeness", worst, 1e-12);
  }));

  out.push_back(guarded("jc-unitarity", [&] {
    const SystemSpace space = SystemSpace::with_n_max(20);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const CMatrix u = jc_unitary({1.0, 3.0 * unit(rng)}, space);
      worst = std::max(worst, max_abs(u.adjoint() * u - CMatrix::Identity(space.dim(), space.dim())));
    }
    return check("jc-unitarity", worst, 1e-12);
  }));

  out.push_back(guarded("walk-step-cptp", [&] {
    const SystemSpace space = SystemSpace::with_n_max(8);
    double worst_trace = 0.0;
    for (int i = 0; i < 30; ++i) {
      const DensityMatrix rho(random_density(rng, space.dim()));
      const DensityMatrix out = walk_step(rho, WalkVariant::damped(unit(rng)), {1.0, 2.0 * unit(rng)});
      worst_trace = std::max(worst_trace, std::abs(out.mat().trace().real() - 1.0));
    }
    return check("walk-step-cptp", worst_trace, 1e-12);
  }));

  const int n_t = 16;
  const JCParams trap{1.0, trapping_time(1.0, n_t, 1)};
  const SystemSpace trap_space = SystemSpace::with_n_max(n_t + 10);

  out.push_back(guarded("trapping-fixed-point", [&] {
    const DensityMatrix rho = product_state(trap_space, kExcited, DensityMatrix(ops::fock_projector(trap_space.fock_dim, n_t)));
    const DensityMatrix next = walk_step(rho, WalkVariant::damped(0.0), trap);
    return check("trapping-fixed-point", max_abs(next.mat() - rho.mat()), 1e-12);
  }));

  out.push_back(guarded("trapping-ceiling", [&] {
    const DensityMatrix vac = product_state(trap_space, kExcited, DensityMatrix(ops::fock_projector(trap_space.fock_dim, 0)));
    const auto dists = run_walk(WalkVariant::damped(0.0), trap, 80, vac);
    double worst = 0.0;
    for (const auto& d : dists) {
      double above = 0.0;
      for (std::size_t n = n_t + 1; n < d.size(); ++n) above += d[n];
      worst = std::max(worst, above);
    }
    return check("trapping-ceiling", worst, 1e-12);
  }));

  out.push_back(guarded("reduced-map-agreement", [&] {
    const SystemSpace space = SystemSpace::with_n_max(10);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const JCParams jc{1.0, 2.0 * unit(rng)};
      const DensityMatrix rw(random_density(rng, space.fock_dim));
      const DensityMatrix lhs = partial_trace_coin(walk_step(product_state(space, kExcited, rw), WalkVariant::damped(0.0), jc), space);
      const DensityMatrix rhs = reduced_walker_map(rw, jc);
      worst = std::max({worst, max_abs(lhs.mat() - rhs.mat()), std::abs(rhs.mat().trace().real() - 1.0)});
    }
    return check("reduced-map-agreement", worst, 1e-12);
  }));

  out.push_back(guarded("expm-inverse", [&] {
    double worst = 0.0;
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
      CMatrix m(8, 8);
      for (int c = 0; c < 8; ++c)
        for (int r = 0; r < 8; ++r) m(r, c) = cplx(n(rng), n(rng));
      m *= 10.0 * unit(rng) / m.operatorNorm();
      worst = std::max(worst, max_abs(expm(m) * expm(-m) - CMatrix::Identity(8, 8)));
    }
    return check("expm-inverse", worst, 1e-10);
  }));

  out.push_back(guarded("coin-decay-oracle", [&] {
    const SystemSpace space = SystemSpace::with_n_max(3);
    const double rate = 1e4;
    const Lindbladian l(CMatrix::Zero(space.dim(), space.dim()), {{ops::on_coin(ops::sigma_minus(), space), rate}});
    const DensityMatrix rho = product_state(space, kExcited, DensityMatrix(ops::fock_projector(space.fock_dim, 1)));
    double worst = 0.0;
    for (double t : {1e-5, 2e-4, 5e-4, 1e-3}) {
      const DensityMatrix out = propagate(l, rho, t);
      worst = std::max(worst, std::abs(coin_excited_population(out.mat(), space) - std::exp(-rate * t)));
    }
    return check("coin-decay-oracle", worst, 1e-9);
  }));

  out.push_back(guarded("cavity-decay-oracle", [&] {
    const SystemSpace space = SystemSpace::with_n_max(10);
    const double rate = 0.1;
    const Lindbladian l(CMatrix::Zero(space.dim(), space.dim()),
                        {{ops::on_fock(ops::annihilation(space.fock_dim), space), rate}});
    double worst = 0.0;
    for (double t : {0.5, 2.0, 10.0}) {
      const LindbladPropagator prop(l, t);
      for (int n : {1, 3, 6, 10}) {
        const DensityMatrix rho = product_state(space, kGround, DensityMatrix(ops::fock_projector(space.fock_dim, n)));
        const auto pops = fock_populations(prop.apply(rho).mat(), space);
        worst = std::max(worst, std::abs(pops[n] - std::exp(-n * rate * t)));
      }
    }
    return check("cavity-decay-oracle", worst, 1e-8);
  }));

  out.push_back(guarded("lindblad-semigroup", [&] {
    const SystemSpace space = SystemSpace::with_n_max(4);
    const SystemHamiltonian h{3.0, 0.0, 2.0};
    const Lindbladian l(h.matrix(space), {{ops::on_fock(ops::annihilation(space.fock_dim), space), 0.7},
                                          {ops::on_coin(ops::sigma_minus(), space), 2.5}});
    const DensityMatrix rho(random_density(rng, space.dim()));
    const DensityMatrix whole = propagate(l, rho, 0.9);
    const DensityMatrix split = propagate(l, propagate(l, rho, 0.4), 0.5);
    return check("lindblad-semigroup", max_abs(whole.mat() - split.mat()), 1e-8);
  }));

  out.push_back(guarded("factorized-decay", [&] {
    ProtocolParams p;
    p.n_target = 3;
    p.n_max = 8;
    p.gamma_c = 40.0;
    const ProtocolEngine engine(p);
    const CMatrix rho = random_density(rng, engine.space().dim());
    CMatrix fast = rho;
    engine.decay_phase(fast);
    const CMatrix slow = LindbladPropagator(engine.decay_lindbladian(), p.decay_time()).apply(rho);
    return check("factorized-decay", max_abs(fast - slow), 1e-10);
  }));

  out.push_back(guarded("noisy-jc-vs-expm", [&] {
    ProtocolParams p;
    p.n_max = 12;
    const SystemSpace space = p.space();
    const SystemHamiltonian resonant{p.delta_g, -p.delta_g, p.g};
    double worst = 0.0;
    for (double dt : {0.0, 0.01, -0.02}) {
      const CMatrix direct = expm(cplx(0.0, -p.trapping_time() * (1.0 + dt)) * resonant.matrix(space));
      CMatrix analytic = noisy_jc_unitary(p, dt);
      // The truncated resonant Hamiltonian leaves |e, n_max> invariant as well.
      worst = std::max(worst, max_abs(analytic - direct));
    }
    return check("noisy-jc-vs-expm", worst, 1e-10);
  }));

  out.push_back(guarded("protocol-ideal-fixed-point", [&] {
    ProtocolParams p;
    p.gamma_c = 0.0;
    const SystemSpace space = p.space();
    const DensityMatrix rho = product_state(space, kExcited, DensityMatrix(ops::fock_projector(space.fock_dim, p.n_target)));
    const DensityMatrix next = protocol_step(rho, p, {});
    const double drop = 1.0 - fock_populations(next.mat(), space)[p.n_target];
    return check("protocol-ideal-fixed-point", drop, std::exp(-5.0) + 1e-6);
  }));

  return out;
}

}  // namespace fockwalk
