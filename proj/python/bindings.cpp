#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fockwalk/analysis.hpp"
#include "fockwalk/commands.hpp"
#include "fockwalk/jc_walk.hpp"
#include "fockwalk/lindblad.hpp"
#include "fockwalk/protocol.hpp"

namespace py = pybind11;
using namespace fockwalk;

namespace {

WalkVariant variant_from_name(const std::string& name, double eta) {
  if (name == "hadamard") return WalkVariant::unitary_hadamard();
  if (name == "flip") return WalkVariant::unitary_flip();
  if (name == "damped") return WalkVariant::damped(eta);
  throw ValidationError("variant must be one of hadamard, flip, damped");
}

py::dict records_to_dict(const std::vector<StepRecord>& records) {
  std::vector<int> step;
  std::vector<double> fidelity, fidelity_std, leak, coin_excited, truncation;
  std::vector<std::vector<double>> populations;
  for (const auto& r : records) {
    step.push_back(r.step);
    fidelity.push_back(r.fidelity);
    fidelity_std.push_back(r.fidelity_std);
    leak.push_back(r.leak);
    coin_excited.push_back(r.coin_excited);
    truncation.push_back(r.truncation_leak);
    populations.push_back(r.populations);
  }
  py::dict d;
  d["step"] = step;
  d["fidelity"] = fidelity;
  d["fidelity_std"] = fidelity_std;
  d["leak"] = leak;
  d["coin_excited"] = coin_excited;
  d["truncation_leak"] = truncation;
  d["populations"] = populations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Damped Jaynes-Cummings walk and cavity Fock-state protocol";

  auto base = py::register_exception<Error>(m, "FockwalkError", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<TruncationFault>(m, "TruncationFault", base.ptr());
  py::register_exception<NotStationaryError>(m, "NotStationaryError", base.ptr());

  m.attr("EXCITED") = kExcited;
  m.attr("GROUND") = kGround;

  m.def("expm", &expm, py::arg("matrix"));
  m.def("trapping_time", &trapping_time, py::arg("g"), py::arg("n_target"), py::arg("k") = 1);
  m.def(
      "emit_probability", [](double g, double tau, int n) { return emit_probability({g, tau}, n); }, py::arg("g"),
      py::arg("tau"), py::arg("n"));
  m.def(
      "jc_unitary", [](double g, double tau, int n_max) { return jc_unitary({g, tau}, SystemSpace::with_n_max(n_max)); },
      py::arg("g"), py::arg("tau"), py::arg("n_max"));
  m.def(
      "coin_damping", [](double eta, const Coin2& rho) { return coin_damping(eta).apply(rho); }, py::arg("eta"),
      py::arg("rho"), "Apply the coin amplitude-damping channel to a 2x2 state in (e, g) order.");
  m.def(
      "reduced_walker_map",
      [](const CMatrix& rho, double g, double tau) { return reduced_walker_map(DensityMatrix(rho), {g, tau}).mat(); },
      py::arg("rho"), py::arg("g"), py::arg("tau"));
  m.def(
      "walk_step",
      [](const CMatrix& rho, const std::string& variant, double eta, double g, double tau) {
        return walk_step(DensityMatrix(rho), variant_from_name(variant, eta), {g, tau}).mat();
      },
      py::arg("rho"), py::arg("variant") = "damped", py::arg("eta") = 0.0, py::arg("g") = 1.0, py::arg("tau"));
  m.def(
      "run_walk",
      [](const std::string& variant, double eta, double g, double tau, int n_max, int steps) {
        const auto space = SystemSpace::with_n_max(n_max);
        const auto init = product_state(space, kExcited, DensityMatrix(ops::fock_projector(space.fock_dim, 0)));
        return run_walk(variant_from_name(variant, eta), {g, tau}, steps, init);
      },
      py::arg("variant") = "damped", py::arg("eta") = 0.0, py::arg("g") = 1.0, py::arg("tau"), py::arg("n_max"),
      py::arg("steps"), "Fock distributions from |e>|0> after 0..steps walk steps.");
  m.def(
      "partial_trace_coin",
      [](const CMatrix& rho, int n_max) { return partial_trace_coin(rho, SystemSpace::with_n_max(n_max)); },
      py::arg("rho"), py::arg("n_max"));
  m.def(
      "propagate",
      [](const CMatrix& h, const std::vector<std::pair<CMatrix, double>>& collapses, const CMatrix& rho, double t) {
        std::vector<Collapse> cs;
        for (const auto& [op, rate] : collapses) cs.push_back({op, rate});
        return propagate(Lindbladian(h, cs), DensityMatrix(rho), t).mat();
      },
      py::arg("hamiltonian"), py::arg("collapses"), py::arg("rho"), py::arg("t"),
      "Exact Lindblad propagation; collapses is a list of (operator, rate) pairs.");
  m.def(
      "liouvillian",
      [](const CMatrix& h, const std::vector<std::pair<CMatrix, double>>& collapses) {
        std::vector<Collapse> cs;
        for (const auto& [op, rate] : collapses) cs.push_back({op, rate});
        return liouvillian_matrix(Lindbladian(h, cs));
      },
      py::arg("hamiltonian"), py::arg("collapses"), "Superoperator acting on column-stacked density matrices.");

  py::enum_<JcPhaseModel>(m, "JcPhaseModel")
      .value("UNITARY", JcPhaseModel::Unitary)
      .value("LINDBLAD", JcPhaseModel::Lindblad);
  py::enum_<DecayCoupling>(m, "DecayCoupling").value("OFF", DecayCoupling::Off).value("DETUNED", DecayCoupling::Detuned);

  py::class_<ProtocolParams>(m, "ProtocolParams")
      .def(py::init<>())
      .def_readwrite("g", &ProtocolParams::g)
      .def_readwrite("delta_g", &ProtocolParams::delta_g)
      .def_readwrite("gamma", &ProtocolParams::gamma)
      .def_readwrite("gamma_c", &ProtocolParams::gamma_c)
      .def_readwrite("gamma_sted", &ProtocolParams::gamma_sted)
      .def_readwrite("sigma_n", &ProtocolParams::sigma_n)
      .def_readwrite("n_target", &ProtocolParams::n_target)
      .def_readwrite("k", &ProtocolParams::k)
      .def_readwrite("n_max", &ProtocolParams::n_max)
      .def_readwrite("steps", &ProtocolParams::steps)
      .def_readwrite("trajectories", &ProtocolParams::trajectories)
      .def_readwrite("seed", &ProtocolParams::seed)
      .def_readwrite("tau_gamma", &ProtocolParams::tau_gamma)
      .def_readwrite("jc_phase", &ProtocolParams::jc_phase)
      .def_readwrite("decay_coupling", &ProtocolParams::decay_coupling)
      .def_readwrite("threads", &ProtocolParams::threads)
      .def("resolved", &ProtocolParams::resolved)
      .def("validate", &ProtocolParams::validate)
      .def("trapping_time", &ProtocolParams::trapping_time)
      .def("decay_time", &ProtocolParams::decay_time)
      .def("resolved_n_max", &ProtocolParams::resolved_n_max);

  m.def(
      "run_protocol", [](const ProtocolParams& p) { return records_to_dict(run_protocol(p)); }, py::arg("params"),
      "Per-step ensemble records as a dict of lists.");
  m.def(
      "protocol_step",
      [](const CMatrix& rho, const ProtocolParams& p, double delta_tau, double delta_x) {
        return protocol_step(DensityMatrix(rho), p, {delta_tau, delta_x}).mat();
      },
      py::arg("rho"), py::arg("params"), py::arg("delta_tau") = 0.0, py::arg("delta_x") = 0.0);
  m.def(
      "stabilization_step",
      [](const std::vector<double>& f, int window, double tol) {
        return stabilization_step(std::span<const double>(f), window, tol);
      },
      py::arg("fidelities"), py::arg("window") = 10, py::arg("tolerance") = 0.005);

  m.def(
      "analytic_fidelity",
      [](int n, double m_, double alpha, double r) { return analytic_fidelity({n, m_, alpha, r}); },
      py::arg("n_target"), py::arg("wait_multiple") = 5.0, py::arg("alpha") = 0.5, py::arg("rate_ratio") = 1e-5);
  m.def(
      "balance_fidelity", [](int n, double m_, double alpha, double r) { return balance_fidelity({n, m_, alpha, r}); },
      py::arg("n_target"), py::arg("wait_multiple") = 5.0, py::arg("alpha") = 0.5, py::arg("rate_ratio") = 1e-5);
  m.def(
      "fidelity_curve",
      [](const ProtocolParams& base, const std::vector<int>& targets, double alpha, double m_, double r) {
        py::list out;
        for (const auto& row : fidelity_curve(base, targets, alpha, m_, r)) {
          py::dict d;
          d["n_T"] = row.n_target;
          d["F_analytic"] = row.analytic;
          d["F_numeric"] = row.numeric;
          d["alpha_estimate"] = row.alpha;
          d["stationary_step"] = row.stationary_step;
          out.append(d);
        }
        return out;
      },
      py::arg("base"), py::arg("targets"), py::arg("alpha") = 0.5, py::arg("wait_multiple") = 5.0,
      py::arg("rate_ratio") = 1e-5);

  m.def(
      "validate",
      [] {
        py::list out;
        for (const auto& c : cmd_validate()) out.append(py::make_tuple(c.name, c.passed, c.detail));
        return out;
      },
      "Run the invariant suite; returns (name, passed, detail) tuples.");
}
