#include "ptres/cli.hpp"
#include "ptres/io.hpp"
#include "ptres/monotones.hpp"
#include "ptres/superprocess.hpp"
#include "ptres/theories.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ptres;

namespace {

py::dict report_dict(const MonotoneReport& r) {
  py::dict d;
  d["value"] = r.value;
  d["exact"] = r.exact;
  d["method"] = r.method;
  d["note"] = r.note;
  d["dual_bound"] = r.dual_bound ? py::cast(*r.dual_bound) : py::none();
  d["witness"] = r.witness ? py::cast(*r.witness) : py::none();
  py::dict diag;
  for (const auto& v : r.diagnostics) diag[py::str(v.name)] = v.value;
  d["diagnostics"] = diag;
  return d;
}

DensityOperator state_on_s(const Mat& rho) {
  return DensityOperator(LabeledOperator({Leg{"s", static_cast<int>(rho.rows()), Role::Ancilla, 0}}, rho));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Process tensors, superprocesses and resource monotones";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<LabelingError>(m, "LabelingError", PyExc_ValueError);
  py::register_exception<ConstraintError>(m, "ConstraintError", PyExc_ValueError);
  py::register_exception<CapabilityError>(m, "CapabilityError", PyExc_NotImplementedError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<QuantumChannel>(m, "QuantumChannel")
      .def(py::init([](const Mat& choi, std::vector<int> in_dims, std::vector<int> out_dims, bool tp, double tol) {
             return QuantumChannel(choi, std::move(in_dims), std::move(out_dims), tp, tol);
           }),
           py::arg("choi"), py::arg("in_dims"), py::arg("out_dims"), py::arg("trace_preserving") = true,
           py::arg("tol") = kDefaultTol)
      .def_property_readonly("choi", [](const QuantumChannel& c) { return c.choi().matrix(); })
      .def_property_readonly("in_dims", &QuantumChannel::in_dims)
      .def_property_readonly("out_dims", &QuantumChannel::out_dims)
      .def("kraus", [](const QuantumChannel& c) { return choi_to_kraus(c); })
      .def("apply", [](const QuantumChannel& c, const Mat& rho) { return apply_channel(c, state_on_s(rho)).matrix(); })
      .def("is_entanglement_breaking",
           [](const QuantumChannel& c) { return std::string(tri_name(is_entanglement_breaking(c).verdict)); });

  py::class_<ProcessTensor>(m, "ProcessTensor")
      .def_property_readonly("choi", [](const ProcessTensor& t) { return t.choi().matrix(); })
      .def_property_readonly("steps", &ProcessTensor::steps)
      .def_property_readonly("legs", [](const ProcessTensor& t) { return t.choi().names(); })
      .def_property_readonly("dims", [](const ProcessTensor& t) { return t.choi().dims(); })
      .def_property_readonly("open_input", [](const ProcessTensor& t) { return t.mode() == InitialMode::OpenInput; })
      .def("normalized", &ProcessTensor::normalized)
      .def("validate",
           [](const ProcessTensor& t, double tol) {
             auto r = validate_causality(t, tol);
             py::dict d;
             d["pass"] = r.pass;
             d["psd"] = r.psd;
             d["min_eigenvalue"] = r.min_eigenvalue;
             d["max_deviation"] = r.max_deviation;
             d["deviations"] = r.deviations;
             return d;
           },
           py::arg("tol") = kDefaultTol)
      .def("with_choi",
           [](const ProcessTensor& t, const Mat& c) {
             return ProcessTensor(t.choi().with_matrix(c), t.steps(), t.mode());
           });

  py::class_<Superprocess>(m, "Superprocess")
      .def_property_readonly("theory", [](const Superprocess& z) { return z.theory().name(); })
      .def_property_readonly("steps", &Superprocess::steps)
      .def_property_readonly("dz", &Superprocess::dz)
      .def("choi", [](const Superprocess& z) { return superprocess_choi(z).matrix(); });

  // channels
  m.def("identity_channel", [](int d) { return identity_channel({d}); }, py::arg("d"));
  m.def("unitary_channel", [](const Mat& u) { return unitary_channel(u); }, py::arg("u"));
  m.def("depolarizing_channel", &depolarizing_channel, py::arg("d"), py::arg("p"));
  m.def("dephasing_channel", &dephasing_channel, py::arg("d"));
  m.def("fixed_output_channel", [](const Mat& tau, int d_in) { return fixed_output_channel(tau, d_in); },
        py::arg("tau"), py::arg("d_in"));
  m.def("kraus_to_channel", [](const std::vector<Mat>& k) { return kraus_to_channel(k); }, py::arg("kraus"));
  m.def("random_channel", [](int d_in, int d_out, int env, std::uint64_t seed) {
    return random_channel(d_in, d_out, env, seed);
  }, py::arg("d_in"), py::arg("d_out"), py::arg("env_dim") = 2, py::arg("seed") = 0);

  // processes
  m.def("markov_process", [](const std::vector<QuantumChannel>& ch, const Mat& rho0) {
    return markov_process(ch, state_on_s(rho0));
  }, py::arg("channels"), py::arg("rho0"));
  m.def("markov_open_process", &markov_open_process, py::arg("channels"));
  m.def("random_process_tensor", [](int steps, int ds, int de, std::uint64_t seed, bool pure) {
    Rng rng(seed);
    return random_process_tensor(steps, ds, de, rng, pure);
  }, py::arg("steps"), py::arg("ds") = 2, py::arg("de") = 2, py::arg("seed") = 0, py::arg("pure") = false);
  m.def("primitive_free_process", &primitive_free_process, py::arg("n"), py::arg("s_dim"), py::arg("taus"));
  m.def("read_process", [](const std::string& p) { return read_process(p); }, py::arg("path"));
  m.def("write_process", &write_process, py::arg("path"), py::arg("process"));

  // theories and superprocesses
  m.def("memory_signature", [](const std::string& th) {
    auto s = memory_signature(parse_theory(th));
    return py::make_tuple(memory_length_name(s.classical), memory_length_name(s.quantum));
  }, py::arg("theory"));
  m.def("theories", [] {
    std::vector<std::string> v;
    for (const auto& t : all_theories()) v.push_back(t.name());
    return v;
  });
  m.def("check_membership", [](const std::string& th, const ProcessTensor& t, double tol) {
    auto v = check_membership(parse_theory(th), t, tol);
    return py::make_tuple(std::string(verdict_name(v.verdict)), v.certificate);
  }, py::arg("theory"), py::arg("process"), py::arg("tol") = kDefaultTol);
  m.def("sample_free_process", [](const std::string& th, int n, int ds, int dz, std::uint64_t seed) {
    return sample_free_process(parse_theory(th), n, ds, dz, seed);
  }, py::arg("theory"), py::arg("steps") = 2, py::arg("ds") = 2, py::arg("dz") = 1, py::arg("seed") = 0);
  m.def("identity_superprocess", &identity_superprocess, py::arg("steps"), py::arg("ds") = 2);
  m.def("random_free_superprocess", [](const std::string& th, int steps, int ds, int dz, std::uint64_t seed) {
    Rng rng(seed);
    return random_free_superprocess(parse_theory(th), steps, ds, dz, rng);
  }, py::arg("theory"), py::arg("steps"), py::arg("ds") = 2, py::arg("dz") = 1, py::arg("seed") = 0);
  m.def("transplant_superprocess", [](const std::string& th, const QuantumChannel& target, int steps) {
    return transplant_superprocess(parse_theory(th), target, steps);
  }, py::arg("theory"), py::arg("target"), py::arg("steps"));
  m.def("left_action", [](const ProcessTensor& t, const Superprocess& z, const std::string& path) {
    LeftPath p = path == "circuit" ? LeftPath::Circuit : path == "choi" ? LeftPath::Choi : LeftPath::Contraction;
    if (path != "circuit" && path != "choi" && path != "contraction") throw py::value_error("path: " + path);
    return left_action(t, z, p);
  }, py::arg("process"), py::arg("superprocess"), py::arg("path") = "contraction");

  // monotones
  m.def("non_markovianity", [](const ProcessTensor& t, double tol) { return report_dict(non_markovianity(t, tol)); },
        py::arg("process"), py::arg("tol") = kDefaultTol);
  m.def("distance_to_free_set", [](const ProcessTensor& t, const std::string& th, const std::string& kind) {
    return report_dict(distance_to_free_set(t, parse_theory(th), parse_distance_kind(kind)));
  }, py::arg("process"), py::arg("theory"), py::arg("kind") = "relative-entropy");
  m.def("global_robustness", [](const ProcessTensor& t, const std::string& rel) {
    return report_dict(global_robustness(t, parse_relaxation(rel)));
  }, py::arg("process"), py::arg("relaxation") = "ppt-eb");
  m.def("dmax_to_free_set", [](const ProcessTensor& t, const std::string& rel) {
    return report_dict(dmax_to_free_set(t, parse_relaxation(rel)));
  }, py::arg("process"), py::arg("relaxation") = "ppt-eb");
  m.def("thm3_check", [](const ProcessTensor& t, const std::string& rel, double tol) {
    auto r = thm3_check(t, parse_relaxation(rel), tol);
    py::dict d;
    d["robustness"] = r.robustness;
    d["log_robustness"] = r.log_robustness;
    d["dmax"] = r.dmax;
    d["difference"] = r.difference;
    d["pass"] = r.pass;
    return d;
  }, py::arg("process"), py::arg("relaxation") = "ppt-eb", py::arg("tol") = 1e-4);
  m.def("monotonicity_audit", [](const std::string& th, const std::string& mono, int trials, std::uint64_t seed) {
    auto r = monotonicity_audit(parse_theory(th), parse_audit_monotone(mono), trials, seed);
    py::dict d;
    d["trials"] = r.trials;
    d["violations"] = r.violations;
    d["min_delta"] = r.min_delta;
    d["pass"] = r.pass;
    return d;
  }, py::arg("theory"), py::arg("monotone"), py::arg("trials") = 10, py::arg("seed") = 0);

  m.def("run_command", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run_command(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
