#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmeas/errors.hpp"
#include "qmeas/scenario.hpp"

namespace py = pybind11;
using namespace qmeas;

namespace {

SpaceLayout make_layout(const std::vector<std::pair<std::string, std::size_t>>& factors) {
  std::vector<SpaceFactor> out;
  for (const auto& [label, dim] : factors) out.push_back({label, dim});
  return SpaceLayout(std::move(out));
}

std::vector<std::pair<std::string, std::size_t>> layout_factors(const SpaceLayout& layout) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& f : layout.factors()) out.emplace_back(f.label, f.dim);
  return out;
}

py::dict breuer_dict(const BreuerReport& r) {
  py::dict d;
  d["indistinguishable"] = r.indistinguishable;
  d["max_basis_deviation"] = r.max_basis_deviation;
  d["max_deviation"] = r.max_deviation;
  d["worst_element"] = r.worst_element;
  d["worst_is_generator"] = r.worst_is_generator;
  d["worst_index"] = r.worst_index;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Measurement-model simulator: states, operator algebras, and event pipelines.";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  (void)validation;

  py::class_<SpaceLayout>(m, "SpaceLayout")
      .def(py::init(&make_layout), py::arg("factors"))
      .def_property_readonly("factors", &layout_factors)
      .def_property_readonly("total_dim", &SpaceLayout::total_dim)
      .def("dim", &SpaceLayout::dim)
      .def("__eq__", &SpaceLayout::operator==)
      .def("__repr__", [](const SpaceLayout& l) {
        std::string s = "SpaceLayout([";
        for (std::size_t i = 0; i < l.factors().size(); ++i) {
          s += (i ? ", " : "") + std::string("('") + l.factors()[i].label + "', " +
               std::to_string(l.factors()[i].dim) + ")";
        }
        return s + "])";
      });

  m.def("tensor", py::overload_cast<const ComplexMatrix&, const ComplexMatrix&>(&tensor));
  m.def("partial_trace",
        [](const ComplexMatrix& mat, const SpaceLayout& layout, const std::vector<std::string>& keep) {
          return partial_trace(mat, layout, std::span<const std::string>(keep));
        },
        py::arg("matrix"), py::arg("layout"), py::arg("keep"));
  m.def("hermitian_eig",
        [](const ComplexMatrix& mat) {
          const auto e = hermitian_eig(mat);
          return py::make_tuple(RealVector(e.values), ComplexMatrix(e.vectors));
        },
        "Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix.");
  m.def("unitary_from_hamiltonian", &unitary_from_hamiltonian, py::arg("h"), py::arg("t"));
  m.def("hs_inner", &hs_inner);

  py::class_<StateVector>(m, "StateVector")
      .def(py::init<SpaceLayout, ComplexVector>(), py::arg("layout"), py::arg("amplitudes"))
      .def_static("basis", &StateVector::basis)
      .def_property_readonly("layout", &StateVector::layout)
      .def_property_readonly("amplitudes", &StateVector::amplitudes)
      .def("fidelity", &StateVector::fidelity);

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<SpaceLayout, ComplexMatrix>(), py::arg("layout"), py::arg("matrix"))
      .def_property_readonly("layout", &DensityMatrix::layout)
      .def_property_readonly("matrix", &DensityMatrix::matrix)
      .def("purity", &DensityMatrix::purity)
      .def("reduced", [](const DensityMatrix& d, const std::vector<std::string>& keep) {
        return d.reduced(std::span<const std::string>(keep));
      });

  py::class_<Gemenge>(m, "Gemenge")
      .def(py::init([](const std::vector<std::pair<StateVector, double>>& rows) {
             std::vector<GemengeRow> out;
             for (const auto& [state, p] : rows) out.push_back({state, p});
             return Gemenge(std::move(out));
           }),
           py::arg("rows"))
      .def("probabilities", &Gemenge::probabilities)
      .def("__len__", &Gemenge::size);

  m.def("density_from_vector", &density_from_vector);
  m.def("gemenge_mix", &gemenge_mix);
  m.def("expectation", py::overload_cast<const DensityMatrix&, const ComplexMatrix&>(&expectation));
  m.def("expectation", py::overload_cast<const StateVector&, const ComplexMatrix&>(&expectation));

  py::class_<OperatorAlgebra, std::shared_ptr<OperatorAlgebra>>(m, "OperatorAlgebra")
      .def_property_readonly("dimension", &OperatorAlgebra::dimension)
      .def_property_readonly("commutative", &OperatorAlgebra::commutative)
      .def_property_readonly("basis", &OperatorAlgebra::basis)
      .def("contains", [](const OperatorAlgebra& a, const ComplexMatrix& x) { return contains(a, x); })
      .def("max_commutator", [](const OperatorAlgebra& a) { return max_commutator(a); });

  m.def("generate_algebra",
        [](const std::vector<ComplexMatrix>& gens, const SpaceLayout& layout, double tol) {
          return std::const_pointer_cast<OperatorAlgebra>(share(generate_algebra(gens, layout, tol)));
        },
        py::arg("generators"), py::arg("layout"), py::arg("tol") = tolerance::kAlgebraRank);

  m.def("extremal_states", [](const std::shared_ptr<OperatorAlgebra>& alg) {
    py::list out;
    for (const auto& c : extremal_states(alg)) {
      py::dict d;
      d["values"] = c.values;
      d["projector"] = c.projector;
      out.append(d);
    }
    return out;
  });
  m.def("restrict_state", [](const DensityMatrix& rho, const std::shared_ptr<OperatorAlgebra>& alg) {
    return ComplexVector(restrict_state(rho, alg).values());
  }, "Values of the restricted state on the algebra's orthonormal basis.");
  m.def("decompose_restricted", [](const DensityMatrix& rho, const std::shared_ptr<OperatorAlgebra>& alg) {
    return decompose_restricted(restrict_state(rho, alg), alg).probabilities();
  }, "Character weights of a density matrix restricted to a commutative algebra.");
  m.def("breuer_indistinguishable",
        [](const DensityMatrix& a, const DensityMatrix& b, const std::shared_ptr<OperatorAlgebra>& alg, double tol) {
          return breuer_dict(breuer_indistinguishable(a, b, alg, tol));
        },
        py::arg("rho1"), py::arg("rho2"), py::arg("algebra"), py::arg("tol") = tolerance::kStateEquality);

  py::class_<EnvironmentConfig>(m, "EnvironmentConfig")
      .def(py::init([](std::size_t e_dim, double g, double overlap) { return EnvironmentConfig{e_dim, g, overlap}; }),
           py::arg("e_dim") = 3, py::arg("coupling_strength") = 1.0, py::arg("e_overlap") = 0.0)
      .def_readwrite("e_dim", &EnvironmentConfig::e_dim)
      .def_readwrite("coupling_strength", &EnvironmentConfig::coupling_strength)
      .def_readwrite("e_overlap", &EnvironmentConfig::e_overlap);

  py::class_<MeasurementModel>(m, "MeasurementModel")
      .def(py::init<>())
      .def_readwrite("s_dim", &MeasurementModel::s_dim)
      .def_readwrite("o_dim", &MeasurementModel::o_dim)
      .def_readwrite("q_values", &MeasurementModel::q_values)
      .def_readwrite("qo_values", &MeasurementModel::qo_values)
      .def_readwrite("interaction_duration", &MeasurementModel::interaction_duration)
      .def_readwrite("environment", &MeasurementModel::environment)
      .def("validate", &MeasurementModel::validate)
      .def("system_layout", &MeasurementModel::system_layout)
      .def("pointer_layout", &MeasurementModel::pointer_layout)
      .def("ms_layout", &MeasurementModel::ms_layout)
      .def("mse_layout", &MeasurementModel::mse_layout);

  m.def("system_observable", &system_observable);
  m.def("pointer_observable", &pointer_observable);
  m.def("initial_state", &initial_state);
  m.def("premeasurement_unitary", &premeasurement_unitary);
  m.def("interaction_hamiltonian", &interaction_hamiltonian);
  m.def("interference_observable", &interference_observable);
  m.def("branch_gemenge", &branch_gemenge);
  m.def("couple_environment", py::overload_cast<const MeasurementModel&, const DensityMatrix&>(&couple_environment));
  m.def("extract_pointer_basis", [](const DensityMatrix& rho, double tol) {
    const auto r = extract_pointer_basis(rho, tol);
    py::dict d;
    d["vectors"] = r.vectors;
    d["weights"] = r.weights;
    d["status"] = to_string(r.status);
    d["residual"] = r.residual;
    return d;
  }, py::arg("rho_mse"), py::arg("tol") = tolerance::kReconstruction);
  m.def("pointer_state_stability", [](const MeasurementModel& model, const StateVector& o, const std::vector<double>& t) {
    return pointer_state_stability(model, o, t);
  });

  py::class_<EventRecord>(m, "EventRecord")
      .def_readonly("event_index", &EventRecord::event_index)
      .def_readonly("seed", &EventRecord::seed)
      .def_readonly("input_descriptor", &EventRecord::input_descriptor)
      .def_readonly("gemenge_row", &EventRecord::gemenge_row)
      .def_readonly("pointer_index", &EventRecord::pointer_index)
      .def_readonly("impression_value", &EventRecord::impression_value)
      .def_readonly("probability_used", &EventRecord::probability_used);

  py::class_<MeasurementPipeline>(m, "MeasurementPipeline")
      .def(py::init<MeasurementModel>())
      .def("evolve", &MeasurementPipeline::evolve)
      .def("run_events",
           [](const MeasurementPipeline& p, const StateVector& psi, std::size_t n, std::uint64_t seed, unsigned threads) {
             py::gil_scoped_release release;
             return p.run_events(psi, n, seed, threads);
           },
           py::arg("input"), py::arg("n_events"), py::arg("seed"), py::arg("threads") = 1)
      .def("run_events",
           [](const MeasurementPipeline& p, const Gemenge& w, std::size_t n, std::uint64_t seed, unsigned threads) {
             py::gil_scoped_release release;
             return p.run_events(w, n, seed, threads);
           },
           py::arg("input"), py::arg("n_events"), py::arg("seed"), py::arg("threads") = 1);

  m.def("wigner_friend_report",
        [](const MeasurementModel& model, const StateVector& psi, std::size_t n, std::uint64_t seed) {
          const auto r = wigner_friend_report(model, psi, n, seed);
          py::dict d;
          d["interference_expectation"] = r.interference_expectation;
          d["purity"] = r.purity;
          d["histogram"] = r.histogram;
          d["frequencies"] = r.frequencies;
          d["born_probabilities"] = r.born_probabilities;
          d["restricted_weights"] = r.restricted_weights;
          d["observer_view"] = breuer_dict(r.observer_view);
          d["with_interference"] = breuer_dict(r.with_interference);
          return d;
        },
        py::arg("model"), py::arg("psi_s"), py::arg("n_events"), py::arg("seed"));

  m.def("run_scenario_text",
        [](const std::string& text, const std::string& format, std::optional<std::uint64_t> seed,
           std::optional<std::size_t> n_events) {
          auto cfg = parse_scenario(text);
          if (seed) cfg.seed = *seed;
          if (n_events) cfg.n_events = *n_events;
          RunReport report;
          {
            py::gil_scoped_release release;
            report = run_scenario(cfg);
          }
          return py::make_tuple(emit_report(report, output_format_from_string(format)),
                                emit_event_log(report.events));
        },
        py::arg("text"), py::arg("format") = "json", py::arg("seed") = py::none(), py::arg("n_events") = py::none(),
        "Run a scenario document; returns (report, event_log_csv).");
}
