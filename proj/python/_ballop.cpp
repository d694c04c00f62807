#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ballop/certificate_json.hpp"
#include "ballop/error.hpp"
#include "ballop/symmetry.hpp"

namespace py = pybind11;
using namespace ballop;

namespace {

// Certificates cross the boundary as plain dicts via their JSON form.
py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

SpaceSpec make_space(int n, std::optional<double> s, std::optional<std::vector<double>> beta, int D) {
  if (s && beta) throw Error(ErrorKind::InvalidArgument, "give either s or beta, not both");
  if (beta) return SpaceSpec::weighted(n, *beta).with_cutoff(D);
  return SpaceSpec::hardy_s(n, s.value_or(static_cast<double>(n)), D);
}

}  // namespace

PYBIND11_MODULE(_ballop, m) {
  m.doc() = "Composition operators with linear fractional symbols on weighted Hardy spaces of the ball";

  py::register_exception<Error>(m, "BallopError", PyExc_ValueError);

  py::class_<SpaceSpec>(m, "Space")
      .def(py::init(&make_space), py::arg("n"), py::arg("s") = py::none(), py::arg("beta") = py::none(),
           py::arg("D"))
      .def_property_readonly("n", &SpaceSpec::dim)
      .def_property_readonly("D", &SpaceSpec::cutoff)
      .def_property_readonly("s", &SpaceSpec::s)
      .def_property_readonly("size", &SpaceSpec::size)
      .def_property_readonly("norm_sq", &SpaceSpec::norm_sq)
      .def("basis", [](const SpaceSpec& s) {
        std::vector<std::vector<int>> out;
        for (const auto& a : s.basis().indices()) out.emplace_back(a.exponents().begin(), a.exponents().end());
        return out;
      })
      .def("__repr__", [](const SpaceSpec& s) { return "Space(" + s.describe() + ")"; });

  py::class_<LinearFractionalMap>(m, "LinearFractionalMap")
      .def(py::init<CMatrix, CVector, CVector, Complex>(), py::arg("A"), py::arg("B"), py::arg("C"),
           py::arg("d") = Complex(1.0))
      .def_property_readonly("A", &LinearFractionalMap::A)
      .def_property_readonly("B", &LinearFractionalMap::B)
      .def_property_readonly("C", &LinearFractionalMap::C)
      .def_property_readonly("d", &LinearFractionalMap::d)
      .def("associated_matrix", &LinearFractionalMap::associated_matrix)
      .def("is_linear", &LinearFractionalMap::is_linear, py::arg("tol") = 0.0)
      .def("__call__", [](const LinearFractionalMap& psi, const CVector& z) { return apply(psi, z); });

  m.def("mobius", &mobius, py::arg("a"));
  m.def("linear_map", &linear_map, py::arg("V"));
  m.def("compose", &compose, py::arg("psi"), py::arg("chi"));
  m.def("involution_defect", &involution_defect, py::arg("psi"));

  m.def(
      "composition_matrix",
      [](const SpaceSpec& space, const LinearFractionalMap& psi) { return composition_matrix(space, psi).M; },
      py::arg("space"), py::arg("psi"),
      "Matrix of the truncated composition operator in the orthonormal monomial basis.");
  m.def(
      "polar_unitary", [](const CMatrix& M) { return polar_decomposition(M, -1.0).unitary; }, py::arg("M"));
  m.def(
      "normality_residual", [](const SpaceSpec& s, const CMatrix& M) { return normality_residual({s, M}); },
      py::arg("space"), py::arg("M"));
  m.def(
      "csym_residual",
      [](const SpaceSpec& s, const CMatrix& T, const CMatrix& J) { return csym_residual({s, T}, {s, J}); },
      py::arg("space"), py::arg("T"), py::arg("J"));
  m.def(
      "conjugation_Ja", [](const SpaceSpec& s, const CVector& a) { return conjugation_Ja(s, a).M; },
      py::arg("space"), py::arg("a"), "Antilinear matrix M of J_a, acting as v -> M conj(v).");
  m.def("takagi", &takagi, py::arg("K"), py::arg("tol") = 1e-12);
  m.def("find_conjugation_2x2", &find_conjugation_2x2, py::arg("V"));

  m.def(
      "certify",
      [](const SpaceSpec& space, const CVector& a, int probe_degree) {
        CertifyOptions opts;
        opts.probe_degree = probe_degree;
        return to_python(certificate_to_json(certify(space, a, opts)));
      },
      py::arg("space"), py::arg("a"), py::arg("probe_degree") = -1);
  m.def(
      "jv_pipeline",
      [](const SpaceSpec& space, const CMatrix& V, const CMatrix& K) {
        return to_python(certificate_to_json(jv_pipeline(space, V, K)));
      },
      py::arg("space"), py::arg("V"), py::arg("K"));
}
