#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hopf/calculus.hpp"
#include "hopf/cli.hpp"
#include "hopf/repr.hpp"
#include "hopf/verify.hpp"

namespace py = pybind11;
using namespace hopf;

namespace {

// translate the library's error hierarchy to python exceptions with exit codes
void register_errors(py::module_& m) {
  static py::exception<Error> base(m, "HopfError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ParseError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const PrecisionError& e) {
      PyErr_SetString(PyExc_ArithmeticError, e.what());
    } catch (const EllipticityError& e) {
      PyErr_SetString(PyExc_ArithmeticError, e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });
}

}  // namespace

PYBIND11_MODULE(_hopfpdo, m) {
  m.doc() = "matrix-symbol calculus for pseudo-differential operators on "
            "homogeneous line bundles over the Hopf fibration";
  register_errors(m);

  py::class_<su2::GroupElement>(m, "GroupElement")
      .def(py::init<cd, cd>(), py::arg("alpha"), py::arg("beta"))
      .def_static("identity", &su2::GroupElement::identity)
      .def_readonly("alpha", &su2::GroupElement::alpha)
      .def_readonly("beta", &su2::GroupElement::beta)
      .def("matrix", &su2::GroupElement::matrix)
      .def("__mul__", [](const su2::GroupElement& a, const su2::GroupElement& b) {
        return su2::multiply(a, b);
      });
  m.def("from_angles", &su2::from_angles, py::arg("xi1"), py::arg("xi2"), py::arg("eta"));

  py::class_<su2::AlgebraElement>(m, "AlgebraElement")
      .def(py::init<cd, cd, cd>(), py::arg("h"), py::arg("x"), py::arg("y"))
      .def_static("H", &su2::AlgebraElement::H)
      .def_static("X", &su2::AlgebraElement::X)
      .def_static("Y", &su2::AlgebraElement::Y)
      .def("matrix", &su2::AlgebraElement::matrix);

  m.def("irrep_matrix", &repr::irrep_matrix, py::arg("twol"), py::arg("g"));
  m.def("derived_rep", &repr::derived_rep, py::arg("twol"), py::arg("a"));
  m.def("casimir_eigenvalue", &repr::casimir_eigenvalue, py::arg("twol"));
  m.def("weight_bracket", &repr::weight_bracket, py::arg("twol"));
  m.def("lambda_weight", &repr::lambda_weight, py::arg("twol"));
  m.def("casimir_csv", &repr::casimir_csv, py::arg("twol_max"), py::arg("with_lambda") = false);

  py::class_<fourier::Coeffs>(m, "Coeffs")
      .def_static("zero", &fourier::Coeffs::zero, py::arg("twol_max"))
      .def_readonly("twol_max", &fourier::Coeffs::twol_max)
      .def_readwrite("blocks", &fourier::Coeffs::blocks)
      .def("l2_norm", [](const fourier::Coeffs& c) { return fourier::l2_norm(c); });
  m.def("coeffs_to_json", &fourier::coeffs_to_json);
  m.def("coeffs_from_json", &fourier::coeffs_from_json);

  py::class_<fourier::EngineParams>(m, "EngineParams")
      .def(py::init<>())
      .def_readwrite("twol_max", &fourier::EngineParams::twol_max)
      .def_readwrite("twolx_max", &fourier::EngineParams::twolx_max)
      .def_readwrite("bundle", &fourier::EngineParams::bundle)
      .def_readwrite("order", &fourier::EngineParams::order)
      .def_readwrite("seed", &fourier::EngineParams::seed)
      .def_readwrite("cache_dir", &fourier::EngineParams::cache_dir);

  py::class_<fourier::Engine>(m, "Engine")
      .def(py::init<const fourier::EngineParams&>(), py::arg("params"))
      .def_readonly("params", &fourier::Engine::p)
      .def_readonly("twol_grid", &fourier::Engine::twol_grid)
      .def_readonly("twolx_grid", &fourier::Engine::twolx_grid)
      .def("forward",
           [](const fourier::Engine& e, const Vec& samples, int out_twol) {
             return e.Y.forward(samples, out_twol);
           })
      .def("inverse",
           [](const fourier::Engine& e, const fourier::Coeffs& c) {
             return e.Y.inverse(op::padded(c, e.Y.band));
           })
      .def("random_section", [](const fourier::Engine& e, int n, int twol_max) {
        RandomStream rng(seed_for(e.p.seed, "python-section"));
        return fourier::random_section(n, twol_max, rng).coeffs;
      });

  py::class_<sym::Symbol>(m, "Symbol")
      .def_readonly("twol_max", &sym::Symbol::twol_max)
      .def_readonly("twolx_max", &sym::Symbol::twolx_max)
      .def_readonly("twol_reliable", &sym::Symbol::twol_reliable)
      .def_readonly("analytic_order", &sym::Symbol::analytic_order)
      .def("invariant", &sym::Symbol::invariant)
      .def("block", [](const sym::Symbol& s, int twol, const su2::GroupElement& x) {
        return sym::evaluate(s, twol, x);
      });

  m.def("identity_symbol", &sym::identity_symbol);
  m.def("laplacian_symbol", &sym::laplacian_symbol);
  m.def("field_symbol", &sym::field_symbol);
  m.def("mult_symbol", &sym::mult_symbol);
  m.def("leibniz_field", &sym::leibniz_field);
  m.def("x_product", &sym::x_product);
  m.def("op_apply", &sym::op_apply);
  m.def("estimate_order", &sym::estimate_order, py::arg("eng"), py::arg("a"),
        py::arg("twol_lo") = -1, py::arg("twol_hi") = -1);

  m.def("compose", &calc::compose);
  m.def("pointwise_inverse",
        [](const fourier::Engine& e, const sym::Symbol& a) { return calc::pointwise_inverse(e, a); });
  m.def("heat_symbol", &calc::heat_symbol);
  m.def("heat_evolve", &calc::heat_evolve);
  m.def("resolvent_symbol", &calc::resolvent_symbol);

  py::class_<calc::GradedSymbol>(m, "GradedSymbol")
      .def(py::init<>())
      .def_readwrite("top_order", &calc::GradedSymbol::top_order)
      .def_readwrite("terms", &calc::GradedSymbol::terms)
      .def("collapse", &calc::GradedSymbol::collapse);
  m.def("parametrix", &calc::parametrix);

  m.def("build_operator_symbol", [](const fourier::Engine& e, const std::string& expr) {
    return cli::build_operator(e, cli::parse_operator_expr(expr)).total;
  });

  py::class_<verify::CheckResult>(m, "CheckResult")
      .def_readonly("name", &verify::CheckResult::name)
      .def_readonly("criterion", &verify::CheckResult::criterion)
      .def_readonly("pass_", &verify::CheckResult::pass)
      .def_readonly("value", &verify::CheckResult::value)
      .def_readonly("tol", &verify::CheckResult::tol)
      .def_readonly("detail", &verify::CheckResult::detail);
  m.def("run_verification", &verify::run_all, py::arg("params"),
        py::arg("tol_overrides") = std::map<std::string, double>{});
}
