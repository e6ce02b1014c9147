#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "volterra/error.hpp"
#include "volterra/heat.hpp"
#include "volterra/kernel_transform.hpp"
#include "volterra/parametrix.hpp"
#include "volterra/parse.hpp"
#include "volterra/summation.hpp"

namespace py = pybind11;
using namespace volterra;

namespace {

// JSON crosses the boundary as text; the Python side wraps these with json.loads / json.dumps.
std::string parametrix_json(const std::string& op, int J) {
    auto spec = OperatorSpec::from_json(Json::parse(op));
    auto comps = parametrix_components(spec, J);
    Json j = comps.to_json();
    j["compose_check"] = compose_check(spec, comps, J).to_json();
    return j.dump();
}

std::string heat_json(const std::string& op, int J, const std::vector<double>& x, double resolution) {
    return heat_coefficients(OperatorSpec::from_json(Json::parse(op)), J, x, resolution).to_json().dump();
}

std::string sum_json(const std::string& expansion, const std::string& method, int depth, int budget,
                     std::uint64_t seed) {
    SummationOptions o;
    if (depth >= 0) o.n_max = static_cast<std::size_t>(depth);
    o.budget = budget;
    o.seed = seed;
    o.estimate_grid.seed = seed;
    o.analyticity.seed = seed;
    return realize(parse_method(method), SymbolExpansion::from_json(Json::parse(expansion)), o).to_json().dump();
}

std::string kernel_json(const std::string& symbol, double x, const std::vector<double>& y,
                        const std::vector<double>& t, double tol, double resolution) {
    Json in = Json::parse(symbol);
    KernelOptions opts;
    opts.tol = tol;
    opts.resolution = resolution;
    if (in.contains("method")) {
        return inverse_fourier_kernel(RealizedSymbol::from_json(in), x, y, t, opts).to_json().dump();
    }
    auto exp = SymbolExpansion::from_json(in);
    if (exp.size() == 0) throw InvalidArgument("empty expansion");
    SymExpr sum(exp.context());
    for (const auto& e : exp.entries()) sum += e.symbol;
    return inverse_fourier_kernel(ExprFunction(sum), exp.entries().front().order, x, y, t, opts).to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Volterra symbol calculus";

    auto base = py::register_exception<Error>(m, "VolterraError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<PoleError>(m, "PoleError", base.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    auto cert = py::register_exception<CertificationError>(m, "CertificationError", base.ptr());
    py::register_exception<PositivityError>(m, "PositivityError", cert.ptr());
    py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());

    py::class_<Context, std::shared_ptr<Context>>(m, "Context")
        .def_readonly("n", &Context::n)
        .def_readonly("w", &Context::w)
        .def_property_readonly("principal", [](const Context& c) { return c.principal.to_string(); });

    m.def(
        "context",
        [](int n, int w, const std::string& principal) {
            ContextPtr ctx = principal.empty() ? make_euclidean_context(n, w)
                                               : make_context(n, w, parse_poly(principal, n));
            return std::const_pointer_cast<Context>(ctx);
        },
        py::arg("n"), py::arg("w"), py::arg("principal") = "");

    py::class_<SymExpr>(m, "SymExpr")
        .def(py::init([](const std::string& text, std::shared_ptr<Context> ctx) { return parse_expr(text, ctx); }), py::arg("text"),
             py::arg("ctx"))
        .def("__call__",
             [](const SymExpr& e, std::vector<double> x, std::vector<double> xi, Complex tau) {
                 return e.evaluate(x, xi, tau);
             },
             py::arg("x"), py::arg("xi"), py::arg("tau"))
        .def("d_x", [](const SymExpr& e, int i) { return e.differentiate(Var::x(i)); })
        .def("d_xi", [](const SymExpr& e, int i) { return e.differentiate(Var::xi(i)); })
        .def("d_tau", [](const SymExpr& e) { return e.differentiate(Var::tau()); })
        .def("degree",
             [](const SymExpr& e) -> py::object {
                 auto d = e.infer_degree();
                 if (d.homogeneous()) return py::int_(d.degree);
                 return py::none();
             })
        .def("is_zero", &SymExpr::is_zero)
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def(py::self == py::self)
        .def("__str__", &SymExpr::to_string)
        .def("__repr__", [](const SymExpr& e) { return "SymExpr('" + e.to_string() + "')"; });

    m.def("pseudo_norm", [](std::vector<double> xi, Complex tau, int w) { return pseudo_norm(xi, tau, w); });
    m.def("rho", [](std::vector<double> xi, Complex tau, int w) { return rho(xi, tau, w); });
    m.def("a_epsilon", [](double eps, std::vector<double> xi, Complex tau, int w) { return a_epsilon(eps, xi, tau, w); });
    m.def("mehler_oracle", &mehler_oracle, py::arg("t"), py::arg("x"));
    m.def("mehler_taylor", &mehler_taylor, py::arg("x"), py::arg("K"));

    m.def("_parametrix", &parametrix_json);
    m.def("_heat", &heat_json);
    m.def("_sum", &sum_json);
    m.def("_kernel", &kernel_json);
}
