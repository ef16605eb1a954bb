#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "phidiv/deformed_exp.hpp"
#include "phidiv/divergence.hpp"
#include "phidiv/errors.hpp"
#include "phidiv/family.hpp"
#include "phidiv/properties.hpp"
#include "phidiv/simplex.hpp"

namespace py = pybind11;
using namespace phidiv;
using nlohmann::ordered_json;

namespace {

py::object json_to_py(const ordered_json& j) {
  switch (j.type()) {
    case nlohmann::detail::value_t::null:
      return py::none();
    case nlohmann::detail::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::detail::value_t::number_integer:
      return py::int_(j.get<long long>());
    case nlohmann::detail::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case nlohmann::detail::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::detail::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::detail::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case nlohmann::detail::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
      return out;
    }
    default:
      return py::none();
  }
}

py::dict report_to_py(const CheckReport& r) {
  py::dict out;
  out["verdict"] = to_string(r.verdict);
  out["worst_margin"] = r.worst_margin;
  out["strict"] = r.strict;
  out["witness"] = json_to_py(r.witness);
  out["grid"] = py::dict(py::arg("grid_n") = r.grid.grid_n, py::arg("delta") = r.grid.delta,
                         py::arg("samples") = r.grid.samples);
  out["seed"] = r.seed;
  return out;
}

Distribution to_dist(const std::vector<double>& w) { return make_distribution(w); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deformed-exponential divergences on the probability simplex";

  py::register_exception<Error>(m, "PhidivError", PyExc_ValueError);

  py::class_<DeformedExponential>(m, "Phi")
      .def_static("parse", &DeformedExponential::parse, py::arg("spec"))
      .def_static("exp", &DeformedExponential::exponential)
      .def_static("qexp", &DeformedExponential::q_exponential, py::arg("q"))
      .def_static("affq", &DeformedExponential::affine_q_exp, py::arg("q"), py::arg("b"),
                  py::arg("a"))
      .def("__call__", &DeformedExponential::phi, py::arg("x"))
      .def("phi", &DeformedExponential::phi, py::arg("x"))
      .def("phi_inv", &DeformedExponential::phi_inv, py::arg("x"))
      .def(
          "derivative",
          [](const DeformedExponential& f, double x, int order, bool inverse) {
            return f.derivative(x, order, inverse ? Deriv::Inverse : Deriv::Forward);
          },
          py::arg("x"), py::arg("order") = 1, py::arg("inverse") = false)
      .def_property_readonly("support_lower", &DeformedExponential::support_lower)
      .def_property_readonly("domain_lower", &DeformedExponential::domain_lower)
      .def_property_readonly("domain_upper", &DeformedExponential::domain_upper)
      .def_property_readonly("spec", &DeformedExponential::spec_string)
      .def("__repr__", [](const DeformedExponential& f) {
        return "Phi('" + f.spec_string() + "')";
      });

  m.def(
      "divergence",
      [](const DeformedExponential& f, const std::vector<double>& p,
         const std::vector<double>& q, bool terms) -> py::object {
        auto r = d_phi(f, to_dist(p), to_dist(q));
        if (!terms) return py::float_(r.value);
        return py::make_tuple(r.value, r.terms);
      },
      py::arg("phi"), py::arg("p"), py::arg("q"), py::arg("terms") = false);

  m.def(
      "kl",
      [](const std::vector<double>& p, const std::vector<double>& q) {
        return kl_closed_form(to_dist(p), to_dist(q));
      },
      py::arg("p"), py::arg("q"));

  m.def(
      "tsallis",
      [](double q_index, const std::vector<double>& p, const std::vector<double>& q) {
        return tsallis_closed_form(q_index, to_dist(p), to_dist(q));
      },
      py::arg("q_index"), py::arg("p"), py::arg("q"));

  m.def(
      "normalize",
      [](const DeformedExponential& f, const std::vector<double>& p,
         const std::vector<double>& u, const std::optional<std::vector<double>>& u0) {
        auto dist = to_dist(p);
        FamilyChart chart = u0 ? chart_at(f, dist, *u0) : chart_at(f, dist);
        auto tv = project_tangent(chart, u);
        auto r = normalizer(chart, tv.u);
        py::dict out;
        out["psi"] = r.psi;
        out["q"] = r.q.weights();
        out["u_projected"] = tv.u;
        out["u0"] = chart.u0;
        out["residual"] = verify_psi_identity(chart, tv.u);
        out["iterations"] = r.iterations;
        return out;
      },
      py::arg("phi"), py::arg("p"), py::arg("u"), py::arg("u0") = std::nullopt);

  m.def(
      "g", [](const DeformedExponential& f, double x) { return g_func(f, x); },
      py::arg("phi"), py::arg("x"));
  m.def(
      "h", [](const DeformedExponential& f, double x) { return h_func(f, x); },
      py::arg("phi"), py::arg("x"));

  m.def(
      "check_superadditive",
      [](const DeformedExponential& f, int grid_n, double delta) {
        return report_to_py(check_superadditive_g(f, grid_n, delta));
      },
      py::arg("phi"), py::arg("grid_n") = 200, py::arg("delta") = 1e-4);

  m.def(
      "check_concave",
      [](const DeformedExponential& f, int grid_n, double delta) {
        return report_to_py(check_concave_g(f, grid_n, delta));
      },
      py::arg("phi"), py::arg("grid_n") = 200, py::arg("delta") = 1e-4);

  m.def(
      "check_partition",
      [](const DeformedExponential& f, int n, int trials, std::uint64_t seed) {
        return report_to_py(check_partition_inequality(f, n, trials, seed));
      },
      py::arg("phi"), py::arg("n") = 4, py::arg("trials") = 200, py::arg("seed") = 0);

  m.def(
      "check_convexity",
      [](const DeformedExponential& f, int n, int trials, std::vector<double> lambdas,
         std::uint64_t seed) {
        return report_to_py(check_joint_convexity(f, n, trials, std::move(lambdas), seed));
      },
      py::arg("phi"), py::arg("n") = 3, py::arg("trials") = 200,
      py::arg("lambdas") = std::vector<double>{0.25, 0.5, 0.75}, py::arg("seed") = 0);

  m.def(
      "pinsker_constant",
      [](const DeformedExponential& f, int grid_n, double delta) {
        auto est = pinsker_constant(f, grid_n, delta);
        py::dict out;
        out["c_hat"] = est.c_hat;
        out["p_at"] = est.p_at;
        out["q_at"] = est.q_at;
        out["excluded"] = est.excluded;
        out["verdict"] = to_string(est.verdict);
        return out;
      },
      py::arg("phi"), py::arg("grid_n") = 200, py::arg("delta") = 1e-4);

  m.def(
      "check_pinsker",
      [](const DeformedExponential& f, double c, int n, int trials, std::uint64_t seed) {
        return report_to_py(check_pinsker(f, c, n, trials, seed));
      },
      py::arg("phi"), py::arg("c"), py::arg("n") = 2, py::arg("trials") = 1000,
      py::arg("seed") = 0);

  m.def(
      "characterize",
      [](const DeformedExponential& f, int grid_n, double delta) {
        auto r = characterize_tsallis(f, grid_n, delta);
        py::dict out;
        out["is_tsallis"] = to_string(r.is_tsallis);
        out["q_fit"] = r.q_fit;
        out["max_residual"] = r.max_residual;
        out["superadditive"] = report_to_py(r.superadditive);
        out["concave"] = report_to_py(r.concave);
        return out;
      },
      py::arg("phi"), py::arg("grid_n") = 200, py::arg("delta") = 1e-4);
}
