#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "monobundle/harness.hpp"
#include "monobundle/trace.hpp"

namespace py = pybind11;
using namespace monobundle;

namespace {

py::dict record_dict(const IterationRecord& r) {
  py::dict d;
  d["k"] = r.k;
  d["n"] = r.n;
  d["j"] = r.j;
  d["l"] = r.l;
  d["x"] = r.x;
  d["s"] = r.s;
  d["y"] = r.y;
  d["v"] = r.v;
  d["xi"] = r.xi;
  d["sigma"] = r.sigma;
  d["c"] = r.c;
  d["e"] = r.e;
  d["eps"] = r.eps;
  d["eps_hat"] = r.eps_hat;
  d["step"] = to_string(r.step_kind);
  if (r.x_next) d["x_next"] = *r.x_next;
  d["bundle_size"] = r.bundle_size;
  return d;
}

py::dict solve_py(const OperatorSpec& spec, const Vector& x0, double tau, double radius,
                  std::optional<double> tol_stop, int max_serious, const std::string& lambda_rule,
                  bool records) {
  SolverConfig cfg;
  cfg.x0 = x0;
  cfg.tau = tau;
  cfg.radius = radius;
  cfg.tol_stop = tol_stop;
  cfg.max_serious = max_serious;
  const auto rule = parse_lambda_rule(lambda_rule);
  if (!rule) throw py::value_error("unknown lambda_rule '" + lambda_rule + "'");
  cfg.lambda_rule = *rule;

  SolveReport rep;
  {
    py::gil_scoped_release release;
    rep = solve(spec, cfg);
  }
  py::dict out;
  out["status"] = to_string(rep.status);
  out["x"] = rep.x_final;
  out["serious_steps"] = rep.serious_steps;
  out["oracle_calls"] = rep.oracle_calls;
  out["bundle_size"] = rep.bundle_size_final;
  out["tol_stop"] = rep.tol_stop;
  out["message"] = rep.message;
  if (rep.certificate) {
    out["certificate"] = py::make_tuple(rep.certificate->xhat, rep.certificate->uhat, rep.certificate->epshat);
  } else {
    out["certificate"] = py::none();
  }
  if (records) {
    py::list lst;
    for (const auto& r : rep.records) lst.append(record_dict(r));
    out["records"] = lst;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bundle method with double polyhedral approximation for monotone inclusions";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<OperatorSpec>(m, "Operator")
      .def_static("affine", &OperatorSpec::affine, py::arg("a"), py::arg("b"))
      .def_static(
          "max_affine",
          [](const std::vector<std::pair<Vector, double>>& pieces) {
            std::vector<AffinePiece> ps;
            for (const auto& [slope, c] : pieces) ps.push_back({slope, c});
            return OperatorSpec::max_affine(std::move(ps));
          },
          py::arg("pieces"))
      .def_static("scaled_l1", &OperatorSpec::scaled_l1, py::arg("weights"))
      .def_static("sum", &OperatorSpec::sum, py::arg("children"))
      .def_property_readonly("dimension", &OperatorSpec::dimension)
      .def("__call__", [](const OperatorSpec& s, const Vector& x) { return eval_oracle(s, x); })
      .def("resolvent", [](const OperatorSpec& s, const Vector& x, double c) { return resolvent(s, x, c); },
           py::arg("x"), py::arg("c") = 1.0);

  m.def(
      "min_norm_point",
      [](const std::vector<Vector>& pts) {
        const MinNormResult r = min_norm_point(pts);
        std::vector<double> alpha(pts.size(), 0.0);
        for (std::size_t t = 0; t < r.alpha.size(); ++t) alpha[r.alpha.index_set[t]] = r.alpha.weights[t];
        return py::make_tuple(r.point, alpha);
      },
      py::arg("points"), "Minimum-norm point of conv(points); returns (point, weights).");

  m.def(
      "project_halfspace",
      [](const Vector& x, const Vector& anchor, const Vector& normal) {
        return project_halfspace(x, Halfspace{anchor, normal});
      },
      py::arg("x"), py::arg("anchor"), py::arg("normal"));

  m.def(
      "transport",
      [](const std::vector<Vector>& z, const std::vector<Vector>& w, const std::vector<double>& weights,
         std::optional<std::vector<double>> eps) {
        if (z.size() != w.size()) throw py::value_error("z and w differ in length");
        std::vector<Triplet> t;
        for (std::size_t i = 0; i < z.size(); ++i) t.push_back({eps ? eps->at(i) : 0.0, z[i], w[i]});
        SimplexWeights a;
        a.weights = weights;
        for (std::size_t i = 0; i < weights.size(); ++i) a.index_set.push_back(i);
        const EnlargementElement e = transport(t, a);
        return py::make_tuple(e.xhat, e.uhat, e.epshat);
      },
      py::arg("z"), py::arg("w"), py::arg("weights"), py::arg("eps") = py::none());

  m.def("solve", &solve_py, py::arg("op"), py::arg("x0"), py::arg("tau") = 1e-3, py::arg("radius") = 1.0,
        py::arg("tol_stop") = py::none(), py::arg("max_serious") = 10000, py::arg("lambda_rule") = "best_vertex",
        py::arg("records") = false);

  m.def(
      "builtin_problem",
      [](const std::string& name, std::uint64_t seed) {
        const ProblemInstance p = builtin_problem(name, seed);
        py::dict d;
        d["name"] = p.name;
        d["op"] = p.spec;
        d["x0"] = p.x0;
        d["solution"] = p.known_solution ? py::cast(*p.known_solution) : py::none();
        return d;
      },
      py::arg("name"), py::arg("seed") = 0);

  m.def(
      "ppa_baseline",
      [](const OperatorSpec& spec, const Vector& x0, double c, int iters) {
        ProblemInstance p{"python", spec, x0, std::nullopt, 0};
        return run_ppa_baseline(p, c, iters);
      },
      py::arg("op"), py::arg("x0"), py::arg("c") = 1.0, py::arg("iters") = 500);

  m.def("run_suite", py::overload_cast<const std::string&, const std::string&>(&run_suite),
        py::arg("config"), py::arg("out"), py::call_guard<py::gil_scoped_release>());
}
