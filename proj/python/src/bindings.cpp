#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tfac/config.hpp"
#include "tfac/energy.hpp"
#include "tfac/harness.hpp"
#include "tfac/l1_kernels.hpp"
#include "tfac/manufactured.hpp"
#include "tfac/simulation.hpp"
#include "tfac/soe.hpp"
#include "tfac/temporal_mesh.hpp"

namespace py = pybind11;
using namespace tfac;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> field_array(const ScalarField& f) {
  std::vector<py::ssize_t> shape;
  const auto M = static_cast<py::ssize_t>(f.grid.M);
  for (int a = 0; a < f.grid.dim; ++a) shape.push_back(M);
  // x-fastest storage is C order with the axes reversed (z, y, x).
  py::array_t<double> out(shape);
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

ScalarField field_from(py::array_t<double, py::array::c_style | py::array::forcecast> a, double L) {
  const int dim = static_cast<int>(a.ndim());
  if (dim < 1 || dim > 3) throw std::invalid_argument("field must have 1 to 3 axes");
  const auto M = static_cast<std::size_t>(a.shape(0));
  for (int i = 1; i < dim; ++i) {
    if (static_cast<std::size_t>(a.shape(i)) != M) throw std::invalid_argument("field must be square");
  }
  const auto g = make_grid(dim, M, L);
  return ScalarField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

TemporalMesh mesh_from(const std::vector<double>& nodes) { return TemporalMesh::from_nodes(nodes); }

py::dict run_dict(const RunReport& r) {
  py::dict d;
  d["config_hash"] = r.config_hash;
  d["steps"] = r.steps;
  d["final_time"] = r.final_time;
  d["mbp_violations"] = r.mbp_violations;
  d["energy_violations"] = r.energy_violations;
  d["unhalved_energy_violations"] = r.unhalved_energy_violations;
  d["max_sup_norm"] = r.max_sup_norm;
  d["soe_nodes"] = r.soe_nodes;
  d["warnings"] = r.warnings;
  d["wall_time"] = r.wall_time;
  if (r.max_error) d["max_error"] = *r.max_error;
  d["phi"] = field_array(r.final_field);
  std::vector<double> t, tau, sup, eh, ea;
  for (const auto& row : r.log.rows()) {
    t.push_back(row.t);
    tau.push_back(row.tau);
    sup.push_back(row.sup_norm);
    eh.push_back(row.E_h);
    ea.push_back(row.E_alpha);
  }
  d["t"] = to_array(t);
  d["tau"] = to_array(tau);
  d["sup_norm"] = to_array(sup);
  d["E_h"] = to_array(eh);
  d["E_alpha"] = to_array(ea);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fast L1 schemes for the time-fractional Allen-Cahn equation";

  m.def(
      "uniform_mesh",
      [](double T, std::size_t N) {
        const auto mesh = make_uniform(T, N);
        return to_array({mesh.nodes().begin(), mesh.nodes().end()});
      },
      py::arg("T"), py::arg("N"));
  m.def(
      "graded_mesh",
      [](double T, std::size_t N, double gamma) {
        const auto mesh = make_graded(T, N, gamma);
        return to_array({mesh.nodes().begin(), mesh.nodes().end()});
      },
      py::arg("T"), py::arg("N"), py::arg("gamma"));
  m.def(
      "composite_mesh",
      [](double T, double t_switch, std::size_t N, double gamma, double tau) {
        const auto mesh = make_composite(T, t_switch, N, gamma, tau);
        return to_array({mesh.nodes().begin(), mesh.nodes().end()});
      },
      py::arg("T"), py::arg("t_switch"), py::arg("N"), py::arg("gamma"), py::arg("tau"));

  m.def(
      "l1_weights", [](const std::vector<double>& nodes, std::size_t n, double alpha) {
        return to_array(l1_weights(mesh_from(nodes), n, alpha).weights);
      },
      py::arg("nodes"), py::arg("n"), py::arg("alpha"), "Row n of the L1 weights, a^{(n)}_0 .. a^{(n)}_n.");
  m.def(
      "kernel_triangle",
      [](const std::vector<double>& nodes, double alpha) {
        const auto mesh = mesh_from(nodes);
        const auto tri = build_kernel_triangle(l1_weight_rows(mesh, alpha, mesh.count()));
        py::dict d;
        d["weights"] = tri.weights;
        d["doc"] = tri.doc;
        d["dcc"] = tri.dcc;
        return d;
      },
      py::arg("nodes"), py::arg("alpha"));

  py::class_<SoeApproximation>(m, "Soe")
      .def_readonly("alpha", &SoeApproximation::alpha)
      .def_readonly("tol", &SoeApproximation::tol)
      .def_readonly("delta", &SoeApproximation::delta)
      .def_readonly("horizon", &SoeApproximation::horizon)
      .def_property_readonly("nodes", [](const SoeApproximation& s) { return to_array(s.nodes); })
      .def_property_readonly("weights", [](const SoeApproximation& s) { return to_array(s.weights); })
      .def_readonly("certified_error", &SoeApproximation::certified_error)
      .def("__len__", &SoeApproximation::size)
      .def("__call__", [](const SoeApproximation& s, double t) { return eval_soe(s, t); });
  m.def("build_soe", [](double alpha, double tol, double delta, double T) { return build_soe(alpha, tol, delta, T); },
        py::arg("alpha"), py::arg("tol"), py::arg("delta"), py::arg("T"));
  m.def("caputo_kernel", &caputo_kernel, py::arg("t"), py::arg("alpha"));
  m.def(
      "fast_weights",
      [](const SoeApproximation& soe, const std::vector<double>& nodes, std::size_t n) {
        return to_array(fast_weights(soe, mesh_from(nodes), n));
      },
      py::arg("soe"), py::arg("nodes"), py::arg("n"));

  m.def(
      "free_energy",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> phi, double L, double eps2) {
        ModelParams p;
        p.eps2 = eps2;
        return free_energy(field_from(phi, L), p);
      },
      py::arg("phi"), py::arg("L"), py::arg("eps2"));
  m.def(
      "mbp_check",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> phi) {
        const auto r = mbp_check(std::span<const double>(phi.data(), static_cast<std::size_t>(phi.size())));
        return py::make_tuple(r.sup_norm, r.violated);
      },
      py::arg("phi"));
  m.def(
      "manufactured_source",
      [](double x, double y, double z, double t, double mu, double alpha, double eps2, double kappa, int dim) {
        return manufactured_source(x, y, z, t, mu, ModelParams{eps2, kappa, alpha}, dim);
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("t"), py::arg("mu"), py::arg("alpha"), py::arg("eps2"),
      py::arg("kappa") = 2.0, py::arg("dim") = 2);

  m.def("config_hash", [](const std::string& json) { return config_hash(parse_run_config(json)); }, py::arg("config_json"));
  m.def(
      "run",
      [](const std::string& json) {
        const auto c = parse_run_config(json);
        RunReport r;
        {
          py::gil_scoped_release release;
          r = run_simulation(c);
        }
        return run_dict(r);
      },
      py::arg("config_json"), "Runs a JSON config; returns the summary, energy log and final field.");

  m.def(
      "kernel_check",
      [](std::uint64_t seed, std::size_t meshes, std::size_t max_count, std::size_t sequences) {
        const auto r = run_kernel_check(seed, meshes, max_count, sequences);
        py::dict d;
        d["max_delta_residual"] = r.max_delta_residual;
        d["max_partition_residual"] = r.max_partition_residual;
        d["min_dcc"] = r.min_dcc;
        d["min_quadratic_slack"] = r.min_quadratic_slack;
        d["rows"] = r.rows;
        return d;
      },
      py::arg("seed") = 0, py::arg("meshes") = 200, py::arg("max_count") = 50, py::arg("sequences") = 1000);
  m.def(
      "convergence",
      [](double alpha, double mu, double gamma, const std::string& scheme, std::vector<std::size_t> ladder, std::size_t M) {
        ConvergenceSetup s;
        s.alpha = alpha;
        s.mu = mu;
        s.gamma = gamma;
        s.scheme = scheme == "sfl1" ? SchemeType::sfl1 : SchemeType::pc;
        if (scheme != "pc" && scheme != "sfl1") throw std::invalid_argument("scheme must be pc or sfl1");
        s.ladder = std::move(ladder);
        s.M = M;
        ConvergenceReport r;
        {
          py::gil_scoped_release release;
          r = run_convergence(s);
        }
        py::dict d;
        std::vector<double> taus, errors;
        for (const auto& e : r.entries) {
          taus.push_back(e.tau_max);
          errors.push_back(e.error);
        }
        d["tau_max"] = to_array(taus);
        d["error"] = to_array(errors);
        d["slope"] = r.slope;
        d["monotone"] = r.monotone;
        return d;
      },
      py::arg("alpha"), py::arg("mu"), py::arg("gamma"), py::arg("scheme") = "pc",
      py::arg("ladder") = std::vector<std::size_t>{100, 200, 400, 800, 1600, 3200}, py::arg("M") = 64);
}
