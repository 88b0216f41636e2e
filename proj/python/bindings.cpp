#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spinchain/meanfield.hpp"
#include "spinchain/mps_solver.hpp"
#include "spinchain/oracles.hpp"

namespace py = pybind11;
using namespace spinchain;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spin-chain ground-state solvers over epsilon-nets";

    py::register_exception<SchemaError>(m, "SchemaError");
    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<BudgetError>(m, "BudgetError");

    py::class_<ChainHamiltonian>(m, "ChainHamiltonian")
        .def_readonly("d", &ChainHamiltonian::d)
        .def_readonly("N", &ChainHamiltonian::N)
        .def_property_readonly("boundary",
                               [](const ChainHamiltonian& h) {
                                   return h.boundary == Boundary::Open ? "open" : "periodic";
                               })
        .def("num_bonds", &ChainHamiltonian::num_bonds)
        .def("__repr__", [](const ChainHamiltonian& h) {
            return "<ChainHamiltonian d=" + std::to_string(h.d) +
                   " N=" + std::to_string(h.N) + ">";
        });

    m.def(
        "make_preset",
        [](const std::string& name, int N, const std::string& boundary) {
            return make_preset(name, N,
                               boundary == "periodic" ? Boundary::Periodic : Boundary::Open);
        },
        py::arg("name"), py::arg("n"), py::arg("boundary") = "open");
    m.def("parse_hamiltonian", &parse_hamiltonian, py::arg("text"));
    m.def("serialize_hamiltonian", &serialize_hamiltonian, py::arg("hamiltonian"));
    m.def("fold_pbc", &fold_pbc, py::arg("hamiltonian"));

    m.def(
        "solve_classical",
        [](const ChainHamiltonian& h) {
            ClassicalSolution s = solve_classical(classicalize(h));
            return py::make_tuple(s.energy, s.configuration);
        },
        py::arg("hamiltonian"), "Exact DP optimum of a diagonal chain: (energy, configuration)");

    m.def(
        "solve_mean_field",
        [](const ChainHamiltonian& h, double delta) {
            MeanFieldSolution s = solve_mean_field(h, delta);
            py::dict out;
            out["energy"] = s.energy;
            out["delta"] = s.delta;
            out["net_epsilon"] = s.net_epsilon;
            out["indices"] = s.indices;
            return out;
        },
        py::arg("hamiltonian"), py::arg("delta"));

    m.def(
        "solve_mps",
        [](const ChainHamiltonian& h, int D, double delta, double eps_rho, double eps_a) {
            std::optional<std::pair<double, double>> override;
            if (eps_rho > 0 && eps_a > 0) override = std::make_pair(eps_rho, eps_a);
            ChainHamiltonian chain = h;
            int bond = D;
            if (h.boundary == Boundary::Periodic) {
                chain = fold_pbc(h);
                bond = D * D;
            }
            MpsSolution s = solve_mps(chain, bond, delta, override);
            py::dict out;
            out["energy"] = s.energy;
            out["dp_energy"] = s.dp_energy;
            out["eps_rho"] = s.eps_rho;
            out["eps_a"] = s.eps_a;
            out["delta_rho"] = s.bound_report.delta_rho;
            out["delta_a"] = s.bound_report.delta_a;
            out["dropped_states"] = s.dropped_states;
            out["document"] = serialize_solution(s, chain.d);
            return out;
        },
        py::arg("hamiltonian"), py::arg("bond_dim"), py::arg("delta") = 0.0,
        py::arg("eps_rho") = 0.0, py::arg("eps_a") = 0.0);

    m.def(
        "exact_diagonalize",
        [](const ChainHamiltonian& h) {
            SpectrumResult r = exact_diagonalize(h);
            return py::make_tuple(r.ground_energy, r.gap);
        },
        py::arg("hamiltonian"), "Dense ground state: (energy, gap)");

    m.def(
        "als_baseline",
        [](const ChainHamiltonian& h, int D, int restarts, int sweeps, std::uint64_t seed) {
            ChainHamiltonian chain =
                h.boundary == Boundary::Periodic ? fold_pbc(h) : h;
            AlsResult r = als_baseline(chain, D, restarts, sweeps, seed);
            py::dict out;
            out["energy"] = r.energy;
            out["converged"] = r.converged;
            out["best_seed"] = r.best_seed;
            return out;
        },
        py::arg("hamiltonian"), py::arg("bond_dim"), py::arg("restarts") = 5,
        py::arg("sweeps") = 50, py::arg("seed") = 1);

    m.def(
        "estimate_cost",
        [](int N, int d, int D, double delta) {
            CostReport r = estimate_cost(N, d, D, delta);
            py::dict out;
            out["eps"] = r.eps;
            out["eps_rho"] = r.eps_rho;
            out["eps_a"] = r.eps_a;
            out["mean_field_count"] = r.mean_field_count;
            out["mps_count"] = r.mps_count;
            out["mean_field_log10"] = r.mean_field_log10;
            out["mps_log10"] = r.mps_log10;
            return out;
        },
        py::arg("n"), py::arg("d"), py::arg("bond_dim"), py::arg("delta"));
}
