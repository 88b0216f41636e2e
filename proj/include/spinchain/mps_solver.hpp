#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinchain/hamiltonian.hpp"
#include "spinchain/mps.hpp"
#include "spinchain/nets.hpp"

namespace spinchain {

struct BoundReport {
    double delta_rho = 0.0;  // (1/2) N^2 eps_rho
    double delta_a = 0.0;    // 4 N^(3/2) sqrt(d eps_A)
    double total() const { return delta_rho + delta_a; }
};

struct MpsSolution {
    double energy = 0.0;   // re-evaluated energy of `state`
    MpsState state;
    double delta = 0.0;
    double eps_rho = 0.0;
    double eps_a = 0.0;
    BoundReport bound_report;
    double dp_energy = 0.0;           // internal DP optimum (netified recursion)
    std::vector<std::size_t> table_stats;  // reachable DP states per site
    std::size_t dropped_states = 0;        // transitions with empty within-set
};

/// Per-site tensor nets and per-boundary density nets for the constrained DP.
/// site_nets[k] holds candidates for site k+1; rho_nets[k] covers the boundary
/// state entering site k+2 (the state before site 1 is the exact scalar 1).
struct MpsNets {
    std::vector<IsometryNet> site_nets;
    std::vector<DensityNet> rho_nets;

    void validate(int d, int N) const;
};

MpsSolution solve_mps_on_nets(const ChainHamiltonian& h, const MpsNets& nets,
                              double eps_rho, double eps_a, double delta = 0.0);

/// Paper-prescribed precisions eps_rho = delta/N^2, eps_A = delta^2/(64 N^3 d)
/// unless net_override = (eps_rho, eps_A) is given. OBC only; fold PBC first.
MpsSolution solve_mps(const ChainHamiltonian& h, int D, double delta,
                      std::optional<std::pair<double, double>> net_override = std::nullopt,
                      const NetBudget& budget = {});

/// Build the net family solve_mps would use (exposed for matched-net tests).
MpsNets build_mps_nets(const ChainHamiltonian& h, int D, double eps_rho, double eps_a,
                       const NetBudget& budget = {});

struct DriftReport {
    int steps = 0;
    double max_drift = 0.0;       // max_k ||rho~_k - rho_k||_1
    double max_energy_dev = 0.0;  // per-bond energy deviation from the drift
    bool pass = false;
    std::vector<double> drifts;   // per k, bound checked against (k-1) eps_rho
};

/// Exact vs netified rho recursion along a fixed gauge tensor chain.
DriftReport verify_rho_drift(const std::vector<SiteTensor>& tensors, double eps_rho,
                             const DensityNet& net, const ChainHamiltonian& h);

struct OverlapReport {
    double overlap = 0.0;
    double overlap_bound = 0.0;  // 1 - 2 N d eps_A
    double energy_diff = 0.0;
    double energy_bound = 0.0;   // 4 N^(3/2) sqrt(d eps_A)
    bool pass = false;
};

/// Overlap and energy-difference inequalities for a perturbed canonical MPS.
OverlapReport verify_overlap_bound(const MpsState& m, const MpsState& perturbed,
                                   const ChainHamiltonian& h, double eps_a);

/// Exact inner product <chi|chi~> by transfer contraction.
Complex mps_overlap(const MpsState& a, const MpsState& b);

/// Gaussian perturbation of every site tensor, projected back onto the gauge
/// manifold (polar decomposition). Reports the realized perturbation size
/// max over sites and i of ||A_i - A~_i||_inf.
MpsState perturb_canonical(const MpsState& m, double sigma, std::uint64_t seed,
                           double* eps_measured);

struct CostReport {
    double eps = 0.0;      // delta / 2N
    double eps_rho = 0.0;  // delta / N^2
    double eps_a = 0.0;    // delta^2 / (64 N^3 d)
    std::string mean_field_count;  // N d^4 (10N/delta)^(4d)
    std::string mps_count;         // N d^4 D^3 [3^(2d+1) 2^(12d) N^(6d+2) d^(2d) / delta^3]^(2D^2)
    double mean_field_log10 = 0.0;
    double mps_log10 = 0.0;
    double state_net_log10 = 0.0;  // log10 (5/eps)^(2d)
    double rho_net_log10 = 0.0;    // log10 (3/eps_rho)^(D^2)
    double iso_net_log10 = 0.0;    // log10 (3/eps_A)^(2dD^2)
};

CostReport estimate_cost(int N, int d, int D, double delta);

/// JSON round trip of a solution; parse restores enough to re-evaluate.
std::string serialize_solution(const MpsSolution& sol, int d);
MpsSolution parse_solution(const std::string& text, int* d_out = nullptr);

}  // namespace spinchain
