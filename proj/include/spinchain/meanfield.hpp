#pragma once

#include <vector>

#include "spinchain/hamiltonian.hpp"
#include "spinchain/nets.hpp"

namespace spinchain {

/// Fully product ansatz: one unit vector per site.
struct ProductState {
    std::vector<VectorXcd> vectors;

    void validate(int d, int N) const;
};

struct MeanFieldSolution {
    double energy = 0.0;
    ProductState state;
    double delta = 0.0;
    double net_epsilon = 0.0;
    std::vector<std::size_t> table_stats;  // DP table size per site
    std::vector<std::size_t> indices;      // chosen net index per site
};

double evaluate_product_energy(const ChainHamiltonian& h, const ProductState& s);

/// Delta-optimal product state: eps = delta / 2N, exact DP over the state net.
MeanFieldSolution solve_mean_field(const ChainHamiltonian& h, double delta,
                                   const NetBudget& budget = {});

/// Same DP on a caller-supplied net (nested-net tests, matched-net comparisons).
MeanFieldSolution solve_mean_field_on_net(const ChainHamiltonian& h, const StateNet& net,
                                          double delta = 0.0);

}  // namespace spinchain
