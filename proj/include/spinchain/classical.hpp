#pragma once

#include <vector>

#include "spinchain/hamiltonian.hpp"

namespace spinchain {

struct ClassicalSolution {
    double energy = 0.0;
    std::vector<int> configuration;
};

/// Exact ground state by sequential minimization over the chain. Ties are
/// broken toward the lexicographically smallest configuration (smallest spin
/// value at the leftmost differing site). PBC is handled by carrying the
/// first spin as an extra boundary index.
ClassicalSolution solve_classical(const ClassicalChain& c);

double evaluate_classical(const ClassicalChain& c, const std::vector<int>& configuration);

}  // namespace spinchain
