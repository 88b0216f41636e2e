#pragma once

#include <cstdint>

#include "spinchain/classical.hpp"
#include "spinchain/hamiltonian.hpp"
#include "spinchain/mps.hpp"

namespace spinchain {

struct SpectrumResult {
    double ground_energy = 0.0;
    VectorXcd ground_vector;
    double gap = 0.0;
};

/// Dense Hamiltonian matrix of the full chain (d^N x d^N).
MatrixXcd dense_hamiltonian(const ChainHamiltonian& h);

SpectrumResult exact_diagonalize(const ChainHamiltonian& h, Eigen::Index ceiling = 4096);

ClassicalSolution exhaustive_classical(const ClassicalChain& c,
                                       std::int64_t ceiling = 1000000);

double statevector_expectation(const ChainHamiltonian& h, const VectorXcd& psi);

struct AlsResult {
    double energy = 0.0;
    MpsState state;
    bool converged = true;  // false carries a convergence warning, not an error
    std::uint64_t best_seed = 0;
};

/// Single-site alternating optimization at fixed bond dimension; best energy
/// over `restarts` random initializations. A practical comparator with no
/// optimality guarantee.
AlsResult als_baseline(const ChainHamiltonian& h, int D, int restarts = 5,
                       int sweeps = 50, std::uint64_t seed = 1);

}  // namespace spinchain
