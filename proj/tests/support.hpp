#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "spinchain/meanfield.hpp"
#include "spinchain/mps.hpp"
#include "spinchain/oracles.hpp"

namespace testsupport {

using namespace spinchain;

MatrixXcd random_hermitian(int n, std::mt19937_64& rng);

/// Random nearest-neighbour chain with Hermitian bond terms of norm <= scale.
ChainHamiltonian random_chain(int d, int N, Boundary boundary, std::uint64_t seed,
                              double scale = 1.0);

/// Random classical bond tables, either small integers or floats.
ClassicalChain random_classical(int d, int N, Boundary boundary, std::uint64_t seed,
                                bool integer_tables);

/// Ground energy of a dense Hermitian matrix via Lanczos with full
/// reorthogonalization. Independent of Eigen's eigensolvers: uses only matvec.
double lanczos_ground_energy(const MatrixXcd& h, int iters = 150, std::uint64_t seed = 7);

struct MeanFieldOracle {
    double energy = 0.0;
    ProductState state;
    double refinement_gap = 0.0;  // best-energy change over the last restart batch
};

/// Trusted product-state optimum by multi-start coordinate descent (exact
/// single-site updates: ground vector of the effective d x d field).
MeanFieldOracle mean_field_oracle(const ChainHamiltonian& h, int restarts = 48,
                                  std::uint64_t seed = 3);

/// Known D=2 tensors of the AKLT ground-state family (OBC edge vectors fixed),
/// physical basis {m=+1, 0, -1}.
MpsState aklt_mps(int N);

}  // namespace testsupport
