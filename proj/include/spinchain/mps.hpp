#pragma once

#include <vector>

#include "spinchain/hamiltonian.hpp"

namespace spinchain {

/// One MPS site: d matrix blocks A_i, each rows() x cols(). Site 1 has 1 x D
/// blocks, interior sites D x D, site N D x 1.
struct SiteTensor {
    std::vector<MatrixXcd> blocks;

    int phys_dim() const { return static_cast<int>(blocks.size()); }
    Eigen::Index rows() const { return blocks.empty() ? 0 : blocks[0].rows(); }
    Eigen::Index cols() const { return blocks.empty() ? 0 : blocks[0].cols(); }

    /// Deviation of sum_i A_i A_i^dag from the identity, in operator norm.
    double gauge_defect() const;
};

struct MpsState {
    int d = 2;
    std::vector<SiteTensor> sites;
    bool gauge_flag = false;

    int length() const { return static_cast<int>(sites.size()); }
    /// Largest bond dimension.
    int bond_dim() const;
    void validate() const;
};

MpsState random_mps(int d, int D, int N, std::uint64_t seed);

/// Bring to the gauge sum_i A_i A_i^dag = identity at every site via
/// successive orthogonal factorizations. Numerically dead bonds are trimmed
/// and the reduction reported through `reduced_bond_dim` when non-null.
MpsState canonicalize(const MpsState& m, int* reduced_bond_dim = nullptr);

/// rho_{k+1} = sum_i A_i^dag rho A_i, symmetrized.
MatrixXcd advance_rho(const SiteTensor& a, const MatrixXcd& rho);

/// Energy of one bond term given the left boundary state rho_k.
double local_energy(const SiteTensor& a_k, const SiteTensor& a_k1, const MatrixXcd& rho,
                    const MatrixXcd& term);

/// Split of local_energy: the (a_k, rho, term)-dependent part S_{j j'} =
/// sum_{i i'} term(id+j, i'd+j') A_i^dag rho A_{i'}, reusable across many
/// right-hand tensors, and its contraction against one of them.
std::vector<MatrixXcd> local_energy_context(const SiteTensor& a_k, const MatrixXcd& rho,
                                            const MatrixXcd& term);
double local_energy_from_context(const std::vector<MatrixXcd>& s, const SiteTensor& a_k1);

/// Total energy sum_k E_k with rho advanced along the chain. OBC only; fold
/// periodic chains first.
double evaluate_mps_energy(const ChainHamiltonian& h, const MpsState& m);

/// Dense amplitude vector <i_1..i_N|chi>, dimension d^N. Intended for small
/// chains and oracle comparisons.
VectorXcd mps_to_statevector(const MpsState& m);

}  // namespace spinchain
