#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinchain/common.hpp"
#include "spinchain/errors.hpp"

namespace spinchain {

enum class Boundary { Open, Periodic };

/// A nearest-neighbour coupling on the bond (site, site+1). Stored matrices
/// are kept with operator norm <= 1; `scale` converts back to input units,
/// i.e. the physical coupling is scale * matrix.
struct LocalTerm {
    int site = 1;  // 1-based; for PBC site == N couples sites (N, 1)
    MatrixXcd matrix;
    double scale = 1.0;

    MatrixXcd effective() const { return scale * matrix; }
};

struct ChainHamiltonian {
    int d = 2;
    int N = 2;
    Boundary boundary = Boundary::Open;
    std::vector<LocalTerm> terms;  // sorted by site, at most one per site

    int num_bonds() const { return boundary == Boundary::Open ? N - 1 : N; }

    /// Effective coupling on bond k (1-based); zero matrix if the bond is absent.
    MatrixXcd bond_matrix(int k) const;
    const LocalTerm* find_term(int site) const;

    void validate() const;
};

struct ClassicalChain {
    int d = 2;
    int N = 2;
    Boundary boundary = Boundary::Open;
    std::vector<MatrixXd> tables;  // one d x d real cost table per bond, in bond order

    void validate() const;
};

/// Construct a validated chain, normalizing term norms into (matrix, scale).
ChainHamiltonian make_chain(int d, int N, Boundary boundary,
                            std::vector<std::pair<int, MatrixXcd>> couplings);

/// Named presets. "tfim:g=<float>" takes the field strength from the name.
ChainHamiltonian make_preset(const std::string& name, int N,
                             Boundary boundary = Boundary::Open);

ChainHamiltonian parse_hamiltonian(const std::string& text);
std::string serialize_hamiltonian(const ChainHamiltonian& h);

/// Extract the diagonal bond cost tables; every term must be diagonal in the
/// computational product basis.
ClassicalChain classicalize(const ChainHamiltonian& h);

/// Fold an even-length PBC chain into an OBC chain of length N/2 with local
/// dimension d^2. Folded site j carries original sites (j, N+1-j), ordered
/// (left ⊗ mirrored). Energies remain in original units via term scales.
ChainHamiltonian fold_pbc(const ChainHamiltonian& h);

// Pauli matrices and elementary spin operators used by the presets.
MatrixXcd pauli_x();
MatrixXcd pauli_y();
MatrixXcd pauli_z();

}  // namespace spinchain
