#include "spinchain/meanfield.hpp"

#include <algorithm>
#include <limits>

namespace spinchain {

void ProductState::validate(int d, int N) const {
    if (static_cast<int>(vectors.size()) != N)
        throw DimensionError("product state has " + std::to_string(vectors.size()) +
                             " vectors for a chain of length " + std::to_string(N));
    for (const auto& v : vectors) {
        if (v.size() != d) throw DimensionError("product state vector has wrong dimension");
        if (std::abs(v.norm() - 1.0) > 1e-9)
            throw NormError("product state vector is not normalized");
    }
}

double evaluate_product_energy(const ChainHamiltonian& h, const ProductState& s) {
    h.validate();
    s.validate(h.d, h.N);
    long double energy = 0.0L;
    for (int k = 1; k <= h.num_bonds(); ++k) {
        const LocalTerm* t = h.find_term(k);
        if (!t) continue;
        const VectorXcd& a = s.vectors[static_cast<size_t>(k - 1)];
        const VectorXcd& b = s.vectors[static_cast<size_t>(k % h.N)];
        VectorXcd ab = kron(a, b);
        Complex e = ab.dot(t->effective() * ab);
        energy += e.real();
    }
    return static_cast<double>(energy);
}

namespace {

// Real Gram matrix of a bond term over the Hermitian product basis:
// <psi_a, psi_b|H|psi_a, psi_b> = x_a^T G x_b with x = coords of |psi><psi|.
MatrixXd bond_gram(const MatrixXcd& term, int d) {
    const auto& basis = hermitian_basis(d);
    const auto n = static_cast<Eigen::Index>(basis.size());
    MatrixXd g(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l)
            g(k, l) = (kron(basis[static_cast<size_t>(k)], basis[static_cast<size_t>(l)]) * term)
                          .trace()
                          .real();
    return g;
}

// dst(a) = min_b [ (M X^T)(a, b) + add(b) ], streamed over blocks of b.
VectorXd minplus_sweep(const MatrixXd& m, const MatrixXd& x, const VectorXd& add) {
    const Eigen::Index A = x.rows();
    VectorXd dst = VectorXd::Constant(m.rows(), std::numeric_limits<double>::infinity());
    constexpr Eigen::Index kBlock = 256;
    for (Eigen::Index b0 = 0; b0 < A; b0 += kBlock) {
        Eigen::Index nb = std::min(kBlock, A - b0);
        MatrixXd cb = m * x.middleRows(b0, nb).transpose();
        for (Eigen::Index j = 0; j < nb; ++j)
            dst = dst.cwiseMin((cb.col(j).array() + add(b0 + j)).matrix());
    }
    return dst;
}

// Lowest index minimizing row(b) + add(b).
Eigen::Index argmin_row(const VectorXd& row, const VectorXd& add, double* value = nullptr) {
    Eigen::Index best = 0;
    double bv = row(0) + add(0);
    for (Eigen::Index b = 1; b < row.size(); ++b) {
        double v = row(b) + add(b);
        if (v < bv) {
            bv = v;
            best = b;
        }
    }
    if (value) *value = bv;
    return best;
}

}  // namespace

MeanFieldSolution solve_mean_field_on_net(const ChainHamiltonian& h, const StateNet& net,
                                          double delta) {
    h.validate();
    if (net.d != h.d) throw DimensionError("state net local dimension differs from chain");
    if (net.points.empty()) throw EmptyNetError("mean-field DP over an empty net");
    const auto A = static_cast<Eigen::Index>(net.points.size());
    const int N = h.N;

    // Projector coordinates, one row per net point.
    const auto nb = static_cast<Eigen::Index>(hermitian_basis(h.d).size());
    MatrixXd x(A, nb);
    for (Eigen::Index a = 0; a < A; ++a) {
        const VectorXcd& v = net.points[static_cast<size_t>(a)];
        x.row(a) = hermitian_coords(v * v.adjoint()).transpose();
    }

    // One Gram matrix per bond (zero coupling handled by a zero Gram).
    std::vector<MatrixXd> gram(static_cast<size_t>(h.num_bonds()));
    std::vector<MatrixXd> xg(gram.size());  // X * G, reused by sweeps and rows
    for (int k = 1; k <= h.num_bonds(); ++k) {
        const LocalTerm* t = h.find_term(k);
        gram[static_cast<size_t>(k - 1)] =
            t ? bond_gram(t->effective(), h.d) : MatrixXd::Zero(nb, nb).eval();
        xg[static_cast<size_t>(k - 1)] = x * gram[static_cast<size_t>(k - 1)];
    }

    auto cost_row = [&](int bond, Eigen::Index a) {  // C_bond(a, .)
        return VectorXd((x * (gram[static_cast<size_t>(bond - 1)].transpose() *
                              x.row(a).transpose())));
    };

    MeanFieldSolution sol;
    sol.delta = delta;
    sol.net_epsilon = net.epsilon;
    sol.table_stats.assign(static_cast<size_t>(N), static_cast<size_t>(A));
    sol.indices.resize(static_cast<size_t>(N));

    if (h.boundary == Boundary::Open) {
        // Suffix values G_k(a) = best energy of bonds k..N-1 given spin a at k.
        std::vector<VectorXd> suffix(static_cast<size_t>(N + 1));
        suffix[static_cast<size_t>(N)] = VectorXd::Zero(A);
        for (int k = N - 1; k >= 1; --k)
            suffix[static_cast<size_t>(k)] =
                minplus_sweep(xg[static_cast<size_t>(k - 1)], x, suffix[static_cast<size_t>(k + 1)]);
        Eigen::Index a = 0;
        for (Eigen::Index c = 1; c < A; ++c)
            if (suffix[1](c) < suffix[1](a)) a = c;
        sol.indices[0] = static_cast<size_t>(a);
        for (int k = 1; k < N; ++k) {
            Eigen::Index nxt = argmin_row(cost_row(k, a), suffix[static_cast<size_t>(k + 1)]);
            sol.indices[static_cast<size_t>(k)] = static_cast<size_t>(nxt);
            a = nxt;
        }
    } else {
        // Carry the first spin as a boundary index: for each candidate a1 the
        // wrap bond closes the chain at site N.
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index best_a1 = -1;
        auto suffix_for = [&](Eigen::Index a1) {
            std::vector<VectorXd> suffix(static_cast<size_t>(N + 1));
            suffix[static_cast<size_t>(N)] =
                x * (gram[static_cast<size_t>(N - 1)] * x.row(a1).transpose());
            for (int k = N - 1; k >= 2; --k)
                suffix[static_cast<size_t>(k)] = minplus_sweep(
                    xg[static_cast<size_t>(k - 1)], x, suffix[static_cast<size_t>(k + 1)]);
            return suffix;
        };
        for (Eigen::Index a1 = 0; a1 < A; ++a1) {
            auto suffix = suffix_for(a1);
            double total;
            argmin_row(cost_row(1, a1), suffix[2], &total);
            if (total < best) {
                best = total;
                best_a1 = a1;
            }
        }
        auto suffix = suffix_for(best_a1);
        sol.indices[0] = static_cast<size_t>(best_a1);
        Eigen::Index a = best_a1;
        for (int k = 1; k < N; ++k) {
            Eigen::Index nxt = argmin_row(cost_row(k, a), suffix[static_cast<size_t>(k + 1)]);
            sol.indices[static_cast<size_t>(k)] = static_cast<size_t>(nxt);
            a = nxt;
        }
    }

    for (int k = 0; k < N; ++k)
        sol.state.vectors.push_back(net.points[sol.indices[static_cast<size_t>(k)]]);
    sol.energy = evaluate_product_energy(h, sol.state);
    return sol;
}

MeanFieldSolution solve_mean_field(const ChainHamiltonian& h, double delta,
                                   const NetBudget& budget) {
    if (!(delta > 0.0)) throw ValidationError("delta must be positive");
    h.validate();
    double eps = std::min(2.0, delta / (2.0 * h.N));
    StateNet net = build_state_net(h.d, eps, budget);
    MeanFieldSolution sol = solve_mean_field_on_net(h, net, delta);
    sol.net_epsilon = eps;
    return sol;
}

}  // namespace spinchain
