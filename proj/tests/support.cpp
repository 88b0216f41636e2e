#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace testsupport {

MatrixXcd random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
    return 0.5 * (m + m.adjoint()).eval();
}

ChainHamiltonian random_chain(int d, int N, Boundary boundary, std::uint64_t seed,
                              double scale) {
    std::mt19937_64 rng(seed);
    const int nb = boundary == Boundary::Open ? N - 1 : N;
    std::vector<std::pair<int, MatrixXcd>> couplings;
    for (int k = 1; k <= nb; ++k) {
        MatrixXcd m = random_hermitian(d * d, rng);
        m *= scale / std::max(1e-12, operator_norm(m));
        couplings.emplace_back(k, std::move(m));
    }
    return make_chain(d, N, boundary, std::move(couplings));
}

ClassicalChain random_classical(int d, int N, Boundary boundary, std::uint64_t seed,
                                bool integer_tables) {
    std::mt19937_64 rng(seed);
    ClassicalChain c;
    c.d = d;
    c.N = N;
    c.boundary = boundary;
    const int nb = boundary == Boundary::Open ? N - 1 : N;
    std::uniform_int_distribution<int> di(-5, 5);
    std::uniform_real_distribution<double> dr(-1.0, 1.0);
    for (int k = 0; k < nb; ++k) {
        MatrixXd t(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                t(i, j) = integer_tables ? static_cast<double>(di(rng)) : dr(rng);
        c.tables.push_back(std::move(t));
    }
    c.validate();
    return c;
}

double lanczos_ground_energy(const MatrixXcd& h, int iters, std::uint64_t seed) {
    const Eigen::Index n = h.rows();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
    v.normalize();

    const int m = std::min<int>(iters, static_cast<int>(n));
    std::vector<VectorXcd> basis;
    basis.reserve(static_cast<size_t>(m));
    std::vector<double> alpha, beta;
    basis.push_back(v);
    for (int j = 0; j < m; ++j) {
        VectorXcd w = h * basis.back();
        double a = basis.back().dot(w).real();
        alpha.push_back(a);
        w -= a * basis.back();
        if (j > 0) w -= beta.back() * basis[static_cast<size_t>(j - 1)];
        // Full reorthogonalization keeps the basis clean at small n.
        for (const auto& q : basis) w -= q.dot(w) * q;
        double b = w.norm();
        if (j + 1 == m || b < 1e-13) break;
        beta.push_back(b);
        basis.push_back(w / b);
    }

    // Ground eigenvalue of the tridiagonal via bisection on the Sturm count.
    const int k = static_cast<int>(alpha.size());
    auto count_below = [&](double x) {
        int cnt = 0;
        double q = 1.0;
        for (int i = 0; i < k; ++i) {
            double b2 = i > 0 ? beta[static_cast<size_t>(i - 1)] * beta[static_cast<size_t>(i - 1)] : 0.0;
            q = alpha[static_cast<size_t>(i)] - x - (i > 0 ? b2 / q : 0.0);
            if (q == 0.0) q = -1e-300;
            if (q < 0.0) ++cnt;
        }
        return cnt;
    };
    double lo = alpha[0], hi = alpha[0];
    for (int i = 0; i < k; ++i) {
        double b = (i > 0 ? std::abs(beta[static_cast<size_t>(i - 1)]) : 0.0) +
                   (i + 1 < k ? std::abs(beta[static_cast<size_t>(i)]) : 0.0);
        lo = std::min(lo, alpha[static_cast<size_t>(i)] - b);
        hi = std::max(hi, alpha[static_cast<size_t>(i)] + b);
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (count_below(mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Effective single-site Hamiltonian at site k (0-based) with neighbours fixed.
MatrixXcd effective_field(const ChainHamiltonian& h, const std::vector<VectorXcd>& psi,
                          int k) {
    const int d = h.d;
    const int N = h.N;
    MatrixXcd f = MatrixXcd::Zero(d, d);
    auto add_right = [&](const MatrixXcd& term, const VectorXcd& nb) {
        for (int i = 0; i < d; ++i)
            for (int i2 = 0; i2 < d; ++i2) {
                Complex v = 0.0;
                for (int j = 0; j < d; ++j)
                    for (int j2 = 0; j2 < d; ++j2)
                        v += std::conj(nb(j)) * term(i * d + j, i2 * d + j2) * nb(j2);
                f(i, i2) += v;
            }
    };
    auto add_left = [&](const MatrixXcd& term, const VectorXcd& nb) {
        for (int j = 0; j < d; ++j)
            for (int j2 = 0; j2 < d; ++j2) {
                Complex v = 0.0;
                for (int i = 0; i < d; ++i)
                    for (int i2 = 0; i2 < d; ++i2)
                        v += std::conj(nb(i)) * term(i * d + j, i2 * d + j2) * nb(i2);
                f(j, j2) += v;
            }
    };
    // Bond (k+1) couples sites k, k+1 (0-based); bond k couples k-1, k.
    int bond_r = k + 1;
    if (bond_r <= h.num_bonds())
        if (const LocalTerm* t = h.find_term(bond_r))
            add_right(t->effective(), psi[static_cast<size_t>((k + 1) % N)]);
    int bond_l = k == 0 ? (h.boundary == Boundary::Periodic ? N : 0) : k;
    if (bond_l >= 1 && bond_l <= h.num_bonds())
        if (const LocalTerm* t = h.find_term(bond_l))
            add_left(t->effective(), psi[static_cast<size_t>((k + N - 1) % N)]);
    return f;
}

}  // namespace

MeanFieldOracle mean_field_oracle(const ChainHamiltonian& h, int restarts,
                                  std::uint64_t seed) {
    h.validate();
    std::mt19937_64 rng(seed);
    const int d = h.d;
    const int N = h.N;

    MeanFieldOracle best;
    best.energy = std::numeric_limits<double>::infinity();
    double prev_batch_best = std::numeric_limits<double>::infinity();

    for (int r = 0; r < restarts; ++r) {
        std::vector<VectorXcd> psi(static_cast<size_t>(N));
        if (r < d) {
            for (auto& v : psi) v = VectorXcd::Unit(d, r % d);
        } else {
            for (auto& v : psi) {
                v = VectorXcd(d);
                std::normal_distribution<double> g(0.0, 1.0);
                for (int i = 0; i < d; ++i) v(i) = Complex(g(rng), g(rng));
                v.normalize();
            }
        }
        ProductState s;
        s.vectors = psi;
        double e = evaluate_product_energy(h, s);
        for (int sweep = 0; sweep < 400; ++sweep) {
            for (int k = 0; k < N; ++k) {
                MatrixXcd f = effective_field(h, psi, k);
                Eigen::SelfAdjointEigenSolver<MatrixXcd> es(f);
                psi[static_cast<size_t>(k)] = es.eigenvectors().col(0);
            }
            s.vectors = psi;
            double e2 = evaluate_product_energy(h, s);
            if (e - e2 < 1e-13) {
                e = e2;
                break;
            }
            e = e2;
        }
        if (e < best.energy) {
            best.energy = e;
            best.state = s;
        }
        if (r == restarts / 2 - 1) prev_batch_best = best.energy;
    }
    best.refinement_gap = prev_batch_best - best.energy;
    return best;
}

MpsState aklt_mps(int N) {
    const double a = std::sqrt(2.0 / 3.0);
    const double b = 1.0 / std::sqrt(3.0);
    std::vector<MatrixXcd> A(3, MatrixXcd::Zero(2, 2));
    A[0](0, 1) = a;                       // m = +1: sqrt(2/3) sigma^+
    A[1](0, 0) = -b; A[1](1, 1) = b;      // m = 0: -sqrt(1/3) sigma^z
    A[2](1, 0) = -a;                      // m = -1: -sqrt(2/3) sigma^-

    MpsState m;
    m.d = 3;
    m.sites.resize(static_cast<size_t>(N));
    for (int k = 0; k < N; ++k) {
        SiteTensor t;
        for (int i = 0; i < 3; ++i) {
            if (k == 0)
                t.blocks.push_back(A[static_cast<size_t>(i)].row(0));
            else if (k == N - 1)
                t.blocks.push_back(A[static_cast<size_t>(i)].col(0));
            else
                t.blocks.push_back(A[static_cast<size_t>(i)]);
        }
        m.sites[static_cast<size_t>(k)] = std::move(t);
    }
    return canonicalize(m);
}

}  // namespace testsupport
