#include "spinchain/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace spinchain {

namespace {

Eigen::Index pow_checked(int base, int exp, Eigen::Index ceiling) {
    Eigen::Index v = 1;
    for (int i = 0; i < exp; ++i) {
        v *= base;
        if (v > ceiling) return -1;
    }
    return v;
}

// Apply a two-site operator acting on (1-based) sites p and q to psi.
void apply_pair(const MatrixXcd& op, int d, int N, int p, int q, const VectorXcd& psi,
                VectorXcd& out) {
    std::vector<Eigen::Index> stride(static_cast<size_t>(N));
    Eigen::Index s = 1;
    for (int k = N; k >= 1; --k) {
        stride[static_cast<size_t>(k - 1)] = s;
        s *= d;
    }
    const Eigen::Index sp = stride[static_cast<size_t>(p - 1)];
    const Eigen::Index sq = stride[static_cast<size_t>(q - 1)];
    const Eigen::Index dim = psi.size();
    for (Eigen::Index x = 0; x < dim; ++x) {
        int a = static_cast<int>((x / sp) % d);
        int b = static_cast<int>((x / sq) % d);
        Eigen::Index base = x - a * sp - b * sq;
        Complex acc = 0.0;
        for (int ap = 0; ap < d; ++ap)
            for (int bp = 0; bp < d; ++bp) {
                Complex v = op(a * d + b, ap * d + bp);
                if (v != Complex(0, 0)) acc += v * psi(base + ap * sp + bp * sq);
            }
        out(x) += acc;
    }
}

}  // namespace

MatrixXcd dense_hamiltonian(const ChainHamiltonian& h) {
    h.validate();
    Eigen::Index dim = pow_checked(h.d, h.N, std::numeric_limits<Eigen::Index>::max() / 2);
    MatrixXcd H = MatrixXcd::Zero(dim, dim);
    for (const auto& t : h.terms) {
        int p = t.site;
        int q = (t.site == h.N) ? 1 : t.site + 1;
        MatrixXcd op = t.effective();
        VectorXcd col(dim), out(dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            col.setZero();
            col(j) = 1.0;
            out.setZero();
            apply_pair(op, h.d, h.N, p, q, col, out);
            H.col(j) += out;
        }
    }
    return 0.5 * (H + H.adjoint()).eval();
}

SpectrumResult exact_diagonalize(const ChainHamiltonian& h, Eigen::Index ceiling) {
    h.validate();
    Eigen::Index dim = pow_checked(h.d, h.N, ceiling);
    if (dim < 0)
        throw SizeError("d^N exceeds the dense diagonalization ceiling of " +
                        std::to_string(ceiling));
    MatrixXcd H = dense_hamiltonian(h);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    SpectrumResult r;
    r.ground_energy = es.eigenvalues()(0);
    r.ground_vector = es.eigenvectors().col(0);
    r.gap = dim > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0) : 0.0;
    return r;
}

ClassicalSolution exhaustive_classical(const ClassicalChain& c, std::int64_t ceiling) {
    c.validate();
    std::int64_t total = 1;
    for (int k = 0; k < c.N; ++k) {
        total *= c.d;
        if (total > ceiling)
            throw SizeError("d^N exceeds the exhaustive search ceiling of " +
                            std::to_string(ceiling));
    }
    ClassicalSolution best;
    best.energy = std::numeric_limits<double>::infinity();
    std::vector<int> cfg(static_cast<size_t>(c.N), 0);
    // Lexicographic enumeration with the leftmost site most significant, so a
    // strict improvement test keeps the lexicographically smallest optimum.
    for (std::int64_t x = 0; x < total; ++x) {
        std::int64_t rem = x;
        for (int k = c.N - 1; k >= 0; --k) {
            cfg[static_cast<size_t>(k)] = static_cast<int>(rem % c.d);
            rem /= c.d;
        }
        double e = evaluate_classical(c, cfg);
        if (e < best.energy) {
            best.energy = e;
            best.configuration = cfg;
        }
    }
    return best;
}

double statevector_expectation(const ChainHamiltonian& h, const VectorXcd& psi) {
    h.validate();
    Eigen::Index dim = pow_checked(h.d, h.N, std::numeric_limits<Eigen::Index>::max() / 2);
    if (psi.size() != dim) throw DimensionError("state vector has wrong dimension");
    if (std::abs(psi.norm() - 1.0) > 1e-10)
        throw NormError("state vector must be normalized");
    VectorXcd out = VectorXcd::Zero(dim);
    for (const auto& t : h.terms) {
        int q = (t.site == h.N) ? 1 : t.site + 1;
        apply_pair(t.effective(), h.d, h.N, t.site, q, psi, out);
    }
    Complex e = psi.dot(out);
    if (std::abs(e.imag()) > 1e-10)
        throw ValidationError("expectation has a non-negligible imaginary part");
    return e.real();
}

// ---------------------------------------------------------------------------
// ALS baseline
// ---------------------------------------------------------------------------

namespace {

struct Mpo {
    // w[k] is a (rows x cols) grid of d x d operator entries; empty matrix = 0.
    std::vector<std::vector<std::vector<MatrixXcd>>> w;
    std::vector<int> rows, cols;
};

// Operator Schmidt decomposition of a two-site term.
void schmidt_split(const MatrixXcd& term, int d, std::vector<MatrixXcd>& left,
                   std::vector<MatrixXcd>& right) {
    MatrixXcd m(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int ip = 0; ip < d; ++ip)
            for (int j = 0; j < d; ++j)
                for (int jp = 0; jp < d; ++jp)
                    m(i * d + ip, j * d + jp) = term(i * d + j, ip * d + jp);
    Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    for (Eigen::Index r = 0; r < sv.size(); ++r) {
        if (sv(r) < 1e-14 * std::max(1.0, sv(0))) break;
        MatrixXcd l(d, d), rm(d, d);
        for (int i = 0; i < d; ++i)
            for (int ip = 0; ip < d; ++ip) l(i, ip) = svd.matrixU()(i * d + ip, r) * sv(r);
        for (int j = 0; j < d; ++j)
            for (int jp = 0; jp < d; ++jp) rm(j, jp) = std::conj(svd.matrixV()(j * d + jp, r));
        left.push_back(std::move(l));
        right.push_back(std::move(rm));
    }
}

Mpo build_mpo(const ChainHamiltonian& h) {
    const int N = h.N, d = h.d;
    std::vector<std::vector<MatrixXcd>> ls(static_cast<size_t>(N)), rs(static_cast<size_t>(N));
    for (int k = 1; k <= N - 1; ++k)
        if (const LocalTerm* t = h.find_term(k))
            schmidt_split(t->effective(), d, ls[static_cast<size_t>(k)], rs[static_cast<size_t>(k)]);
    // Bond k (between sites k and k+1) carries states {pass=0, term m started
    // at bond k, done}.
    Mpo mpo;
    mpo.w.resize(static_cast<size_t>(N));
    mpo.rows.resize(static_cast<size_t>(N));
    mpo.cols.resize(static_cast<size_t>(N));
    auto width = [&](int bond) {  // bond 0 = left edge, bond N = right edge
        if (bond == 0 || bond == N) return 1;
        return 2 + static_cast<int>(ls[static_cast<size_t>(bond)].size());
    };
    MatrixXcd id = MatrixXcd::Identity(d, d);
    for (int k = 1; k <= N; ++k) {
        int wl = width(k - 1), wr = width(k);
        auto& grid = mpo.w[static_cast<size_t>(k - 1)];
        grid.assign(static_cast<size_t>(wl),
                    std::vector<MatrixXcd>(static_cast<size_t>(wr)));
        mpo.rows[static_cast<size_t>(k - 1)] = wl;
        mpo.cols[static_cast<size_t>(k - 1)] = wr;
        int pass_l = 0, done_l = wl - 1, pass_r = 0, done_r = wr - 1;
        // At interior bonds state 0 means "no term active yet" and the last
        // state means "all terms to the left finished".
        if (k < N) grid[static_cast<size_t>(pass_l)][static_cast<size_t>(pass_r)] = id;
        if (k > 1) grid[static_cast<size_t>(done_l)][static_cast<size_t>(done_r)] = id;
        // Start a term on bond k.
        if (k <= N - 1)
            for (size_t m = 0; m < ls[static_cast<size_t>(k)].size(); ++m)
                grid[static_cast<size_t>(pass_l)][1 + m] = ls[static_cast<size_t>(k)][m];
        // Finish a term started on bond k-1.
        if (k >= 2)
            for (size_t m = 0; m < rs[static_cast<size_t>(k - 1)].size(); ++m)
                grid[1 + m][static_cast<size_t>(done_r)] = rs[static_cast<size_t>(k - 1)][m];
    }
    return mpo;
}

using EnvTensor = std::vector<MatrixXcd>;  // one D x D' block per MPO state

EnvTensor left_edge_env() { return {MatrixXcd::Identity(1, 1)}; }
EnvTensor right_edge_env() { return {MatrixXcd::Identity(1, 1)}; }

// Grow the left environment across site k (0-based) of `m`.
EnvTensor grow_left(const EnvTensor& env, const Mpo& mpo, int k, const SiteTensor& s) {
    int wl = mpo.rows[static_cast<size_t>(k)], wr = mpo.cols[static_cast<size_t>(k)];
    EnvTensor out(static_cast<size_t>(wr));
    for (int b = 0; b < wr; ++b) out[static_cast<size_t>(b)] = MatrixXcd::Zero(s.cols(), s.cols());
    const int d = s.phys_dim();
    for (int a = 0; a < wl; ++a) {
        if (env[static_cast<size_t>(a)].size() == 0) continue;
        for (int b = 0; b < wr; ++b) {
            const MatrixXcd& op = mpo.w[static_cast<size_t>(k)][static_cast<size_t>(a)][static_cast<size_t>(b)];
            if (op.size() == 0) continue;
            for (int i = 0; i < d; ++i)
                for (int ip = 0; ip < d; ++ip) {
                    Complex v = op(i, ip);
                    if (v == Complex(0, 0)) continue;
                    out[static_cast<size_t>(b)] +=
                        v * (s.blocks[static_cast<size_t>(i)].adjoint() *
                             env[static_cast<size_t>(a)] * s.blocks[static_cast<size_t>(ip)]);
                }
        }
    }
    return out;
}

EnvTensor grow_right(const EnvTensor& env, const Mpo& mpo, int k, const SiteTensor& s) {
    int wl = mpo.rows[static_cast<size_t>(k)], wr = mpo.cols[static_cast<size_t>(k)];
    EnvTensor out(static_cast<size_t>(wl));
    for (int a = 0; a < wl; ++a) out[static_cast<size_t>(a)] = MatrixXcd::Zero(s.rows(), s.rows());
    const int d = s.phys_dim();
    for (int a = 0; a < wl; ++a)
        for (int b = 0; b < wr; ++b) {
            const MatrixXcd& op = mpo.w[static_cast<size_t>(k)][static_cast<size_t>(a)][static_cast<size_t>(b)];
            if (op.size() == 0 || env[static_cast<size_t>(b)].size() == 0) continue;
            for (int i = 0; i < d; ++i)
                for (int ip = 0; ip < d; ++ip) {
                    Complex v = op(i, ip);
                    if (v == Complex(0, 0)) continue;
                    out[static_cast<size_t>(a)] +=
                        v * (s.blocks[static_cast<size_t>(i)].conjugate() *
                             env[static_cast<size_t>(b)] *
                             s.blocks[static_cast<size_t>(ip)].transpose());
                }
        }
    return out;
}

// Effective single-site Hamiltonian, ordered (i, left, right) row-major.
MatrixXcd effective_hamiltonian(const EnvTensor& le, const Mpo& mpo, int k,
                                const EnvTensor& re, Eigen::Index dl, Eigen::Index dr,
                                int d) {
    const Eigen::Index dim = d * dl * dr;
    MatrixXcd heff = MatrixXcd::Zero(dim, dim);
    int wl = mpo.rows[static_cast<size_t>(k)], wr = mpo.cols[static_cast<size_t>(k)];
    for (int a = 0; a < wl; ++a)
        for (int b = 0; b < wr; ++b) {
            const MatrixXcd& op = mpo.w[static_cast<size_t>(k)][static_cast<size_t>(a)][static_cast<size_t>(b)];
            if (op.size() == 0) continue;
            const MatrixXcd& L = le[static_cast<size_t>(a)];
            const MatrixXcd& R = re[static_cast<size_t>(b)];
            if (L.size() == 0 || R.size() == 0) continue;
            for (int i = 0; i < d; ++i)
                for (int ip = 0; ip < d; ++ip) {
                    Complex v = op(i, ip);
                    if (v == Complex(0, 0)) continue;
                    for (Eigen::Index l = 0; l < dl; ++l)
                        for (Eigen::Index lp = 0; lp < dl; ++lp)
                            for (Eigen::Index r = 0; r < dr; ++r)
                                for (Eigen::Index rp = 0; rp < dr; ++rp)
                                    heff(i * dl * dr + l * dr + r,
                                         ip * dl * dr + lp * dr + rp) +=
                                        v * L(l, lp) * R(r, rp);
                }
        }
    return 0.5 * (heff + heff.adjoint()).eval();
}

// Left-normalize site k and push the factor into site k+1.
void shift_right(MpsState& m, int k) {
    SiteTensor& s = m.sites[static_cast<size_t>(k)];
    const int d = s.phys_dim();
    MatrixXcd tall(d * s.rows(), s.cols());
    for (int i = 0; i < d; ++i) tall.middleRows(i * s.rows(), s.rows()) = s.blocks[static_cast<size_t>(i)];
    Eigen::HouseholderQR<MatrixXcd> qr(tall);
    MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(tall.rows(), std::min(tall.rows(), tall.cols()));
    MatrixXcd r = q.adjoint() * tall;
    for (int i = 0; i < d; ++i) s.blocks[static_cast<size_t>(i)] = q.middleRows(i * s.rows(), s.rows());
    SiteTensor& nxt = m.sites[static_cast<size_t>(k + 1)];
    for (auto& b : nxt.blocks) b = (r * b).eval();
}

// Right-normalize site k and push the factor into site k-1.
void shift_left(MpsState& m, int k) {
    SiteTensor& s = m.sites[static_cast<size_t>(k)];
    const int d = s.phys_dim();
    MatrixXcd wide(s.rows(), d * s.cols());
    for (int i = 0; i < d; ++i) wide.middleCols(i * s.cols(), s.cols()) = s.blocks[static_cast<size_t>(i)];
    Eigen::HouseholderQR<MatrixXcd> qr(wide.adjoint());
    MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(wide.cols(), std::min(wide.rows(), wide.cols()));
    MatrixXcd v = q.adjoint();                  // rows orthonormal
    MatrixXcd l = wide * q;                     // rows x rank
    for (int i = 0; i < d; ++i) s.blocks[static_cast<size_t>(i)] = v.middleCols(i * s.cols(), s.cols());
    SiteTensor& prv = m.sites[static_cast<size_t>(k - 1)];
    for (auto& b : prv.blocks) b = (b * l).eval();
}

void set_site_from_vector(SiteTensor& s, const VectorXcd& x, Eigen::Index dl, Eigen::Index dr) {
    const int d = s.phys_dim();
    for (int i = 0; i < d; ++i) {
        MatrixXcd b(dl, dr);
        for (Eigen::Index l = 0; l < dl; ++l)
            for (Eigen::Index r = 0; r < dr; ++r) b(l, r) = x(i * dl * dr + l * dr + r);
        s.blocks[static_cast<size_t>(i)] = std::move(b);
    }
}

}  // namespace

AlsResult als_baseline(const ChainHamiltonian& h, int D, int restarts, int sweeps,
                       std::uint64_t seed) {
    h.validate();
    if (h.boundary == Boundary::Periodic)
        throw BoundaryError("als_baseline requires an open chain; fold first");
    if (D < 1) throw ValidationError("bond dimension must be >= 1");
    const int N = h.N, d = h.d;
    Mpo mpo = build_mpo(h);

    AlsResult best;
    best.energy = std::numeric_limits<double>::infinity();
    for (int rs = 0; rs < restarts; ++rs) {
        std::uint64_t s = seed + static_cast<std::uint64_t>(rs);
        MpsState m = canonicalize(random_mps(d, D, N, s));
        // All sites right-normalized: optimization center starts at site 1.
        std::vector<EnvTensor> renv(static_cast<size_t>(N) + 1);
        renv[static_cast<size_t>(N)] = right_edge_env();
        for (int k = N - 1; k >= 1; --k)
            renv[static_cast<size_t>(k)] =
                grow_right(renv[static_cast<size_t>(k + 1)], mpo, k, m.sites[static_cast<size_t>(k)]);

        double energy = std::numeric_limits<double>::infinity();
        bool converged = false;
        EnvTensor lenv = left_edge_env();
        std::vector<EnvTensor> lenvs(static_cast<size_t>(N));
        lenvs[0] = lenv;
        for (int sweep = 0; sweep < sweeps && !converged; ++sweep) {
            double before = energy;
            // Left-to-right pass.
            for (int k = 0; k < N; ++k) {
                SiteTensor& st = m.sites[static_cast<size_t>(k)];
                MatrixXcd heff = effective_hamiltonian(lenvs[static_cast<size_t>(k)], mpo, k,
                                                       k + 1 < N ? renv[static_cast<size_t>(k + 1)]
                                                                 : right_edge_env(),
                                                       st.rows(), st.cols(), d);
                Eigen::SelfAdjointEigenSolver<MatrixXcd> es(heff);
                double e = es.eigenvalues()(0);
                if (e > energy + 1e-9)
                    throw ValidationError("ALS local update increased the energy");
                energy = e;
                set_site_from_vector(st, es.eigenvectors().col(0), st.rows(), st.cols());
                if (k + 1 < N) {
                    shift_right(m, k);
                    lenvs[static_cast<size_t>(k + 1)] =
                        grow_left(lenvs[static_cast<size_t>(k)], mpo, k, m.sites[static_cast<size_t>(k)]);
                }
            }
            // Right-to-left pass.
            for (int k = N - 1; k >= 0; --k) {
                SiteTensor& st = m.sites[static_cast<size_t>(k)];
                MatrixXcd heff = effective_hamiltonian(lenvs[static_cast<size_t>(k)], mpo, k,
                                                       k + 1 < N ? renv[static_cast<size_t>(k + 1)]
                                                                 : right_edge_env(),
                                                       st.rows(), st.cols(), d);
                Eigen::SelfAdjointEigenSolver<MatrixXcd> es(heff);
                double e = es.eigenvalues()(0);
                if (e > energy + 1e-9)
                    throw ValidationError("ALS local update increased the energy");
                energy = e;
                set_site_from_vector(st, es.eigenvectors().col(0), st.rows(), st.cols());
                if (k > 0) {
                    shift_left(m, k);
                    renv[static_cast<size_t>(k)] =
                        grow_right(renv[static_cast<size_t>(k + 1)], mpo, k, m.sites[static_cast<size_t>(k)]);
                }
            }
            double scale = std::max(1.0, std::abs(energy));
            if (std::abs(before - energy) <= 1e-10 * scale) converged = true;
        }
        if (energy < best.energy) {
            best.energy = energy;
            best.state = canonicalize(m);
            best.converged = converged;
            best.best_seed = s;
        }
    }
    best.energy = evaluate_mps_energy(h, best.state);
    return best;
}

}  // namespace spinchain
