#include "spinchain/mps.hpp"

#include <random>

namespace spinchain {

double SiteTensor::gauge_defect() const {
    MatrixXcd g = MatrixXcd::Zero(rows(), rows());
    for (const auto& b : blocks) g += b * b.adjoint();
    return operator_norm(g - MatrixXcd::Identity(rows(), rows()));
}

int MpsState::bond_dim() const {
    Eigen::Index dmax = 1;
    for (const auto& s : sites) dmax = std::max(dmax, s.cols());
    return static_cast<int>(dmax);
}

void MpsState::validate() const {
    if (sites.size() < 2) throw ValidationError("MPS needs at least 2 sites");
    if (sites.front().rows() != 1) throw DimensionError("site 1 must have 1 row");
    if (sites.back().cols() != 1) throw DimensionError("site N must have 1 column");
    for (size_t k = 0; k < sites.size(); ++k) {
        if (sites[k].phys_dim() != d)
            throw DimensionError("site tensor physical dimension mismatch");
        for (const auto& b : sites[k].blocks)
            if (b.rows() != sites[k].rows() || b.cols() != sites[k].cols())
                throw DimensionError("ragged site tensor blocks");
        if (k + 1 < sites.size() && sites[k].cols() != sites[k + 1].rows())
            throw DimensionError("bond dimension mismatch between sites " +
                                 std::to_string(k + 1) + " and " + std::to_string(k + 2));
    }
}

MpsState random_mps(int d, int D, int N, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto rand_block = [&](Eigen::Index r, Eigen::Index c) {
        MatrixXcd b(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) b(i, j) = Complex(gauss(rng), gauss(rng));
        return b;
    };
    // Clamp bond dimensions to what the chain geometry can support.
    auto bond = [&](int k) {  // bond between sites k and k+1, 0 = left edge
        if (k <= 0 || k >= N) return Eigen::Index{1};
        double cap = std::pow(static_cast<double>(d), std::min(k, N - k));
        return static_cast<Eigen::Index>(std::min<double>(D, cap));
    };
    MpsState m;
    m.d = d;
    for (int k = 1; k <= N; ++k) {
        Eigen::Index r = bond(k - 1);
        Eigen::Index c = bond(k);
        SiteTensor s;
        for (int i = 0; i < d; ++i) s.blocks.push_back(rand_block(r, c));
        m.sites.push_back(std::move(s));
    }
    return m;
}

namespace {

// Stack the d blocks side by side into rows() x (d * cols()).
MatrixXcd stack_wide(const SiteTensor& s) {
    MatrixXcd w(s.rows(), s.phys_dim() * s.cols());
    for (int i = 0; i < s.phys_dim(); ++i)
        w.middleCols(i * s.cols(), s.cols()) = s.blocks[static_cast<size_t>(i)];
    return w;
}

}  // namespace

MpsState canonicalize(const MpsState& m, int* reduced_bond_dim) {
    m.validate();
    MpsState out = m;
    // Sweep from the last site toward the first, factoring W = L V with V
    // row-orthonormal and absorbing L into the neighbour on the left.
    for (int k = out.length() - 1; k >= 0; --k) {
        SiteTensor& s = out.sites[static_cast<size_t>(k)];
        MatrixXcd w = stack_wide(s);
        Eigen::JacobiSVD<MatrixXcd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        double cutoff = std::max(sv.size() > 0 ? sv(0) : 0.0, 1e-300) * 1e-12;
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > cutoff) ++rank;
        if (rank == 0)
            throw ValidationError("MPS has zero norm; cannot canonicalize");
        MatrixXcd v = svd.matrixV().leftCols(rank).adjoint();  // rank x (d*cols)
        MatrixXcd l = svd.matrixU().leftCols(rank) * sv.head(rank).asDiagonal();
        Eigen::Index cols = s.cols();
        for (int i = 0; i < s.phys_dim(); ++i)
            s.blocks[static_cast<size_t>(i)] = v.middleCols(i * cols, cols);
        if (k > 0) {
            SiteTensor& prev = out.sites[static_cast<size_t>(k - 1)];
            for (auto& b : prev.blocks) b = (b * l).eval();
        } else {
            // Leftover 1 x rank factor: rank is 1 here, and |l| is the state
            // norm, which the gauge discards.
        }
    }
    if (reduced_bond_dim) *reduced_bond_dim = out.bond_dim();
    out.gauge_flag = true;
    return out;
}

MatrixXcd advance_rho(const SiteTensor& a, const MatrixXcd& rho) {
    if (rho.rows() != a.rows() || rho.cols() != a.rows())
        throw DimensionError("boundary state dimension does not match site tensor");
    MatrixXcd next = MatrixXcd::Zero(a.cols(), a.cols());
    for (const auto& b : a.blocks) next += b.adjoint() * rho * b;
    return 0.5 * (next + next.adjoint());
}

std::vector<MatrixXcd> local_energy_context(const SiteTensor& a_k, const MatrixXcd& rho,
                                            const MatrixXcd& term) {
    const int d = a_k.phys_dim();
    if (term.rows() != d * d || term.cols() != d * d)
        throw DimensionError("term must be d^2 x d^2");
    if (rho.rows() != a_k.rows()) throw DimensionError("rho does not match site k");
    // E = sum_{ij,i'j'} <ij|H|i'j'> tr[rho A_{i'} B_{j'} B_j^dag A_i^dag]
    //   = sum_{jj'} tr[S_{jj'} B_{j'} B_j^dag],  S_{jj'} = sum_{ii'} H A_i^dag rho A_{i'}.
    std::vector<MatrixXcd> t(static_cast<size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int ip = 0; ip < d; ++ip)
            t[static_cast<size_t>(i * d + ip)] =
                a_k.blocks[static_cast<size_t>(i)].adjoint() * rho *
                a_k.blocks[static_cast<size_t>(ip)];
    std::vector<MatrixXcd> s(static_cast<size_t>(d) * d,
                             MatrixXcd::Zero(a_k.cols(), a_k.cols()));
    for (int j = 0; j < d; ++j)
        for (int jp = 0; jp < d; ++jp)
            for (int i = 0; i < d; ++i)
                for (int ip = 0; ip < d; ++ip)
                    s[static_cast<size_t>(j * d + jp)] +=
                        term(i * d + j, ip * d + jp) * t[static_cast<size_t>(i * d + ip)];
    return s;
}

double local_energy_from_context(const std::vector<MatrixXcd>& s, const SiteTensor& a_k1) {
    const int d = a_k1.phys_dim();
    if (static_cast<int>(s.size()) != d * d) throw DimensionError("context does not match d");
    if (!s.empty() && s[0].rows() != a_k1.rows())
        throw DimensionError("bond dimension mismatch between the two sites");
    Complex e = 0.0;
    for (int j = 0; j < d; ++j)
        for (int jp = 0; jp < d; ++jp)
            e += (s[static_cast<size_t>(j * d + jp)] * a_k1.blocks[static_cast<size_t>(jp)] *
                  a_k1.blocks[static_cast<size_t>(j)].adjoint())
                     .trace();
    if (std::abs(e.imag()) > 1e-10)
        throw ValidationError("local energy has a non-negligible imaginary part");
    return e.real();
}

double local_energy(const SiteTensor& a_k, const SiteTensor& a_k1, const MatrixXcd& rho,
                    const MatrixXcd& term) {
    if (a_k1.phys_dim() != a_k.phys_dim())
        throw DimensionError("site tensors disagree on d");
    if (a_k.cols() != a_k1.rows())
        throw DimensionError("bond dimension mismatch between the two sites");
    return local_energy_from_context(local_energy_context(a_k, rho, term), a_k1);
}

double evaluate_mps_energy(const ChainHamiltonian& h, const MpsState& m) {
    h.validate();
    if (h.boundary == Boundary::Periodic)
        throw BoundaryError("evaluate_mps_energy requires an open chain; fold first");
    if (m.length() != h.N) throw DimensionError("MPS length differs from chain length");
    if (m.d != h.d) throw DimensionError("MPS local dimension differs from chain");
    const MpsState canon = m.gauge_flag ? m : canonicalize(m);
    long double energy = 0.0L;
    MatrixXcd rho = MatrixXcd::Identity(1, 1);
    for (int k = 1; k <= h.N - 1; ++k) {
        if (const LocalTerm* t = h.find_term(k))
            energy += local_energy(canon.sites[static_cast<size_t>(k - 1)],
                                   canon.sites[static_cast<size_t>(k)], rho, t->effective());
        rho = advance_rho(canon.sites[static_cast<size_t>(k - 1)], rho);
    }
    return static_cast<double>(energy);
}

VectorXcd mps_to_statevector(const MpsState& m) {
    m.validate();
    const int N = m.length();
    const int d = m.d;
    Eigen::Index dim = 1;
    for (int k = 0; k < N; ++k) dim *= d;
    VectorXcd psi(dim);
    std::vector<int> idx(static_cast<size_t>(N), 0);
    for (Eigen::Index x = 0; x < dim; ++x) {
        Eigen::Index rem = x;
        for (int k = N - 1; k >= 0; --k) {
            idx[static_cast<size_t>(k)] = static_cast<int>(rem % d);
            rem /= d;
        }
        MatrixXcd acc = m.sites[0].blocks[static_cast<size_t>(idx[0])];
        for (int k = 1; k < N; ++k)
            acc = (acc * m.sites[static_cast<size_t>(k)].blocks[static_cast<size_t>(idx[static_cast<size_t>(k)])]).eval();
        psi(x) = acc(0, 0);
    }
    return psi;
}

}  // namespace spinchain
