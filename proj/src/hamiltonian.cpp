#include "spinchain/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

namespace spinchain {

using nlohmann::json;

MatrixXcd pauli_x() {
    MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

MatrixXcd pauli_y() {
    MatrixXcd m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

MatrixXcd pauli_z() {
    MatrixXcd m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

const LocalTerm* ChainHamiltonian::find_term(int site) const {
    for (const auto& t : terms)
        if (t.site == site) return &t;
    return nullptr;
}

MatrixXcd ChainHamiltonian::bond_matrix(int k) const {
    if (const LocalTerm* t = find_term(k)) return t->effective();
    return MatrixXcd::Zero(d * d, d * d);
}

void ChainHamiltonian::validate() const {
    if (d < 2) throw ValidationError("local dimension must be >= 2");
    if (N < 2) throw ValidationError("chain length must be >= 2");
    const int max_site = boundary == Boundary::Open ? N - 1 : N;
    std::vector<bool> seen(static_cast<size_t>(max_site) + 1, false);
    for (const auto& t : terms) {
        if (t.site < 1 || t.site > max_site)
            throw ValidationError("term site index " + std::to_string(t.site) +
                                  " out of range 1.." + std::to_string(max_site));
        if (seen[static_cast<size_t>(t.site)])
            throw ValidationError("duplicate term at site " + std::to_string(t.site));
        seen[static_cast<size_t>(t.site)] = true;
        if (t.matrix.rows() != d * d || t.matrix.cols() != d * d)
            throw ValidationError("term matrix must be d^2 x d^2");
        if (!is_hermitian(t.matrix))
            throw ValidationError("term at site " + std::to_string(t.site) +
                                  " is not Hermitian");
        if (operator_norm(t.matrix) > 1.0 + kNormSlack)
            throw ValidationError("term at site " + std::to_string(t.site) +
                                  " has operator norm > 1");
        if (t.scale <= 0) throw ValidationError("term scale must be positive");
    }
}

void ClassicalChain::validate() const {
    if (d < 2) throw ValidationError("local dimension must be >= 2");
    if (N < 2) throw ValidationError("chain length must be >= 2");
    const int nb = boundary == Boundary::Open ? N - 1 : N;
    if (static_cast<int>(tables.size()) != nb)
        throw ValidationError("expected one table per bond");
    for (const auto& t : tables) {
        if (t.rows() != d || t.cols() != d)
            throw ValidationError("cost tables must be d x d");
        if (!t.allFinite()) throw ValidationError("cost table entry not finite");
    }
}

ChainHamiltonian make_chain(int d, int N, Boundary boundary,
                            std::vector<std::pair<int, MatrixXcd>> couplings) {
    ChainHamiltonian h;
    h.d = d;
    h.N = N;
    h.boundary = boundary;
    for (auto& [site, m] : couplings) {
        if (!is_hermitian(m))
            throw ValidationError("coupling at site " + std::to_string(site) +
                                  " is not Hermitian");
        LocalTerm t;
        t.site = site;
        double nrm = operator_norm(m);
        if (nrm > 1.0) {
            t.scale = nrm;
            t.matrix = m / nrm;
        } else {
            t.matrix = std::move(m);
        }
        // Enforce exact Hermiticity on the stored matrix.
        t.matrix = 0.5 * (t.matrix + t.matrix.adjoint()).eval();
        h.terms.push_back(std::move(t));
    }
    std::sort(h.terms.begin(), h.terms.end(),
              [](const LocalTerm& a, const LocalTerm& b) { return a.site < b.site; });
    h.validate();
    return h;
}

namespace {

// Spin-1 operators in the basis {m=+1, 0, -1}.
void spin1_ops(MatrixXcd& sx, MatrixXcd& sy, MatrixXcd& sz) {
    const double s = 1.0 / std::sqrt(2.0);
    sx = MatrixXcd::Zero(3, 3);
    sx(0, 1) = s; sx(1, 0) = s; sx(1, 2) = s; sx(2, 1) = s;
    sy = MatrixXcd::Zero(3, 3);
    sy(0, 1) = Complex(0, -s); sy(1, 0) = Complex(0, s);
    sy(1, 2) = Complex(0, -s); sy(2, 1) = Complex(0, s);
    sz = MatrixXcd::Zero(3, 3);
    sz(0, 0) = 1; sz(2, 2) = -1;
}

}  // namespace

ChainHamiltonian make_preset(const std::string& name, int N, Boundary boundary) {
    std::vector<std::pair<int, MatrixXcd>> couplings;
    const int nb = boundary == Boundary::Open ? N - 1 : N;
    if (name == "ising_zz") {
        MatrixXcd zz = kron(pauli_z(), pauli_z());
        for (int k = 1; k <= nb; ++k) couplings.emplace_back(k, zz);
        return make_chain(2, N, boundary, std::move(couplings));
    }
    if (name.rfind("tfim:g=", 0) == 0) {
        double g = 0.0;
        try {
            g = std::stod(name.substr(7));
        } catch (const std::exception&) {
            throw SchemaError("bad field strength in preset '" + name + "'");
        }
        MatrixXcd zz = kron(pauli_z(), pauli_z());
        MatrixXcd xi = kron(pauli_x(), MatrixXcd::Identity(2, 2));
        MatrixXcd ix = kron(MatrixXcd::Identity(2, 2), pauli_x());
        for (int k = 1; k <= nb; ++k) {
            // Split each on-site field evenly between its two bonds; OBC edge
            // sites have only one bond and take the full field there.
            double cl = (boundary == Boundary::Open && k == 1) ? 1.0 : 0.5;
            double cr = (boundary == Boundary::Open && k == N - 1) ? 1.0 : 0.5;
            couplings.emplace_back(k, -zz - g * (cl * xi + cr * ix));
        }
        return make_chain(2, N, boundary, std::move(couplings));
    }
    if (name == "heisenberg") {
        MatrixXcd hh = kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) +
                       kron(pauli_z(), pauli_z());
        for (int k = 1; k <= nb; ++k) couplings.emplace_back(k, hh);
        return make_chain(2, N, boundary, std::move(couplings));
    }
    if (name == "aklt") {
        MatrixXcd sx, sy, sz;
        spin1_ops(sx, sy, sz);
        MatrixXcd ss = kron(sx, sx) + kron(sy, sy) + kron(sz, sz);
        MatrixXcd id = MatrixXcd::Identity(9, 9);
        // Projector onto the spin-2 subspace of two spin-1 sites.
        MatrixXcd p2 = (ss + 2.0 * id) * (ss + id) / 6.0;
        for (int k = 1; k <= nb; ++k) couplings.emplace_back(k, p2);
        return make_chain(3, N, boundary, std::move(couplings));
    }
    throw SchemaError("unknown preset '" + name + "'");
}

namespace {

MatrixXcd matrix_from_json(const json& jm, int dim) {
    if (!jm.is_array() || static_cast<int>(jm.size()) != dim)
        throw SchemaError("matrix must be a " + std::to_string(dim) + "-row array");
    MatrixXcd m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const json& row = jm[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw SchemaError("matrix row has wrong length");
        for (int j = 0; j < dim; ++j) {
            const json& e = row[static_cast<size_t>(j)];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw SchemaError("matrix entries must be [re, im] pairs");
            m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

json matrix_to_json(const MatrixXcd& m) {
    json jm = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        jm.push_back(std::move(row));
    }
    return jm;
}

}  // namespace

ChainHamiltonian parse_hamiltonian(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("document must be a JSON object");
    for (const char* key : {"d", "N"})
        if (!doc.contains(key) || !doc[key].is_number_integer())
            throw SchemaError(std::string("missing integer field '") + key + "'");
    int d = doc["d"].get<int>();
    int N = doc["N"].get<int>();
    if (!doc.contains("boundary") || !doc["boundary"].is_string())
        throw SchemaError("missing string field 'boundary'");
    std::string b = doc["boundary"].get<std::string>();
    Boundary boundary;
    if (b == "open")
        boundary = Boundary::Open;
    else if (b == "periodic")
        boundary = Boundary::Periodic;
    else
        throw SchemaError("boundary must be 'open' or 'periodic'");

    if (doc.contains("preset")) {
        if (!doc["preset"].is_string()) throw SchemaError("'preset' must be a string");
        ChainHamiltonian h = make_preset(doc["preset"].get<std::string>(), N, boundary);
        if (h.d != d)
            throw ValidationError("preset local dimension disagrees with 'd'");
        return h;
    }

    if (!doc.contains("terms") || !doc["terms"].is_array())
        throw SchemaError("missing array field 'terms'");
    std::vector<std::pair<int, MatrixXcd>> couplings;
    for (const json& jt : doc["terms"]) {
        if (!jt.is_object() || !jt.contains("site") || !jt["site"].is_number_integer() ||
            !jt.contains("matrix"))
            throw SchemaError("each term needs an integer 'site' and a 'matrix'");
        couplings.emplace_back(jt["site"].get<int>(),
                               matrix_from_json(jt["matrix"], d * d));
    }
    return make_chain(d, N, boundary, std::move(couplings));
}

std::string serialize_hamiltonian(const ChainHamiltonian& h) {
    json doc;
    doc["d"] = h.d;
    doc["N"] = h.N;
    doc["boundary"] = h.boundary == Boundary::Open ? "open" : "periodic";
    json terms = json::array();
    for (const auto& t : h.terms) {
        json jt;
        jt["site"] = t.site;
        jt["matrix"] = matrix_to_json(t.effective());
        terms.push_back(std::move(jt));
    }
    doc["terms"] = std::move(terms);
    return doc.dump(2);
}

ClassicalChain classicalize(const ChainHamiltonian& h) {
    h.validate();
    ClassicalChain c;
    c.d = h.d;
    c.N = h.N;
    c.boundary = h.boundary;
    const int nb = h.num_bonds();
    c.tables.reserve(static_cast<size_t>(nb));
    for (int k = 1; k <= nb; ++k) {
        MatrixXcd m = h.bond_matrix(k);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (i != j && std::abs(m(i, j)) >= 1e-12)
                    throw NotDiagonalError("term on bond " + std::to_string(k) +
                                           " is not diagonal in the product basis");
        MatrixXd table(h.d, h.d);
        for (int i = 0; i < h.d; ++i)
            for (int j = 0; j < h.d; ++j) table(i, j) = m(i * h.d + j, i * h.d + j).real();
        c.tables.push_back(std::move(table));
    }
    return c;
}

namespace {

// Embed `op`, acting on the component subset `pos` (each in 0..3 with its own
// local dimension d), into the 4-component bond space of a folded chain.
// `pos` lists the components op's tensor factors act on, in factor order.
MatrixXcd embed_two(const MatrixXcd& op, int d, int pos_first, int pos_second) {
    const int dim = d * d * d * d;
    MatrixXcd out = MatrixXcd::Zero(dim, dim);
    int stride[4] = {d * d * d, d * d, d, 1};
    for (int r = 0; r < dim; ++r) {
        int idx[4] = {(r / stride[0]) % d, (r / stride[1]) % d, (r / stride[2]) % d,
                      r % d};
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                int cdx[4] = {idx[0], idx[1], idx[2], idx[3]};
                cdx[pos_first] = a;
                cdx[pos_second] = b;
                int col = cdx[0] * stride[0] + cdx[1] * stride[1] + cdx[2] * stride[2] +
                          cdx[3];
                Complex v = op(idx[pos_first] * d + idx[pos_second], a * d + b);
                if (v != Complex(0, 0)) out(r, col) += v;
            }
        }
    }
    return out;
}

}  // namespace

ChainHamiltonian fold_pbc(const ChainHamiltonian& h) {
    h.validate();
    if (h.boundary != Boundary::Periodic)
        throw NotPeriodicError("fold_pbc requires a periodic chain");
    if (h.N % 2 != 0) throw OddLengthError("fold_pbc requires even chain length");
    if (h.N < 4) throw ValidationError("fold_pbc requires N >= 4");

    const int d = h.d;
    const int Nf = h.N / 2;
    const int df = d * d;
    std::vector<MatrixXcd> bonds(static_cast<size_t>(Nf - 1),
                                 MatrixXcd::Zero(df * df, df * df));

    // Bond components: 0 = site j, 1 = site N+1-j, 2 = site j+1, 3 = site N-j.
    for (int j = 1; j <= Nf - 1; ++j) {
        if (const LocalTerm* t = h.find_term(j))
            bonds[static_cast<size_t>(j - 1)] += embed_two(t->effective(), d, 0, 2);
        if (const LocalTerm* t = h.find_term(h.N - j))
            bonds[static_cast<size_t>(j - 1)] += embed_two(t->effective(), d, 3, 1);
    }
    // H_{N/2, N/2+1} lives entirely on folded site N/2; absorb into bond
    // (N/2-1, N/2), i.e. components (2, 3) of that bond.
    if (const LocalTerm* t = h.find_term(Nf))
        bonds[static_cast<size_t>(Nf - 2)] += embed_two(t->effective(), d, 2, 3);
    // H_{N,1} lives on folded site 1 as (mirrored, left) = components (1, 0);
    // absorb into bond (1, 2).
    if (const LocalTerm* t = h.find_term(h.N))
        bonds[0] += embed_two(t->effective(), d, 1, 0);

    std::vector<std::pair<int, MatrixXcd>> couplings;
    for (int j = 1; j <= Nf - 1; ++j) {
        if (bonds[static_cast<size_t>(j - 1)].cwiseAbs().maxCoeff() > 0)
            couplings.emplace_back(j, std::move(bonds[static_cast<size_t>(j - 1)]));
    }
    return make_chain(df, Nf, Boundary::Open, std::move(couplings));
}

}  // namespace spinchain
