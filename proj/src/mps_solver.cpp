#include "spinchain/mps_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <json.hpp>

namespace spinchain {

void MpsNets::validate(int d, int N) const {
    if (static_cast<int>(site_nets.size()) != N)
        throw DimensionError("need one tensor net per site");
    if (static_cast<int>(rho_nets.size()) != N - 1)
        throw DimensionError("need one density net per interior boundary");
    for (int k = 0; k < N; ++k) {
        const IsometryNet& n = site_nets[static_cast<size_t>(k)];
        if (n.d != d) throw DimensionError("tensor net physical dimension mismatch");
        if (n.points.empty()) throw EmptyNetError("empty tensor net at site " +
                                                  std::to_string(k + 1));
        if (n.rows != n.points[0].rows() || n.cols != n.points[0].cols())
            throw DimensionError("tensor net shape tag disagrees with its points");
    }
    if (site_nets.front().rows != 1) throw DimensionError("site 1 net must have 1 row");
    if (site_nets.back().cols != 1) throw DimensionError("site N net must have 1 column");
    for (int k = 0; k + 1 < N; ++k) {
        if (site_nets[static_cast<size_t>(k)].cols !=
            site_nets[static_cast<size_t>(k + 1)].rows)
            throw DimensionError("bond dimension mismatch between site nets");
        if (rho_nets[static_cast<size_t>(k)].D !=
            static_cast<int>(site_nets[static_cast<size_t>(k + 1)].rows))
            throw DimensionError("density net dimension mismatch at bond " +
                                 std::to_string(k + 1));
        if (rho_nets[static_cast<size_t>(k)].points.empty())
            throw EmptyNetError("empty density net at bond " + std::to_string(k + 1));
    }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DpEntry {
    double e = kInf;
    int pa = -1;  // previous tensor index
    int pr = -1;  // previous density index
};

}  // namespace

MpsSolution solve_mps_on_nets(const ChainHamiltonian& h, const MpsNets& nets,
                              double eps_rho, double eps_a, double delta) {
    h.validate();
    if (h.boundary == Boundary::Periodic)
        throw BoundaryError("solve_mps requires an open chain; fold first");
    nets.validate(h.d, h.N);
    const int N = h.N;
    const int d = h.d;

    MpsSolution sol;
    sol.delta = delta;
    sol.eps_rho = eps_rho;
    sol.eps_a = eps_a;
    sol.bound_report.delta_rho = 0.5 * N * N * eps_rho;
    sol.bound_report.delta_a = 4.0 * std::pow(N, 1.5) * std::sqrt(d * eps_a);

    // Tables: per site k, entries indexed by (tensor index, density index);
    // the boundary state before site 1 is the exact scalar 1 (one slot).
    auto anet_size = [&](int k) {  // k 1-based
        return nets.site_nets[static_cast<size_t>(k - 1)].points.size();
    };
    auto rnet_size = [&](int k) {
        return k == 1 ? size_t{1} : nets.rho_nets[static_cast<size_t>(k - 2)].points.size();
    };
    std::vector<std::vector<DpEntry>> table(static_cast<size_t>(N + 1));
    for (int k = 1; k <= N; ++k)
        table[static_cast<size_t>(k)].assign(anet_size(k) * rnet_size(k), DpEntry{});
    for (size_t a = 0; a < anet_size(1); ++a) table[1][a].e = 0.0;

    const MatrixXcd rho1 = MatrixXcd::Identity(1, 1);
    for (int k = 1; k < N; ++k) {
        const auto& src_net = nets.site_nets[static_cast<size_t>(k - 1)];
        const auto& dst_net = nets.site_nets[static_cast<size_t>(k)];
        const auto& rnet = nets.rho_nets[static_cast<size_t>(k - 1)];  // before site k+1
        const LocalTerm* t = h.find_term(k);
        const MatrixXcd term =
            t ? t->effective() : MatrixXcd::Zero(d * d, d * d).eval();
        const size_t nr = rnet_size(k);
        const size_t nrn = rnet.points.size();
        auto& cur = table[static_cast<size_t>(k)];
        auto& nxt = table[static_cast<size_t>(k + 1)];
        for (size_t a = 0; a < anet_size(k); ++a) {
            for (size_t r = 0; r < nr; ++r) {
                const DpEntry& src = cur[a * nr + r];
                if (src.e == kInf) continue;
                const MatrixXcd& rho =
                    k == 1 ? rho1 : nets.rho_nets[static_cast<size_t>(k - 2)].points[r];
                const SiteTensor& A = src_net.points[a];
                MatrixXcd advanced = advance_rho(A, rho);
                std::vector<std::size_t> succ = within(rnet, advanced, eps_rho);
                if (succ.empty()) {
                    ++sol.dropped_states;
                    continue;
                }
                std::vector<MatrixXcd> ctx = local_energy_context(A, rho, term);
                for (size_t b = 0; b < dst_net.points.size(); ++b) {
                    double w = local_energy_from_context(ctx, dst_net.points[b]);
                    double cand = src.e + w;
                    for (std::size_t rn : succ) {
                        DpEntry& dst = nxt[b * nrn + rn];
                        if (cand < dst.e) {
                            dst.e = cand;
                            dst.pa = static_cast<int>(a);
                            dst.pr = static_cast<int>(r);
                        }
                    }
                }
            }
        }
    }

    // Lowest-index optimal final state.
    size_t best_a = 0, best_r = 0;
    double best = kInf;
    const size_t nrN = rnet_size(N);
    for (size_t a = 0; a < anet_size(N); ++a)
        for (size_t r = 0; r < nrN; ++r)
            if (table[static_cast<size_t>(N)][a * nrN + r].e < best) {
                best = table[static_cast<size_t>(N)][a * nrN + r].e;
                best_a = a;
                best_r = r;
            }
    if (best == kInf)
        throw EmptyNetError("every DP path was dropped: the density net never captured "
                            "the advanced boundary state within eps_rho");
    sol.dp_energy = best;

    sol.table_stats.resize(static_cast<size_t>(N));
    for (int k = 1; k <= N; ++k) {
        size_t reach = 0;
        for (const DpEntry& e : table[static_cast<size_t>(k)])
            if (e.e < kInf) ++reach;
        sol.table_stats[static_cast<size_t>(k - 1)] = reach;
    }

    std::vector<size_t> chosen(static_cast<size_t>(N));
    size_t a = best_a, r = best_r;
    for (int k = N; k >= 1; --k) {
        chosen[static_cast<size_t>(k - 1)] = a;
        const DpEntry& e = table[static_cast<size_t>(k)][a * rnet_size(k) + r];
        if (k > 1) {
            a = static_cast<size_t>(e.pa);
            r = static_cast<size_t>(e.pr);
        }
    }

    MpsState raw;
    raw.d = d;
    for (int k = 1; k <= N; ++k)
        raw.sites.push_back(
            nets.site_nets[static_cast<size_t>(k - 1)].points[chosen[static_cast<size_t>(k - 1)]]);
    sol.state = canonicalize(raw);
    sol.energy = evaluate_mps_energy(h, sol.state);
    return sol;
}

MpsNets build_mps_nets(const ChainHamiltonian& h, int D, double eps_rho, double eps_a,
                       const NetBudget& budget) {
    h.validate();
    if (D < 1) throw ValidationError("bond dimension must be >= 1");
    const int N = h.N;
    const int d = h.d;
    // Bond dimensions clamped to what the chain geometry supports.
    auto bond = [&](int k) {  // bond between sites k and k+1; 0 = left edge
        if (k <= 0 || k >= N) return Eigen::Index{1};
        double cap = std::pow(static_cast<double>(d), std::min(k, N - k));
        return static_cast<Eigen::Index>(std::min<double>(D, cap));
    };
    const double era = std::min(2.0, eps_a);
    const double err = std::min(2.0, eps_rho);
    MpsNets nets;
    std::map<std::pair<Eigen::Index, Eigen::Index>, IsometryNet> tensor_cache;
    std::map<Eigen::Index, DensityNet> rho_cache;
    for (int k = 1; k <= N; ++k) {
        auto shape = std::make_pair(bond(k - 1), bond(k));
        auto it = tensor_cache.find(shape);
        if (it == tensor_cache.end())
            it = tensor_cache
                     .emplace(shape, build_gauge_net(d, shape.first, shape.second, era, budget))
                     .first;
        nets.site_nets.push_back(it->second);
    }
    for (int k = 2; k <= N; ++k) {
        Eigen::Index dim = bond(k - 1);
        auto it = rho_cache.find(dim);
        if (it == rho_cache.end())
            it = rho_cache.emplace(dim, build_density_net(static_cast<int>(dim), err, budget))
                     .first;
        nets.rho_nets.push_back(it->second);
    }
    return nets;
}

MpsSolution solve_mps(const ChainHamiltonian& h, int D, double delta,
                      std::optional<std::pair<double, double>> net_override,
                      const NetBudget& budget) {
    h.validate();
    if (h.boundary == Boundary::Periodic)
        throw BoundaryError("solve_mps requires an open chain; fold first");
    double eps_rho, eps_a;
    if (net_override) {
        eps_rho = net_override->first;
        eps_a = net_override->second;
        if (!(eps_rho > 0.0) || !(eps_a > 0.0))
            throw ValidationError("net override radii must be positive");
    } else {
        if (!(delta > 0.0)) throw ValidationError("delta must be positive");
        eps_rho = delta / (static_cast<double>(h.N) * h.N);
        eps_a = delta * delta /
                (64.0 * static_cast<double>(h.N) * h.N * h.N * h.d);
    }
    MpsNets nets = build_mps_nets(h, D, eps_rho, eps_a, budget);
    return solve_mps_on_nets(h, nets, eps_rho, eps_a, delta);
}

DriftReport verify_rho_drift(const std::vector<SiteTensor>& tensors, double eps_rho,
                             const DensityNet& net, const ChainHamiltonian& h) {
    if (tensors.empty()) throw ValidationError("need at least one site tensor");
    DriftReport rep;
    rep.steps = static_cast<int>(tensors.size());
    rep.drifts.assign(tensors.size() + 1, 0.0);
    bool ok = true;
    MatrixXcd rho = MatrixXcd::Identity(1, 1);   // exact recursion
    MatrixXcd rho_t = MatrixXcd::Identity(1, 1); // netified recursion
    const int d = tensors[0].phys_dim();
    for (size_t k = 1; k <= tensors.size(); ++k) {
        const SiteTensor& A = tensors[k - 1];
        // Per-bond energy deviation caused by the accumulated drift: same
        // tensors, exact vs netified boundary state, ||H|| <= 1.
        if (k > 1 && k < tensors.size()) {
            const LocalTerm* t = h.find_term(static_cast<int>(k));
            if (t) {
                double e_exact = local_energy(A, tensors[k], rho, t->matrix);
                double e_net = local_energy(A, tensors[k], rho_t, t->matrix);
                rep.max_energy_dev = std::max(rep.max_energy_dev, std::abs(e_exact - e_net));
                if (std::abs(e_exact - e_net) >
                    (static_cast<double>(k) - 1.0) * eps_rho + 1e-9)
                    ok = false;
            }
        }
        rho = advance_rho(A, rho);
        MatrixXcd advanced = advance_rho(A, rho_t);
        NearestResult snap = nearest(net, advanced);
        if (snap.distance > eps_rho + 1e-9) ok = false;  // covering premise failed
        rho_t = net.points[snap.index];
        double drift = trace_norm(rho_t - rho);
        rep.drifts[k] = drift;
        rep.max_drift = std::max(rep.max_drift, drift);
        if (drift > static_cast<double>(k) * eps_rho + 1e-9) ok = false;
    }
    (void)d;
    rep.pass = ok;
    return rep;
}

Complex mps_overlap(const MpsState& a, const MpsState& b) {
    if (a.d != b.d || a.length() != b.length())
        throw DimensionError("overlap needs matching chains");
    MatrixXcd x = MatrixXcd::Identity(1, 1);
    for (int k = 0; k < a.length(); ++k) {
        const SiteTensor& sa = a.sites[static_cast<size_t>(k)];
        const SiteTensor& sb = b.sites[static_cast<size_t>(k)];
        MatrixXcd nxt = MatrixXcd::Zero(sa.cols(), sb.cols());
        for (int i = 0; i < a.d; ++i)
            nxt += sa.blocks[static_cast<size_t>(i)].adjoint() * x *
                   sb.blocks[static_cast<size_t>(i)];
        x = std::move(nxt);
    }
    return x(0, 0);
}

MpsState perturb_canonical(const MpsState& m, double sigma, std::uint64_t seed,
                           double* eps_measured) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MpsState out = m;
    double eps = 0.0;
    for (auto& site : out.sites) {
        const Eigen::Index rows = site.rows();
        const Eigen::Index cols = site.cols();
        const int d = site.phys_dim();
        MatrixXcd w(rows, d * cols);
        for (int i = 0; i < d; ++i)
            w.middleCols(i * cols, cols) = site.blocks[static_cast<size_t>(i)];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                w(r, c) += sigma * Complex(gauss(rng), gauss(rng));
        Eigen::JacobiSVD<MatrixXcd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
        MatrixXcd proj = svd.matrixU() * svd.matrixV().adjoint();
        for (int i = 0; i < d; ++i) {
            MatrixXcd nb = proj.middleCols(i * cols, cols);
            eps = std::max(eps, operator_norm(nb - site.blocks[static_cast<size_t>(i)]));
            site.blocks[static_cast<size_t>(i)] = std::move(nb);
        }
    }
    out.gauge_flag = true;
    if (eps_measured) *eps_measured = eps;
    return out;
}

OverlapReport verify_overlap_bound(const MpsState& m, const MpsState& perturbed,
                                   const ChainHamiltonian& h, double eps_a) {
    const int N = m.length();
    const int d = m.d;
    if (2.0 * N * d * eps_a > 1.0)
        throw PreconditionError("need 2 N d eps_A <= 1");
    for (const auto& s : m.sites)
        if (s.gauge_defect() > 1e-6)
            throw PreconditionError("reference state must be canonical");
    for (const auto& s : perturbed.sites)
        if (s.gauge_defect() > 1e-6)
            throw PreconditionError("perturbed state must be canonical");
    OverlapReport rep;
    rep.overlap = std::abs(mps_overlap(m, perturbed));
    rep.overlap_bound = 1.0 - 2.0 * N * d * eps_a;
    rep.energy_diff = std::abs(evaluate_mps_energy(h, m) - evaluate_mps_energy(h, perturbed));
    rep.energy_bound = 4.0 * std::pow(N, 1.5) * std::sqrt(d * eps_a);
    rep.pass = rep.overlap >= rep.overlap_bound - 1e-9 &&
               rep.energy_diff <= rep.energy_bound + 1e-9;
    return rep;
}

CostReport estimate_cost(int N, int d, int D, double delta) {
    if (N < 1 || d < 1 || D < 1 || !(delta > 0.0))
        throw ValidationError("estimate_cost needs positive arguments");
    using bf = boost::multiprecision::cpp_bin_float_100;
    CostReport rep;
    rep.eps = delta / (2.0 * N);
    rep.eps_rho = delta / (static_cast<double>(N) * N);
    rep.eps_a = delta * delta / (64.0 * static_cast<double>(N) * N * N * d);
    bf mf = bf(N) * pow(bf(d), 4) * pow(bf(10) * N / bf(delta), 4 * d);
    bf inner = pow(bf(3), 2 * d + 1) * pow(bf(2), 12 * d) * pow(bf(N), 6 * d + 2) *
               pow(bf(d), 2 * d) / pow(bf(delta), 3);
    bf mps = bf(N) * pow(bf(d), 4) * pow(bf(D), 3) * pow(inner, 2 * D * D);
    rep.mean_field_count = mf.str(25, std::ios_base::scientific);
    rep.mps_count = mps.str(25, std::ios_base::scientific);
    rep.mean_field_log10 = static_cast<double>(log10(mf));
    rep.mps_log10 = static_cast<double>(log10(mps));
    rep.state_net_log10 = 2.0 * d * std::log10(5.0 / rep.eps);
    rep.rho_net_log10 = static_cast<double>(D) * D * std::log10(3.0 / rep.eps_rho);
    rep.iso_net_log10 = 2.0 * d * static_cast<double>(D) * D * std::log10(3.0 / rep.eps_a);
    return rep;
}

std::string serialize_solution(const MpsSolution& sol, int d) {
    nlohmann::ordered_json doc;
    doc["schema"] = "spinchain-mps-solution/1";
    doc["d"] = d;
    doc["energy"] = sol.energy;
    doc["dp_energy"] = sol.dp_energy;
    doc["delta"] = sol.delta;
    doc["eps_rho"] = sol.eps_rho;
    doc["eps_a"] = sol.eps_a;
    doc["bound_report"] = {{"delta_rho", sol.bound_report.delta_rho},
                           {"delta_a", sol.bound_report.delta_a},
                           {"total", sol.bound_report.total()}};
    nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
    for (const auto& site : sol.state.sites) {
        nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
        for (const auto& b : site.blocks) {
            nlohmann::ordered_json mat = nlohmann::ordered_json::array();
            for (Eigen::Index i = 0; i < b.rows(); ++i) {
                nlohmann::ordered_json row = nlohmann::ordered_json::array();
                for (Eigen::Index j = 0; j < b.cols(); ++j)
                    row.push_back({b(i, j).real(), b(i, j).imag()});
                mat.push_back(std::move(row));
            }
            blocks.push_back(std::move(mat));
        }
        tensors.push_back(std::move(blocks));
    }
    doc["tensors"] = std::move(tensors);
    return doc.dump(2);
}

MpsSolution parse_solution(const std::string& text, int* d_out) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("bad solution document: ") + e.what());
    }
    try {
        MpsSolution sol;
        int d = doc.at("d").get<int>();
        if (d_out) *d_out = d;
        sol.energy = doc.at("energy").get<double>();
        sol.dp_energy = doc.value("dp_energy", 0.0);
        sol.delta = doc.value("delta", 0.0);
        sol.eps_rho = doc.value("eps_rho", 0.0);
        sol.eps_a = doc.value("eps_a", 0.0);
        if (doc.contains("bound_report")) {
            sol.bound_report.delta_rho = doc["bound_report"].value("delta_rho", 0.0);
            sol.bound_report.delta_a = doc["bound_report"].value("delta_a", 0.0);
        }
        sol.state.d = d;
        for (const auto& site : doc.at("tensors")) {
            SiteTensor s;
            for (const auto& mat : site) {
                MatrixXcd b(mat.size(), mat.at(0).size());
                for (size_t i = 0; i < mat.size(); ++i)
                    for (size_t j = 0; j < mat[i].size(); ++j)
                        b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                            Complex(mat[i][j].at(0).get<double>(),
                                    mat[i][j].at(1).get<double>());
                s.blocks.push_back(std::move(b));
            }
            sol.state.sites.push_back(std::move(s));
        }
        return sol;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("bad solution document: ") + e.what());
    }
}

}  // namespace spinchain
