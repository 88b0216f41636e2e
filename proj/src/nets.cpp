#include "spinchain/nets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace spinchain {

namespace {

constexpr double kBuildMargin = 0.98;  // construct slightly inside the declared radius

double opnorm_small(const MatrixXcd& m) {
    if (m.size() == 1) return std::abs(m(0, 0));
    if (m.rows() == 1 || m.cols() == 1) return m.norm();
    if (m.rows() == 2 && m.cols() == 2) {
        // Largest singular value of a general 2x2 block.
        double t = m.squaredNorm();
        Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        double disc = std::sqrt(std::max(0.0, t * t - 4.0 * std::norm(det)));
        return std::sqrt(0.5 * (t + disc));
    }
    return m.jacobiSvd().singularValues()(0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double state_distance(const VectorXcd& a, const VectorXcd& b) {
    double ov = std::norm(a.dot(b));
    return 2.0 * std::sqrt(std::max(0.0, 1.0 - ov));
}

double density_distance(const MatrixXcd& a, const MatrixXcd& b) {
    return trace_norm(a - b);
}

double isometry_frobenius_distance(const SiteTensor& a, const SiteTensor& b) {
    double na = 0.0, nb = 0.0;
    Complex c = 0.0;
    for (size_t i = 0; i < a.blocks.size(); ++i) {
        na += a.blocks[i].squaredNorm();
        nb += b.blocks[i].squaredNorm();
        c += (a.blocks[i].adjoint() * b.blocks[i]).trace();
    }
    return std::sqrt(std::max(0.0, na + nb - 2.0 * std::abs(c)));
}

namespace {

double isometry_phase_objective(const SiteTensor& a, const SiteTensor& b, double phi) {
    Complex ph = std::polar(1.0, phi);
    double worst = 0.0;
    for (size_t i = 0; i < a.blocks.size(); ++i)
        worst = std::max(worst, opnorm_small(a.blocks[i] - ph * b.blocks[i]));
    return worst;
}

}  // namespace

double isometry_distance(const SiteTensor& a, const SiteTensor& b) {
    if (a.blocks.size() != b.blocks.size())
        throw DimensionError("site tensors disagree on physical dimension");
    // Frobenius-optimal phase, then a coarse scan and a golden-section refine.
    Complex c = 0.0;
    for (size_t i = 0; i < a.blocks.size(); ++i)
        c += (b.blocks[i].adjoint() * a.blocks[i]).trace();
    double phi0 = std::abs(c) > 1e-14 ? std::arg(c) : 0.0;
    double best_phi = phi0;
    double best = isometry_phase_objective(a, b, phi0);
    constexpr int kScan = 32;
    for (int k = 0; k < kScan; ++k) {
        double phi = phi0 + 2.0 * std::numbers::pi * k / kScan;
        double v = isometry_phase_objective(a, b, phi);
        if (v < best) {
            best = v;
            best_phi = phi;
        }
    }
    double lo = best_phi - 2.0 * std::numbers::pi / kScan;
    double hi = best_phi + 2.0 * std::numbers::pi / kScan;
    constexpr double kGolden = 0.6180339887498949;
    double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
    double f1 = isometry_phase_objective(a, b, x1), f2 = isometry_phase_objective(a, b, x2);
    for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = isometry_phase_objective(a, b, x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = isometry_phase_objective(a, b, x2);
        }
    }
    return std::min(best, std::min(f1, f2));
}

// ---------------------------------------------------------------------------
// Hermitian basis
// ---------------------------------------------------------------------------

const std::vector<MatrixXcd>& hermitian_basis(int D) {
    static std::mutex mu;
    static std::map<int, std::vector<MatrixXcd>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(D);
    if (it != cache.end()) return it->second;
    std::vector<MatrixXcd> basis;
    const double s = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < D; ++k) {
        MatrixXcd m = MatrixXcd::Zero(D, D);
        m(k, k) = 1.0;
        basis.push_back(std::move(m));
    }
    for (int k = 0; k < D; ++k)
        for (int l = k + 1; l < D; ++l) {
            MatrixXcd m = MatrixXcd::Zero(D, D);
            m(k, l) = s;
            m(l, k) = s;
            basis.push_back(m);
            m.setZero();
            m(k, l) = Complex(0, -s);
            m(l, k) = Complex(0, s);
            basis.push_back(m);
        }
    return cache.emplace(D, std::move(basis)).first->second;
}

VectorXd hermitian_coords(const MatrixXcd& m) {
    const int D = static_cast<int>(m.rows());
    const auto& basis = hermitian_basis(D);
    VectorXd x(static_cast<Eigen::Index>(basis.size()));
    for (size_t k = 0; k < basis.size(); ++k)
        x(static_cast<Eigen::Index>(k)) = (basis[k] * m).trace().real();
    return x;
}

MatrixXcd from_hermitian_coords(const VectorXd& x, int D) {
    const auto& basis = hermitian_basis(D);
    MatrixXcd m = MatrixXcd::Zero(D, D);
    for (size_t k = 0; k < basis.size(); ++k) m += x(static_cast<Eigen::Index>(k)) * basis[k];
    return m;
}

// ---------------------------------------------------------------------------
// Random samples of the target sets
// ---------------------------------------------------------------------------

VectorXcd random_pure_state(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    VectorXcd v(d);
    for (int i = 0; i < d; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();
    fix_global_phase(v);
    return v;
}

MatrixXcd random_density_matrix(int D, std::mt19937_64& rng, bool subnormalized) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixXcd g(D, D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    if (subnormalized) {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        rho *= uni(rng);
    }
    return rho;
}

SiteTensor random_gauge_tensor(int d, int D, BoundaryShape shape, std::mt19937_64& rng) {
    Eigen::Index rows = shape == BoundaryShape::FirstSite ? 1 : D;
    Eigen::Index cols = shape == BoundaryShape::LastSite ? 1 : D;
    return random_gauge_tensor(d, rows, cols, rng);
}

SiteTensor random_gauge_tensor(int d, Eigen::Index rows, Eigen::Index cols,
                               std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (rows > d * cols)
        throw ValidationError("gauge condition is infeasible: rows > d * cols");
    MatrixXcd w(rows, d * cols);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::JacobiSVD<MatrixXcd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    MatrixXcd iso = svd.matrixU() * svd.matrixV().adjoint();
    SiteTensor s;
    for (int i = 0; i < d; ++i) s.blocks.push_back(iso.middleCols(i * cols, cols));
    // Phase-fix over the concatenated entries.
    Complex lead = 0.0;
    for (const auto& b : s.blocks) {
        for (Eigen::Index r = 0; r < b.rows() && lead == Complex(0, 0); ++r)
            for (Eigen::Index cc = 0; cc < b.cols(); ++cc)
                if (std::abs(b(r, cc)) > 1e-9) {
                    lead = b(r, cc);
                    break;
                }
        if (lead != Complex(0, 0)) break;
    }
    if (lead != Complex(0, 0)) {
        Complex ph = std::conj(lead) / std::abs(lead);
        for (auto& b : s.blocks) b *= ph;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Cardinality bounds
// ---------------------------------------------------------------------------

double state_net_bound(int d, double epsilon) { return std::pow(5.0 / epsilon, 2.0 * d); }
double density_net_bound(int D, double epsilon) {
    return std::pow(3.0 / epsilon, static_cast<double>(D) * D);
}
double isometry_net_bound(int d, int D, double epsilon) {
    return std::pow(3.0 / epsilon, 2.0 * d * D * D);
}

// ---------------------------------------------------------------------------
// Construction helpers
// ---------------------------------------------------------------------------

namespace {

void check_point_budget(double estimate, const NetBudget& budget, const char* what) {
    if (!(estimate <= static_cast<double>(budget.max_points)))
        throw BudgetError(std::string(what) + ": estimated net size " +
                          std::to_string(estimate) + " exceeds the ceiling of " +
                          std::to_string(budget.max_points) + " points");
}

// Pure states of C^2 as a latitude/longitude grid on the Bloch sphere with a
// guaranteed chord covering radius. Trace distance between qubit projectors
// equals Euclidean distance between Bloch vectors.
std::vector<VectorXcd> bloch_band_states(double bloch_radius, const NetBudget& budget) {
    const double alpha = 2.0 * std::asin(std::min(1.0, bloch_radius / 2.0));
    const double grid = alpha * std::numbers::sqrt2 * 0.9;
    check_point_budget(4.0 * std::numbers::pi / (grid * grid) + 2.0, budget, "state net");
    const int ntheta = static_cast<int>(std::ceil(std::numbers::pi / grid));
    std::vector<VectorXcd> pts;
    for (int i = 0; i < ntheta; ++i) {
        double theta = (i + 0.5) * std::numbers::pi / ntheta;
        double lo = i * std::numbers::pi / ntheta;
        double hi = (i + 1) * std::numbers::pi / ntheta;
        double smax = (lo <= std::numbers::pi / 2 && hi >= std::numbers::pi / 2)
                          ? 1.0
                          : std::max(std::sin(lo), std::sin(hi));
        int nphi = std::max(1, static_cast<int>(std::ceil(2.0 * std::numbers::pi * smax / grid)));
        for (int j = 0; j < nphi; ++j) {
            double phi = 2.0 * std::numbers::pi * j / nphi;
            VectorXcd v(2);
            v(0) = std::cos(theta / 2.0);
            v(1) = std::polar(std::sin(theta / 2.0), phi);
            pts.push_back(std::move(v));
        }
    }
    return pts;
}

// Maximal separated set drawn from a seeded sampler: greedy insertion keeps a
// point when it is farther than `t` from all kept points, and stops after
// `stall` consecutive rejections. The result covers the sampled set at t.
template <typename Point, typename Sampler, typename Metric>
std::vector<Point> greedy_packing(Sampler sample, Metric dist, double t, int stall,
                                  std::int64_t max_points, const char* what) {
    std::vector<Point> pts;
    int consecutive = 0;
    while (consecutive < stall) {
        Point x = sample();
        bool covered = false;
        for (const Point& p : pts)
            if (dist(x, p) <= t) {
                covered = true;
                break;
            }
        if (covered) {
            ++consecutive;
        } else {
            pts.push_back(std::move(x));
            consecutive = 0;
            if (static_cast<std::int64_t>(pts.size()) > max_points)
                throw BudgetError(std::string(what) + ": net exceeded the ceiling of " +
                                  std::to_string(max_points) + " points");
        }
    }
    return pts;
}

// Projection onto {X >= 0, tr X <= 1} (eigenvalues onto the capped simplex).
MatrixXcd project_to_density_set(const MatrixXcd& m) {
    MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    double total = lam.sum();
    if (total > 1.0) {
        // Euclidean projection onto the simplex {lam >= 0, sum = 1}.
        VectorXd sorted = lam;
        std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<double>());
        double cum = 0.0, theta = 0.0;
        int k = 0;
        for (Eigen::Index i = 0; i < sorted.size(); ++i) {
            cum += sorted(i);
            double th = (cum - 1.0) / static_cast<double>(i + 1);
            if (sorted(i) - th > 0) {
                theta = th;
                k = static_cast<int>(i) + 1;
            }
        }
        (void)k;
        lam = (lam.array() - theta).cwiseMax(0.0);
    }
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

void enumerate_lattice(int dims, double spacing, double radius_limit,
                       const std::function<void(const VectorXd&)>& emit) {
    const int kmax = static_cast<int>(std::floor(radius_limit / spacing));
    VectorXd x = VectorXd::Zero(dims);
    std::vector<int> idx(static_cast<size_t>(dims), -kmax);
    const double r2 = radius_limit * radius_limit;
    // Odometer enumeration with norm pruning at the last coordinate.
    while (true) {
        double partial = 0.0;
        for (int i = 0; i < dims; ++i) {
            x(i) = idx[static_cast<size_t>(i)] * spacing;
            partial += x(i) * x(i);
        }
        if (partial <= r2) emit(x);
        int pos = dims - 1;
        while (pos >= 0 && idx[static_cast<size_t>(pos)] == kmax) {
            idx[static_cast<size_t>(pos)] = -kmax;
            --pos;
        }
        if (pos < 0) break;
        ++idx[static_cast<size_t>(pos)];
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

StateNet build_state_net(int d, double epsilon, const NetBudget& budget) {
    if (d < 1) throw ValidationError("state net needs d >= 1");
    if (!(epsilon > 0.0 && epsilon <= 2.0))
        throw ValidationError("state net radius must lie in (0, 2]");
    StateNet net;
    net.d = d;
    net.epsilon = epsilon;
    if (!net_cache_dir().empty()) {
        char key[128];
        std::snprintf(key, sizeof key, "state_d%d_%a_v1.bin", d, epsilon);
        if (auto cached = load_state_net(net_cache_dir() + "/" + key)) return *cached;
    }
    if (d == 1) {
        net.points.push_back(VectorXcd::Ones(1));
    } else if (epsilon >= 2.0 - 1e-12) {
        VectorXcd v = VectorXcd::Zero(d);
        v(0) = 1.0;
        net.points.push_back(std::move(v));
    } else if (d == 2) {
        net.points = bloch_band_states(kBuildMargin * epsilon, budget);
    } else {
        std::mt19937_64 rng(0x5f3759dfULL + 1000003ULL * static_cast<std::uint64_t>(d));
        check_point_budget(state_net_bound(d, epsilon), budget, "state net");
        net.points = greedy_packing<VectorXcd>(
            [&] { return random_pure_state(d, rng); },
            [](const VectorXcd& a, const VectorXcd& b) { return state_distance(a, b); },
            0.8 * epsilon, 2000, budget.max_points, "state net");
    }
    double bound = state_net_bound(d, epsilon);
    if (static_cast<double>(net.points.size()) > bound)
        throw BudgetError("state net construction exceeded the (5/eps)^(2d) bound");
    if (!net_cache_dir().empty()) {
        char key[128];
        std::snprintf(key, sizeof key, "state_d%d_%a_v1.bin", d, epsilon);
        save_net(net, net_cache_dir() + "/" + key);
    }
    return net;
}

DensityNet make_density_net(int D, double epsilon_rho, std::vector<MatrixXcd> points) {
    DensityNet net;
    net.D = D;
    net.epsilon_rho = epsilon_rho;
    net.points = std::move(points);
    net.coords.resize(static_cast<Eigen::Index>(net.points.size()),
                      static_cast<Eigen::Index>(D) * D);
    for (size_t i = 0; i < net.points.size(); ++i)
        net.coords.row(static_cast<Eigen::Index>(i)) = hermitian_coords(net.points[i]).transpose();
    return net;
}

DensityNet build_density_net(int D, double epsilon_rho, const NetBudget& budget) {
    if (D < 1) throw ValidationError("density net needs D >= 1");
    if (!(epsilon_rho > 0.0 && epsilon_rho <= 2.0))
        throw ValidationError("density net radius must lie in (0, 2]");
    if (!net_cache_dir().empty()) {
        char key[128];
        std::snprintf(key, sizeof key, "density_D%d_%a_v1.bin", D, epsilon_rho);
        if (auto cached = load_density_net(net_cache_dir() + "/" + key)) return *cached;
    }
    const double target = kBuildMargin * epsilon_rho;
    const double bound = density_net_bound(D, epsilon_rho);
    const int dims = D * D;
    std::vector<MatrixXcd> accepted;
    bool done = false;
    if (epsilon_rho >= 2.0 - 1e-12) {
        // The set has trace-norm diameter <= 2 (even radius 1 around zero).
        accepted.push_back(MatrixXcd::Zero(D, D));
        done = true;
    }
    for (double frac : {0.55, 0.65, 0.75}) {
        if (done) break;
        const double thin = frac * target;
        const double reach = (target - thin) / std::sqrt(static_cast<double>(D));
        const double spacing = 2.0 * reach / dims * std::sqrt(static_cast<double>(dims));
        // Cubic lattice in R^n covers at spacing*sqrt(n)/2; solve for spacing.
        const double s = 2.0 * reach / std::sqrt(static_cast<double>(dims));
        (void)spacing;
        const double radius_limit = 1.0 + reach;
        double est = std::pow(2.0 * radius_limit / s + 1.0, dims);
        if (est > 4e7) continue;  // a coarser thinning radius needs fewer cells
        std::vector<std::pair<double, MatrixXcd>> candidates;
        enumerate_lattice(dims, s, radius_limit, [&](const VectorXd& x) {
            MatrixXcd p = project_to_density_set(from_hermitian_coords(x, D));
            candidates.emplace_back((x - hermitian_coords(p)).norm(), p);
        });
        // Keep only lattice points near the set, then thin center-out.
        std::vector<MatrixXcd> near;
        for (auto& [dist, p] : candidates)
            if (dist <= reach + 1e-12) near.push_back(std::move(p));
        std::stable_sort(near.begin(), near.end(), [](const MatrixXcd& a, const MatrixXcd& b) {
            return hermitian_coords(a).norm() < hermitian_coords(b).norm();
        });
        accepted.clear();
        for (const auto& p : near) {
            bool covered = false;
            for (const auto& q : accepted)
                if (density_distance(p, q) <= thin) {
                    covered = true;
                    break;
                }
            if (!covered) accepted.push_back(p);
        }
        if (static_cast<double>(accepted.size()) <= bound &&
            static_cast<std::int64_t>(accepted.size()) <= budget.max_points) {
            done = true;
            break;
        }
    }
    if (!done) {
        // The lattice in R^(D^2) is out of reach (large D); fall back to a
        // maximal separated set of random density matrices, which covers the
        // sampled set by construction and is certified the same way.
        std::mt19937_64 rng(0x9e3779b9ULL + 2654435761ULL * static_cast<std::uint64_t>(D));
        int flip = 0;
        accepted = greedy_packing<MatrixXcd>(
            [&] { return random_density_matrix(D, rng, (flip++ % 2) == 1); },
            [](const MatrixXcd& a, const MatrixXcd& b) { return density_distance(a, b); },
            0.8 * target, 2000, budget.max_points, "density net");
        accepted.push_back(MatrixXcd::Zero(D, D));  // the boundary of the subnormalized set
        if (static_cast<double>(accepted.size()) > bound ||
            static_cast<std::int64_t>(accepted.size()) > budget.max_points)
            throw BudgetError("density net: construction exceeds the cardinality bound "
                              "within the point budget");
    }
    DensityNet net = make_density_net(D, epsilon_rho, std::move(accepted));
    if (!net_cache_dir().empty()) {
        char key[128];
        std::snprintf(key, sizeof key, "density_D%d_%a_v1.bin", D, epsilon_rho);
        save_net(net, net_cache_dir() + "/" + key);
    }
    return net;
}

IsometryNet build_gauge_net(int d, Eigen::Index rows, Eigen::Index cols, double epsilon_A,
                            const NetBudget& budget) {
    if (d < 1 || rows < 1 || cols < 1) throw ValidationError("isometry net needs d, D >= 1");
    if (rows > d * cols)
        throw ValidationError("gauge condition is infeasible: rows > d * cols");
    if (!(epsilon_A > 0.0 && epsilon_A <= 2.0))
        throw ValidationError("isometry net radius must lie in (0, 2]");
    IsometryNet net;
    net.d = d;
    net.D = static_cast<int>(std::max(rows, cols));
    net.rows = rows;
    net.cols = cols;
    net.epsilon_A = epsilon_A;
    net.shape = rows == 1 && cols != 1   ? BoundaryShape::FirstSite
                : cols == 1 && rows != 1 ? BoundaryShape::LastSite
                                         : BoundaryShape::Interior;
    char key[160];
    std::snprintf(key, sizeof key, "isometry_d%d_r%d_c%d_%a_v2.bin", d,
                  static_cast<int>(rows), static_cast<int>(cols), epsilon_A);
    if (!net_cache_dir().empty())
        if (auto cached = load_isometry_net(net_cache_dir() + "/" + key)) return *cached;

    auto vector_to_tensor = [&](const VectorXcd& v) {
        // Unit vectors in C^(d*cols) arranged into 1 x cols blocks.
        SiteTensor s;
        for (int i = 0; i < d; ++i) {
            MatrixXcd b(1, cols);
            for (Eigen::Index c = 0; c < cols; ++c) b(0, c) = v(i * cols + c);
            s.blocks.push_back(std::move(b));
        }
        return s;
    };

    if (epsilon_A >= 2.0 - 1e-12) {
        // Block differences have operator norm <= 2; one point covers.
        MatrixXcd w = MatrixXcd::Zero(rows, d * cols);
        w.leftCols(rows).setIdentity();
        SiteTensor s;
        for (int i = 0; i < d; ++i) s.blocks.push_back(w.middleCols(i * cols, cols));
        net.points.push_back(std::move(s));
    } else if (rows == 1) {
        // A single row: the gauge condition says the stacked row is a unit
        // vector, so the state-net machinery applies directly. A Euclidean
        // eps-cover dominates the per-block operator-norm metric.
        const int n = d * static_cast<int>(cols);
        if (n == 1) {
            VectorXcd v = VectorXcd::Zero(n);
            v(0) = 1.0;
            net.points.push_back(vector_to_tensor(v));
        } else if (n == 2) {
            for (const auto& v : bloch_band_states(kBuildMargin * epsilon_A, budget))
                net.points.push_back(vector_to_tensor(v));
        } else {
            std::mt19937_64 rng(0xabcdef12ULL + 7919ULL * static_cast<std::uint64_t>(n));
            net.points = greedy_packing<SiteTensor>(
                [&] { return vector_to_tensor(random_pure_state(n, rng)); },
                [](const SiteTensor& a, const SiteTensor& b) {
                    return isometry_frobenius_distance(a, b);
                },
                0.8 * epsilon_A, 2000, budget.max_points, "isometry net");
        }
    } else {
        // Stiefel-type sets: maximal separated set of projected random points
        // in the phase-quotiented Frobenius metric, which dominates the
        // declared operator-norm metric.
        std::mt19937_64 rng(0x1234567ULL + 104729ULL * static_cast<std::uint64_t>(d) +
                            1299709ULL * static_cast<std::uint64_t>(rows) +
                            15485863ULL * static_cast<std::uint64_t>(cols));
        net.points = greedy_packing<SiteTensor>(
            [&] { return random_gauge_tensor(d, rows, cols, rng); },
            [](const SiteTensor& a, const SiteTensor& b) {
                return isometry_frobenius_distance(a, b);
            },
            0.8 * epsilon_A, 2000, budget.max_points, "isometry net");
    }
    double bound = std::pow(3.0 / epsilon_A, 2.0 * d * static_cast<double>(rows) *
                                                 static_cast<double>(cols));
    if (static_cast<double>(net.points.size()) > bound)
        throw BudgetError("isometry net construction exceeded the (3/eps)^(2dD^2) bound");
    if (!net_cache_dir().empty()) save_net(net, net_cache_dir() + "/" + key);
    return net;
}

IsometryNet build_isometry_net(int d, int D, double epsilon_A, BoundaryShape shape,
                               const NetBudget& budget) {
    if (D < 1) throw ValidationError("isometry net needs d, D >= 1");
    Eigen::Index rows = shape == BoundaryShape::FirstSite ? 1 : D;
    Eigen::Index cols = shape == BoundaryShape::LastSite ? 1 : D;
    if (shape == BoundaryShape::LastSite && d < D)
        throw ValidationError("last-site isometries need d >= D");
    IsometryNet net = build_gauge_net(d, rows, cols, epsilon_A, budget);
    net.D = D;
    net.shape = shape;
    return net;
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

namespace {

template <typename Net, typename Point, typename Metric>
NearestResult nearest_scan(const Net& net, const Point& p, Metric dist) {
    if (net.points.empty()) throw EmptyNetError("nearest query on an empty net");
    NearestResult best{0, dist(net.points[0], p)};
    for (size_t i = 1; i < net.points.size(); ++i) {
        double v = dist(net.points[i], p);
        if (v < best.distance) best = {i, v};
    }
    return best;
}

template <typename Net, typename Point, typename Metric>
std::vector<std::size_t> within_scan(const Net& net, const Point& p, double radius,
                                     Metric dist) {
    std::vector<std::pair<double, std::size_t>> hits;
    for (size_t i = 0; i < net.points.size(); ++i) {
        double v = dist(net.points[i], p);
        if (v <= radius) hits.emplace_back(v, i);
    }
    std::sort(hits.begin(), hits.end());
    std::vector<std::size_t> out;
    out.reserve(hits.size());
    for (auto& [v, i] : hits) out.push_back(i);
    return out;
}

}  // namespace

NearestResult nearest(const StateNet& net, const VectorXcd& point) {
    return nearest_scan(net, point, state_distance);
}

NearestResult nearest(const DensityNet& net, const MatrixXcd& point) {
    if (net.points.empty()) throw EmptyNetError("nearest query on an empty net");
    // Frobenius distance lower-bounds the trace distance; use it to prune.
    VectorXd q = hermitian_coords(point);
    VectorXd frob2 = (net.coords.rowwise() - q.transpose()).rowwise().squaredNorm();
    NearestResult best{0, std::numeric_limits<double>::infinity()};
    for (Eigen::Index i = 0; i < frob2.size(); ++i) {
        if (frob2(i) >= best.distance * best.distance) continue;
        double v = density_distance(net.points[static_cast<size_t>(i)], point);
        if (v < best.distance) best = {static_cast<size_t>(i), v};
    }
    return best;
}

NearestResult nearest(const IsometryNet& net, const SiteTensor& point) {
    return nearest_scan(net, point, isometry_distance);
}

std::vector<std::size_t> within(const StateNet& net, const VectorXcd& point, double radius) {
    return within_scan(net, point, radius, state_distance);
}

std::vector<std::size_t> within(const DensityNet& net, const MatrixXcd& point, double radius) {
    VectorXd q = hermitian_coords(point);
    VectorXd frob2 = (net.coords.rowwise() - q.transpose()).rowwise().squaredNorm();
    std::vector<std::pair<double, std::size_t>> hits;
    const double r2 = radius * radius;
    for (Eigen::Index i = 0; i < frob2.size(); ++i) {
        if (frob2(i) > r2 + 1e-12) continue;
        double v = density_distance(net.points[static_cast<size_t>(i)], point);
        if (v <= radius) hits.emplace_back(v, static_cast<size_t>(i));
    }
    std::sort(hits.begin(), hits.end());
    std::vector<std::size_t> out;
    out.reserve(hits.size());
    for (auto& [v, i] : hits) out.push_back(i);
    return out;
}

std::vector<std::size_t> within(const IsometryNet& net, const SiteTensor& point,
                                double radius) {
    return within_scan(net, point, radius, isometry_distance);
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

CoverReport certify(const StateNet& net, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CoverReport rep;
    rep.samples = samples;
    for (int s = 0; s < samples; ++s) {
        VectorXcd psi = random_pure_state(net.d, rng);
        double dist = nearest(net, psi).distance;
        rep.max_distance = std::max(rep.max_distance, dist);
        if (dist > net.epsilon) ++rep.misses;
    }
    rep.pass = rep.misses == 0;
    return rep;
}

CoverReport certify(const DensityNet& net, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CoverReport rep;
    rep.samples = samples;
    for (int s = 0; s < samples; ++s) {
        MatrixXcd rho = random_density_matrix(net.D, rng, s % 2 == 1);
        double dist = nearest(net, rho).distance;
        rep.max_distance = std::max(rep.max_distance, dist);
        if (dist > net.epsilon_rho) ++rep.misses;
    }
    rep.pass = rep.misses == 0;
    return rep;
}

CoverReport certify(const IsometryNet& net, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CoverReport rep;
    rep.samples = samples;
    for (int s = 0; s < samples; ++s) {
        SiteTensor a = random_gauge_tensor(net.d, net.D, net.shape, rng);
        // The quotiented Frobenius distance dominates the declared metric, so
        // a Frobenius hit certifies the sample; otherwise refine the closest
        // few candidates with the exact metric.
        double best_frob = std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, size_t>> order;
        order.reserve(net.points.size());
        for (size_t i = 0; i < net.points.size(); ++i) {
            double v = isometry_frobenius_distance(a, net.points[i]);
            best_frob = std::min(best_frob, v);
            order.emplace_back(v, i);
        }
        double dist = best_frob;
        if (best_frob > net.epsilon_A) {
            std::partial_sort(order.begin(), order.begin() + std::min<size_t>(16, order.size()),
                              order.end());
            for (size_t k = 0; k < std::min<size_t>(16, order.size()); ++k)
                dist = std::min(dist, isometry_distance(a, net.points[order[k].second]));
        }
        rep.max_distance = std::max(rep.max_distance, dist);
        if (dist > net.epsilon_A) ++rep.misses;
    }
    rep.pass = rep.misses == 0;
    return rep;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kMagic = 0x53434e31;  // "SCN1"

void write_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
bool read_u32(std::istream& is, std::uint32_t& v) {
    return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), 4));
}
bool read_f64(std::istream& is, double& v) {
    return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), 8));
}

void write_matrix(std::ostream& os, const MatrixXcd& m) {
    write_u32(os, static_cast<std::uint32_t>(m.rows()));
    write_u32(os, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            write_f64(os, m(i, j).real());
            write_f64(os, m(i, j).imag());
        }
}

bool read_matrix(std::istream& is, MatrixXcd& m) {
    std::uint32_t r = 0, c = 0;
    if (!read_u32(is, r) || !read_u32(is, c)) return false;
    m.resize(r, c);
    for (std::uint32_t i = 0; i < r; ++i)
        for (std::uint32_t j = 0; j < c; ++j) {
            double re = 0, im = 0;
            if (!read_f64(is, re) || !read_f64(is, im)) return false;
            m(i, j) = Complex(re, im);
        }
    return true;
}

}  // namespace

std::string net_cache_dir() {
    const char* dir = std::getenv("SPINCHAIN_CACHE_DIR");
    return dir ? std::string(dir) : std::string();
}

bool save_net(const StateNet& net, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) return false;
    write_u32(os, kMagic);
    write_u32(os, 1);  // kind: state
    write_u32(os, static_cast<std::uint32_t>(net.d));
    write_f64(os, net.epsilon);
    write_u32(os, static_cast<std::uint32_t>(net.points.size()));
    for (const auto& p : net.points) write_matrix(os, p);
    return static_cast<bool>(os);
}

std::optional<StateNet> load_state_net(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    std::uint32_t magic = 0, kind = 0, d = 0, count = 0;
    double eps = 0;
    if (!read_u32(is, magic) || magic != kMagic || !read_u32(is, kind) || kind != 1 ||
        !read_u32(is, d) || !read_f64(is, eps) || !read_u32(is, count))
        return std::nullopt;
    StateNet net;
    net.d = static_cast<int>(d);
    net.epsilon = eps;
    for (std::uint32_t i = 0; i < count; ++i) {
        MatrixXcd m;
        if (!read_matrix(is, m)) return std::nullopt;
        net.points.push_back(VectorXcd(m.reshaped()));
    }
    return net;
}

bool save_net(const DensityNet& net, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) return false;
    write_u32(os, kMagic);
    write_u32(os, 2);  // kind: density
    write_u32(os, static_cast<std::uint32_t>(net.D));
    write_f64(os, net.epsilon_rho);
    write_u32(os, static_cast<std::uint32_t>(net.points.size()));
    for (const auto& p : net.points) write_matrix(os, p);
    return static_cast<bool>(os);
}

std::optional<DensityNet> load_density_net(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    std::uint32_t magic = 0, kind = 0, D = 0, count = 0;
    double eps = 0;
    if (!read_u32(is, magic) || magic != kMagic || !read_u32(is, kind) || kind != 2 ||
        !read_u32(is, D) || !read_f64(is, eps) || !read_u32(is, count))
        return std::nullopt;
    std::vector<MatrixXcd> pts;
    for (std::uint32_t i = 0; i < count; ++i) {
        MatrixXcd m;
        if (!read_matrix(is, m)) return std::nullopt;
        pts.push_back(std::move(m));
    }
    return make_density_net(static_cast<int>(D), eps, std::move(pts));
}

bool save_net(const IsometryNet& net, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) return false;
    write_u32(os, kMagic);
    write_u32(os, 3);  // kind: isometry
    write_u32(os, static_cast<std::uint32_t>(net.d));
    write_u32(os, static_cast<std::uint32_t>(net.D));
    write_u32(os, static_cast<std::uint32_t>(net.rows));
    write_u32(os, static_cast<std::uint32_t>(net.cols));
    write_u32(os, static_cast<std::uint32_t>(net.shape));
    write_f64(os, net.epsilon_A);
    write_u32(os, static_cast<std::uint32_t>(net.points.size()));
    for (const auto& p : net.points)
        for (const auto& b : p.blocks) write_matrix(os, b);
    return static_cast<bool>(os);
}

std::optional<IsometryNet> load_isometry_net(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    std::uint32_t magic = 0, kind = 0, d = 0, D = 0, rows = 0, cols = 0, shape = 0, count = 0;
    double eps = 0;
    if (!read_u32(is, magic) || magic != kMagic || !read_u32(is, kind) || kind != 3 ||
        !read_u32(is, d) || !read_u32(is, D) || !read_u32(is, rows) || !read_u32(is, cols) ||
        !read_u32(is, shape) || !read_f64(is, eps) || !read_u32(is, count))
        return std::nullopt;
    IsometryNet net;
    net.d = static_cast<int>(d);
    net.D = static_cast<int>(D);
    net.rows = static_cast<Eigen::Index>(rows);
    net.cols = static_cast<Eigen::Index>(cols);
    net.shape = static_cast<BoundaryShape>(shape);
    net.epsilon_A = eps;
    for (std::uint32_t i = 0; i < count; ++i) {
        SiteTensor s;
        for (int b = 0; b < net.d; ++b) {
            MatrixXcd m;
            if (!read_matrix(is, m)) return std::nullopt;
            s.blocks.push_back(std::move(m));
        }
        net.points.push_back(std::move(s));
    }
    return net;
}

}  // namespace spinchain
