#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spinchain/mps.hpp"

namespace spinchain {

struct NetBudget {
    std::int64_t max_points = 10'000'000;
};

/// Finite covering of the pure states of C^d; metric is the trace norm
/// between the corresponding projectors. Points are phase-fixed unit vectors.
struct StateNet {
    int d = 2;
    double epsilon = 1.0;
    std::vector<VectorXcd> points;
};

/// Finite covering of {rho : rho >= 0, tr rho <= 1} in trace norm.
struct DensityNet {
    int D = 1;
    double epsilon_rho = 1.0;
    std::vector<MatrixXcd> points;
    MatrixXd coords;  // rows = points in an orthonormal Hermitian basis
};

enum class BoundaryShape { Interior, FirstSite, LastSite };

/// Finite covering of the gauge-satisfying site tensors (sum_i A_i A_i^dag = 1).
/// Metric: max_i ||A_i - e^{i phi} B_i||_inf minimized over the global phase.
/// Blocks are rows x cols; the named shapes are (D,D), (1,D) and (D,1).
struct IsometryNet {
    int d = 2;
    int D = 1;
    Eigen::Index rows = 1;
    Eigen::Index cols = 1;
    double epsilon_A = 1.0;
    BoundaryShape shape = BoundaryShape::Interior;
    std::vector<SiteTensor> points;
};

// --- metrics ---------------------------------------------------------------

double state_distance(const VectorXcd& a, const VectorXcd& b);
double density_distance(const MatrixXcd& a, const MatrixXcd& b);
double isometry_distance(const SiteTensor& a, const SiteTensor& b);
/// Phase-quotiented Frobenius distance; upper bound on isometry_distance.
double isometry_frobenius_distance(const SiteTensor& a, const SiteTensor& b);

// --- construction ----------------------------------------------------------

StateNet build_state_net(int d, double epsilon, const NetBudget& budget = {});
DensityNet build_density_net(int D, double epsilon_rho, const NetBudget& budget = {});
IsometryNet build_isometry_net(int d, int D, double epsilon_A, BoundaryShape shape,
                               const NetBudget& budget = {});
/// General block shape (rows <= d * cols required by the gauge condition).
IsometryNet build_gauge_net(int d, Eigen::Index rows, Eigen::Index cols, double epsilon_A,
                            const NetBudget& budget = {});

/// Wrap explicit density points (used by tests and the D = 1 scalar case).
DensityNet make_density_net(int D, double epsilon_rho, std::vector<MatrixXcd> points);

// --- queries ---------------------------------------------------------------

struct NearestResult {
    std::size_t index = 0;
    double distance = 0.0;
};

NearestResult nearest(const StateNet& net, const VectorXcd& point);
NearestResult nearest(const DensityNet& net, const MatrixXcd& point);
NearestResult nearest(const IsometryNet& net, const SiteTensor& point);

std::vector<std::size_t> within(const StateNet& net, const VectorXcd& point, double radius);
std::vector<std::size_t> within(const DensityNet& net, const MatrixXcd& point, double radius);
std::vector<std::size_t> within(const IsometryNet& net, const SiteTensor& point, double radius);

// --- certification ---------------------------------------------------------

struct CoverReport {
    int samples = 0;
    int misses = 0;
    double max_distance = 0.0;
    bool pass = false;
};

CoverReport certify(const StateNet& net, int samples, std::uint64_t seed);
CoverReport certify(const DensityNet& net, int samples, std::uint64_t seed);
CoverReport certify(const IsometryNet& net, int samples, std::uint64_t seed);

// --- cardinality bounds ----------------------------------------------------

double state_net_bound(int d, double epsilon);          // (5/eps)^(2d)
double density_net_bound(int D, double epsilon);        // (3/eps)^(D^2)
double isometry_net_bound(int d, int D, double epsilon);  // (3/eps)^(2dD^2)

// --- random samples of the target sets (shared by certification and tests) --

VectorXcd random_pure_state(int d, std::mt19937_64& rng);
MatrixXcd random_density_matrix(int D, std::mt19937_64& rng, bool subnormalized);
SiteTensor random_gauge_tensor(int d, int D, BoundaryShape shape, std::mt19937_64& rng);
SiteTensor random_gauge_tensor(int d, Eigen::Index rows, Eigen::Index cols,
                               std::mt19937_64& rng);

// --- Hermitian basis helpers ------------------------------------------------

const std::vector<MatrixXcd>& hermitian_basis(int D);
VectorXd hermitian_coords(const MatrixXcd& m);
MatrixXcd from_hermitian_coords(const VectorXd& x, int D);

// --- cache ------------------------------------------------------------------

/// Cache directory from SPINCHAIN_CACHE_DIR; empty when caching is disabled.
std::string net_cache_dir();
bool save_net(const DensityNet& net, const std::string& path);
std::optional<DensityNet> load_density_net(const std::string& path);
bool save_net(const IsometryNet& net, const std::string& path);
std::optional<IsometryNet> load_isometry_net(const std::string& path);
bool save_net(const StateNet& net, const std::string& path);
std::optional<StateNet> load_state_net(const std::string& path);

}  // namespace spinchain
