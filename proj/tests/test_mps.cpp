#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spinchain/mps.hpp"
#include "spinchain/nets.hpp"
#include "spinchain/oracles.hpp"
#include "support.hpp"

using namespace spinchain;

TEST_CASE("canonicalize yields the gauge identity at every site") {
    MpsState m = random_mps(2, 2, 4, 17);
    MpsState c = canonicalize(m);
    CHECK(c.gauge_flag);
    for (const auto& site : c.sites) CHECK(site.gauge_defect() <= 1e-10);
    // Same physical ray: statevectors parallel after normalization.
    VectorXcd a = mps_to_statevector(m).normalized();
    VectorXcd b = mps_to_statevector(c).normalized();
    CHECK(std::abs(std::abs(a.dot(b)) - 1.0) < 1e-10);
    CHECK(std::abs(mps_to_statevector(c).norm() - 1.0) < 1e-8);
}

TEST_CASE("canonicalize is idempotent at the level of the gauge invariant") {
    MpsState c = canonicalize(random_mps(2, 3, 5, 23));
    MpsState c2 = canonicalize(c);
    for (const auto& site : c2.sites) CHECK(site.gauge_defect() <= 1e-10);
    VectorXcd a = mps_to_statevector(c).normalized();
    VectorXcd b = mps_to_statevector(c2).normalized();
    CHECK(std::abs(std::abs(a.dot(b)) - 1.0) < 1e-10);
}

TEST_CASE("a D=1 product state is unchanged up to phase") {
    MpsState m = random_mps(2, 1, 4, 31);
    MpsState c = canonicalize(m);
    VectorXcd a = mps_to_statevector(m).normalized();
    VectorXcd b = mps_to_statevector(c);
    CHECK(std::abs(std::abs(a.dot(b)) - 1.0) < 1e-10);
}

TEST_CASE("advance_rho preserves trace under the gauge and matches a loop oracle") {
    std::mt19937_64 rng(7);
    for (int s = 0; s < 20; ++s) {
        SiteTensor a = random_gauge_tensor(2, 2, BoundaryShape::Interior, rng);
        MatrixXcd rho = random_density_matrix(2, rng, false);
        MatrixXcd out = advance_rho(a, rho);
        CHECK(std::abs(out.trace().real() - rho.trace().real()) < 1e-10);
        CHECK(is_hermitian(out, 1e-10));

        MatrixXcd naive = MatrixXcd::Zero(2, 2);
        for (const auto& blk : a.blocks) naive += blk.adjoint() * rho * blk;
        CHECK((out - naive).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("advance_rho from the site-1 scalar gives a PSD trace-1 state") {
    std::mt19937_64 rng(9);
    SiteTensor first = random_gauge_tensor(2, 1, 3, rng);  // 1 x 3 blocks
    MatrixXcd rho1 = MatrixXcd::Identity(1, 1);
    MatrixXcd rho2 = advance_rho(first, rho1);
    CHECK(std::abs(rho2.trace().real() - 1.0) < 1e-10);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho2, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("local_energy basics") {
    std::mt19937_64 rng(11);
    SiteTensor a = random_gauge_tensor(2, 2, BoundaryShape::Interior, rng);
    SiteTensor b = random_gauge_tensor(2, 2, BoundaryShape::Interior, rng);
    MatrixXcd rho = random_density_matrix(2, rng, false);
    CHECK(local_energy(a, b, rho, MatrixXcd::Zero(4, 4)) == doctest::Approx(0.0));

    // D=1 basis product |01>: <01|Z x Z|01> = -1.
    SiteTensor e0, e1;
    e0.blocks = {MatrixXcd::Identity(1, 1), MatrixXcd::Zero(1, 1)};
    e1.blocks = {MatrixXcd::Zero(1, 1), MatrixXcd::Identity(1, 1)};
    MatrixXcd zz = kron(pauli_z(), pauli_z());
    CHECK(local_energy(e0, e1, MatrixXcd::Identity(1, 1), zz) == doctest::Approx(-1.0));
}

TEST_CASE("local_energy_context reproduces local_energy") {
    std::mt19937_64 rng(13);
    for (int s = 0; s < 20; ++s) {
        SiteTensor a = random_gauge_tensor(2, 2, BoundaryShape::Interior, rng);
        SiteTensor b = random_gauge_tensor(2, 2, BoundaryShape::Interior, rng);
        MatrixXcd rho = random_density_matrix(2, rng, false);
        MatrixXcd term = testsupport::random_hermitian(4, rng);
        term /= operator_norm(term);
        double direct = local_energy(a, b, rho, term);
        auto ctx = local_energy_context(a, rho, term);
        CHECK(local_energy_from_context(ctx, b) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("evaluate_mps_energy matches the dense statevector expectation") {
    for (int s = 0; s < 15; ++s) {
        ChainHamiltonian h = testsupport::random_chain(2, 6, Boundary::Open, 7000 + s);
        MpsState m = canonicalize(random_mps(2, 2 + s % 2, 6, 70 + s));
        VectorXcd chi = mps_to_statevector(m);
        double direct = statevector_expectation(h, chi.normalized());
        CHECK(evaluate_mps_energy(h, m) == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("evaluate_mps_energy of the zero Hamiltonian is 0") {
    ChainHamiltonian zero;
    zero.d = 2;
    zero.N = 4;
    MpsState m = canonicalize(random_mps(2, 2, 4, 3));
    CHECK(evaluate_mps_energy(zero, m) == doctest::Approx(0.0));
}

TEST_CASE("evaluate_mps_energy rejects periodic chains") {
    ChainHamiltonian h = make_preset("ising_zz", 4, Boundary::Periodic);
    MpsState m = canonicalize(random_mps(2, 2, 4, 5));
    CHECK_THROWS_AS(evaluate_mps_energy(h, m), BoundaryError);
}

TEST_CASE("the AKLT tensors have exactly zero AKLT energy") {
    ChainHamiltonian h = make_preset("aklt", 6);
    MpsState m = testsupport::aklt_mps(6);
    CHECK(evaluate_mps_energy(h, m) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(exact_diagonalize(h).ground_energy == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("random_mps clamps bond dimensions to the chain geometry") {
    MpsState m = random_mps(2, 8, 4, 77);
    CHECK(m.bond_dim() <= 4);  // d^{N/2} = 4 caps the middle bond
    m.validate();
}
