#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spinchain/meanfield.hpp"
#include "spinchain/oracles.hpp"
#include "support.hpp"

using namespace spinchain;

namespace {

ProductState basis_product(int d, const std::vector<int>& cfg) {
    ProductState s;
    for (int i : cfg) s.vectors.push_back(VectorXcd::Unit(d, i));
    return s;
}

}  // namespace

TEST_CASE("evaluate_product_energy on basis states of the Ising chain") {
    ChainHamiltonian h = make_preset("ising_zz", 3);
    CHECK(evaluate_product_energy(h, basis_product(2, {0, 1, 0})) == doctest::Approx(-2.0));

    ChainHamiltonian zero;
    zero.d = 2;
    zero.N = 3;
    CHECK(evaluate_product_energy(zero, basis_product(2, {1, 1, 0})) == doctest::Approx(0.0));
}

TEST_CASE("evaluate_product_energy validation") {
    ChainHamiltonian h = make_preset("ising_zz", 3);
    ProductState bad = basis_product(2, {0, 1});
    CHECK_THROWS_AS(evaluate_product_energy(h, bad), DimensionError);
    ProductState unnorm = basis_product(2, {0, 1, 0});
    unnorm.vectors[1] *= 2.0;
    CHECK_THROWS_AS(evaluate_product_energy(h, unnorm), NormError);
}

TEST_CASE("evaluate_product_energy matches the dense statevector expectation") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int s = 0; s < 10; ++s) {
        Boundary b = s % 2 ? Boundary::Open : Boundary::Periodic;
        ChainHamiltonian h = testsupport::random_chain(2, 5, b, 4000 + s);
        ProductState ps;
        VectorXcd full = VectorXcd::Ones(1);
        for (int k = 0; k < 5; ++k) {
            VectorXcd v(2);
            v << Complex(g(rng), g(rng)), Complex(g(rng), g(rng));
            v.normalize();
            ps.vectors.push_back(v);
            full = kron(full, v);
        }
        double direct = (full.adjoint() * dense_hamiltonian(h) * full)(0, 0).real();
        CHECK(evaluate_product_energy(h, ps) == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("solve_mean_field on the Ising chain meets the delta guarantee") {
    ChainHamiltonian h = make_preset("ising_zz", 3);
    MeanFieldSolution sol = solve_mean_field(h, 0.2);
    CHECK(sol.energy <= -2.0 + 0.2);
    CHECK(sol.energy >= -2.0 - 1e-9);  // basis product state is the true optimum
    CHECK(evaluate_product_energy(h, sol.state) == doctest::Approx(sol.energy).epsilon(1e-10));
}

TEST_CASE("solve_mean_field on the zero Hamiltonian returns 0") {
    ChainHamiltonian zero;
    zero.d = 2;
    zero.N = 4;
    CHECK(solve_mean_field(zero, 1.0).energy == doctest::Approx(0.0));
}

TEST_CASE("solve_mean_field is within delta of the coordinate-descent oracle") {
    ChainHamiltonian h = make_preset("tfim:g=2", 4);
    testsupport::MeanFieldOracle oracle = testsupport::mean_field_oracle(h);
    REQUIRE(oracle.refinement_gap < 0.03);  // oracle resolution certified
    MeanFieldSolution sol = solve_mean_field(h, 0.3);
    CHECK(sol.energy <= oracle.energy + 0.3);
    CHECK(sol.energy >= exact_diagonalize(h).ground_energy - 1e-9);
}

TEST_CASE("variational bound against dense diagonalization on random chains") {
    for (int s = 0; s < 8; ++s) {
        ChainHamiltonian h = testsupport::random_chain(2, 3 + s % 4, Boundary::Open, 5000 + s);
        MeanFieldSolution sol = solve_mean_field(h, 0.5);
        CHECK(sol.energy >= exact_diagonalize(h).ground_energy - 1e-9);
    }
}

TEST_CASE("a superset net never increases the DP optimum") {
    ChainHamiltonian h = testsupport::random_chain(2, 5, Boundary::Open, 6100);
    StateNet net = build_state_net(2, 0.6);
    double base = solve_mean_field_on_net(h, net).energy;
    StateNet bigger = net;
    std::mt19937_64 rng(17);
    for (int s = 0; s < 50; ++s) bigger.points.push_back(random_pure_state(2, rng));
    double refined = solve_mean_field_on_net(h, bigger).energy;
    CHECK(refined <= base + 1e-12);
}

TEST_CASE("PBC DP equals brute force over net index tuples") {
    ChainHamiltonian h = testsupport::random_chain(2, 3, Boundary::Periodic, 6200);
    StateNet net = build_state_net(2, 1.3);
    REQUIRE(net.points.size() <= 40);
    MeanFieldSolution sol = solve_mean_field_on_net(h, net);

    double best = 1e300;
    const std::size_t A = net.points.size();
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t b = 0; b < A; ++b)
            for (std::size_t c = 0; c < A; ++c) {
                ProductState s;
                s.vectors = {net.points[a], net.points[b], net.points[c]};
                best = std::min(best, evaluate_product_energy(h, s));
            }
    CHECK(sol.energy == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("table stats and epsilon metadata are reported") {
    ChainHamiltonian h = make_preset("tfim:g=1", 4);
    MeanFieldSolution sol = solve_mean_field(h, 0.8);
    CHECK(sol.net_epsilon == doctest::Approx(0.1));  // 0.8 / (2 * 4)
    CHECK(sol.table_stats.size() == 4);
    CHECK(sol.indices.size() == 4);
}
