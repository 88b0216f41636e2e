#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>

#include "spinchain/nets.hpp"
#include "support.hpp"

using namespace spinchain;

TEST_CASE("state net degenerate cases") {
    StateNet one = build_state_net(1, 0.7);
    CHECK(one.points.size() == 1);

    StateNet diam = build_state_net(2, 2.0);
    CHECK(diam.points.size() == 1);
}

TEST_CASE("state net d=2 covers at eps=0.5 and respects the cardinality bound") {
    StateNet net = build_state_net(2, 0.5);
    CHECK(static_cast<double>(net.points.size()) <= state_net_bound(2, 0.5));
    for (const auto& p : net.points) CHECK(std::abs(p.norm() - 1.0) < 1e-12);
    CoverReport r = certify(net, 10000, 42);
    CHECK(r.misses == 0);
    CHECK(r.max_distance <= 0.5);
    CHECK(r.pass);
}

TEST_CASE("density net D=1 covers the interval [0,1]") {
    DensityNet net = build_density_net(1, 0.4);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < 200; ++s) {
        MatrixXcd q(1, 1);
        q(0, 0) = u(rng);
        CHECK(nearest(net, q).distance <= 0.4 + 1e-12);
    }
}

TEST_CASE("density net D=2 cardinality and covering") {
    DensityNet coarse = build_density_net(2, 1.0);
    CHECK(static_cast<double>(coarse.points.size()) <= 81.0);  // (3/1)^4

    DensityNet net = build_density_net(2, 0.5);
    CHECK(static_cast<double>(net.points.size()) <= density_net_bound(2, 0.5));
    for (const auto& p : net.points) {
        CHECK(is_hermitian(p, 1e-10));
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(p, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
        CHECK(p.trace().real() <= 1.0 + 1e-10);
    }
    CoverReport r = certify(net, 10000, 42);
    CHECK(r.misses == 0);
    CHECK(r.pass);
}

TEST_CASE("isometry nets are gauge-exact and cover") {
    IsometryNet net = build_isometry_net(2, 1, 0.4, BoundaryShape::FirstSite);
    CHECK(static_cast<double>(net.points.size()) <= isometry_net_bound(2, 1, 0.4));
    for (const auto& p : net.points) CHECK(p.gauge_defect() <= 1e-9);
    CoverReport r = certify(net, 10000, 42);
    CHECK(r.misses == 0);
    CHECK(r.pass);
}

TEST_CASE("d=1 D=1 gauge net is the single phase representative") {
    IsometryNet net = build_gauge_net(1, 1, 1, 0.5);
    REQUIRE(net.points.size() == 1);
    CHECK(std::abs(net.points[0].blocks[0](0, 0) - Complex(1, 0)) < 1e-12);
}

TEST_CASE("first-site D=1 net agrees with the state net metric-for-metric") {
    // Both cover unit vectors in C^2; cross-check coverage on shared samples.
    IsometryNet inet = build_gauge_net(2, 1, 1, 0.4);
    StateNet snet = build_state_net(2, 0.4);
    std::mt19937_64 rng(8);
    for (int s = 0; s < 200; ++s) {
        VectorXcd v = random_pure_state(2, rng);
        SiteTensor t;
        t.blocks = {v.row(0), v.row(1)};
        CHECK(nearest(inet, t).distance <= 0.4 + 1e-9);
        CHECK(nearest(snet, v).distance <= 0.4 + 1e-9);
    }
}

TEST_CASE("nearest returns distance zero on net points, ties by lowest index") {
    DensityNet grid = make_density_net(
        1, 0.5,
        {MatrixXcd::Zero(1, 1), 0.5 * MatrixXcd::Identity(1, 1), MatrixXcd::Identity(1, 1)});
    MatrixXcd q(1, 1);
    q(0, 0) = 0.6;
    NearestResult r = nearest(grid, q);
    CHECK(r.index == 1);
    CHECK(r.distance == doctest::Approx(0.1));
    CHECK(nearest(grid, grid.points[2]).index == 2);
    CHECK(nearest(grid, grid.points[2]).distance == doctest::Approx(0.0));
    // Equidistant query between points 0 and 1 resolves to the lower index.
    q(0, 0) = 0.25;
    CHECK(nearest(grid, q).index == 0);
}

TEST_CASE("within: radius 0, full diameter, and ordering") {
    StateNet net = build_state_net(2, 0.8);
    CHECK(within(net, net.points[3], 0.0) == std::vector<std::size_t>{3});
    CHECK(within(net, net.points[0], 2.0).size() == net.points.size());

    std::mt19937_64 rng(12);
    VectorXcd q = random_pure_state(2, rng);
    auto hits = within(net, q, 0.9);
    double prev = -1.0;
    for (std::size_t idx : hits) {
        double dist = state_distance(net.points[idx], q);
        CHECK(dist <= 0.9 + 1e-12);
        CHECK(dist >= prev - 1e-12);
        prev = dist;
    }
}

TEST_CASE("nearest and within agree with a linear scan") {
    StateNet snet = build_state_net(2, 0.6);
    DensityNet dnet = build_density_net(2, 0.8);
    IsometryNet inet = build_isometry_net(2, 2, 1.5, BoundaryShape::Interior);
    std::mt19937_64 rng(21);
    for (int s = 0; s < 50; ++s) {
        VectorXcd v = random_pure_state(2, rng);
        std::size_t best = 0;
        double bd = 1e300;
        for (std::size_t i = 0; i < snet.points.size(); ++i) {
            double dist = state_distance(snet.points[i], v);
            if (dist < bd) {
                bd = dist;
                best = i;
            }
        }
        NearestResult r = nearest(snet, v);
        CHECK(r.index == best);
        CHECK(r.distance == doctest::Approx(bd).epsilon(1e-12));
        auto hits = within(snet, v, r.distance);
        CHECK(std::find(hits.begin(), hits.end(), r.index) != hits.end());

        MatrixXcd rho = random_density_matrix(2, rng, s % 2 == 0);
        bd = 1e300;
        for (std::size_t i = 0; i < dnet.points.size(); ++i) {
            double dist = density_distance(dnet.points[i], rho);
            if (dist < bd) {
                bd = dist;
                best = i;
            }
        }
        NearestResult rd = nearest(dnet, rho);
        CHECK(rd.index == best);
        CHECK(rd.distance == doctest::Approx(bd).epsilon(1e-10));
        auto dhits = within(dnet, rho, rd.distance + 1e-12);
        CHECK(std::find(dhits.begin(), dhits.end(), rd.index) != dhits.end());

        SiteTensor a = random_gauge_tensor(2, 2, BoundaryShape::Interior, rng);
        bd = 1e300;
        for (std::size_t i = 0; i < inet.points.size(); ++i) {
            double dist = isometry_distance(inet.points[i], a);
            if (dist < bd) {
                bd = dist;
                best = i;
            }
        }
        NearestResult ri = nearest(inet, a);
        CHECK(ri.distance == doctest::Approx(bd).epsilon(1e-9));
    }
}

TEST_CASE("frobenius phase metric upper-bounds the declared isometry metric") {
    std::mt19937_64 rng(31);
    for (int s = 0; s < 100; ++s) {
        SiteTensor a = random_gauge_tensor(2, 2, BoundaryShape::Interior, rng);
        SiteTensor b = random_gauge_tensor(2, 2, BoundaryShape::Interior, rng);
        CHECK(isometry_distance(a, b) <= isometry_frobenius_distance(a, b) + 1e-9);
    }
}

TEST_CASE("hermitian basis is orthonormal and coords round-trip") {
    for (int D : {1, 2, 3}) {
        const auto& basis = hermitian_basis(D);
        REQUIRE(static_cast<int>(basis.size()) == D * D);
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t j = 0; j < basis.size(); ++j) {
                double ip = (basis[i] * basis[j]).trace().real();
                CHECK(ip == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
            }
        std::mt19937_64 rng(40 + D);
        MatrixXcd m = random_density_matrix(D, rng, false);
        MatrixXcd back = from_hermitian_coords(hermitian_coords(m), D);
        CHECK((m - back).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("net serialization round-trips through the cache format") {
    std::string dir = "/tmp/spinchain_net_test";
    std::remove((dir + "/s.bin").c_str());

    StateNet s = build_state_net(2, 0.9);
    REQUIRE(save_net(s, "/tmp/spinchain_s.bin"));
    auto s2 = load_state_net("/tmp/spinchain_s.bin");
    REQUIRE(s2.has_value());
    REQUIRE(s2->points.size() == s.points.size());
    CHECK(s2->epsilon == s.epsilon);
    for (std::size_t i = 0; i < s.points.size(); ++i)
        CHECK((s.points[i] - s2->points[i]).norm() == doctest::Approx(0.0));

    DensityNet d = build_density_net(2, 1.0);
    REQUIRE(save_net(d, "/tmp/spinchain_d.bin"));
    auto d2 = load_density_net("/tmp/spinchain_d.bin");
    REQUIRE(d2.has_value());
    REQUIRE(d2->points.size() == d.points.size());
    for (std::size_t i = 0; i < d.points.size(); ++i)
        CHECK((d.points[i] - d2->points[i]).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    IsometryNet n = build_isometry_net(2, 1, 0.6, BoundaryShape::FirstSite);
    REQUIRE(save_net(n, "/tmp/spinchain_i.bin"));
    auto n2 = load_isometry_net("/tmp/spinchain_i.bin");
    REQUIRE(n2.has_value());
    REQUIRE(n2->points.size() == n.points.size());
    CHECK(n2->rows == n.rows);
    CHECK(n2->cols == n.cols);
}

TEST_CASE("budget ceiling raises BudgetError") {
    NetBudget tiny;
    tiny.max_points = 3;
    CHECK_THROWS_AS(build_state_net(2, 0.3, tiny), BudgetError);
}
