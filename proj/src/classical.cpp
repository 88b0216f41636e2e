#include "spinchain/classical.hpp"

#include <limits>

namespace spinchain {

double evaluate_classical(const ClassicalChain& c, const std::vector<int>& configuration) {
    c.validate();
    if (static_cast<int>(configuration.size()) != c.N)
        throw LengthError("configuration length must equal N");
    for (int v : configuration)
        if (v < 0 || v >= c.d) throw RangeError("configuration entry out of range");
    long double e = 0.0L;
    for (int k = 1; k <= c.N - 1; ++k)
        e += c.tables[static_cast<size_t>(k - 1)](configuration[static_cast<size_t>(k - 1)],
                                                  configuration[static_cast<size_t>(k)]);
    if (c.boundary == Boundary::Periodic)
        e += c.tables[static_cast<size_t>(c.N - 1)](configuration[static_cast<size_t>(c.N - 1)],
                                                    configuration[0]);
    return static_cast<double>(e);
}

namespace {

// Suffix value tables: G[k](i_k) = best energy of all bonds from k rightward,
// optionally with the wrap bond to a fixed first spin. Greedy reconstruction
// against these tables yields the lexicographically smallest optimum.
ClassicalSolution solve_fixed_first(const ClassicalChain& c, int first_spin) {
    const int N = c.N, d = c.d;
    const bool pbc = c.boundary == Boundary::Periodic;
    std::vector<std::vector<long double>> G(static_cast<size_t>(N) + 1,
                                            std::vector<long double>(static_cast<size_t>(d), 0.0L));
    if (pbc) {
        const MatrixXd& wrap = c.tables[static_cast<size_t>(N - 1)];
        for (int i = 0; i < d; ++i) G[static_cast<size_t>(N)][static_cast<size_t>(i)] =
            wrap(i, first_spin);
    }
    for (int k = N - 1; k >= 1; --k) {
        const MatrixXd& t = c.tables[static_cast<size_t>(k - 1)];
        for (int i = 0; i < d; ++i) {
            long double best = std::numeric_limits<long double>::infinity();
            for (int j = 0; j < d; ++j) {
                long double v = t(i, j) + G[static_cast<size_t>(k + 1)][static_cast<size_t>(j)];
                if (v < best) best = v;
            }
            G[static_cast<size_t>(k)][static_cast<size_t>(i)] = best;
        }
    }

    ClassicalSolution sol;
    sol.configuration.resize(static_cast<size_t>(N));
    int i0 = first_spin;
    if (!pbc) {
        long double best = std::numeric_limits<long double>::infinity();
        for (int i = 0; i < d; ++i)
            if (G[1][static_cast<size_t>(i)] < best) {
                best = G[1][static_cast<size_t>(i)];
                i0 = i;
            }
    }
    sol.configuration[0] = i0;
    long double total = G[1][static_cast<size_t>(i0)];
    for (int k = 1; k <= N - 1; ++k) {
        const MatrixXd& t = c.tables[static_cast<size_t>(k - 1)];
        int prev = sol.configuration[static_cast<size_t>(k - 1)];
        long double best = std::numeric_limits<long double>::infinity();
        int arg = 0;
        for (int j = 0; j < d; ++j) {
            long double v = t(prev, j) + G[static_cast<size_t>(k + 1)][static_cast<size_t>(j)];
            if (v < best) {
                best = v;
                arg = j;
            }
        }
        sol.configuration[static_cast<size_t>(k)] = arg;
    }
    sol.energy = static_cast<double>(total);
    return sol;
}

}  // namespace

ClassicalSolution solve_classical(const ClassicalChain& c) {
    c.validate();
    if (c.boundary == Boundary::Open) return solve_fixed_first(c, 0);
    ClassicalSolution best;
    bool have = false;
    for (int i1 = 0; i1 < c.d; ++i1) {
        ClassicalSolution s = solve_fixed_first(c, i1);
        if (!have || s.energy < best.energy) {
            best = std::move(s);
            have = true;
        }
    }
    return best;
}

}  // namespace spinchain
