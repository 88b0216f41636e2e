#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace spinchain {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using MatrixXd = Eigen::MatrixXd;
using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;

constexpr double kHermTol = 1e-12;
constexpr double kNormSlack = 1e-9;

inline bool is_hermitian(const MatrixXcd& m, double tol = kHermTol) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// Largest singular value.
inline double operator_norm(const MatrixXcd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    if (m.rows() == m.cols() && is_hermitian(m, 1e-10)) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    return m.jacobiSvd().singularValues()(0);
}

// Sum of singular values; for Hermitian input this is the sum of |eigenvalue|.
inline double trace_norm(const MatrixXcd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    if (m.rows() == m.cols() && is_hermitian(m, 1e-10)) {
        if (m.rows() == 1) return std::abs(m(0, 0).real());
        if (m.rows() == 2) {
            // Closed form for 2x2 Hermitian: eigenvalues t/2 +- sqrt(t^2/4 - det).
            double t = m(0, 0).real() + m(1, 1).real();
            double det = m(0, 0).real() * m(1, 1).real() - std::norm(m(0, 1));
            double disc = std::sqrt(std::max(0.0, 0.25 * t * t - det));
            return std::abs(0.5 * t + disc) + std::abs(0.5 * t - disc);
        }
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().sum();
    }
    return m.jacobiSvd().singularValues().sum();
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Multiply by a unit phase so the first coordinate with magnitude above tol is
// real and nonnegative. Used to pick one representative per physical ray.
template <typename Derived>
void fix_global_phase(Eigen::MatrixBase<Derived>& v, double tol = 1e-9) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        Complex c = v.derived()(i);
        if (std::abs(c) > tol) {
            v.derived() *= std::conj(c) / std::abs(c);
            return;
        }
    }
}

}  // namespace spinchain
