#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <numeric>
#include <type_traits>
#include <vector>

#include "reglab/errors.hpp"

namespace reglab {

/// Full spectrum of a dense square matrix, ordered by descending real part
/// (ties broken by descending imaginary part).
struct EigenDecomposition {
    Eigen::VectorXcd values;
    /// Unit-norm eigenvectors as columns; empty when not requested.
    Eigen::MatrixXcd vectors;
    /// ||M v - lambda v|| / ||v|| per eigenpair; empty when vectors were not requested.
    Eigen::VectorXd residuals;
    /// Groups of indices whose eigenvalues coincide to the cluster tolerance.
    std::vector<std::vector<int>> clusters;
};

/// Dense nonsymmetric eigensolver. Real input goes through Eigen's real Schur path,
/// complex input through the complex Schur path.
template <class Derived>
EigenDecomposition dense_eigenvalues(const Eigen::MatrixBase<Derived>& M, bool with_vectors = true,
                                     double cluster_tol = 1e-8) {
    using Scalar = typename Derived::Scalar;
    if (M.rows() != M.cols() || M.rows() < 1) throw DomainError("dense_eigenvalues: matrix must be square, n >= 1");
    if (!M.allFinite()) throw DomainError("dense_eigenvalues: non-finite entries");
    const Eigen::Index n = M.rows();
    Eigen::VectorXcd vals;
    Eigen::MatrixXcd vecs;
    if constexpr (std::is_same_v<Scalar, std::complex<double>>) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M.derived(), with_vectors);
        if (es.info() != Eigen::Success) throw EigenError("complex Schur iteration did not converge", n);
        vals = es.eigenvalues();
        if (with_vectors) vecs = es.eigenvectors();
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(M.derived().template cast<double>(), with_vectors);
        if (es.info() != Eigen::Success) throw EigenError("real Schur iteration did not converge", n);
        vals = es.eigenvalues();
        if (with_vectors) vecs = es.eigenvectors();
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (vals[a].real() != vals[b].real()) return vals[a].real() > vals[b].real();
        return vals[a].imag() > vals[b].imag();
    });
    EigenDecomposition out;
    out.values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out.values[i] = vals[order[i]];
    if (with_vectors) {
        out.vectors.resize(n, n);
        out.residuals.resize(n);
        const Eigen::MatrixXcd Mc = M.derived().template cast<std::complex<double>>();
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXcd v = vecs.col(order[i]);
            v.normalize();
            out.vectors.col(i) = v;
            out.residuals[i] = (Mc * v - out.values[i] * v).norm();
        }
    }
    // clusters: consecutive runs in the sorted order that coincide to tolerance
    std::vector<bool> used(n, false);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (used[i]) continue;
        std::vector<int> group{static_cast<int>(i)};
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (!used[j] && std::abs(out.values[j] - out.values[i]) <=
                                cluster_tol * std::max(1.0, std::abs(out.values[i]))) {
                group.push_back(static_cast<int>(j));
                used[j] = true;
            }
        }
        if (group.size() > 1) out.clusters.push_back(group);
    }
    return out;
}

}  // namespace reglab
