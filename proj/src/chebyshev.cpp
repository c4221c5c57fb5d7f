#include "reglab/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "reglab/errors.hpp"

namespace reglab {

Eigen::VectorXd cheb_nodes(int N) {
    Eigen::VectorXd x(N + 1);
    for (int j = 0; j <= N; ++j) x[j] = std::sin(std::numbers::pi * (N - 2.0 * j) / (2.0 * N));
    return x;
}

Eigen::MatrixXd cheb_diff(int N) {
    if (N < 1) throw DomainError("cheb_diff needs N >= 1");
    const Eigen::VectorXd x = cheb_nodes(N);
    Eigen::VectorXd c = Eigen::VectorXd::Ones(N + 1);
    c[0] = c[N] = 2.0;
    Eigen::MatrixXd D(N + 1, N + 1);
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
            if (i == j) {
                D(i, j) = 0.0;
                continue;
            }
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            D(i, j) = sign * c[i] / (c[j] * (x[i] - x[j]));
        }
    }
    // diagonal by negative row sums
    for (int i = 0; i <= N; ++i) D(i, i) = -D.row(i).sum();
    return D;
}

std::vector<Eigen::MatrixXd> cheb_clamped_derivatives(int N, int m, int max_order) {
    if (m < 1) throw DomainError("clamping order m must be >= 1");
    const int n = N - 1;
    const Eigen::VectorXd x = cheb_nodes(N).segment(1, n);
    const Eigen::MatrixXd D = cheb_diff(N);

    // interior blocks of D^k for the factor p (which vanishes at the ends)
    std::vector<Eigen::MatrixXd> Dp(max_order + 1);
    Eigen::MatrixXd Dk = Eigen::MatrixXd::Identity(N + 1, N + 1);
    for (int k = 0; k <= max_order; ++k) {
        Dp[k] = Dk.block(1, 1, n, n);
        Dk = D * Dk;
    }

    // derivatives of the weight w = (1 - x^2)^(m-1), from its power-basis coefficients
    std::vector<double> w(2 * (m - 1) + 1, 0.0);
    for (int j = 0; j <= m - 1; ++j) {
        double binom = 1.0;
        for (int t = 0; t < j; ++t) binom = binom * (m - 1 - t) / (t + 1);
        w[2 * j] = binom * ((j % 2) ? -1.0 : 1.0);
    }
    auto weight_derivative = [&](int order, double xv) {
        double s = 0.0;
        for (std::size_t p = order; p < w.size(); ++p) {
            double falling = 1.0;
            for (int t = 0; t < order; ++t) falling *= static_cast<double>(p - t);
            s += w[p] * falling * std::pow(xv, static_cast<double>(p - order));
        }
        return s;
    };

    Eigen::VectorXd inv_w(n);
    for (int i = 0; i < n; ++i) inv_w[i] = 1.0 / weight_derivative(0, x[i]);

    std::vector<Eigen::MatrixXd> out(max_order + 1);
    for (int k = 0; k <= max_order; ++k) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
        double binom = 1.0;
        for (int i = 0; i <= k; ++i) {
            Eigen::VectorXd wi(n);
            for (int r = 0; r < n; ++r) wi[r] = weight_derivative(i, x[r]);
            M += binom * wi.asDiagonal() * Dp[k - i];
            binom = binom * (k - i) / (i + 1);
        }
        out[k] = M * inv_w.asDiagonal();
    }
    return out;
}

}  // namespace reglab
