#pragma once

#include <Eigen/Dense>
#include <vector>

namespace reglab {

/// Chebyshev-Gauss-Lobatto nodes x_j = cos(j pi / N), j = 0..N.
Eigen::VectorXd cheb_nodes(int N);

/// First-derivative collocation matrix on the N+1 Lobatto nodes.
Eigen::MatrixXd cheb_diff(int N);

/// Derivative matrices of order 0..max_order acting on the N-1 interior nodal values of
/// a function with u = u' = ... = u^(m-1) = 0 at x = +-1. The interpolant is
/// u = (1 - x^2)^(m-1) p with p(+-1) = 0, so the matrices stay well conditioned.
std::vector<Eigen::MatrixXd> cheb_clamped_derivatives(int N, int m, int max_order);

}  // namespace reglab
