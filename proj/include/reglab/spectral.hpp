#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "reglab/kernels.hpp"

namespace reglab {

enum class Parity { even, odd, full };
enum class SpectralMethod { shooting, collocation };

/// B* Psi = lambda Psi on (-l, l) with Psi = Psi' = ... = Psi^(m-1) = 0 at both ends, where
/// B* = (-1)^(m+1) D^(2m) - (1/2m) y D.
struct IntervalEigenProblem {
    double l = 1.0;
    /// Parabolic families only.
    EquationFamily family = EquationFamily::biharmonic();
    Parity parity = Parity::even;
    SpectralMethod method = SpectralMethod::shooting;
    /// Collocation degree; 0 picks 96 for l <= 8 and 160 beyond. Also the sample count
    /// of returned eigenfunctions (shooting uses 2n+1 samples).
    int n = 0;
    double tol = 1e-11;
    /// Collocation only: repeat on the doubled grid and flag pairs that move by more than 1e-6.
    bool two_grid = true;
};

struct Eigenpair {
    std::complex<double> lambda;
    Eigen::VectorXd grid;
    /// Real part of the eigenfunction, scaled to unit max norm.
    Eigen::VectorXd psi;
    double residual = 0.0;
    int zero_count = 0;
    /// Residual above tolerance or two-grid disagreement.
    bool flagged = false;
    Parity parity = Parity::full;
};

/// First eigenvalue of D^4 on a clamped interval of half-length l: Lambda0(1) / l^4.
double poincare_lambda(double l);

/// l* = (8 Lambda0(1))^(1/4): every l < l* has negative spectrum by the energy estimate.
double regularity_bound();

/// Leading `count` eigenpairs ordered by descending real part.
std::vector<Eigenpair> interval_spectrum(const IntervalEigenProblem& p, int count);

/// Normalised clamped-end determinant of the parity-adapted shooting system at real lambda
/// (smallest over largest singular value, with the determinant's sign).
double shooting_determinant(double l, int m, Parity parity, double lambda, double tol = 1e-12);

/// Top even eigenvalue by shooting, searching near `guess` with an expanding window.
double top_eigenvalue_near(double l, double guess, double window, int m = 2, double tol = 1e-12);

/// Largest real even eigenvalue by shooting (full downward scan from the energy bound).
double top_eigenvalue(double l, int m = 2, double tol = 1e-12);

struct EigenBranch {
    std::vector<double> l;
    std::vector<double> lambda0;
    /// Refined sign-change locations of lambda0(l).
    std::vector<double> roots;
    /// Number of continuation steps re-seeded from collocation after a jump.
    int reseeds = 0;
};

/// Continuation of lambda0(l) on [l_min, l_max] with the given step, then root refinement.
EigenBranch branch_trace(double l_min, double l_max, double step, int m = 2);

/// lambda0 at l, continued along the branch from a nearby root-free sample.
double branch_value(double l, double lambda_guess, int m = 2);

/// Boundary-layer approximation of lambda0(l) for large l.
struct BlEigenApprox {
    double l = 0.0;
    /// V(z) = c3 - e^(-b s) [c1 cos(a s) + c2 sin(a s)] with s = l^(4/3) - z the distance from the
    /// wall, b = 2^(-5/3), a = sqrt(3) b. V(0) = 1 and V = V' = 0 at the wall.
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double b = 0.0, a = 0.0;
    double lambda0 = 0.0;
    /// Envelope and oscillation rates of lambda0 ~ l^(2/3) e^(-dhat l^(4/3)) cos(bhat l^(4/3)).
    double d_hat = 0.0, b_hat = 0.0;

    /// k-th derivative of V at z.
    double V(double z, int k = 0) const;
};

BlEigenApprox bl_eigenvalue_approx(double l);

std::string to_string(Parity p);

}  // namespace reglab
