#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "reglab/polynomial.hpp"

namespace reglab {

enum class FamilyTag { parabolic, dispersion3, beam4 };

/// Equation family: u_t = -(-D^2)^m u (parabolic, m = 1 is the heat equation),
/// the third-order dispersion equation u_t = u_xxx, or the beam equation u_tt = -u_xxxx.
struct EquationFamily {
    FamilyTag tag = FamilyTag::parabolic;
    int m = 2;

    static EquationFamily parabolic(int m);
    static EquationFamily heat() { return parabolic(1); }
    static EquationFamily biharmonic() { return parabolic(2); }
    static EquationFamily dispersion3() { return {FamilyTag::dispersion3, 3}; }
    static EquationFamily beam4() { return {FamilyTag::beam4, 2}; }

    /// Power of (-t) in the similarity variable y = x / (-t)^e.
    double rescaling_exponent() const;
    std::string name() const;
    bool operator==(const EquationFamily&) const = default;
};

/// Fitted amplitude pair of the oscillatory tail
/// F ~ y^(-exponent) e^(-d0 y^alpha) [c1 sin(b0 y^alpha) + c2 cos(b0 y^alpha)].
struct AsymptoticFit {
    double c1 = 0.0;
    double c2 = 0.0;
    /// RMS(F - fit) / RMS(F) over the sample points.
    double residual = 0.0;
    /// Algebraic exponent used (fixed for parabolic/dispersion, fitted for the beam).
    double exponent = 0.0;
    double y_lo = 0.0, y_hi = 0.0;
    int samples = 0;

    double amplitude() const;
    /// theta with c1 sin(x) + c2 cos(x) = amplitude * cos(x - theta).
    double phase() const;
};

/// Analytic constants of a kernel family.
struct KernelConstants {
    EquationFamily family;
    int m = 2;
    /// Exponent of the stretched variable y^alpha.
    double alpha = 4.0 / 3.0;
    /// Root of the WKB characteristic equation with maximal negative real part; a = -d0 + i b0.
    std::complex<double> a;
    double d0 = 0.0;
    double b0 = 0.0;
    /// Algebraic prefactor exponent delta0.
    double delta0 = 0.0;
    /// Closed-form normalisation candidate (1/pi for the cosine transform form).
    double alpha0 = 0.0;
    std::optional<AsymptoticFit> fit;

    /// Critical constant C* = d0^(-1/alpha) of the log-power boundary family.
    double critical_constant() const;
    /// Exponent (2m - 1)/(2m) of the critical boundary family.
    double critical_power() const;
};

KernelConstants kernel_constants(const EquationFamily& family);
KernelConstants with_fit(KernelConstants kc, const AsymptoticFit& fit);

/// Rescaled kernel F(y), error at most tol * max(e^(-d0 |y|^alpha), tiny). Normalised so that
/// the integral over the line is one (the normalisation is computed numerically once per family).
double eval_kernel(const EquationFamily& family, double y, double tol = 1e-12);

/// D^j F(y) for j = 0..kmax from the same integral representation (parabolic and dispersion3).
Eigen::VectorXd eval_kernel_derivatives(const EquationFamily& family, double y, int kmax, double tol = 1e-12);

/// Numerically computed integral of the un-normalised representation; for the cosine
/// transform of e^(-s^2m) this equals pi, i.e. alpha0 = 1/pi.
double kernel_normalization(const EquationFamily& family);

/// Two-term asymptotic tail at y > 0 using the fitted amplitudes.
double eval_kernel_asymptotic(const KernelConstants& kc, double y);

/// Least-squares fit of the oscillatory tail on [y_lo, y_hi] (at least 40 samples).
AsymptoticFit kernel_asymptotics_fit(const EquationFamily& family, double y_lo, double y_hi, int samples = 60);

/// Smallest y on a scan of [y_from, y_to] beyond which quadrature and fitted asymptotics agree
/// to `agreement` in absolute value. NaN if never.
double kernel_switch_point(const KernelConstants& kc, double agreement = 1e-6, double y_from = 2.0,
                           double y_to = 20.0);

/// Eigenpair k of the rescaled operator pair {B, B*} of the parabolic family of order m.
struct HermitePair {
    int m = 2;
    int k = 0;
    /// lambda_k = -k / (2m)
    Rational lambda;
    /// Unnormalised adjoint eigenfunction (monic degree-k polynomial).
    Polynomial psi_star_poly;
    /// 1/sqrt(k!): psi*_k = norm * psi_star_poly.
    double norm = 1.0;
    /// k! kept exactly, so norm = 1/sqrt(norm_square_inverse).
    std::int64_t norm_square_inverse = 1;

    double psi_star(double y) const;
    /// psi_k(y) = (-1)^k D^k F(y) / sqrt(k!)
    double psi(double y, double tol = 1e-12) const;
};

HermitePair hermite_pair(int m, int k);

/// Rescaled adjoint operator applied exactly: (-1)^(m+1) D^(2m) p - (1/2m) y p'.
Polynomial apply_adjoint_operator(int m, const Polynomial& p);

struct OrthonormalityReport {
    Eigen::MatrixXd G;
    double max_deviation = 0.0;
};

/// G(k, l) = <psi_k, psi*_l> over the line, k, l <= k_max.
OrthonormalityReport orthonormality_matrix(int m, int k_max, double tol = 1e-10);

/// Polynomial eigenfunctions of the quadratic pencil of the beam equation.
struct PencilPair {
    int k = 0;
    Rational lambda_plus;
    Rational lambda_minus;
    /// Unnormalised (monic) eigenfunction for lambda_plus; normalised by 1/sqrt(k!).
    Polynomial psi_star_poly;
    double norm = 1.0;
};

PencilPair pencil_pair(int k);

/// Pencil operator C*(lambda) p = -p'''' - y^2 p''/4 - 3 y p'/4 - (lambda^2 + lambda) p - lambda y p'.
Polynomial apply_pencil(const Rational& lambda, const Polynomial& p);

/// Polynomial with the coefficients 1/(3^j j!) in front of (y^k)^(4j), as printed in the source
/// literature; kept to document that it does not annihilate the pencil for k >= 4.
Polynomial pencil_printed_polynomial(int k);

/// Characteristic quadratic lambda^2 + (k+1) lambda + k(k-1)/4 + 3k/4 at lambda.
Rational pencil_characteristic(int k, const Rational& lambda);

struct MajorantReport {
    int m = 1;
    /// D*_m = integral of |F|.
    double d_star = 1.0;
    /// Positive zeros of F used for sign splitting.
    std::vector<double> zeros;
    /// Integral of the normalised majorant Fbar = |F| / D*.
    double majorant_mass = 1.0;

    /// max over samples of |F(y)| - d_star * Fbar(y)  (non-positive up to rounding).
    double pointwise_excess(const std::vector<double>& ys) const;
};

MajorantReport majorant_deficiency(int m, double tol = 1e-10);

}  // namespace reglab
