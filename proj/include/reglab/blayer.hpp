#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "reglab/kernels.hpp"

namespace reglab {

enum class LayerKind { parabolic, dispersion3, pme4 };

/// Stationary wall-layer equation of a family, written for g(xi) with the wall at xi = 0:
///   parabolic(m):  (-1)^(m+1) g^(2m) + g'/(2m) = 0, g = ... = g^(m-1) = 0 at the wall,
///   dispersion3:   g''' - g'/3 = 0, g = 0 at the wall,
///   pme4:          -(g^3)'''' + g'/4 = 0, g^3 and (g^3)' vanish at the wall,
/// and g -> 1 as xi -> infinity.
struct LayerFamily {
    LayerKind kind = LayerKind::parabolic;
    int m = 2;

    static LayerFamily parabolic(int m);
    static LayerFamily heat() { return parabolic(1); }
    static LayerFamily biharmonic() { return parabolic(2); }
    static LayerFamily dispersion3() { return {LayerKind::dispersion3, 3}; }
    static LayerFamily pme4() { return {LayerKind::pme4, 2}; }
    static LayerFamily from(const EquationFamily& f);

    /// Order of the once-integrated equation for e = g - 1 (G - 1 for pme4).
    int integrated_order() const;
    /// Number of derivatives pinned to zero at the wall, counting the value itself.
    int wall_conditions() const;
    std::string name() const;
    bool operator==(const LayerFamily&) const = default;
};

enum class ProfileSource { closed_form, bvp };

struct BoundaryLayerProfile {
    LayerFamily family;
    ProfileSource source = ProfileSource::closed_form;
    Eigen::VectorXd xi;
    /// Profile g (for pme4 the unknown G = g^3) and its first derivative on xi.
    Eigen::VectorXd g, dg;
    /// Wall derivatives g^(k)(0), k = 0 .. integrated order.
    Eigen::VectorXd wall;
    /// First two non-vanishing wall derivatives: g''(0), g'''(0) for biharmonic and pme4,
    /// g'(0), g''(0) for the heat and dispersion layers.
    double gamma1 = 0.0, gamma2 = 0.0;
    double far_field = 1.0;
    double truncation = 0.0;
    /// Samples g(j h), j = 0 .. 14, with h = wall_step, for finite-difference wall constants.
    double wall_step = 0.0;
    Eigen::VectorXd wall_samples;

    /// Cubic Hermite interpolation of the samples (exact evaluation for closed forms).
    double operator()(double s) const;
    /// Number of local maxima with g - 1 above the threshold.
    int overshoots(double threshold = 1e-2) const;
    /// Number of sign changes of g - 1 where |g - 1| exceeds the threshold.
    int far_field_crossings(double threshold = 1e-8) const;
};

/// Roots of the characteristic polynomial of the (differentiated) linear layer operator,
/// including the zero root of parabolic and dispersion layers.
std::vector<std::complex<double>> characteristic_roots(const LayerFamily& f);

/// k-th derivative of the closed-form profile of a linear family, built from the decaying modes.
double closed_form_value(const LayerFamily& f, double s, int k = 0);

BoundaryLayerProfile closed_form_profile(const LayerFamily& f, double L = 30.0, int samples = 601);
/// g0 = 1 - e^(-xi/2^(5/3)) [cos(sqrt3 xi/2^(5/3)) + sin(sqrt3 xi/2^(5/3))/sqrt3].
BoundaryLayerProfile biharmonic_profile(double L = 30.0, int samples = 601);
/// g0 = 1 - e^(-xi/2).
BoundaryLayerProfile heat_profile(double L = 30.0, int samples = 601);
/// g0 = 1 - e^(-xi/sqrt3).
BoundaryLayerProfile dispersion_profile(double L = 30.0, int samples = 601);

/// Shooting from the wall with the free wall derivatives as unknowns, matched to the
/// decaying far field at L. Linear families march with periodic removal of the growing
/// modes; pme4 starts from the wall series G ~ c xi^2/2 - xi^3/24 at xi = 1e-4.
BoundaryLayerProfile solve_bl_bvp(const LayerFamily& f, double L = 30.0, double tol = 1e-12, int samples = 601);

struct WallConstants {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
};

/// Exact for closed forms; one-sided finite differences with Richardson extrapolation
/// on the wall samples otherwise.
WallConstants wall_constants(const BoundaryLayerProfile& p);

/// One-sided finite-difference estimate of f^(k)(0) from f(j h), j = 0..n-1,
/// Richardson-extrapolated between steps h and 2h.
double richardson_wall_derivative(const Eigen::VectorXd& samples, double h, int k);

}  // namespace reglab
