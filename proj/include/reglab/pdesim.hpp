#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "reglab/criteria.hpp"
#include "reglab/errors.hpp"

namespace reglab {

/// Time stepping gave up: step size underflow or a non-finite state.
class SimulationError : public NumericalError {
public:
    SimulationError(const std::string& what, double last_tau) : NumericalError(what), last_tau_(last_tau) {}
    /// Last tau at which the state was accepted.
    double last_tau() const { return last_tau_; }

private:
    double last_tau_;
};

enum class SimFamily { heat, biharmonic };

std::string to_string(SimFamily f);
EquationFamily equation_family(SimFamily f);

enum class InitialKind { polynomial, bump, random_smooth };

/// Initial profile on the fixed grid z in [-1, 1], multiplied by (1 - z^2)^m so that the
/// wall conditions hold (m = 1 heat, m = 2 biharmonic). Scaled to unit sup-norm.
///   polynomial:    1
///   bump:          e^(-((z - center)/width)^2)
///   random_smooth: sum_k (a_k cos(k pi z / 2) + b_k sin(k pi z / 2)) / (1 + k)^2, k < modes,
///                  with standard normal a_k, b_k from a seeded generator
struct InitialData {
    InitialKind kind = InitialKind::bump;
    double center = 0.0;
    double width = 0.5;
    unsigned seed = 0;
    int modes = 8;

    static InitialData polynomial() { return {InitialKind::polynomial}; }
    static InitialData bump(double center = 0.0, double width = 0.5) { return {InitialKind::bump, center, width}; }
    static InitialData random_smooth(unsigned seed, int modes = 8) {
        return {InitialKind::random_smooth, 0.0, 0.5, seed, modes};
    }

    Eigen::VectorXd sample(SimFamily family, const Eigen::VectorXd& z) const;
    std::string describe() const;
};

using SimBoundary = std::variant<BoundaryFunction, CutoffBoundary>;

/// Rescaled problem in the fixed variable z = y / phi(tau):
///   biharmonic  w_tau = -phi^-4 w_zzzz + (phi'/phi - 1/4) z w_z,  w = w_z = 0 at z = +-1
///   heat        w_tau =  phi^-2 w_zz   + (phi'/phi - 1/2) z w_z,  w = 0 at z = +-1
struct SimConfig {
    SimFamily family = SimFamily::biharmonic;
    SimBoundary phi = BoundaryFunction::constant(4.0);
    /// Number of grid intervals on [-1, 1] (even, at least 64).
    int n = 256;
    double tau0 = 0.0;
    double tau_end = 100.0;
    InitialData initial;
    /// Local error tolerance relative to the sup-norm.
    double rtol = 1e-4;
    double dt_init = 1e-6;
    double dt_max = 0.5;
    double dt_min = 1e-12;
    /// Trace samples, spaced geometrically in tau - tau0.
    int samples = 400;
    /// Profiles to keep (tau values inside the span).
    std::vector<double> snapshot_taus;
    bool track_a0 = true;
};

struct ProfileSnapshot {
    double tau = 0.0;
    double phi = 0.0;
    Eigen::VectorXd z;
    Eigen::VectorXd w;
    double a0 = 0.0;
};

struct SimResult {
    SimFamily family = SimFamily::biharmonic;
    std::vector<double> tau;
    std::vector<double> phi;
    std::vector<double> sup_norm;
    /// <v, F> over |y| < phi(tau); NaN when not tracked.
    std::vector<double> a0;
    std::vector<ProfileSnapshot> snapshots;
    ProfileSnapshot final_state;
    int steps = 0;
    int rejected = 0;
    /// Heat steps taken with backward Euler to keep nonnegative data nonnegative.
    int positivity_fallbacks = 0;
    /// Fit of ln sup-norm over [tau0 + span/8, tau_end].
    double sigma_fit = 0.0;
};

SimResult simulate(const SimConfig& cfg);

enum class TraceKind { sup_norm, a0 };

/// Least-squares slope of ln|trace| on [tau_a, tau_b]. A sign-changing trace is fitted on the
/// envelope of its local maxima of |trace|.
double fit_rate(const SimResult& r, double tau_a, double tau_b, TraceKind trace = TraceKind::sup_norm);

/// a0 = phi * integral over z in [-1, 1] of w(z) F(phi z) (Simpson), with the family's kernel.
double first_coefficient(SimFamily family, double phi, const Eigen::VectorXd& z, const Eigen::VectorXd& w);

struct BlSnapshotReport {
    double tau = 0.0;
    /// max |w - a0 g0(xi)| / |a0| over xi in [0, xi_max] near z = 1.
    double deviation = 0.0;
    /// |a0| / sup-norm.
    double dominance = 0.0;
    bool inconclusive = false;
    int points = 0;
};

/// Compares the snapshot nearest to tau_star with a0 g0(xi), xi = phi^(2m/(2m-1)) (1 - z).
/// The snapshot must lie within 1e-9 (relative) of tau_star.
BlSnapshotReport bl_snapshot_check(const SimResult& r, double tau_star, double xi_max = 10.0);

struct ExpansionReport {
    /// a_k = <v, psi_k>, k = 0..k_max.
    std::vector<double> coefficients;
    /// max |v - sum a_k psi*_k| / max |v| over |z| <= z_max.
    double deviation = 0.0;
};

ExpansionReport expansion_check(SimFamily family, const ProfileSnapshot& s, int k_max = 6, double z_max = 0.5);

struct P2Run {
    double l = 0.0;
    unsigned seed = 0;
    double sigma = 0.0;
    bool expected_sign = false;
};

struct P2Report {
    std::vector<P2Run> runs;
    bool pass = false;
    /// Traces of runs with the wrong sign.
    std::vector<SimResult> failures;
};

/// l = 4 must decay and l = 5 must grow for every seed (random-smooth data, tau in [0, 400],
/// rate fitted on [50, 400]).
P2Report verify_P2(const std::vector<unsigned>& seeds = {1, 2, 3}, int n = 256);

}  // namespace reglab
