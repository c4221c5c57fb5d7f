#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reglab/kernels.hpp"

namespace reglab {

enum class BoundaryKind { constant, power_log, sqrt_log, single_log, tabulated };

/// Slowly growing factor phi(tau) of the boundary R(t) = (-t)^e phi(tau), tau = -ln(-t).
///   constant:   phi = l
///   power_log:  phi = C (ln tau)^gamma
///   sqrt_log:   phi = C sqrt(ln tau)
///   single_log: phi = C tau^gamma, i.e. a power of |ln(-t)| itself (right-hand dispersion boundary)
///   tabulated:  cubic interpolation in ln tau of sampled values
/// The domain starts at tau0 = e, so ln tau >= 1.
struct BoundaryFunction {
    BoundaryKind kind = BoundaryKind::constant;
    double C = 1.0;
    double gamma = 0.0;
    std::vector<double> log_tau;
    std::vector<double> values;
    /// Interpolation slopes d phi / d ln tau at the samples.
    std::vector<double> slopes;

    static BoundaryFunction constant(double l);
    static BoundaryFunction power_log(double C, double gamma);
    static BoundaryFunction petrovskii_sqrt_log(double C);
    static BoundaryFunction single_log(double C, double gamma);
    /// tau must be increasing with tau.front() >= e; values positive.
    static BoundaryFunction tabulated(const std::vector<double>& tau, const std::vector<double>& values);

    double operator()(double tau) const;
    /// phi as a function of s = ln tau (no overflow for the log families).
    double at_log(double s) const;
    /// Largest ln tau on which phi is defined (infinite except for tables).
    double max_log_tau() const;
    bool is_constant() const { return kind == BoundaryKind::constant; }
    std::string describe() const;
};

struct SlowGrowthReport {
    bool grows_unboundedly = false;
    bool derivative_vanishes = false;
    bool log_derivative_vanishes = false;
    /// (phi/phi')' grows without bound.
    bool slow_growth = false;
    /// phi << tau^0.05.
    bool power_domination = false;
    double slow_growth_ratio = 0.0;
    double final_log_slope = 0.0;

    bool all() const {
        return grows_unboundedly && derivative_vanishes && log_derivative_vanishes && slow_growth && power_domination;
    }
};

/// Checks the growth conditions on tau in [10, 1e8] (uniform in ln tau). Reports only.
SlowGrowthReport validate_slow_growth(const BoundaryFunction& phi);

enum class Side { left, right };

/// Leading term of the right-hand side of the first-coefficient equation along the boundary:
///   sign * amplitude * phi^power * e^(-d0 phi^alpha) * cos(b0 phi^alpha + phase)   (b0 > 0),
///   sign * amplitude * phi^power * e^(-d0 phi^alpha)                               (b0 = 0).
/// amplitude > 0; the trigonometric factor carries the sign of oscillatory families.
struct CriterionIntegrand {
    EquationFamily family;
    Side side = Side::right;
    double amplitude = 1.0;
    double phase = 0.0;
    double power = 1.0;
    double d0 = 0.0;
    double b0 = 0.0;
    double alpha = 1.0;
    double sign = 1.0;

    bool oscillatory() const { return b0 > 0; }
    double log_magnitude(double phi) const;
    double trig(double phi) const;
    double operator()(double phi) const;
};

/// Amplitude and phase come from the fitted kernel tail and the wall constants of the layer.
CriterionIntegrand criterion_integrand(const EquationFamily& family, Side side = Side::right);

/// Oscillatory cut-off: phi~ = ((h(b0 phi^alpha + phase) - phase) / b0)^(1/alpha), where h
/// compresses each period of the phase onto the negative arc of the cosine (slope 1/2) and
/// crosses the positive arc with a C^1 smoothstep of width `width`. phi~ >= phi, phi~ is
/// nondecreasing with phi, and b0 phi~^alpha - b0 phi^alpha stays in [0, pi].
struct CutoffBoundary {
    BoundaryFunction base;
    double b0 = 0.0;
    double d0 = 0.0;
    double alpha = 1.0;
    double phase = 0.0;
    double width = 0.0;
    /// Set for non-oscillatory families: phi~ = phi.
    bool identity = false;
    std::string notice;

    /// The phase map h.
    double map_phase(double theta) const;
    double transform(double phi) const;
    double operator()(double tau) const { return transform(base(tau)); }
    double at_log(double s) const { return transform(base.at_log(s)); }
};

inline constexpr double kDefaultCutoffWidth = 3.14159265358979323846 / 20;

CutoffBoundary apply_cutoff(const BoundaryFunction& phi, const KernelConstants& kc, double width = kDefaultCutoffWidth);

/// Partial integral over one dyadic window, stored as mantissa * e^log_scale.
struct WindowIntegral {
    double lo = 0.0, hi = 0.0;
    double log_scale = 0.0;
    double mantissa = 0.0;

    double value() const;
    /// ln |value|, -inf for an exact zero.
    double log_abs() const;
    int sign() const { return mantissa > 0 ? 1 : (mantissa < 0 ? -1 : 0); }
};

enum class TailBehaviour { convergent, divergent, divergent_oscillatory, insufficient };

struct TailDiagnosis {
    std::vector<WindowIntegral> windows;
    TailBehaviour behaviour = TailBehaviour::insufficient;
    /// Fitted per-window ratio of |partial integrals| over the last six windows.
    double ratio = 0.0;
    double log_ratio = 0.0;
    bool sign_alternating = false;
    int final_sign = 0;
    /// "ln tau" or "tau".
    std::string variable;
};

/// Integrand in a window variable w: sign * e^log_weight(w) * cos(phase(w)) (or without the
/// cosine), where log_weight includes the Jacobian d tau / d w.
struct TailIntegrand {
    std::function<double(double)> log_weight;
    std::function<double(double)> phase;
    bool oscillatory = false;
    double sign = 1.0;
};

/// Partial integrals over [2^j, 2^(j+1)], j = j_lo .. j_hi, clipped at w_max, and the tail rule:
/// ratio < 0.9 over the last six windows -> convergent; otherwise one sign -> divergent,
/// mixed signs -> divergent-oscillatory.
TailDiagnosis diagnose_tail(const TailIntegrand& f, int j_lo, int j_hi, double w_max = 1e300,
                            std::string variable = "ln tau");

enum class Verdict { regular, irregular_nonsingular, irregular_singular, indeterminate };
enum class Rationale { analytic_family, numeric_tail, delegated_spectral };

std::string to_string(Verdict v);
std::string to_string(Rationale r);
std::string to_string(TailBehaviour b);

struct CriterionVerdict {
    Verdict verdict = Verdict::indeterminate;
    Rationale rationale = Rationale::numeric_tail;
    TailDiagnosis tail;
    /// Exponent of the tail integrand in the window variable (analytic families), NaN otherwise.
    double tail_exponent = 0.0;
    /// Threshold quantity d0 C^alpha of critical log families, NaN otherwise.
    double envelope_exponent = 0.0;
    /// Top eigenvalue for constant boundaries of parabolic families.
    std::optional<double> lambda0;
    /// Heat only: verdict of the rho-form integral.
    std::optional<Verdict> petrovskii_form;
    std::vector<std::string> notes;
};

CriterionVerdict classify_biharmonic(const BoundaryFunction& phi, const KernelConstants& kc);
CriterionVerdict classify_biharmonic(const CutoffBoundary& phi, const KernelConstants& kc);

CriterionVerdict classify_heat(const BoundaryFunction& phi);
/// Classic form: the integral of rho(h) sqrt|ln rho(h)| / h near h = 0 diverges iff regular,
/// with rho(h) = e^(-phi(tau)^2/4), h = e^(-tau). Numeric tail only.
CriterionVerdict classify_heat_petrovskii(const BoundaryFunction& phi);
/// ln rho(h) for the boundary above, h in (0, 1/e].
double petrovskii_log_rho(const BoundaryFunction& phi, double h);

/// On the right, power_log(C, gamma) is read as the single-log boundary C tau^gamma.
CriterionVerdict classify_dispersion(Side side, const BoundaryFunction& phi);
CriterionVerdict classify_dispersion(Side side, const CutoffBoundary& phi);

CriterionVerdict classify_polyharmonic(int m, const BoundaryFunction& phi);
CriterionVerdict classify_polyharmonic(int m, const CutoffBoundary& phi);

enum class A0Model { biharmonic, heat, pme4, pme4_reduced, beam4 };

std::string to_string(A0Model m);

struct A0Options {
    double a0_init = 1.0;
    int samples = 400;
    double rtol = 1e-9;
    /// beam4: gain and phase of phi^(28/13) cos(phi^2/4 + phase).
    double beam_gain = 1.0;
    double beam_phase = 0.0;
};

/// Trace of the first Fourier coefficient against s = ln tau.
struct A0Trace {
    A0Model model = A0Model::heat;
    std::vector<double> log_tau;
    std::vector<double> log_a0;
    bool hit_zero = false;
    /// Fit ln a0 = ln K + p ln ln tau over the second half of the trace (in ln ln tau).
    double fit_power = 0.0;
    double fit_amplitude = 0.0;
};

struct LogPowerFit {
    double power = 0.0;
    double amplitude = 0.0;
};

/// Least-squares fit of ln a0 against ln ln tau over ln tau in [s_lo, s_hi].
LogPowerFit fit_log_power(const A0Trace& trace, double s_lo, double s_hi);

/// Integrates the first-coefficient equation over ln tau in [log_tau_lo, log_tau_hi]:
///   biharmonic    (ln a0)' = g2 phi F(phi) + g1 phi^(2/3) F'(phi)
///   heat          (ln a0)' = -(g1 / 2 sqrt(pi)) phi e^(-phi^2/4)
///   pme4          a0' = g2 sqrt(a0) phi F(y) + g1 a0^(2/3) phi^(2/3) F'(y), y = phi / sqrt(a0)
///   pme4_reduced  a0' = -e^(-d0 y^(4/3))
///   beam4         (ln a0)' = gain phi^(28/13) cos(phi^2/4 + phase)
/// (' = d/dtau). pme4 models stop with hit_zero when a0 vanishes.
A0Trace integrate_a0(A0Model model, const BoundaryFunction& phi, double log_tau_lo, double log_tau_hi,
                     const A0Options& opt = {});
A0Trace integrate_a0(A0Model model, const CutoffBoundary& phi, double log_tau_lo, double log_tau_hi,
                     const A0Options& opt = {});

struct Pme4Outcome {
    /// a0 -> 0 along the boundary (regular).
    bool tends_to_zero = false;
    /// d ln a0 / d ln ln tau over the last decade of ln tau.
    double final_slope = 0.0;
    double final_a0 = 0.0;
    A0Trace trace;
};

/// Integrates the reduced porous-medium model up to ln tau = log_tau_end.
Pme4Outcome pme4_reduced_outcome(const BoundaryFunction& phi, double log_tau_end = 2000.0, double a0_init = 1.0);

struct Pme4Critical {
    /// R(t) = C (-t)^(1/4) [ln|ln(-t)|]^exponent.
    double exponent = 0.75;
    std::string form;
    std::string explanation;
};

Pme4Critical pme4_critical();

}  // namespace reglab
