#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "reglab/errors.hpp"

namespace reglab {

template <class Scalar>
using StateVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Sampled solution of an initial value problem.
template <class Scalar = double>
struct OdeTrajectory {
    std::vector<double> x;
    std::vector<StateVector<Scalar>> y;
    /// Largest accepted per-step error estimate, in units of the requested tolerance.
    double max_error_ratio = 0.0;
    int accepted = 0;
    int rejected = 0;
    /// True when the stop predicate ended the integration before the span end.
    bool stopped = false;

    const StateVector<Scalar>& back() const { return y.back(); }
};

template <class Scalar = double>
struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    /// Initial step; 0 picks one from the span.
    double h0 = 0.0;
    double h_max = 0.0;
    /// Positive value switches to fixed steps of this size (no error control).
    double fixed_step = 0.0;
    long max_steps = 2'000'000;
    /// Record every accepted step; otherwise only the span ends and output points.
    bool record_steps = true;
    /// Abscissae the integrator must land on and record.
    std::vector<double> output_points;
    /// Returning true ends the integration after the current step.
    std::function<bool(double, const StateVector<Scalar>&)> stop;
};

/// Dormand-Prince 5(4) with local extrapolation. The error estimate of every
/// accepted step satisfies |err_i| <= atol + rtol * |y_i| componentwise.
template <class Scalar, class Rhs>
OdeTrajectory<Scalar> integrate_ode(Rhs&& rhs, const StateVector<Scalar>& y0, double x0, double x1,
                                    const OdeOptions<Scalar>& opt = {}) {
    using Vec = StateVector<Scalar>;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeTrajectory<Scalar> out;
    out.x.push_back(x0);
    out.y.push_back(y0);
    if (x1 == x0) return out;
    const double dir = x1 > x0 ? 1.0 : -1.0;
    const double span = std::abs(x1 - x0);
    const double h_max = opt.h_max > 0 ? opt.h_max : span;

    std::vector<double> targets = opt.output_points;
    std::sort(targets.begin(), targets.end(), [dir](double a, double b) { return dir * a < dir * b; });
    std::size_t next_target = 0;
    while (next_target < targets.size() && dir * (targets[next_target] - x0) <= 0) ++next_target;

    double x = x0;
    Vec y = y0;
    Vec k1 = rhs(x, y);
    double h = opt.fixed_step > 0 ? opt.fixed_step : (opt.h0 > 0 ? opt.h0 : std::min(h_max, span * 1e-3));
    double err_prev = 1e-4;
    long steps = 0;

    while (dir * (x1 - x) > 0) {
        if (++steps > opt.max_steps) throw OdeError("ODE step budget exhausted", x);
        double x_stop = x1;
        bool to_target = false;
        if (next_target < targets.size() && dir * (targets[next_target] - x1) < 0) {
            x_stop = targets[next_target];
            to_target = true;
        }
        const double h_trial = std::min(h, h_max);
        double hs = std::min(h_trial, std::abs(x_stop - x));
        bool lands = hs >= std::abs(x_stop - x) * (1 - 1e-13);
        if (!lands && std::abs(x_stop - x) - hs < 1e-3 * hs) {
            hs = 0.5 * std::abs(x_stop - x);  // avoid a sliver step
        }
        const double hh = dir * hs;
        if (hs < 1e-14 * std::max(1.0, std::abs(x))) throw OdeError("ODE step size underflow", x);

        const Vec k2 = rhs(x + c2 * hh, (y + hh * (a21 * k1)).eval());
        const Vec k3 = rhs(x + c3 * hh, (y + hh * (a31 * k1 + a32 * k2)).eval());
        const Vec k4 = rhs(x + c4 * hh, (y + hh * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
        const Vec k5 = rhs(x + c5 * hh, (y + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
        const Vec k6 = rhs(x + hh, (y + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
        const Vec y_new = y + hh * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec k7 = rhs(x + hh, y_new);

        double ratio = 0.0;
        if (opt.fixed_step <= 0) {
            const Vec err = hh * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                ratio = std::max(ratio, std::abs(err[i]) / sc);
            }
            if (!std::isfinite(ratio)) {
                h = 0.25 * hs;
                ++out.rejected;
                continue;
            }
            if (ratio > 1.0) {
                h = hs * std::max(0.2, 0.9 * std::pow(ratio, -0.2));
                ++out.rejected;
                continue;
            }
        }
        if (!y_new.allFinite()) throw OdeError("non-finite ODE state", x);

        const bool landed = hs >= std::abs(x_stop - x) * (1 - 1e-13);
        x = landed ? x_stop : x + hh;
        y = y_new;
        k1 = k7;
        ++out.accepted;
        out.max_error_ratio = std::max(out.max_error_ratio, ratio);
        const bool at_target = landed && to_target;
        if (at_target) ++next_target;
        if (opt.record_steps || at_target || dir * (x1 - x) <= 0) {
            out.x.push_back(x);
            out.y.push_back(y);
        }
        if (opt.stop && opt.stop(x, y)) {
            out.stopped = true;
            if (out.x.back() != x) {
                out.x.push_back(x);
                out.y.push_back(y);
            }
            break;
        }
        if (opt.fixed_step > 0) {
            h = opt.fixed_step;
        } else {
            // PI step control
            const double r = std::max(ratio, 1e-10);
            double fac = 0.9 * std::pow(r, -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
            fac = std::clamp(fac, 0.2, 5.0);
            err_prev = r;
            h = hs * fac;
            if (landed) h = std::max(h, std::min(h_trial, 5.0 * hs));
        }
    }
    return out;
}

/// Convenience overload for plain double states.
template <class Rhs>
OdeTrajectory<double> integrate_ode(Rhs&& rhs, const StateVector<double>& y0, double x0, double x1, double tol) {
    OdeOptions<double> opt;
    opt.rtol = tol;
    opt.atol = tol;
    return integrate_ode<double>(std::forward<Rhs>(rhs), y0, x0, x1, opt);
}

}  // namespace reglab
