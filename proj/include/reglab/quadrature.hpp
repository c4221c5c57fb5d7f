#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "reglab/errors.hpp"

namespace reglab {

template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
/// Gauss weights for the odd-indexed Kronrod nodes (1,3,5,7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
    return v.size() ? static_cast<double>(v.cwiseAbs().maxCoeff()) : 0.0;
}

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    double absint;
    bool operator<(const Panel& o) const { return error < o.error; }
};

/// Gauss-Kronrod 7/15 on one panel, with the QUADPACK error scaling.
template <class T, class F>
Panel<T> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<T, 15> fv;
    fv[14] = f(c);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kKronrodNodes[i];
        fv[2 * i] = f(c - dx);
        fv[2 * i + 1] = f(c + dx);
    }
    T kron = fv[14] * kKronrodWeights[7];
    T gauss = fv[14] * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const T s = fv[2 * i] + fv[2 * i + 1];
        kron += s * kKronrodWeights[i];
        if (i % 2 == 1) gauss += s * kGaussWeights[i / 2];
    }
    const T mean = kron * 0.5;
    double asc = kKronrodWeights[7] * magnitude(fv[14] - mean);
    for (int i = 0; i < 7; ++i)
        asc += kKronrodWeights[i] * (magnitude(fv[2 * i] - mean) + magnitude(fv[2 * i + 1] - mean));
    kron *= h;
    gauss *= h;
    asc *= std::abs(h);
    double err = magnitude(kron - gauss);
    if (asc > 0 && err > 0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    double absint = kKronrodWeights[7] * magnitude(fv[14]);
    for (int i = 0; i < 7; ++i) absint += kKronrodWeights[i] * (magnitude(fv[2 * i]) + magnitude(fv[2 * i + 1]));
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * absint * std::abs(h));
    if (!std::isfinite(magnitude(kron))) err = std::numeric_limits<double>::infinity();
    return {a, b, kron, err, absint * std::abs(h)};
}

}  // namespace detail

namespace detail {

template <class T, class F>
QuadratureResult<T> adaptive_finite(F& f, double a, double b, double tol, int max_panels);

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature of f over [a, b].
/// b may be +infinity, in which case x = a + t/(1-t) maps the range onto [0, 1).
/// Throws QuadratureError (with best estimate and bound) after max_panels subdivisions.
template <class F, class T = std::invoke_result_t<F&, double>>
QuadratureResult<T> adaptive_quadrature(F&& f, double a, double b, double tol, int max_panels = 4000) {
    if (!(tol > 0)) throw DomainError("quadrature tolerance must be positive");
    if (std::isinf(b)) {
        const T zero = f(a) * 0.0;
        auto g = [&](double t) -> T {
            const double u = 1.0 - t;
            if (u <= 0) return zero;
            return f(a + t / u) * (1.0 / (u * u));
        };
        return detail::adaptive_finite<T>(g, 0.0, 1.0, tol, max_panels);
    }
    return detail::adaptive_finite<T>(f, a, b, tol, max_panels);
}

template <class T, class F>
QuadratureResult<T> detail::adaptive_finite(F& f, double a, double b, double tol, int max_panels) {
    if (a == b) return {f(a) * 0.0, 0.0, 1};
    std::priority_queue<detail::Panel<T>> heap;
    auto first = detail::gk15<T>(f, a, b);
    T total = first.value;
    double err = first.error;
    double absint = first.absint;
    heap.push(first);
    int evals = 15;
    // tolerances below the rounding level of the summed panels cannot be met
    auto target = [&] { return std::max(tol, 100.0 * std::numeric_limits<double>::epsilon() * absint); };
    while (err > target()) {
        if (static_cast<int>(heap.size()) >= max_panels) {
            throw QuadratureError("adaptive quadrature: subdivision budget exhausted", detail::magnitude(total), err);
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
            throw QuadratureError("adaptive quadrature: panel below resolution", detail::magnitude(total), err);
        }
        auto left = detail::gk15<T>(f, worst.a, mid);
        auto right = detail::gk15<T>(f, mid, worst.b);
        evals += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        absint += left.absint + right.absint - worst.absint;
        heap.push(left);
        heap.push(right);
        if (err <= target()) {
            // recompute from scratch to shed accumulated rounding in the running sums
            T s = first.value * 0.0;
            double e = 0;
            auto copy = heap;
            while (!copy.empty()) {
                s += copy.top().value;
                e += copy.top().error;
                copy.pop();
            }
            total = s;
            err = e;
        }
    }
    return {total, err, evals};
}

/// Semi-infinite quadrature truncated where a known decreasing envelope of |f| drops
/// below tol/100; the cut point is found by doubling the distance from a.
template <class F, class E, class T = std::invoke_result_t<F&, double>>
QuadratureResult<T> envelope_quadrature(F&& f, double a, E&& envelope, double tol, int max_panels = 4000) {
    double step = 1.0;
    double b = a + step;
    while (envelope(b) > tol / 100.0) {
        step *= 2.0;
        b = a + step;
        if (step > 1e12) throw QuadratureError("envelope never falls below tolerance", 0.0, envelope(b));
    }
    return adaptive_quadrature(f, a, b, tol, max_panels);
}

/// Result of sequence extrapolation.
struct Extrapolated {
    double value;
    double error;
};

/// Wynn epsilon algorithm applied to a sequence of partial sums. Returns the deepest
/// even-column entry together with the difference to its predecessor as error proxy.
inline Extrapolated wynn_epsilon(const std::vector<double>& partial) {
    const std::size_t n = partial.size();
    if (n == 0) return {0.0, std::numeric_limits<double>::infinity()};
    if (n < 3) return {partial.back(), n == 2 ? std::abs(partial[1] - partial[0]) : std::numeric_limits<double>::infinity()};
    std::vector<double> prev(n + 1, 0.0), cur(partial.begin(), partial.end());
    double best = partial.back();
    double best_err = std::abs(partial[n - 1] - partial[n - 2]);
    std::vector<double> last_even = cur;
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<double> next(cur.size() - 1);
        bool broke = false;
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double d = cur[i + 1] - cur[i];
            if (d == 0.0 || !std::isfinite(d)) {
                broke = true;
                break;
            }
            next[i] = (k == 1 ? 0.0 : prev[i + 1]) + 1.0 / d;
        }
        if (broke) break;
        prev = cur;
        cur = next;
        if (k % 2 == 0 && cur.size() >= 2) {
            const double est = cur.back();
            const double e = std::abs(cur.back() - cur[cur.size() - 2]);
            if (std::isfinite(est) && e < best_err) {
                best = est;
                best_err = e;
            }
        }
        if (cur.size() < 2) break;
    }
    return {best, best_err};
}

/// Sum of integrals over consecutive sub-intervals [x_i, x_{i+1}] (typically the zeros of
/// an oscillatory factor), accelerated by Wynn epsilon. next_point(i) returns x_i.
/// Stops when the extrapolated value is stable to tol on two consecutive steps.
template <class F, class Z>
QuadratureResult<double> oscillatory_quadrature(F&& f, Z&& next_point, double tol, int max_terms = 400) {
    std::vector<double> partial;
    double sum = 0.0;
    double prev_est = std::numeric_limits<double>::quiet_NaN();
    int stable = 0;
    int evals = 0;
    double x0 = next_point(0);
    for (int i = 0; i < max_terms; ++i) {
        const double x1 = next_point(i + 1);
        auto r = adaptive_quadrature(f, x0, x1, tol * 1e-2);
        evals += r.evaluations;
        sum += r.value;
        partial.push_back(sum);
        x0 = x1;
        if (partial.size() >= 6) {
            const auto ex = wynn_epsilon(partial);
            if (std::isfinite(prev_est) && std::abs(ex.value - prev_est) < tol && ex.error < tol) {
                if (++stable >= 2) return {ex.value, std::max(ex.error, std::abs(ex.value - prev_est)), evals};
            } else {
                stable = 0;
            }
            prev_est = ex.value;
        }
    }
    const auto ex = wynn_epsilon(partial);
    throw QuadratureError("oscillatory quadrature: extrapolation did not settle", ex.value, ex.error);
}

}  // namespace reglab
