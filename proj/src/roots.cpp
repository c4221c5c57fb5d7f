#include "reglab/roots.hpp"

#include <cmath>
#include <utility>

#include "reglab/errors.hpp"

namespace reglab {

RootResult find_root(const std::function<double(double)>& f, double lo, double hi, double tol, int max_iter) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, 0.0, 0.0, 0};
    if (fb == 0.0) return {b, 0.0, 0.0, 0};
    if ((fa > 0) == (fb > 0)) throw NoSignChange(lo, hi, fa, fb);
    if (std::abs(fa) < std::abs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, d = b - a;
    bool bisected = true;
    for (int it = 1; it <= max_iter; ++it) {
        double s;
        if (fa != fc && fb != fc) {
            s = a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);
        }
        const double lo_s = (3 * a + b) / 4;
        const bool outside = !((s > std::min(lo_s, b)) && (s < std::max(lo_s, b)));
        const bool slow = bisected ? std::abs(s - b) >= std::abs(b - c) / 2 : std::abs(s - b) >= std::abs(c - d) / 2;
        const bool tiny = bisected ? std::abs(b - c) < tol : std::abs(c - d) < tol;
        if (outside || slow || tiny) {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        const double fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if ((fa > 0) != (fs > 0)) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if (std::abs(fa) < std::abs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
        if (fb == 0.0 || std::abs(b - a) <= tol) return {b, fb, std::abs(b - a), it};
    }
    throw RootNotConverged(b, std::abs(b - a));
}

bool scan_bracket(const std::function<double(double)>& f, double lo, double hi, int n, bool from_top,
                  double& b_lo, double& b_hi) {
    const double h = (hi - lo) / n;
    double x_prev = from_top ? hi : lo;
    double f_prev = f(x_prev);
    for (int i = 1; i <= n; ++i) {
        const double x = from_top ? hi - i * h : lo + i * h;
        const double fx = f(x);
        if ((fx > 0) != (f_prev > 0) || fx == 0.0) {
            b_lo = std::min(x, x_prev);
            b_hi = std::max(x, x_prev);
            return true;
        }
        x_prev = x;
        f_prev = fx;
    }
    return false;
}

}  // namespace reglab
