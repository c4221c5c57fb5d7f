#pragma once

#include <functional>

namespace reglab {

struct RootResult {
    double x;
    double f;
    double width;
    int iterations;
};

/// Brent's method (bisection / secant / inverse quadratic hybrid) on [lo, hi].
/// Throws NoSignChange when f(lo) and f(hi) share a sign, RootNotConverged when
/// the bracket is still wider than tol after max_iter iterations.
RootResult find_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                     int max_iter = 200);

/// Scans [lo, hi] in n equal steps and returns the first bracket with a sign change,
/// searching from hi downwards when from_top is set. Returns false if none is found.
bool scan_bracket(const std::function<double(double)>& f, double lo, double hi, int n, bool from_top,
                  double& b_lo, double& b_hi);

}  // namespace reglab
