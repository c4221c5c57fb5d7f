#pragma once

#include <stdexcept>
#include <string>

namespace reglab {

/// Base class for every numerical failure raised by the library.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of subdivisions.
/// Carries the best estimate reached and its error bound.
class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double estimate, double bound)
        : NumericalError(what), estimate_(estimate), bound_(bound) {}
    double estimate() const { return estimate_; }
    double bound() const { return bound_; }

private:
    double estimate_;
    double bound_;
};

/// Step size underflow or non-finite state inside the ODE integrator.
class OdeError : public NumericalError {
public:
    OdeError(const std::string& what, double last_x)
        : NumericalError(what), last_x_(last_x) {}
    double last_abscissa() const { return last_x_; }

private:
    double last_x_;
};

/// Root finder called on a bracket without a sign change.
class NoSignChange : public NumericalError {
public:
    NoSignChange(double lo, double hi, double f_lo, double f_hi)
        : NumericalError("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "]: f = " + std::to_string(f_lo) + ", " + std::to_string(f_hi)),
          lo_(lo), hi_(hi) {}
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    double lo_, hi_;
};

/// Root finder exhausted its iteration budget.
class RootNotConverged : public NumericalError {
public:
    RootNotConverged(double best, double width)
        : NumericalError("root iteration did not converge; bracket width " + std::to_string(width)),
          best_(best), width_(width) {}
    double best() const { return best_; }
    double width() const { return width_; }

private:
    double best_, width_;
};

/// Dense eigensolver failure. index is the first eigenvalue that did not converge
/// (or the matrix size when the solver does not say).
class EigenError : public NumericalError {
public:
    EigenError(const std::string& what, long index) : NumericalError(what), index_(index) {}
    long index() const { return index_; }

private:
    long index_;
};

/// Invalid argument or configuration.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exact arithmetic overflowed its 64-bit representation.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

}  // namespace reglab
