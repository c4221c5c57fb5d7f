#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "reglab/rational.hpp"

namespace reglab {

/// Univariate polynomial with exact rational coefficients, index = degree.
/// Trailing zeros are trimmed, so the leading coefficient is nonzero unless the
/// polynomial is zero (degree 0, single zero coefficient).
class Polynomial {
public:
    Polynomial() : c_{Rational(0)} {}
    Polynomial(std::initializer_list<Rational> coeffs);
    explicit Polynomial(std::vector<Rational> coeffs);

    /// c * y^k
    static Polynomial monomial(int k, Rational c = Rational(1));

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.size() == 1 && c_[0].is_zero(); }
    const Rational& operator[](int k) const;
    const std::vector<Rational>& coefficients() const { return c_; }

    Polynomial derivative(int order = 1) const;
    /// multiply by y^p
    Polynomial shift(int p) const;

    Rational operator()(const Rational& y) const;
    double operator()(double y) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Rational& s);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
    friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

    std::string str(const char* var = "y") const;

private:
    void trim();
    std::vector<Rational> c_;
};

}  // namespace reglab
