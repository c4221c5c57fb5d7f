#include "reglab/rational.hpp"

#include <numeric>
#include <ostream>

#include "reglab/errors.hpp"

namespace reglab {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("rational multiply overflow");
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("rational add overflow");
    return r;
}

}  // namespace

Rational::Rational(std::int64_t num) : num_(num), den_(1) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    if (den < 0) {
        num = checked_mul(num, -1);
        den = checked_mul(den, -1);
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

std::string Rational::str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const { return Rational(checked_mul(num_, -1), den_); }

Rational& Rational::operator+=(const Rational& o) {
    // lcm-based to keep intermediates small
    const std::int64_t g = std::gcd(den_, o.den_);
    const std::int64_t lhs = checked_mul(num_, o.den_ / g);
    const std::int64_t rhs = checked_mul(o.num_, den_ / g);
    *this = Rational(checked_add(lhs, rhs), checked_mul(den_, o.den_ / g));
    return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
    const std::int64_t g1 = std::gcd(num_, o.den_);
    const std::int64_t g2 = std::gcd(o.num_, den_);
    const std::int64_t n = checked_mul(num_ / (g1 ? g1 : 1), o.num_ / (g2 ? g2 : 1));
    const std::int64_t d = checked_mul(den_ / (g2 ? g2 : 1), o.den_ / (g1 ? g1 : 1));
    *this = Rational(n, d);
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw DomainError("rational division by zero");
    return *this *= Rational(o.den_, o.num_);
}

bool operator<(const Rational& a, const Rational& b) { return (a - b).num() < 0; }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

std::int64_t factorial(int n) {
    if (n < 0) throw DomainError("factorial of a negative number");
    std::int64_t r = 1;
    for (int i = 2; i <= n; ++i) r = checked_mul(r, i);
    return r;
}

}  // namespace reglab
